//! Falsification, validation and characterization of qubit quantum
//! channels from input/output correlation statistics.
//!
//! The crate covers the full pipeline: affine Bloch representation of
//! qubit channels and the dihedrally covariant canonical form
//! ([`channel`]), the convex set of binary input/output correlations and
//! its support-function boundary ([`geometry`]), synthetic measurement
//! data with a seeded generator ([`sim`]), constrained maximum-likelihood
//! process tomography ([`estimate`]), and the two device-independent
//! protocols — tomography validation and minimal-area channel
//! characterization ([`protocol`]).

pub mod channel;
pub mod error;
pub mod estimate;
pub mod geometry;
pub mod linalg;
pub mod optim;
pub mod protocol;
pub mod sim;
