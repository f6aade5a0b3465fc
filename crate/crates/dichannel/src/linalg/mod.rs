//! Minimal self-contained linear algebra for qubit-channel work: complex
//! 2x2 / Hermitian 4x4 matrices with Pauli decomposition and a Jacobi
//! eigensolver, plus real 3-space rotations and a signed SVD.

mod complex;
mod real;

pub use complex::{pauli_compose, pauli_expand, CMat2, HMat4, JACOBI_TOL};
pub use real::{rot_exp, signed_svd, Mat3, Rot3, Vec3, ROT_TOL, SVD_TOL};
