//! Qubit channels as affine Bloch maps, the dihedrally covariant
//! canonical form, Choi construction and complete-positivity checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::linalg::{signed_svd, HMat4, Mat3, Rot3, Vec3};

type C = Complex64;

/// Slack on the complete-positivity inequalities and on Choi eigenvalues.
pub const CP_TOL: f64 = 1e-9;

/// Default alignment tolerance for [`QubitChannel::canonicalize`] on exact
/// inputs.
pub const CANON_TOL: f64 = 1e-6;

/// A qubit state as a Bloch vector with norm at most one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState(Vec3);

impl BlochState {
    pub fn try_new(v: Vec3) -> Result<Self, ChannelError> {
        let n = v.norm();
        if n > 1.0 + 1e-12 {
            return Err(ChannelError::InvalidBlochVector(n));
        }
        Ok(BlochState(v))
    }

    pub fn new_unchecked(v: Vec3) -> Self {
        BlochState(v)
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }
}

/// Binary POVM element `t I + s . sigma` with `0 <= t - |s|` and
/// `t + |s| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub t: f64,
    pub s: Vec3,
}

impl Effect {
    pub fn try_new(t: f64, s: Vec3) -> Result<Self, ChannelError> {
        let s_norm = s.norm();
        if t - s_norm < -1e-12 || t + s_norm > 1.0 + 1e-12 {
            return Err(ChannelError::InvalidEffect { t, s_norm });
        }
        Ok(Effect { t, s })
    }

    /// Projector onto the pure state with Bloch vector `axis` (must be
    /// unit length): `(I + axis . sigma) / 2`.
    pub fn projector(axis: Vec3) -> Self {
        Effect {
            t: 0.5,
            s: axis.scale(0.5),
        }
    }

    /// The complementary element `I - E` of the binary POVM.
    pub fn complement(&self) -> Effect {
        Effect {
            t: 1.0 - self.t,
            s: self.s.scale(-1.0),
        }
    }
}

/// Born probability of the effect on the state: `t + s . v`.
pub fn born(e: &Effect, st: &BlochState) -> f64 {
    (e.t + e.s.dot(st.vector())).clamp(0.0, 1.0)
}

/// Dihedrally covariant qubit channel in canonical form: Bloch semi-axes
/// `(d1, d2, d3)` and translation `c3` along the third axis.
///
/// No sign constraint is imposed on construction; physicality is decided
/// by [`D2Channel::is_cp_explicit`] / [`D2Channel::is_cp_choi`] on the
/// stored (signed) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D2Channel {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub c3: f64,
}

impl D2Channel {
    pub fn new(d1: f64, d2: f64, d3: f64, c3: f64) -> Self {
        D2Channel { d1, d2, d3, c3 }
    }

    pub const IDENTITY: D2Channel = D2Channel {
        d1: 1.0,
        d2: 1.0,
        d3: 1.0,
        c3: 0.0,
    };

    /// Amplitude damping with efficiency `lambda`:
    /// `(d1, d2, d3, c3) = (sqrt(1-l), sqrt(1-l), 1-l, l)`.
    pub fn amplitude_damping(lambda: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(ChannelError::OutOfRange {
                name: "lambda",
                value: lambda,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let s = (1.0 - lambda).sqrt();
        Ok(D2Channel::new(s, s, 1.0 - lambda, lambda))
    }

    /// Composes with transverse dephasing of the given visibility:
    /// `(V d1, V d2, d3, c3)`.
    pub fn dephase(&self, visibility: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(ChannelError::OutOfRange {
                name: "visibility",
                value: visibility,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let out = D2Channel::new(self.d1 * visibility, self.d2 * visibility, self.d3, self.c3);
        if self.is_cp_explicit() && !out.is_cp_explicit() {
            return Err(ChannelError::NotCompletelyPositive(out.cp_margin_explicit()));
        }
        Ok(out)
    }

    /// The Choi operator of the canonical-form channel (c1 = c2 = 0);
    /// works for unphysical parameter tuples as well. Trace is 2.
    pub fn choi(&self) -> HMat4 {
        let (d1, d2, d3, c3) = (self.d1, self.d2, self.d3, self.c3);
        let mut e = HMat4::zero();
        e.set(0, 0, C::new(0.5 * (1.0 + c3 + d3), 0.0));
        e.set(1, 1, C::new(0.5 * (1.0 - c3 - d3), 0.0));
        e.set(2, 2, C::new(0.5 * (1.0 + c3 - d3), 0.0));
        e.set(3, 3, C::new(0.5 * (1.0 - c3 + d3), 0.0));
        e.set(0, 3, C::new(0.5 * (d1 + d2), 0.0));
        e.set(1, 2, C::new(0.5 * (d1 - d2), 0.0));
        e
    }

    /// Signed slack of the worst complete-positivity inequality: negative
    /// or zero for completely positive tuples.
    pub fn cp_margin_explicit(&self) -> f64 {
        let a = self.d3 + ((self.d1 - self.d2).powi(2) + self.c3 * self.c3).sqrt() - 1.0;
        let b = -self.d3 + ((self.d1 + self.d2).powi(2) + self.c3 * self.c3).sqrt() - 1.0;
        a.max(b)
    }

    /// Complete positivity via the closed-form inequalities.
    pub fn is_cp_explicit(&self) -> bool {
        self.cp_margin_explicit() <= CP_TOL
    }

    /// Complete positivity via the smallest Choi eigenvalue (oracle path).
    pub fn is_cp_choi(&self) -> bool {
        self.choi().eigenvalues()[0] >= -CP_TOL
    }

    /// Affine Bloch-map form `A = diag(d1, d2, d3)`, `b = (0, 0, c3)`.
    pub fn to_affine(&self) -> QubitChannel {
        QubitChannel {
            a: Mat3::diag(&Vec3::new(self.d1, self.d2, self.d3)),
            b: Vec3::new(0.0, 0.0, self.c3),
        }
    }

    pub fn apply(&self, st: &BlochState) -> BlochState {
        self.to_affine().apply(st)
    }
}

/// General qubit channel as an affine Bloch map `v -> A v + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    pub a: Mat3,
    pub b: Vec3,
}

impl QubitChannel {
    pub fn new(a: Mat3, b: Vec3) -> Self {
        QubitChannel { a, b }
    }

    pub fn apply(&self, st: &BlochState) -> BlochState {
        BlochState(self.a.mul_vec(st.vector()).add(&self.b))
    }

    /// The Choi operator reconstructed from the affine form through the
    /// Pauli basis; trace 2, Hermitian by construction.
    pub fn choi(&self) -> HMat4 {
        // X(|i><j|) for the four matrix units, as Pauli data (alpha, r)
        // with complex r; output block X(M) = alpha (I + sigma.b) + sigma.(A r).
        let units: [(f64, [C; 3]); 4] = [
            // |0><0|
            (0.5, [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.5, 0.0)]),
            // |0><1|
            (0.0, [C::new(0.5, 0.0), C::new(0.0, 0.5), C::new(0.0, 0.0)]),
            // |1><0|
            (0.0, [C::new(0.5, 0.0), C::new(0.0, -0.5), C::new(0.0, 0.0)]),
            // |1><1|
            (0.5, [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-0.5, 0.0)]),
        ];
        let mut entries = [[C::new(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                let (alpha, r) = &units[2 * i + j];
                // w = A r + alpha b (complex 3-vector)
                let mut w = [C::new(0.0, 0.0); 3];
                for (k, wk) in w.iter_mut().enumerate() {
                    for (l, rl) in r.iter().enumerate() {
                        *wk += rl * self.a.0[k][l];
                    }
                    *wk += C::new(alpha * self.b.0[k], 0.0);
                }
                // block = alpha I + sigma . w
                let block = [
                    [C::new(*alpha, 0.0) + w[2], w[0] - C::new(0.0, 1.0) * w[1]],
                    [w[0] + C::new(0.0, 1.0) * w[1], C::new(*alpha, 0.0) - w[2]],
                ];
                for a_idx in 0..2 {
                    for b_idx in 0..2 {
                        entries[2 * i + a_idx][2 * j + b_idx] = block[a_idx][b_idx];
                    }
                }
            }
        }
        HMat4::from_entries(entries)
    }

    /// Smallest Choi eigenvalue; the channel is physical iff this is
    /// at least `-CP_TOL`.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        self.choi().eigenvalues()[0]
    }

    pub fn is_physical(&self) -> bool {
        self.choi_min_eigenvalue() >= -CP_TOL
    }

    /// Reduction to the dihedrally covariant canonical form.
    ///
    /// Runs the signed SVD on `A`, rotates the translation into the SVD
    /// frame and permutes axes so that the translation sits on axis 3 and
    /// `|d1| <= |d2|`. Fails when no axis permutation nulls two
    /// translation components within `tol`.
    ///
    /// Physicality is decided on the signed tuple before magnitudes are
    /// taken; the returned channel carries nonnegative `d`. Signs are
    /// absorbed into `u` in pairs; for `det A < 0` one reflection cannot
    /// be absorbed into proper rotations and is dropped, so the returned
    /// factors reconstruct `A` only up to a reflection of axis 1 in that
    /// case. The correlation geometry is unaffected either way.
    pub fn canonicalize(&self, tol: f64) -> Result<(D2Channel, Rot3, Rot3), ChannelError> {
        let (v, d, u) = signed_svd(&self.a);
        let c = v.matrix().transpose().mul_vec(&self.b);

        // pick the translation axis: the one whose removal leaves the
        // smallest residual |c| on the other two; ties go to the later
        // axis so exact-zero translations land on axis 3
        let mut axis3 = 0;
        let mut residual = f64::INFINITY;
        for k in 0..3 {
            let res = (0..3)
                .filter(|&i| i != k)
                .map(|i| c.0[i].abs())
                .fold(0.0, f64::max);
            if res <= residual {
                residual = res;
                axis3 = k;
            }
        }
        if residual > tol {
            return Err(ChannelError::NotD2Covariant { tol, residual });
        }

        // transverse axes ordered |d1| <= |d2|
        let others: Vec<usize> = (0..3).filter(|&i| i != axis3).collect();
        let (t1, t2) = if d.0[others[0]].abs() <= d.0[others[1]].abs() {
            (others[0], others[1])
        } else {
            (others[1], others[0])
        };
        let perm = [t1, t2, axis3];

        // proper signed permutation applied to both factors
        let mut p = Mat3([[0.0; 3]; 3]);
        for (new, &old) in perm.iter().enumerate() {
            p.0[old][new] = 1.0;
        }
        if p.det() < 0.0 {
            for i in 0..3 {
                p.0[i][0] = -p.0[i][0];
            }
        }
        let mut v_mat = v.matrix().mul(&p);
        let mut u_mat = u.matrix().mul(&p);
        let mut dd = [0.0; 3];
        for new in 0..3 {
            dd[new] = d.0[perm[new]];
        }
        let c3 = v_mat.transpose().mul_vec(&self.b).0[2];

        // absorb d signs into u, in pairs to keep it a proper rotation
        let mut flips = 0;
        for i in 0..3 {
            if dd[i] < 0.0 {
                dd[i] = -dd[i];
                for r in 0..3 {
                    u_mat.0[r][i] = -u_mat.0[r][i];
                }
                flips += 1;
            }
        }
        if flips % 2 == 1 {
            // det A < 0: drop the leftover reflection on axis 1
            for r in 0..3 {
                u_mat.0[r][0] = -u_mat.0[r][0];
            }
        }
        // canonical translation sign: c3 >= 0, absorbed by flipping axes
        // 2 and 3 on the v side (negates d2... no transverse d change:
        // axis 3 flip negates d3 and c3, axis 2 flip negates d2; restore
        // d2, d3 via matching u-side flips)
        let mut c3 = c3;
        if c3 < 0.0 {
            c3 = -c3;
            for r in 0..3 {
                v_mat.0[r][1] = -v_mat.0[r][1];
                v_mat.0[r][2] = -v_mat.0[r][2];
                u_mat.0[r][1] = -u_mat.0[r][1];
                u_mat.0[r][2] = -u_mat.0[r][2];
            }
        }

        let out = D2Channel::new(dd[0], dd[1], dd[2], c3);
        let v_rot = Rot3::try_new_tol(v_mat, 1e-9)
            .map_err(|_| ChannelError::NotD2Covariant { tol, residual })?;
        let u_rot = Rot3::try_new_tol(u_mat, 1e-9)
            .map_err(|_| ChannelError::NotD2Covariant { tol, residual })?;
        Ok((out, u_rot, v_rot))
    }
}

/// On-disk channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    D2 { d: [f64; 3], c3: f64 },
    Affine { a: [[f64; 3]; 3], b: [f64; 3] },
}

impl ChannelSpec {
    pub fn from_d2(ch: &D2Channel) -> Self {
        ChannelSpec::D2 {
            d: [ch.d1, ch.d2, ch.d3],
            c3: ch.c3,
        }
    }

    pub fn from_affine(ch: &QubitChannel) -> Self {
        ChannelSpec::Affine {
            a: ch.a.0,
            b: ch.b.0,
        }
    }

    pub fn to_affine(&self) -> QubitChannel {
        match self {
            ChannelSpec::D2 { d, c3 } => D2Channel::new(d[0], d[1], d[2], *c3).to_affine(),
            ChannelSpec::Affine { a, b } => QubitChannel::new(Mat3(*a), Vec3(*b)),
        }
    }

    /// Validates complete positivity, returning the smallest Choi
    /// eigenvalue as the margin.
    pub fn validate(&self) -> Result<f64, ChannelError> {
        let margin = self.to_affine().choi_min_eigenvalue();
        if margin < -CP_TOL {
            return Err(ChannelError::NotCompletelyPositive(margin));
        }
        Ok(margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rot_exp;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_channel_fixes_states() {
        let st = BlochState::try_new(Vec3::new(0.3, -0.2, 0.4)).unwrap();
        let out = D2Channel::IDENTITY.apply(&st);
        assert!(out.vector().sub(st.vector()).norm() < 1e-15);
    }

    #[test]
    fn full_damping_sends_excited_to_ground() {
        let ch = D2Channel::amplitude_damping(1.0).unwrap();
        let st = BlochState::try_new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let out = ch.apply(&st);
        assert!(out.vector().sub(&Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_damping_of_plus_state() {
        let ch = D2Channel::amplitude_damping(0.4).unwrap();
        let st = BlochState::try_new(Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let out = ch.apply(&st);
        let expect = Vec3::new(0.6_f64.sqrt(), 0.0, 0.4);
        assert!(out.vector().sub(&expect).norm() < 1e-12);
    }

    #[test]
    fn born_rule_basics() {
        let z = Effect::projector(Vec3::new(0.0, 0.0, 1.0));
        let x = Effect::projector(Vec3::new(1.0, 0.0, 0.0));
        let up = BlochState::try_new(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let mixed = BlochState::try_new(Vec3::ZERO).unwrap();
        assert!((born(&z, &up) - 1.0).abs() < 1e-15);
        assert!((born(&z, &mixed) - 0.5).abs() < 1e-15);
        assert!((born(&x, &up) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_parameters() {
        let ch = D2Channel::amplitude_damping(0.0).unwrap();
        assert_eq!((ch.d1, ch.d2, ch.d3, ch.c3), (1.0, 1.0, 1.0, 0.0));
        let ch = D2Channel::amplitude_damping(1.0).unwrap();
        assert_eq!((ch.d1, ch.d2, ch.d3, ch.c3), (0.0, 0.0, 0.0, 1.0));
        let ch = D2Channel::amplitude_damping(0.4).unwrap();
        assert!((ch.d1 - 0.774596669241).abs() < 1e-9);
        assert!((ch.d3 - 0.6).abs() < 1e-15);
        assert!((ch.c3 - 0.4).abs() < 1e-15);
        // both CP inequalities are tight for amplitude damping
        assert!(ch.cp_margin_explicit().abs() < 1e-12);
        assert!(D2Channel::amplitude_damping(1.5).is_err());
        assert!(D2Channel::amplitude_damping(-0.1).is_err());
    }

    #[test]
    fn dephasing() {
        let ch = D2Channel::amplitude_damping(0.4).unwrap();
        assert_eq!(ch.dephase(1.0).unwrap(), ch);
        let dep = ch.dephase(0.87).unwrap();
        assert!((dep.d1 - 0.87 * 0.6_f64.sqrt()).abs() < 1e-12);
        assert!((dep.d2 - 0.87 * 0.6_f64.sqrt()).abs() < 1e-12);
        assert_eq!((dep.d3, dep.c3), (0.6, 0.4));
        let z = D2Channel::IDENTITY.dephase(0.0).unwrap();
        assert_eq!((z.d1, z.d2, z.d3, z.c3), (0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn choi_spectra() {
        let id = D2Channel::IDENTITY.choi();
        let ev = id.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let ad = D2Channel::amplitude_damping(0.4).unwrap().choi();
        assert!((ad.trace() - 2.0).abs() < 1e-15);
        let ev = ad.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.4, 1.6]) {
            assert!((got - want).abs() < 1e-10);
        }
        let dep = D2Channel::new(0.0, 0.0, 0.0, 0.0).choi();
        for e in dep.eigenvalues() {
            assert!((e - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn cp_checks_basic() {
        for l in [0.0, 0.4, 1.0] {
            let ch = D2Channel::amplitude_damping(l).unwrap();
            assert!(ch.is_cp_explicit());
            assert!(ch.is_cp_choi());
        }
        let bad = D2Channel::new(1.0, 1.0, 1.0, 0.1);
        assert!(!bad.is_cp_explicit());
        assert!(!bad.is_cp_choi());
        assert!(D2Channel::new(0.0, 0.0, 0.0, 0.0).is_cp_explicit());
    }

    #[test]
    fn cp_explicit_matches_choi_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (mut pos, mut neg) = (0usize, 0usize);
        for _ in 0..10_000 {
            let ch = D2Channel::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let e = ch.is_cp_explicit();
            assert_eq!(e, ch.is_cp_choi(), "disagreement at {ch:?}");
            if e {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        assert!(pos > 100 && neg > 100, "sampling covered both verdicts");
    }

    #[test]
    fn affine_choi_matches_d2_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let ch = D2Channel::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let e1 = ch.choi();
            let e2 = ch.to_affine().choi();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((e1.get(i, j) - e2.get(i, j)).norm() < 1e-13);
                }
            }
        }
    }

    fn random_physical_d2(rng: &mut impl Rng) -> D2Channel {
        loop {
            let ch = D2Channel::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if ch.is_cp_explicit() {
                return ch;
            }
        }
    }

    #[test]
    fn physical_channels_are_contractive() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10_000 {
            let ch = random_physical_d2(&mut rng);
            let v = loop {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if v.norm() <= 1.0 {
                    break v;
                }
            };
            let out = ch.apply(&BlochState::new_unchecked(v));
            assert!(out.vector().norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn canonicalize_recovers_amplitude_damping() {
        let ad = D2Channel::amplitude_damping(0.4).unwrap();
        let (got, _, _) = ad.to_affine().canonicalize(CANON_TOL).unwrap();
        assert!((got.d1 - ad.d1).abs() < 1e-10);
        assert!((got.d2 - ad.d2).abs() < 1e-10);
        assert!((got.d3 - ad.d3).abs() < 1e-10);
        assert!((got.c3 - ad.c3).abs() < 1e-10);
    }

    #[test]
    fn canonicalize_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let ch = random_physical_d2(&mut rng);
            let r1 = rot_exp(&Vec3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ));
            let r2 = rot_exp(&Vec3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ));
            let affine = ch.to_affine();
            let rotated = QubitChannel::new(
                r1.matrix().mul(&affine.a).mul(r2.matrix()),
                r1.matrix().mul_vec(&affine.b),
            );
            let (base, _, _) = affine.canonicalize(1e-6).unwrap();
            let (got, _, _) = rotated.canonicalize(1e-6).unwrap();
            assert!((got.d1 - base.d1).abs() < 1e-7, "{ch:?}");
            assert!((got.d2 - base.d2).abs() < 1e-7);
            assert!((got.d3 - base.d3).abs() < 1e-7);
            assert!((got.c3 - base.c3).abs() < 1e-7);
        }
    }

    #[test]
    fn canonicalize_rejects_misaligned_translation() {
        let ch = QubitChannel::new(
            Mat3::diag(&Vec3::new(0.1, 0.1, 0.1)),
            Vec3::new(0.3, 0.3, 0.0),
        );
        assert!(matches!(
            ch.canonicalize(1e-6),
            Err(ChannelError::NotD2Covariant { .. })
        ));
    }

    #[test]
    fn channel_spec_roundtrip_and_validation() {
        let spec = ChannelSpec::from_d2(&D2Channel::amplitude_damping(0.4).unwrap());
        let json = serde_json::to_string(&spec).unwrap();
        let back: ChannelSpec = serde_json::from_str(&json).unwrap();
        assert!(back.validate().unwrap() > -1e-9);
        let bad = ChannelSpec::D2 {
            d: [1.0, 1.0, 1.0],
            c3: 0.1,
        };
        assert!(bad.validate().is_err());
    }
}
