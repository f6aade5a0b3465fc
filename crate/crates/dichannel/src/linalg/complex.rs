//! Complex 2x2 matrices, Hermitian 4x4 matrices and a cyclic Jacobi
//! eigensolver for the latter.

use num_complex::Complex64;

use crate::error::LinalgError;
use crate::linalg::real::Vec3;

/// Off-diagonal norm threshold at which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-14;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2(pub [[C; 2]; 2]);

impl CMat2 {
    pub fn identity() -> Self {
        CMat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn sigma_x() -> Self {
        CMat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn sigma_y() -> Self {
        CMat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn sigma_z() -> Self {
        CMat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    /// rho = (I + v . sigma) / 2
    pub fn density_from_bloch(v: &Vec3) -> Self {
        let (x, y, z) = (v.0[0], v.0[1], v.0[2]);
        CMat2([
            [c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0)],
            [c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
        ])
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        d
    }
}

/// Pauli expansion of a Hermitian 2x2 matrix: `m = r0 I + r . sigma` with
/// `r0 = Tr(m)/2` and `r_k = Tr(sigma_k m)/2`.
pub fn pauli_expand(m: &CMat2) -> Result<(f64, Vec3), LinalgError> {
    let defect = m.hermiticity_defect();
    if defect > 1e-10 {
        return Err(LinalgError::NotHermitian(defect));
    }
    let r0 = 0.5 * (m.0[0][0].re + m.0[1][1].re);
    let rx = 0.5 * (m.0[0][1] + m.0[1][0]).re;
    let ry = 0.5 * (m.0[1][0] - m.0[0][1]).im;
    let rz = 0.5 * (m.0[0][0].re - m.0[1][1].re);
    Ok((r0, Vec3::new(rx, ry, rz)))
}

/// Recompose from a Pauli expansion.
pub fn pauli_compose(r0: f64, r: &Vec3) -> CMat2 {
    let (x, y, z) = (r.0[0], r.0[1], r.0[2]);
    CMat2([
        [c(r0 + z, 0.0), c(x, -y)],
        [c(x, y), c(r0 - z, 0.0)],
    ])
}

/// Hermitian 4x4 matrix. Storage enforces `H = H†`: setters write both
/// triangles, constructors symmetrize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMat4([[C; 4]; 4]);

impl HMat4 {
    pub fn zero() -> Self {
        HMat4([[c(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = c(1.0, 0.0);
        }
        m
    }

    /// Builds from arbitrary entries by Hermitian symmetrization
    /// `(M + M†)/2`.
    pub fn from_entries(e: [[C; 4]; 4]) -> Self {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (e[i][j] + e[j][i].conj()) * 0.5;
            }
        }
        HMat4(m)
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = c(d[i], 0.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.0[i][j]
    }

    /// Sets entry (i, j) and its conjugate mirror. The diagonal keeps only
    /// the real part.
    pub fn set(&mut self, i: usize, j: usize, v: C) {
        if i == j {
            self.0[i][i] = c(v.re, 0.0);
        } else {
            self.0[i][j] = v;
            self.0[j][i] = v.conj();
        }
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i].re).sum()
    }

    pub fn scale(&self, s: f64) -> HMat4 {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] *= s;
            }
        }
        m
    }

    pub fn mul(&self, other: &HMat4) -> [[C; 4]; 4] {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    m[i][j] += self.0[i][k] * other.0[k][j];
                }
            }
        }
        m
    }

    /// Conjugation `U M U†` for a unitary given as raw entries.
    pub fn conjugate(&self, u: &[[C; 4]; 4]) -> HMat4 {
        let mut um = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    um[i][j] += u[i][k] * self.0[k][j];
                }
            }
        }
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out[i][j] += um[i][k] * u[j][k].conj();
                }
            }
        }
        HMat4::from_entries(out)
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi sweeps.
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.eigen().0
    }

    /// Eigenvalues (ascending) and the corresponding orthonormal
    /// eigenvectors as columns of the returned matrix.
    pub fn eigen(&self) -> ([f64; 4], [[C; 4]; 4]) {
        let mut a = self.0;
        // accumulated unitary, columns become eigenvectors
        let mut q = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = c(1.0, 0.0);
        }
        let scale = self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
        for _ in 0..100 {
            let mut off = 0.0_f64;
            for p in 0..3 {
                for q_idx in (p + 1)..4 {
                    off += a[p][q_idx].norm_sqr();
                }
            }
            if off.sqrt() < JACOBI_TOL * scale {
                break;
            }
            for p in 0..3 {
                for r in (p + 1)..4 {
                    let apq = a[p][r];
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    // Unitary 2x2 rotation annihilating a[p][r]:
                    // diagonalize [[app, apq], [apq*, arr]].
                    let app = a[p][p].re;
                    let arr = a[r][r].re;
                    let phase = apq / apq.norm();
                    let theta = 0.5 * (2.0 * apq.norm()).atan2(arr - app);
                    let cs = theta.cos();
                    let sn = theta.sin();
                    // columns p, r of a and q: right-multiply by the rotation
                    // J with J[p][p]=cs, J[r][p]=-sn*conj(phase),
                    // J[p][r]=sn*phase, J[r][r]=cs. Then left-multiply by J†.
                    let jp = [c(cs, 0.0), -phase.conj() * sn];
                    let jr = [c(sn, 0.0), phase.conj() * cs];
                    // A <- J† A J
                    for i in 0..4 {
                        let aip = a[i][p];
                        let air = a[i][r];
                        a[i][p] = aip * jp[0] + air * jp[1];
                        a[i][r] = aip * jr[0] + air * jr[1];
                    }
                    for i in 0..4 {
                        let api = a[p][i];
                        let ari = a[r][i];
                        a[p][i] = jp[0].conj() * api + jp[1].conj() * ari;
                        a[r][i] = jr[0].conj() * api + jr[1].conj() * ari;
                    }
                    for row in q.iter_mut() {
                        let qip = row[p];
                        let qir = row[r];
                        row[p] = qip * jp[0] + qir * jp[1];
                        row[r] = qip * jr[0] + qir * jr[1];
                    }
                }
            }
        }
        let mut pairs: Vec<(f64, usize)> = (0..4).map(|i| (a[i][i].re, i)).collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut vals = [0.0; 4];
        let mut vecs = [[c(0.0, 0.0); 4]; 4];
        for (k, (val, i)) in pairs.iter().enumerate() {
            vals[k] = *val;
            for r in 0..4 {
                vecs[r][k] = q[r][*i];
            }
        }
        (vals, vecs)
    }

    /// Hermitian square root of a PSD matrix; small negative eigenvalues
    /// (roundoff) are clamped at zero.
    pub fn sqrt_psd(&self) -> HMat4 {
        let (vals, vecs) = self.eigen();
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            let s = vals[k].max(0.0).sqrt();
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += vecs[i][k] * vecs[j][k].conj() * s;
                }
            }
        }
        HMat4::from_entries(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_expand_identity() {
        let (r0, r) = pauli_expand(&CMat2::identity()).unwrap();
        assert_eq!(r0, 1.0);
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn pauli_expand_projectors() {
        let p0 = CMat2::density_from_bloch(&Vec3::new(0.0, 0.0, 1.0));
        let (r0, r) = pauli_expand(&p0).unwrap();
        assert!((r0 - 0.5).abs() < 1e-15);
        assert!(r.sub(&Vec3::new(0.0, 0.0, 0.5)).norm() < 1e-15);

        let plus = CMat2::density_from_bloch(&Vec3::new(1.0, 0.0, 0.0));
        let (r0, r) = pauli_expand(&plus).unwrap();
        assert!((r0 - 0.5).abs() < 1e-15);
        assert!(r.sub(&Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_expand_rejects_non_hermitian() {
        let m = CMat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]]);
        assert!(pauli_expand(&m).is_err());
    }

    #[test]
    fn pauli_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100_000 {
            let r0 = rng.gen_range(-2.0..2.0);
            let r = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let m = pauli_compose(r0, &r);
            let (s0, s) = pauli_expand(&m).unwrap();
            assert!((s0 - r0).abs() < 1e-12);
            assert!(s.sub(&r).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_identity() {
        assert_eq!(HMat4::identity().eigenvalues(), [1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigenvalues_diag_permuted() {
        let m = HMat4::diag([3.0, 1.0, 4.0, 1.0]);
        let ev = m.eigenvalues();
        let expect = [1.0, 1.0, 3.0, 4.0];
        for k in 0..4 {
            assert!((ev[k] - expect[k]).abs() < 1e-12);
        }
    }

    fn random_hmat4(rng: &mut impl Rng) -> HMat4 {
        let mut e = [[c(0.0, 0.0); 4]; 4];
        for row in e.iter_mut() {
            for x in row.iter_mut() {
                *x = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        HMat4::from_entries(e)
    }

    fn random_unitary4(rng: &mut impl Rng) -> [[C; 4]; 4] {
        // eigenvectors of a random Hermitian matrix
        random_hmat4(rng).eigen().1
    }

    #[test]
    fn eigenvalue_sum_equals_trace_and_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let m = random_hmat4(&mut rng);
            let ev = m.eigenvalues();
            let sum: f64 = ev.iter().sum();
            assert!((sum - m.trace()).abs() < 1e-9);
        }
        for _ in 0..200 {
            let m = random_hmat4(&mut rng);
            let u = random_unitary4(&mut rng);
            let ev1 = m.eigenvalues();
            let ev2 = m.conjugate(&u).eigenvalues();
            for k in 0..4 {
                assert!((ev1[k] - ev2[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let m = random_hmat4(&mut rng);
            let (vals, vecs) = m.eigen();
            // M v_k = lambda_k v_k
            for k in 0..4 {
                for i in 0..4 {
                    let mut mv = c(0.0, 0.0);
                    for j in 0..4 {
                        mv += m.get(i, j) * vecs[j][k];
                    }
                    assert!((mv - vecs[i][k] * vals[k]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let m = random_hmat4(&mut rng);
            // make PSD: M^2 is PSD for Hermitian M
            let sq = HMat4::from_entries(m.mul(&m));
            let root = sq.sqrt_psd();
            let back = HMat4::from_entries(root.mul(&root));
            for i in 0..4 {
                for j in 0..4 {
                    assert!((back.get(i, j) - sq.get(i, j)).norm() < 1e-8);
                }
            }
        }
    }
}
