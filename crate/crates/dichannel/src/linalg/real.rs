//! Real 3-vectors, 3x3 matrices, proper rotations and a signed SVD.

use serde::{Deserialize, Serialize};

use crate::error::LinalgError;

/// Orthogonality / determinant tolerance for [`Rot3`].
pub const ROT_TOL: f64 = 1e-12;

/// Reconstruction tolerance for [`signed_svd`].
pub const SVD_TOL: f64 = 1e-10;

/// Real 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn add(&self, other: &Vec3) -> Vec3 {
        Vec3([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn sub(&self, other: &Vec3) -> Vec3 {
        self.add(&other.scale(-1.0))
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &other.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

/// Real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(d: &Vec3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = d.0[i];
        }
        Mat3(m)
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row[0] * v.0[0] + row[1] * v.0[1] + row[2] * v.0[2];
        }
        Vec3(out)
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Mat3(m)
    }

    pub fn transpose(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[j][i];
            }
        }
        Mat3(m)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn set_column(&mut self, j: usize, v: &Vec3) {
        for i in 0..3 {
            self.0[i][j] = v.0[i];
        }
    }

    /// Frobenius norm of `self - other`.
    pub fn dist(&self, other: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.0[i][j] - other.0[i][j];
                s += d * d;
            }
        }
        s.sqrt()
    }
}

/// Proper rotation: R Rᵀ = I and det R = +1 within [`ROT_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rot3(Mat3);

impl Rot3 {
    pub const IDENTITY: Rot3 = Rot3(Mat3::IDENTITY);

    /// Wraps a matrix after checking the rotation invariants.
    pub fn try_new(m: Mat3) -> Result<Rot3, LinalgError> {
        Self::try_new_tol(m, ROT_TOL)
    }

    pub fn try_new_tol(m: Mat3, tol: f64) -> Result<Rot3, LinalgError> {
        let g = m.mul(&m.transpose());
        let ortho_err = g.dist(&Mat3::IDENTITY);
        let det_err = (m.det() - 1.0).abs();
        if ortho_err > tol || det_err > tol {
            return Err(LinalgError::NotARotation { ortho_err, det_err });
        }
        Ok(Rot3(m))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0.mul_vec(v)
    }

    pub fn compose(&self, other: &Rot3) -> Rot3 {
        Rot3(self.0.mul(&other.0))
    }

    pub fn inverse(&self) -> Rot3 {
        Rot3(self.0.transpose())
    }
}

/// Exponential of the so(3) element with coordinates `n` in the standard
/// generator basis, via Rodrigues' formula.
pub fn rot_exp(n: &Vec3) -> Rot3 {
    let theta = n.norm();
    // K is the cross-product matrix of n.
    let (a, b) = if theta < 1e-5 {
        // series: sin t / t and (1 - cos t) / t^2
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    let (x, y, z) = (n.0[0], n.0[1], n.0[2]);
    let k = Mat3([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]);
    let k2 = k.mul(&k);
    let mut m = Mat3::IDENTITY;
    for i in 0..3 {
        for j in 0..3 {
            m.0[i][j] += a * k.0[i][j] + b * k2.0[i][j];
        }
    }
    // re-orthogonalization is unnecessary: Rodrigues is exact up to roundoff
    Rot3(m)
}

/// Signed singular value decomposition over proper rotations:
/// `a = v · diag(d) · uᵀ` with `det v = det u = +1`; any reflection is
/// absorbed as a sign in `d`. Magnitudes are sorted descending.
pub fn signed_svd(a: &Mat3) -> (Rot3, Vec3, Rot3) {
    // One-sided Jacobi: orthogonalize the columns of w = a * u by right
    // Givens rotations accumulated into u.
    let mut w = *a;
    let mut u = Mat3::IDENTITY;
    for _ in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..2 {
            for q in (p + 1)..3 {
                let cp = w.column(p);
                let cq = w.column(q);
                let alpha = cp.dot(&cp);
                let beta = cq.dot(&cq);
                let gamma = cp.dot(&cq);
                off = off.max(gamma.abs());
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt().max(1e-300) {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..3 {
                    let wp = w.0[i][p];
                    let wq = w.0[i][q];
                    w.0[i][p] = c * wp - s * wq;
                    w.0[i][q] = s * wp + c * wq;
                    let up = u.0[i][p];
                    let uq = u.0[i][q];
                    u.0[i][p] = c * up - s * uq;
                    u.0[i][q] = s * up + c * uq;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }

    // Column norms are the singular magnitudes; sort descending.
    let mut idx = [0usize, 1, 2];
    let norms = [w.column(0).norm(), w.column(1).norm(), w.column(2).norm()];
    idx.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut v = Mat3::IDENTITY;
    let mut d = [0.0; 3];
    let mut uu = Mat3::IDENTITY;
    for (k, &i) in idx.iter().enumerate() {
        d[k] = norms[i];
        uu.set_column(k, &u.column(i));
        if norms[i] > 1e-300 {
            v.set_column(k, &w.column(i).scale(1.0 / norms[i]));
        }
    }
    // Fill zero-singular-value directions of v with an orthonormal complement.
    complete_orthonormal(&mut v, &d);

    // Absorb reflections into d so both factors are proper rotations.
    let mut d = Vec3(d);
    if v.det() < 0.0 {
        let c = v.column(2).scale(-1.0);
        v.set_column(2, &c);
        d.0[2] = -d.0[2];
    }
    if uu.det() < 0.0 {
        let c = uu.column(2).scale(-1.0);
        uu.set_column(2, &c);
        d.0[2] = -d.0[2];
    }
    (
        Rot3::try_new(v).expect("one-sided Jacobi produced a non-orthogonal factor"),
        d,
        Rot3::try_new(uu).expect("accumulated Givens product is orthogonal"),
    )
}

fn complete_orthonormal(v: &mut Mat3, d: &[f64; 3]) {
    let rank = d.iter().filter(|&&x| x > 1e-300).count();
    if rank == 3 {
        return;
    }
    let mut cols: Vec<Vec3> = (0..rank).map(|j| v.column(j)).collect();
    let basis = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    ];
    for e in basis.iter() {
        if cols.len() == 3 {
            break;
        }
        let mut c = *e;
        for b in &cols {
            c = c.sub(&b.scale(b.dot(&c)));
        }
        let n = c.norm();
        if n > 1e-8 {
            cols.push(c.scale(1.0 / n));
        }
    }
    for (j, c) in cols.iter().enumerate() {
        v.set_column(j, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_mat3(rng: &mut impl Rng) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = rng.gen_range(-2.0..2.0);
            }
        }
        Mat3(m)
    }

    #[test]
    fn rot_exp_identity() {
        let r = rot_exp(&Vec3::ZERO);
        assert_eq!(r.matrix(), &Mat3::IDENTITY);
    }

    #[test]
    fn rot_exp_quarter_turn_about_z() {
        // the third generator rotates x toward y
        let r = rot_exp(&Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        let y = r.apply(&Vec3::new(1.0, 0.0, 0.0));
        assert!(y.sub(&Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rot_exp_periodicity() {
        let r = rot_exp(&Vec3::new(2.0 * std::f64::consts::PI, 0.0, 0.0));
        assert!(r.matrix().dist(&Mat3::IDENTITY) < 1e-12);
    }

    #[test]
    fn rot_exp_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut n = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if n.norm() > std::f64::consts::PI {
                n = n.scale(std::f64::consts::PI / n.norm());
            }
            let r = rot_exp(&n).compose(&rot_exp(&n.scale(-1.0)));
            assert!(r.matrix().dist(&Mat3::IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn signed_svd_identity() {
        let (_, d, _) = signed_svd(&Mat3::IDENTITY);
        for k in 0..3 {
            assert!((d.0[k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_svd_diagonal_with_signs() {
        let a = Mat3::diag(&Vec3::new(2.0, -3.0, 0.0));
        let (v, d, u) = signed_svd(&a);
        let mut mags: Vec<f64> = d.0.iter().map(|x| x.abs()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((mags[0] - 3.0).abs() < 1e-12);
        assert!((mags[1] - 2.0).abs() < 1e-12);
        assert!(mags[2].abs() < 1e-12);
        let rec = v.matrix().mul(&Mat3::diag(&d)).mul(&u.matrix().transpose());
        assert!(rec.dist(&a) < SVD_TOL);
    }

    #[test]
    fn signed_svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let a = random_mat3(&mut rng);
            let (v, d, u) = signed_svd(&a);
            let rec = v.matrix().mul(&Mat3::diag(&d)).mul(&u.matrix().transpose());
            assert!(rec.dist(&a) < SVD_TOL, "reconstruction error {}", rec.dist(&a));
            assert!((v.matrix().det() - 1.0).abs() < 1e-9);
            assert!((u.matrix().det() - 1.0).abs() < 1e-9);
        }
    }

    // Oracle: singular magnitudes from the eigenvalues of aᵀa computed by a
    // plain symmetric Jacobi sweep, independent of the one-sided routine.
    fn singular_values_oracle(a: &Mat3) -> [f64; 3] {
        let mut s = a.transpose().mul(a);
        for _ in 0..50 {
            for p in 0..2 {
                for q in (p + 1)..3 {
                    if s.0[p][q].abs() < 1e-16 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * s.0[p][q]).atan2(s.0[q][q] - s.0[p][p]);
                    let (c, t) = (theta.cos(), theta.sin());
                    let mut g = Mat3::IDENTITY;
                    g.0[p][p] = c;
                    g.0[q][q] = c;
                    g.0[p][q] = t;
                    g.0[q][p] = -t;
                    s = g.transpose().mul(&s).mul(&g);
                }
            }
        }
        let mut ev = [s.0[0][0].max(0.0).sqrt(), s.0[1][1].max(0.0).sqrt(), s.0[2][2].max(0.0).sqrt()];
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    #[test]
    fn signed_svd_magnitudes_match_jacobi_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let a = random_mat3(&mut rng);
            let (_, d, _) = signed_svd(&a);
            let mut mags: Vec<f64> = d.0.iter().map(|x| x.abs()).collect();
            mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let oracle = singular_values_oracle(&a);
            for k in 0..3 {
                assert!((mags[k] - oracle[k]).abs() < 1e-8);
            }
        }
    }
}
