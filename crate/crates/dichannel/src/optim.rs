//! Self-contained inequality-constrained maximization: an augmented
//! Lagrangian outer loop around a box-constrained BFGS inner solver with
//! central finite-difference gradients, plus a Nelder-Mead simplex for
//! derivative-free objectives.

use std::sync::Arc;

use crate::error::EstimateError;

/// Shared callable for objectives and constraints.
pub type Func = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Maximize `objective(x)` subject to `constraints[i](x) >= 0` and
/// `lower <= x <= upper`, starting from `start`.
pub struct ObjectiveProblem {
    pub objective: Func,
    /// Inequality constraints, feasible when `g(x) >= 0`.
    pub constraints: Vec<Func>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub start: Vec<f64>,
}

/// Outcome of one constrained maximization.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// `max(0, -min_i g_i(x))` at the returned point.
    pub constraint_violation: f64,
    /// Projected gradient norm of the augmented Lagrangian at the end.
    pub kkt_residual: f64,
    pub iterations: usize,
    /// Which restart produced this result; filled in by multi-start
    /// drivers, 0 for a single run.
    pub restart: usize,
}

/// Feasibility demanded of returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Target KKT (projected gradient) residual.
pub const KKT_TOL: f64 = 1e-6;

fn clip(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Central finite-difference gradient.
fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], g: &mut [f64]) {
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-6 * x[i].abs().max(1.0);
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
}

/// Norm of the gradient projected on the feasible box directions.
fn projected_norm(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        let active_lo = x[i] <= lo[i] + 1e-12 && g[i] > 0.0;
        let active_hi = x[i] >= hi[i] - 1e-12 && g[i] < 0.0;
        if !(active_lo || active_hi) {
            s += g[i] * g[i];
        }
    }
    s.sqrt()
}

/// Minimizes `f` over the box by BFGS with gradient projection at active
/// bounds and Armijo backtracking.  Returns (x, f(x), iterations).
fn bfgs_box(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut x = x0.to_vec();
    clip(&mut x, lo, hi);
    let mut fx = f(&x);
    let mut g = vec![0.0; n];
    gradient(f, &x, &mut g);
    // inverse Hessian approximation
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut iters = 0;
    for _ in 0..max_iter {
        iters += 1;
        if projected_norm(&x, &g, lo, hi) < tol {
            break;
        }
        // d = -H g, with components into active bounds removed
        let mut d = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                d[i] -= h[i][j] * g[j];
            }
        }
        for i in 0..n {
            if (x[i] <= lo[i] + 1e-12 && d[i] < 0.0) || (x[i] >= hi[i] - 1e-12 && d[i] > 0.0) {
                d[i] = 0.0;
            }
        }
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // H lost positive definiteness along the projection: restart
            // from steepest descent
            for (i, row) in h.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                d[i] = -g[i];
                if (x[i] <= lo[i] + 1e-12 && d[i] < 0.0) || (x[i] >= hi[i] - 1e-12 && d[i] > 0.0)
                {
                    d[i] = 0.0;
                }
            }
            slope = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            if slope >= -1e-18 {
                break;
            }
        }
        // Armijo backtracking on the clipped step
        let mut alpha = 1.0;
        let mut xn = x.clone();
        let mut fn_ = fx;
        let mut ok = false;
        for _ in 0..60 {
            for i in 0..n {
                xn[i] = x[i] + alpha * d[i];
            }
            clip(&mut xn, lo, hi);
            fn_ = f(&xn);
            if fn_ <= fx + 1e-4 * alpha * slope {
                ok = true;
                break;
            }
            alpha *= 0.5;
        }
        if !ok || fn_ >= fx - 1e-16 * fx.abs().max(1.0) {
            break;
        }
        let mut gn = vec![0.0; n];
        gradient(f, &xn, &mut gn);
        // BFGS update on the actual step taken
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let mut hy = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    hy[i] += h[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += rho * rho * yhy * s[i] * s[j] + rho * s[i] * s[j]
                        - rho * (s[i] * hy[j] + hy[i] * s[j]);
                }
            }
        }
        x = xn;
        fx = fn_;
        g = gn;
    }
    (x, fx, iters)
}

/// Augmented-Lagrangian (Powell-Hestenes-Rockafellar) maximization.
/// Deterministic for a fixed start.
pub fn constrained_maximize(p: &ObjectiveProblem) -> Result<FitResult, EstimateError> {
    let n = p.start.len();
    assert_eq!(p.lower.len(), n);
    assert_eq!(p.upper.len(), n);
    let m = p.constraints.len();
    let mut lambda = vec![0.0_f64; m];
    let mut mu = 10.0_f64;
    let mut x = p.start.clone();
    clip(&mut x, &p.lower, &p.upper);
    let mut total_iters = 0;
    let mut prev_violation = f64::INFINITY;
    let mut kkt = f64::INFINITY;
    for outer in 0..30 {
        let obj = &p.objective;
        let cons = &p.constraints;
        let lam = lambda.clone();
        let phr = move |z: &[f64]| {
            let mut val = -(obj)(z);
            for (k, c) in cons.iter().enumerate() {
                let g = c(z);
                let t = (lam[k] - mu * g).max(0.0);
                val += (t * t - lam[k] * lam[k]) / (2.0 * mu);
            }
            val
        };
        let inner_tol = (KKT_TOL * 0.1).max(1e-9);
        let (xn, _, iters) = bfgs_box(&phr, &x, &p.lower, &p.upper, 400, inner_tol);
        total_iters += iters;
        x = xn;
        // multiplier update and penalty growth
        let mut violation = 0.0_f64;
        for (k, c) in p.constraints.iter().enumerate() {
            let g = c(&x);
            lambda[k] = (lambda[k] - mu * g).max(0.0);
            violation = violation.max(-g);
        }
        violation = violation.max(0.0);
        let mut grad = vec![0.0; n];
        gradient(&phr, &x, &mut grad);
        kkt = projected_norm(&x, &grad, &p.lower, &p.upper);
        if violation <= FEASIBILITY_TOL && kkt <= KKT_TOL {
            break;
        }
        if outer > 0 && violation > 0.25 * prev_violation {
            mu *= 5.0;
        }
        prev_violation = violation;
    }
    let violation = p
        .constraints
        .iter()
        .map(|c| -c(&x))
        .fold(0.0_f64, f64::max);
    if violation > FEASIBILITY_TOL {
        return Err(EstimateError::Infeasible(violation));
    }
    Ok(FitResult {
        value: (p.objective)(&x),
        x,
        constraint_violation: violation,
        kkt_residual: kkt,
        iterations: total_iters,
        restart: 0,
    })
}

/// Nelder-Mead simplex minimization with an initial simplex of edge
/// `scale` around `start`.  Returns (x, f(x)).
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += scale;
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (v, _) in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let at = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + t * (centroid[i] - worst.0[i]))
                .collect()
        };
        let xr = at(alpha);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = at(gamma);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = at(-rho);
            let fc = f(&xc);
            if fc < worst.1 {
                simplex[n] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        v[i] = best[i] + sigma * (v[i] - best[i]);
                    }
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0).into()
}
