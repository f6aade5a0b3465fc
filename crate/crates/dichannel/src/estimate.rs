//! Maximum-likelihood process tomography: the dihedrally covariant
//! 10-parameter fit, the unrestricted 12-parameter fit, and the Choi
//! process fidelity between reconstructions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelSpec, D2Channel, QubitChannel, CANON_TOL};
use crate::error::EstimateError;
use crate::linalg::{rot_exp, Mat3, Rot3, Vec3};
use crate::optim::{constrained_maximize, Func, ObjectiveProblem};
use crate::sim::{FrequencyTable, Setting};

/// Frequencies below this never contribute `-inf`: probabilities are
/// clamped at this floor inside the logarithm (finite-sample zeros).
pub const LOG_CLAMP: f64 = 1e-12;

/// A setting matched with its observed outcome-1 frequency.
#[derive(Clone, Copy)]
struct Datum {
    setting: Setting,
    f: f64,
}

/// Pairs frequency records with their settings by `(input_id, meas_id)`;
/// records without a setting (or vice versa) are dropped.
fn pair_data(f: &FrequencyTable, settings: &[Setting]) -> Result<Vec<Datum>, EstimateError> {
    let mut out = Vec::new();
    for s in settings {
        if let Some(r) = f
            .records
            .iter()
            .find(|r| r.input_id == s.input_id && r.meas_id == s.meas_id)
        {
            out.push(Datum {
                setting: *s,
                f: r.f,
            });
        }
    }
    if out.is_empty() {
        return Err(EstimateError::NoData);
    }
    Ok(out)
}

/// Binary cross-entropy style log-likelihood
/// `sum_i [f_i ln p_i + (1 - f_i) ln(1 - p_i)]`.
fn loglik(ch: &QubitChannel, data: &[Datum]) -> f64 {
    let mut ll = 0.0;
    for d in data {
        let out = ch.apply(&d.setting.state);
        let p = (d.setting.effect.t + d.setting.effect.s.dot(out.vector())).clamp(0.0, 1.0);
        ll += d.f * p.max(LOG_CLAMP).ln() + (1.0 - d.f) * (1.0 - p).max(LOG_CLAMP).ln();
    }
    ll
}

fn d2_params_to_channel(x: &[f64]) -> QubitChannel {
    let v = rot_exp(&Vec3::new(x[0], x[1], x[2]));
    let u = rot_exp(&Vec3::new(x[3], x[4], x[5]));
    let d = Mat3::diag(&Vec3::new(x[6], x[7], x[8]));
    let a = v.matrix().mul(&d).mul(&u.matrix().transpose());
    let b = v.apply(&Vec3::new(0.0, 0.0, x[9]));
    QubitChannel::new(a, b)
}

fn general_params_to_channel(x: &[f64]) -> QubitChannel {
    QubitChannel::new(
        Mat3([[x[0], x[1], x[2]], [x[3], x[4], x[5]], [x[6], x[7], x[8]]]),
        Vec3::new(x[9], x[10], x[11]),
    )
}

/// Result of the D2-restricted fit.
#[derive(Debug, Clone)]
pub struct D2Fit {
    /// Canonicalized parameters.
    pub channel: D2Channel,
    pub u: Rot3,
    pub v: Rot3,
    pub loglik: f64,
    pub restart: usize,
    pub restarts: usize,
    /// Slack of the tightest complete-positivity inequality.
    pub constraint_margin: f64,
    pub seed: u64,
}

/// Result of the unrestricted fit.
#[derive(Debug, Clone)]
pub struct GeneralFit {
    pub channel: QubitChannel,
    pub loglik: f64,
    pub restart: usize,
    pub restarts: usize,
    /// Smallest Choi eigenvalue at the solution.
    pub constraint_margin: f64,
    pub seed: u64,
}

/// Draws a random completely positive `(d, c3)` tuple and rotation
/// coordinates; the restart distribution of both fits.
fn random_start(rng: &mut ChaCha8Rng) -> [f64; 10] {
    let (d1, d2, d3, c3) = loop {
        let d1 = rng.gen_range(0.0..1.0);
        let d2 = rng.gen_range(0.0..1.0);
        let d3 = rng.gen_range(0.0..1.0);
        let c3 = rng.gen_range(-1.0..1.0);
        if D2Channel::new(d1, d2, d3, c3).is_cp_explicit() {
            break (d1, d2, d3, c3);
        }
    };
    let pi = std::f64::consts::PI;
    [
        rng.gen_range(-pi..pi),
        rng.gen_range(-pi..pi),
        rng.gen_range(-pi..pi),
        rng.gen_range(-pi..pi),
        rng.gen_range(-pi..pi),
        rng.gen_range(-pi..pi),
        d1,
        d2,
        d3,
        c3,
    ]
}

/// Best feasible multi-start result: highest log-likelihood, ties broken
/// by the lowest restart index so the reduction is schedule independent.
fn best_of(
    results: Vec<Option<(Vec<f64>, f64)>>,
) -> Result<(Vec<f64>, f64, usize), EstimateError> {
    let total = results.len();
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for (i, r) in results.into_iter().enumerate() {
        if let Some((x, ll)) = r {
            let better = match &best {
                None => true,
                Some((_, bll, _)) => ll > *bll,
            };
            if better {
                best = Some((x, ll, i));
            }
        }
    }
    best.ok_or(EstimateError::AllRestartsInfeasible(total))
}

/// D2-covariant maximum-likelihood tomography over the 10 free
/// parameters `(rotations V, U; semi-axes d; translation c3)` with the
/// closed-form complete-positivity constraints; best of `restarts`
/// multi-start runs.
pub fn mle_d2(
    f: &FrequencyTable,
    settings: &[Setting],
    restarts: usize,
    seed: u64,
) -> Result<D2Fit, EstimateError> {
    let data = Arc::new(pair_data(f, settings)?);
    let objective: Func = {
        let data = data.clone();
        Arc::new(move |x: &[f64]| loglik(&d2_params_to_channel(x), &data))
    };
    let g1: Func = Arc::new(|x: &[f64]| {
        1.0 - x[8] - ((x[6] - x[7]).powi(2) + x[9] * x[9]).sqrt()
    });
    let g2: Func = Arc::new(|x: &[f64]| {
        1.0 + x[8] - ((x[6] + x[7]).powi(2) + x[9] * x[9]).sqrt()
    });
    let pi = std::f64::consts::PI;
    let lower = [[-2.0 * pi; 6].as_slice(), &[0.0, 0.0, 0.0, -1.0]].concat();
    let upper = [[2.0 * pi; 6].as_slice(), &[1.0, 1.0, 1.0, 1.0]].concat();
    let results: Vec<Option<(Vec<f64>, f64)>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let p = ObjectiveProblem {
                objective: objective.clone(),
                constraints: vec![g1.clone(), g2.clone()],
                lower: lower.clone(),
                upper: upper.clone(),
                start: random_start(&mut rng).to_vec(),
            };
            constrained_maximize(&p).ok().map(|fit| (fit.x, fit.value))
        })
        .collect();
    let (x, ll, restart) = best_of(results)?;
    let q = d2_params_to_channel(&x);
    let (channel, u, v) = q
        .canonicalize(CANON_TOL)
        .expect("fitted channel is D2 by construction");
    Ok(D2Fit {
        constraint_margin: channel.cp_margin_explicit(),
        channel,
        u,
        v,
        loglik: ll,
        restart,
        restarts,
        seed,
    })
}

/// Unrestricted maximum-likelihood tomography over all 12 affine
/// parameters, with complete positivity enforced through the smallest
/// Choi eigenvalue.
pub fn mle_general(
    f: &FrequencyTable,
    settings: &[Setting],
    restarts: usize,
    seed: u64,
) -> Result<GeneralFit, EstimateError> {
    let data = Arc::new(pair_data(f, settings)?);
    let objective: Func = {
        let data = data.clone();
        Arc::new(move |x: &[f64]| loglik(&general_params_to_channel(x), &data))
    };
    let cp: Func = Arc::new(|x: &[f64]| general_params_to_channel(x).choi_min_eigenvalue());
    let lower = vec![-1.2; 12];
    let upper = vec![1.2; 12];
    let results: Vec<Option<(Vec<f64>, f64)>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            rng.set_stream(r as u64);
            let s = random_start(&mut rng);
            let q = d2_params_to_channel(&s);
            let start = [
                q.a.0[0].as_slice(),
                &q.a.0[1],
                &q.a.0[2],
                &[q.b.0[0], q.b.0[1], q.b.0[2]],
            ]
            .concat();
            let p = ObjectiveProblem {
                objective: objective.clone(),
                constraints: vec![cp.clone()],
                lower: lower.clone(),
                upper: upper.clone(),
                start,
            };
            constrained_maximize(&p).ok().map(|fit| (fit.x, fit.value))
        })
        .collect();
    let (x, ll, restart) = best_of(results)?;
    let channel = general_params_to_channel(&x);
    Ok(GeneralFit {
        constraint_margin: channel.choi_min_eigenvalue(),
        channel,
        loglik: ll,
        restart,
        restarts,
        seed,
    })
}

/// Negative Choi eigenvalues accepted by [`choi_fidelity`].  Fitted
/// channels satisfy complete positivity only to the optimizer's
/// feasibility tolerance, so this is looser than the exact-channel
/// tolerance; the offending eigenvalues are clamped to zero.
pub const FIDELITY_PSD_TOL: f64 = 1e-6;

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` between the
/// trace-normalized Choi states of two physical channels.
pub fn choi_fidelity(ch1: &QubitChannel, ch2: &QubitChannel) -> Result<f64, EstimateError> {
    let e1 = ch1.choi();
    let e2 = ch2.choi();
    for e in [&e1, &e2] {
        let min = e.eigenvalues()[0];
        if min < -FIDELITY_PSD_TOL {
            return Err(EstimateError::NotPsd(min));
        }
    }
    let rho = e1.scale(0.5);
    let sigma = e2.scale(0.5);
    let s = rho.sqrt_psd();
    let mut se = [[num_complex::Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in se.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = s.get(i, j);
        }
    }
    // s is Hermitian, so conjugation by its raw entries is s sigma s
    let inner = sigma.conjugate(&se);
    let tr: f64 = inner
        .eigenvalues()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    Ok((tr * tr).min(1.0))
}

/// Serializable summary of a fit for the CLI and report files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub kind: String,
    pub channel: ChannelSpec,
    pub loglik: f64,
    pub restarts: usize,
    pub best_restart: usize,
    pub constraint_margin: f64,
    pub seed: u64,
}

impl FitReport {
    pub fn from_d2(fit: &D2Fit) -> Self {
        FitReport {
            kind: "d2".into(),
            channel: ChannelSpec::from_d2(&fit.channel),
            loglik: fit.loglik,
            restarts: fit.restarts,
            best_restart: fit.restart,
            constraint_margin: fit.constraint_margin,
            seed: fit.seed,
        }
    }

    pub fn from_general(fit: &GeneralFit) -> Self {
        FitReport {
            kind: "general".into(),
            channel: ChannelSpec::from_affine(&fit.channel),
            loglik: fit.loglik,
            restarts: fit.restarts,
            best_restart: fit.restart,
            constraint_margin: fit.constraint_margin,
            seed: fit.seed,
        }
    }
}
