//! The two device-independent protocols: DI-TV (tomography validation
//! against bare correlations, with the Delta metric and per-parameter
//! validation ranges) and DI-CC (minimal-surviving-hypothesis area
//! minimization), plus equivalence-class reporting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, D2Channel};
use crate::error::ProtocolError;
use crate::geometry::{self, mu, CorrelationPoint, Region, BOUNDARY_DIRECTIONS};
use crate::optim::nelder_mead;
use crate::sim::PointRecord;

/// Default number of DI-CC restarts.
pub const DI_CC_RESTARTS: usize = 200;

/// Fitted areas below this are flagged as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-6;

/// A data point that escapes the hypothesis region.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Offender {
    pub pair_id: usize,
    pub meas_id: usize,
    pub point: CorrelationPoint,
    /// Worst directional excess after the k-sigma allowance.
    pub margin: f64,
}

/// Per-parameter validation interval, as (downward, upward) offsets from
/// the hypothesis value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParameterRanges {
    pub d2: (f64, f64),
    pub d3: (f64, f64),
    pub c3: (f64, f64),
    /// The boundary is insensitive to d1, so no interval is reported.
    pub d1_undetermined: bool,
}

/// Outcome of the DI-TV protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    /// The tomographic hypothesis under test.
    pub hypothesis: ChannelSpec,
    pub validated: bool,
    pub k_sigma: f64,
    pub offenders: Vec<Offender>,
    /// Delta between the hypothesis region and the DI-CC minimal region
    /// fitted to the same data.
    pub delta: f64,
    /// Filled by [`parameter_ranges`]; `None` straight out of [`di_tv`].
    pub ranges: Option<ParameterRanges>,
}

/// The equivalence class of a correlation set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub d2: f64,
    pub d3: f64,
    pub c3: f64,
    /// `None` when the class parameter is undefined (c3 or d3 zero).
    pub mu: Option<f64>,
    /// Whether `0 <= mu <= 1` (the regime in which the class labels
    /// indistinguishable channels).
    pub regime: bool,
    /// The fitted region has (near-)zero area.
    pub degenerate: bool,
    /// Delta against a reference region, when one was supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// Equivalence-class report for explicit canonical parameters.
pub fn equivalence_class(d2: f64, d3: f64, c3: f64) -> Result<ClassReport, ProtocolError> {
    let m = mu(d2, d3, c3).map_err(ProtocolError::Geometry)?;
    Ok(ClassReport {
        d2,
        d3,
        c3,
        mu: Some(m),
        regime: (0.0..=1.0).contains(&m),
        degenerate: false,
        delta: None,
    })
}

/// Completely positive representative of the class `(d2, d3, c3)` with
/// `0 <= d1 <= d2` (the boundary is d1-insensitive on that interval), or
/// `None` when no such channel exists.  The d1 feasibility interval is
/// `max(0, d2 - sqrt((1-d3)^2 - c3^2)) <= d1 <= sqrt((1+d3)^2 - c3^2) - d2`,
/// the closed form of the two complete-positivity inequalities.
pub fn class_representative(d2: f64, d3: f64, c3: f64) -> Option<D2Channel> {
    if !(0.0..=1.0).contains(&d2) || !(0.0..=1.0).contains(&d3) || c3.abs() > 1.0 {
        return None;
    }
    let a = (1.0 - d3) * (1.0 - d3) - c3 * c3;
    let b = (1.0 + d3) * (1.0 + d3) - c3 * c3;
    if a < 0.0 || b < 0.0 {
        return None;
    }
    let lo = (d2 - a.sqrt()).max(0.0);
    let hi = (b.sqrt() - d2).min(d2 + a.sqrt());
    if lo > hi {
        return None;
    }
    let d1 = d2.clamp(lo, hi);
    let ch = D2Channel::new(d1, d2, d3, c3);
    if ch.is_cp_explicit() {
        Some(ch)
    } else {
        None
    }
}

/// DI-TV: falsify or validate the tomographic hypothesis against bare
/// correlation data at the `k`-sigma level.  `delta` compares the
/// hypothesis region with the DI-CC minimal region on the same data.
pub fn di_tv(
    hyp: &D2Channel,
    data: &[PointRecord],
    k: f64,
) -> Result<Verdict, ProtocolError> {
    di_tv_with(hyp, data, k, DI_CC_RESTARTS, 0)
}

/// [`di_tv`] with explicit restart budget and seed for the embedded
/// DI-CC fit that the Delta metric compares against.
pub fn di_tv_with(
    hyp: &D2Channel,
    data: &[PointRecord],
    k: f64,
    restarts: usize,
    seed: u64,
) -> Result<Verdict, ProtocolError> {
    if data.is_empty() {
        return Err(ProtocolError::NoData);
    }
    if !hyp.is_cp_explicit() {
        return Err(ProtocolError::UnphysicalHypothesis);
    }
    let region = Region::boundary(hyp, BOUNDARY_DIRECTIONS)?;
    let mut offenders = Vec::new();
    for r in data {
        let m = region.margin_k_sigma(&r.point, k);
        if m > 0.0 {
            offenders.push(Offender {
                pair_id: r.pair_id,
                meas_id: r.meas_id,
                point: r.point,
                margin: m,
            });
        }
    }
    let (_, cc_region) = di_cc(data, restarts, seed)?;
    let delta = geometry::delta(&region, &cc_region)?;
    Ok(Verdict {
        hypothesis: ChannelSpec::from_d2(hyp),
        validated: offenders.is_empty(),
        k_sigma: k,
        offenders,
        delta,
        ranges: None,
    })
}

/// The two conditions of the validation-range procedure: all points
/// inside at 1 sigma, and Delta against the reference region at most
/// `2 delta0`.
fn range_condition(
    ch: &D2Channel,
    data: &[PointRecord],
    cc_region: &Region,
    delta0: f64,
) -> bool {
    if !ch.is_cp_explicit() {
        return false;
    }
    let Ok(region) = Region::boundary(ch, BOUNDARY_DIRECTIONS) else {
        return false;
    };
    if data.iter().any(|r| region.margin_k_sigma(&r.point, 1.0) > 0.0) {
        return false;
    }
    match geometry::delta(&region, cc_region) {
        Ok(d) => d <= 2.0 * delta0,
        Err(_) => false,
    }
}

/// Widest offset (in `[0, 1]`) for which `cond` holds, to within 1e-4,
/// assuming `cond(0)` holds.
fn bisect_range(cond: impl Fn(f64) -> bool) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    if cond(hi) {
        return hi;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if cond(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Per-parameter validation ranges: for each of d2, d3, c3 separately
/// (the others fixed), the widest interval of offsets on which the
/// hypothesis stays validated at 1 sigma and Delta stays within twice
/// `delta0`.  d1 is reported as undetermined.
pub fn parameter_ranges(
    hyp: &D2Channel,
    data: &[PointRecord],
    delta0: f64,
) -> Result<ParameterRanges, ProtocolError> {
    let verdict = di_tv(hyp, data, 1.0)?;
    if !verdict.validated {
        return Err(ProtocolError::NotValidated(1.0));
    }
    let (_, cc_region) = di_cc(data, DI_CC_RESTARTS, 0)?;
    let perturb = |idx: usize, t: f64| -> D2Channel {
        let mut ch = *hyp;
        match idx {
            0 => ch.d2 += t,
            1 => ch.d3 += t,
            _ => ch.c3 += t,
        }
        // keep the canonical ordering d1 <= d2 so the boundary formula
        // sees the intended transverse semi-axis
        if idx == 0 && ch.d2 < ch.d1 {
            ch.d1 = ch.d2;
        }
        ch
    };
    // the six endpoints are independent bisections
    let offsets: Vec<f64> = (0..6)
        .into_par_iter()
        .map(|e| {
            let idx = e / 2;
            let sign = if e % 2 == 0 { -1.0 } else { 1.0 };
            bisect_range(|t| range_condition(&perturb(idx, sign * t), data, &cc_region, delta0))
        })
        .collect();
    Ok(ParameterRanges {
        d2: (offsets[0], offsets[1]),
        d3: (offsets[2], offsets[3]),
        c3: (offsets[4], offsets[5]),
        d1_undetermined: true,
    })
}

/// Area of the polygon built from every `stride`-th support direction;
/// the cheap objective used inside the DI-CC search.
fn subset_area(directions: &[[f64; 2]], support: &[f64], stride: usize) -> f64 {
    let dirs: Vec<[f64; 2]> = directions.iter().step_by(stride).copied().collect();
    let hs: Vec<f64> = support.iter().step_by(stride).copied().collect();
    geometry::shoelace(&geometry::halfplane_intersection(&dirs, &hs))
}

/// DI-CC with an explicit containment allowance `k` (in units of each
/// point's standard error; `k = 0` demands strict containment).
pub fn di_cc_with(
    data: &[PointRecord],
    restarts: usize,
    seed: u64,
    k: f64,
) -> Result<(ClassReport, Region), ProtocolError> {
    if data.is_empty() {
        return Err(ProtocolError::NoData);
    }
    let witnesses: Vec<(f64, f64)> = data
        .iter()
        .filter(|r| {
            !(0.0..=1.0).contains(&r.point.p11) || !(0.0..=1.0).contains(&r.point.p12)
        })
        .map(|r| (r.point.p11, r.point.p12))
        .collect();
    if !witnesses.is_empty() {
        return Err(ProtocolError::InfeasibleData(witnesses));
    }
    let n = BOUNDARY_DIRECTIONS;
    let directions = geometry::unit_directions(n);
    // per-direction data maxima (minus the k-sigma allowance): the
    // containment constraint collapses to h_j >= m_j
    let maxima: Vec<f64> = directions
        .iter()
        .map(|u| {
            data.iter()
                .map(|r| {
                    let (s11, s12) = (
                        r.point.s11.unwrap_or(0.0),
                        r.point.s12.unwrap_or(0.0),
                    );
                    let sigma =
                        (u[0] * u[0] * s11 * s11 + u[1] * u[1] * s12 * s12).sqrt();
                    u[0] * r.point.p11 + u[1] * r.point.p12 - k * sigma
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let penalty = 1e3;
    let objective = |x: &[f64]| -> f64 {
        let (d2, d3, c3) = (x[0], x[1], x[2].abs());
        let Some(ch) = class_representative(d2.clamp(0.0, 1.0), d3.clamp(0.0, 1.0), c3)
        else {
            // graded push back toward the feasible box
            let excess = (d2 - 1.0).max(0.0)
                + (-d2).max(0.0)
                + (d3 - 1.0).max(0.0)
                + (-d3).max(0.0)
                + (d3 + c3 - 1.0).max(0.0);
            return 4.0 + penalty * (excess + 1e-3);
        };
        let support: Vec<f64> = directions
            .iter()
            .map(|u| geometry::support_closed(&ch, *u))
            .collect();
        let violation: f64 = support
            .iter()
            .zip(&maxima)
            .map(|(h, m)| (m - h).max(0.0))
            .sum();
        subset_area(&directions, &support, 16) + penalty * violation
    };
    let results: Vec<Option<([f64; 3], f64)>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let start = loop {
                let d2 = rng.gen_range(0.0..1.0);
                let d3 = rng.gen_range(0.0..1.0);
                let c3 = rng.gen_range(0.0..1.0);
                if class_representative(d2, d3, c3).is_some() {
                    break [d2, d3, c3];
                }
            };
            let (x, fx) = nelder_mead(&objective, &start, 0.15, 600, 1e-12);
            let (d2, d3, c3) = (
                x[0].clamp(0.0, 1.0),
                x[1].clamp(0.0, 1.0),
                x[2].abs().min(1.0),
            );
            let ch = class_representative(d2, d3, c3)?;
            // accept only strictly feasible solutions
            let feasible = directions
                .iter()
                .zip(&maxima)
                .all(|(u, m)| geometry::support_closed(&ch, *u) >= m - 1e-9);
            feasible.then_some(([d2, d3, c3], fx))
        })
        .collect();
    let mut best: Option<([f64; 3], f64, usize)> = None;
    for (i, r) in results.into_iter().enumerate() {
        if let Some((x, fx)) = r {
            if best.as_ref().map_or(true, |(_, bfx, _)| fx < *bfx) {
                best = Some((x, fx, i));
            }
        }
    }
    let Some(([d2, d3, c3], _, _)) = best else {
        return Err(ProtocolError::InfeasibleData(vec![]));
    };
    let ch = class_representative(d2, d3, c3).expect("winner is feasible");
    let region = Region::boundary(&ch, n)?;
    // invariant: the minimal region contains every input point
    for r in data {
        debug_assert!(
            region.margin_k_sigma(&r.point, k) <= 1e-6,
            "DI-CC region must contain its data"
        );
    }
    let degenerate = region.area() < DEGENERATE_AREA;
    let m = mu(d2, d3, c3).ok();
    Ok((
        ClassReport {
            d2,
            d3,
            c3,
            mu: m,
            regime: m.map(|v| (0.0..=1.0).contains(&v)).unwrap_or(false),
            degenerate,
            delta: None,
        },
        region,
    ))
}

/// DI-CC: the minimal-area correlation set containing every data point
/// (strict containment), reported through its class parameters.
pub fn di_cc(
    data: &[PointRecord],
    restarts: usize,
    seed: u64,
) -> Result<(ClassReport, Region), ProtocolError> {
    di_cc_with(data, restarts, seed, 0.0)
}
