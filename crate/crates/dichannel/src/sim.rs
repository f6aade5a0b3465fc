//! Synthetic measurement data: tomography and probe setting grids,
//! binomial sampling from a seeded counter-based generator, frequency
//! tables with standard errors, and the counts/correlations file formats.
//!
//! # Randomness
//! Sampling uses the ChaCha8 stream cipher generator (`rand_chacha`),
//! seeded from a caller-supplied 64-bit seed.  Each setting draws from
//! its own substream, selected by the setting's index in the table, so
//! results are independent of worker scheduling and bit-reproducible for
//! a fixed seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::channel::{BlochState, ChannelSpec, D2Channel, Effect};
use crate::error::{FormatError, SimError};
use crate::geometry::CorrelationPoint;
use crate::linalg::Vec3;

/// One prepared input state measured against one binary POVM.
///
/// Input states come in orthogonal pairs: inputs `2k` and `2k + 1` are
/// antipodal on the Bloch sphere and together with a measurement yield
/// one correlation point `(p11, p12)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub input_id: usize,
    pub meas_id: usize,
    pub state: BlochState,
    /// Effect of outcome 1; outcome 2 is its complement.
    pub effect: Effect,
}

impl Setting {
    /// Index of the orthogonal state pair this input belongs to.
    pub fn pair_id(&self) -> usize {
        self.input_id / 2
    }
}

/// The six eigenstates of the Pauli operators crossed with the three
/// Pauli measurements: the standard 18-setting tomography set.
pub fn tomography_settings() -> Vec<Setting> {
    let states = [
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(0.0, 0.0, -1.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(-1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, -1.0, 0.0),
    ];
    let axes = [
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
    ];
    let mut out = Vec::with_capacity(18);
    for (i, v) in states.iter().enumerate() {
        for (m, a) in axes.iter().enumerate() {
            out.push(Setting {
                input_id: i,
                meas_id: m,
                state: BlochState::new_unchecked(*v),
                effect: Effect::projector(*a),
            });
        }
    }
    out
}

/// `n` orthogonal state pairs crossed with `n` projective measurements,
/// all in the XZ plane with uniformly spaced Bloch angles.  Yields `n^2`
/// pair/measurement combinations (`2 n^2` individual settings).
pub fn grid_settings(n: usize) -> Result<Vec<Setting>, SimError> {
    if n < 2 {
        return Err(SimError::GridTooSmall(n));
    }
    let mut out = Vec::with_capacity(2 * n * n);
    for pair in 0..n {
        let th = std::f64::consts::PI * pair as f64 / n as f64;
        let v = Vec3::new(th.sin(), 0.0, th.cos());
        for member in 0..2 {
            let sign = if member == 0 { 1.0 } else { -1.0 };
            for m in 0..n {
                let al = std::f64::consts::PI * m as f64 / n as f64;
                out.push(Setting {
                    input_id: 2 * pair + member,
                    meas_id: m,
                    state: BlochState::new_unchecked(v.scale(sign)),
                    effect: Effect::projector(Vec3::new(al.sin(), 0.0, al.cos())),
                });
            }
        }
    }
    Ok(out)
}

/// The two published maps from the boundary angle `gamma` to the state
/// weight `omega`.  The source text states both; see
/// [`boundary_probe`] for how the conflict is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaConvention {
    /// `omega = 1 - tan(gamma) / 2`.
    HalfTan,
    /// `omega = (1 + tan(gamma))^{-1}`.
    InverseTan,
}

impl OmegaConvention {
    pub fn omega(&self, gamma: f64) -> f64 {
        match self {
            OmegaConvention::HalfTan => 1.0 - gamma.tan() / 2.0,
            OmegaConvention::InverseTan => 1.0 / (1.0 + gamma.tan()),
        }
    }
}

/// The convention selected by the resolution check (see the module tests
/// and docs/formats.md): with `omega = (1 + tan(gamma))^{-1}` the probe
/// for angle `gamma` is the boundary point whose supporting direction is
/// `(cos(gamma), -sin(gamma))` in the `(p11, p12)` plane.  Both mappings
/// park the probe on the analytic boundary; only this one makes `gamma`
/// the supporting-direction angle.
pub const RESOLVED_OMEGA: OmegaConvention = OmegaConvention::InverseTan;

/// Amplitude-damping boundary probe: the orthogonal state pair
/// `sqrt(omega)|0> +- ...` and the normalized projector that together
/// achieve the curved part of the AD correlation boundary.
///
/// Valid on the sub-arc `gamma` in `[0, pi/4]`; for negative `gamma`
/// both published `omega` maps leave `[0, 1]`, so that half of the arc
/// is not constructible from the printed equations (the region is
/// mirror-symmetric, so no boundary point is lost).
pub fn boundary_probe(lambda: f64, gamma: f64) -> Result<[Setting; 2], SimError> {
    boundary_probe_with(lambda, gamma, RESOLVED_OMEGA)
}

/// [`boundary_probe`] under an explicit `omega` convention; used by the
/// convention-resolution check.
pub fn boundary_probe_with(
    lambda: f64,
    gamma: f64,
    conv: OmegaConvention,
) -> Result<[Setting; 2], SimError> {
    let omega = conv.omega(gamma);
    if !(0.0..=1.0).contains(&omega) {
        return Err(SimError::ProbeWeightOutOfRange(omega));
    }
    let s01 = (omega * (1.0 - omega)).max(0.0).sqrt();
    let v0 = Vec3::new(2.0 * s01, 0.0, 2.0 * omega - 1.0);
    // |pi_+> = |0> + beta |1>.  The published closed form holds with
    // lambda read as the *transmission* 1 - (damping efficiency): only
    // then is the projector tangent to the correlation boundary for all
    // efficiencies (the two readings coincide at efficiency 1/2).  This
    // is equivalent to the exact support-function optimizer
    // beta = tan(phi/2), cos(phi) = (2w - 1) / sqrt(1 - 4 w (1-w) l).
    let eta = 1.0 - lambda;
    let den = 2.0 * omega - 1.0 + (1.0 - 4.0 * omega * (1.0 - omega) * (1.0 - eta)).sqrt();
    let num = 2.0 * (eta * omega * (1.0 - omega)).sqrt();
    if den.abs() < 1e-12 && num.abs() > 1e-12 {
        return Err(SimError::DegenerateProbe(gamma));
    }
    let beta = if num.abs() <= 1e-12 { 0.0 } else { num / den };
    let n2 = 1.0 + beta * beta;
    let axis = Vec3::new(2.0 * beta / n2, 0.0, (1.0 - beta * beta) / n2);
    let effect = Effect::projector(axis);
    Ok([
        Setting {
            input_id: 0,
            meas_id: 0,
            state: BlochState::new_unchecked(v0),
            effect,
        },
        Setting {
            input_id: 1,
            meas_id: 0,
            state: BlochState::new_unchecked(v0.scale(-1.0)),
            effect,
        },
    ])
}

/// One outcome count of one setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub input_id: usize,
    pub meas_id: usize,
    /// Outcome label, 1 or 2.
    pub outcome: u8,
    pub count: u64,
}

/// Raw counts of a (simulated) run: header and per-outcome records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsTable {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub channel: Option<ChannelSpec>,
    pub shots: u64,
    pub seed: u64,
    pub settings: Vec<Setting>,
    pub records: Vec<CountRecord>,
}

/// Exact outcome-1 probability of a setting under a channel, with the
/// physicality guard applied before clamping.
fn exact_probability(ch: &D2Channel, s: &Setting, index: usize) -> Result<f64, SimError> {
    let out = ch.apply(&s.state);
    let raw = s.effect.t + s.effect.s.dot(out.vector());
    if !(-1e-9..=1.0 + 1e-9).contains(&raw) {
        return Err(SimError::UnphysicalProbability {
            setting: index,
            p: raw,
        });
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Samples every setting: outcome-1 counts are binomial in `shots` with
/// the exact Born probability.  Setting `i` draws from ChaCha8 stream
/// `i` of the given seed, so the result does not depend on evaluation
/// order.
pub fn simulate_counts(
    ch: &D2Channel,
    settings: &[Setting],
    shots: u64,
    seed: u64,
) -> Result<CountsTable, SimError> {
    if shots == 0 {
        return Err(SimError::NoShots);
    }
    let mut records = Vec::with_capacity(2 * settings.len());
    for (i, s) in settings.iter().enumerate() {
        let p = exact_probability(ch, s, i)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let n1 = Binomial::new(shots, p)
            .expect("probability already validated")
            .sample(&mut rng);
        records.push(CountRecord {
            input_id: s.input_id,
            meas_id: s.meas_id,
            outcome: 1,
            count: n1,
        });
        records.push(CountRecord {
            input_id: s.input_id,
            meas_id: s.meas_id,
            outcome: 2,
            count: shots - n1,
        });
    }
    Ok(CountsTable {
        channel: Some(ChannelSpec::from_d2(ch)),
        shots,
        seed,
        settings: settings.to_vec(),
        records,
    })
}

/// Outcome-1 relative frequency of one setting with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRecord {
    pub input_id: usize,
    pub meas_id: usize,
    /// Relative frequency of outcome 1; outcome 2 has `1 - f`.
    pub f: f64,
    /// Standard error `sqrt(f (1 - f) / shots)`, floored at
    /// `1 / (2 sqrt(shots))` when a count is zero.
    pub s: f64,
}

/// Frequencies with standard errors for every setting of a counts table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub shots: u64,
    pub records: Vec<FrequencyRecord>,
}

pub fn frequencies(c: &CountsTable) -> Result<FrequencyTable, SimError> {
    if c.shots == 0 {
        return Err(SimError::NoShots);
    }
    let n = c.shots as f64;
    let mut records = Vec::new();
    for r in &c.records {
        if r.outcome != 1 {
            continue;
        }
        let f = r.count as f64 / n;
        let s = if r.count == 0 || r.count == c.shots {
            0.5 / n.sqrt()
        } else {
            (f * (1.0 - f) / n).sqrt()
        };
        records.push(FrequencyRecord {
            input_id: r.input_id,
            meas_id: r.meas_id,
            f,
            s,
        });
    }
    Ok(FrequencyTable {
        shots: c.shots,
        records,
    })
}

/// One correlation point with its provenance: the state pair and the
/// measurement it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub pair_id: usize,
    pub meas_id: usize,
    pub point: CorrelationPoint,
}

/// Pairs the two inputs of each orthogonal state pair under each
/// measurement: input `2k` gives `p11`, input `2k + 1` gives `p12`.
/// Settings missing their partner are dropped.
pub fn to_points(f: &FrequencyTable) -> Vec<PointRecord> {
    let mut out = Vec::new();
    for a in &f.records {
        if a.input_id % 2 != 0 {
            continue;
        }
        let Some(b) = f
            .records
            .iter()
            .find(|b| b.input_id == a.input_id + 1 && b.meas_id == a.meas_id)
        else {
            continue;
        };
        out.push(PointRecord {
            pair_id: a.input_id / 2,
            meas_id: a.meas_id,
            point: CorrelationPoint::with_errors(a.f, b.f, a.s, b.s),
        });
    }
    out
}

/// Infinite-shot limit of [`frequencies`]: the relative frequency of
/// each setting equals its exact Born probability, with zero standard
/// error (`shots` is reported as 0 to mark the limit).
pub fn exact_frequencies(
    ch: &D2Channel,
    settings: &[Setting],
) -> Result<FrequencyTable, SimError> {
    let mut records = Vec::with_capacity(settings.len());
    for (i, s) in settings.iter().enumerate() {
        records.push(FrequencyRecord {
            input_id: s.input_id,
            meas_id: s.meas_id,
            f: exact_probability(ch, s, i)?,
            s: 0.0,
        });
    }
    Ok(FrequencyTable { shots: 0, records })
}

/// Exact correlation points of a setting list under a channel (no
/// sampling); same pairing rule as [`to_points`], with zero errors
/// omitted.
pub fn exact_points(ch: &D2Channel, settings: &[Setting]) -> Result<Vec<PointRecord>, SimError> {
    let mut out = Vec::new();
    for (i, a) in settings.iter().enumerate() {
        if a.input_id % 2 != 0 {
            continue;
        }
        let Some((j, b)) = settings
            .iter()
            .enumerate()
            .find(|(_, b)| b.input_id == a.input_id + 1 && b.meas_id == a.meas_id)
        else {
            continue;
        };
        let p11 = exact_probability(ch, a, i)?;
        let p12 = exact_probability(ch, b, j)?;
        out.push(PointRecord {
            pair_id: a.input_id / 2,
            meas_id: a.meas_id,
            point: CorrelationPoint::new(p11, p12),
        });
    }
    Ok(out)
}

/// Serializes a counts table as JSON.  All floating-point fields are
/// written in shortest round-trip form, which preserves every bit of
/// the value.
pub fn write_counts_json<W: std::io::Write>(w: W, c: &CountsTable) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(w, c)?;
    Ok(())
}

pub fn read_counts_json<R: std::io::Read>(r: R) -> Result<CountsTable, FormatError> {
    let c: CountsTable = serde_json::from_reader(r)?;
    for rec in &c.records {
        if rec.outcome != 1 && rec.outcome != 2 {
            return Err(FormatError::Invalid(format!(
                "outcome {} is not 1 or 2",
                rec.outcome
            )));
        }
    }
    // per-setting counts must sum to shots
    for s in &c.settings {
        let total: u64 = c
            .records
            .iter()
            .filter(|r| r.input_id == s.input_id && r.meas_id == s.meas_id)
            .map(|r| r.count)
            .sum();
        if total != c.shots {
            return Err(FormatError::Invalid(format!(
                "setting ({}, {}): counts sum to {} but shots = {}",
                s.input_id, s.meas_id, total, c.shots
            )));
        }
    }
    Ok(c)
}

/// Writes correlation points as CSV with columns
/// `pair_id,meas_id,p11,p12,s11,s12` (empty error fields when absent).
pub fn write_correlations_csv<W: std::io::Write>(
    mut w: W,
    points: &[PointRecord],
) -> Result<(), FormatError> {
    writeln!(w, "pair_id,meas_id,p11,p12,s11,s12")?;
    for r in points {
        let err = |e: Option<f64>| e.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.pair_id,
            r.meas_id,
            r.point.p11,
            r.point.p12,
            err(r.point.s11),
            err(r.point.s12)
        )?;
    }
    Ok(())
}

pub fn read_correlations_csv<R: std::io::Read>(r: R) -> Result<Vec<PointRecord>, FormatError> {
    let mut text = String::new();
    let mut r = r;
    r.read_to_string(&mut text)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            let header = line.trim();
            if header != "pair_id,meas_id,p11,p12,s11,s12" {
                return Err(FormatError::Csv {
                    line: 1,
                    msg: format!("unexpected header {header:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(FormatError::Csv {
                line: lineno + 1,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| FormatError::Csv {
            line: lineno + 1,
            msg: format!("bad {what}"),
        };
        let pair_id: usize = fields[0].trim().parse().map_err(|_| bad("pair_id"))?;
        let meas_id: usize = fields[1].trim().parse().map_err(|_| bad("meas_id"))?;
        let prob = |i: usize, what: &str| -> Result<f64, FormatError> {
            let v: f64 = fields[i].trim().parse().map_err(|_| bad(what))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(what));
            }
            Ok(v)
        };
        let p11 = prob(2, "p11")?;
        let p12 = prob(3, "p12")?;
        let err = |i: usize, what: &str| -> Result<Option<f64>, FormatError> {
            let t = fields[i].trim();
            if t.is_empty() {
                return Ok(None);
            }
            let v: f64 = t.parse().map_err(|_| bad(what))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(what));
            }
            Ok(Some(v))
        };
        let s11 = err(4, "s11")?;
        let s12 = err(5, "s12")?;
        let mut point = CorrelationPoint::new(p11, p12);
        point.s11 = s11;
        point.s12 = s12;
        out.push(PointRecord {
            pair_id,
            meas_id,
            point,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::born;
    use crate::geometry::{ad_contains, p_to_xy, Region};

    #[test]
    fn tomography_settings_shape() {
        let s = tomography_settings();
        assert_eq!(s.len(), 18);
        // |0> against the sigma_z projector
        assert!((born(&s[0].effect, &s[0].state) - 1.0).abs() < 1e-15);
        // |+> (input 2) against sigma_z (meas 0)
        let plus_z = s.iter().find(|q| q.input_id == 2 && q.meas_id == 0).unwrap();
        assert!((born(&plus_z.effect, &plus_z.state) - 0.5).abs() < 1e-15);
        // inputs pair up antipodally
        for k in 0..3 {
            let a = s.iter().find(|q| q.input_id == 2 * k).unwrap();
            let b = s.iter().find(|q| q.input_id == 2 * k + 1).unwrap();
            let sum = a.state.vector().add(b.state.vector());
            assert!(sum.norm() < 1e-15);
        }
    }

    #[test]
    fn grid_settings_shape() {
        let s = grid_settings(29).unwrap();
        assert_eq!(s.len(), 2 * 841);
        let mut combos: Vec<(usize, usize)> = s.iter().map(|q| (q.pair_id(), q.meas_id)).collect();
        combos.sort_unstable();
        combos.dedup();
        assert_eq!(combos.len(), 841, "841 pair/measurement combinations");
        // pair 0 has omega = 1: state (0,0,1)
        let first = s.iter().find(|q| q.input_id == 0).unwrap();
        assert!((first.state.vector().0[2] - 1.0).abs() < 1e-15);
        // the equatorial pair has omega = 1/2: state (1,0,0)
        let n = 58; // theta = pi/2 at pair index n/2 for n = 116
        let s2 = grid_settings(n).unwrap();
        let eq = s2.iter().find(|q| q.input_id == n).unwrap();
        assert!((eq.state.vector().0[0] - 1.0).abs() < 1e-12);
        assert!(eq.state.vector().0[2].abs() < 1e-12);
        assert!(grid_settings(1).is_err());
    }

    #[test]
    fn grid_points_inside_ad_region() {
        let ch = D2Channel::amplitude_damping(0.35).unwrap();
        let pts = exact_points(&ch, &grid_settings(29).unwrap()).unwrap();
        assert_eq!(pts.len(), 841);
        for r in &pts {
            let q = p_to_xy(&r.point);
            assert!(ad_contains(0.35, &q).unwrap(), "{:?}", r.point);
        }
    }

    #[test]
    fn probe_points_on_boundary_under_both_conventions() {
        // Resolution check for the conflicting omega maps: both place
        // every probe on the analytic boundary (they parametrize the
        // same arc), so the margin criterion alone does not
        // discriminate.  See gamma_matches_support_direction.
        for conv in [OmegaConvention::HalfTan, OmegaConvention::InverseTan] {
            for lambda in [0.2, 0.5, 0.8] {
                let ch = D2Channel::amplitude_damping(lambda).unwrap();
                let region = Region::boundary(&ch, 2048).unwrap();
                for i in 0..20 {
                    let gamma = std::f64::consts::FRAC_PI_4 * i as f64 / 19.0;
                    let probe = boundary_probe_with(lambda, gamma, conv).unwrap();
                    let pts = exact_points(&ch, &probe).unwrap();
                    let m = region.margin(&pts[0].point);
                    assert!(
                        m.abs() <= 1e-4,
                        "{conv:?} lambda={lambda} gamma={gamma}: margin {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_matches_support_direction_only_for_inverse_tan() {
        // The tie-break that selects RESOLVED_OMEGA: under the
        // inverse-tan map the probe for gamma is supported by the
        // direction (cos gamma, -sin gamma); under the half-tan map it
        // is not (except at the arc endpoints, where the maps agree).
        let lambda = 0.5;
        let ch = D2Channel::amplitude_damping(lambda).unwrap();
        let mut worst = [0.0_f64; 2];
        for (ci, conv) in [OmegaConvention::InverseTan, OmegaConvention::HalfTan]
            .iter()
            .enumerate()
        {
            for i in 1..19 {
                let gamma = std::f64::consts::FRAC_PI_4 * i as f64 / 19.0;
                let probe = boundary_probe_with(lambda, gamma, *conv).unwrap();
                let p = exact_points(&ch, &probe).unwrap()[0].point;
                let u = [gamma.cos(), -gamma.sin()];
                let h = crate::geometry::support(&ch, u).unwrap();
                let gap = h - (u[0] * p.p11 + u[1] * p.p12);
                assert!(gap >= -1e-9);
                worst[ci] = worst[ci].max(gap);
            }
        }
        assert!(worst[0] < 1e-9, "inverse-tan support gap {}", worst[0]);
        assert!(worst[1] > 1e-3, "half-tan should not be tangent");
        assert_eq!(RESOLVED_OMEGA, OmegaConvention::InverseTan);
    }

    #[test]
    fn probe_tightness_resolved_convention() {
        for lambda in [0.2, 0.5, 0.8] {
            let ch = D2Channel::amplitude_damping(lambda).unwrap();
            let region = Region::boundary(&ch, 2048).unwrap();
            for i in 0..20 {
                let gamma = std::f64::consts::FRAC_PI_4 * i as f64 / 19.0;
                let probe = boundary_probe(lambda, gamma).unwrap();
                let pts = exact_points(&ch, &probe).unwrap();
                assert!(region.margin(&pts[0].point).abs() <= 1e-4);
            }
        }
    }

    #[test]
    fn probe_identity_channel_reaches_corner() {
        // lambda = 0: the correlation set is the full square and the
        // probe pins a corner region point (p11 = 1 at gamma = 0).
        let ch = D2Channel::amplitude_damping(0.0).unwrap();
        let probe = boundary_probe(0.0, 0.0).unwrap();
        let pts = exact_points(&ch, &probe).unwrap();
        assert!((pts[0].point.p11 - 1.0).abs() < 1e-12);
        assert!((pts[0].point.p12 - 0.0).abs() < 1e-12);
    }

    #[test]
    fn probe_endpoint_hits_polytope_junction() {
        // gamma = 0 gives omega = 1: the tangential junction (1, lambda)
        // between the arc and the p11 = 1 edge.
        let lambda = 0.4;
        let ch = D2Channel::amplitude_damping(lambda).unwrap();
        let probe = boundary_probe(lambda, 0.0).unwrap();
        let pts = exact_points(&ch, &probe).unwrap();
        assert!((pts[0].point.p11 - 1.0).abs() < 1e-12);
        assert!((pts[0].point.p12 - lambda).abs() < 1e-12);
    }

    #[test]
    fn probe_rejects_negative_gamma() {
        assert!(matches!(
            boundary_probe(0.4, -0.2),
            Err(SimError::ProbeWeightOutOfRange(_))
        ));
    }

    #[test]
    fn simulate_deterministic_and_exact_edges() {
        let ch = D2Channel::amplitude_damping(0.3).unwrap();
        let settings = tomography_settings();
        let a = simulate_counts(&ch, &settings, 1000, 7).unwrap();
        let b = simulate_counts(&ch, &settings, 1000, 7).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        write_counts_json(&mut ba, &a).unwrap();
        write_counts_json(&mut bb, &b).unwrap();
        assert_eq!(ba, bb, "identical bytes for a fixed seed");
        let c = simulate_counts(&ch, &settings, 1000, 8).unwrap();
        assert_ne!(a.records, c.records, "different seed, different draw");
        // p = 1 setting: |0> measured along z is a fixed point of AD
        let r = a
            .records
            .iter()
            .find(|r| r.input_id == 0 && r.meas_id == 0 && r.outcome == 1)
            .unwrap();
        assert_eq!(r.count, 1000);
    }

    #[test]
    fn simulate_half_probability_concentrates() {
        // p = 1/2 with 10^6 shots: |f - 1/2| < 0.002 is a 4-sigma band
        let ch = D2Channel::IDENTITY;
        let settings: Vec<Setting> = tomography_settings()
            .into_iter()
            .filter(|s| s.input_id == 2 && s.meas_id == 0)
            .collect();
        let mut misses = 0;
        for seed in 0..100 {
            let c = simulate_counts(&ch, &settings, 1_000_000, seed).unwrap();
            let f = frequencies(&c).unwrap().records[0].f;
            if (f - 0.5).abs() >= 0.002 {
                misses += 1;
            }
        }
        assert!(misses <= 1, "{misses} of 100 seeds outside the band");
    }

    #[test]
    fn frequency_errors_and_floor() {
        let ch = D2Channel::amplitude_damping(0.3).unwrap();
        let settings = tomography_settings();
        let c = simulate_counts(&ch, &settings, 10, 3).unwrap();
        let f = frequencies(&c).unwrap();
        assert_eq!(f.records.len(), settings.len());
        for r in &f.records {
            if r.f == 0.0 || r.f == 1.0 {
                assert!((r.s - 0.5 / (10.0_f64).sqrt()).abs() < 1e-15);
            } else {
                assert!((r.s - (r.f * (1.0 - r.f) / 10.0).sqrt()).abs() < 1e-15);
            }
        }
        // hand-checked arithmetic: counts (7, 3) of 10
        let manual = CountsTable {
            channel: None,
            shots: 10,
            seed: 0,
            settings: vec![],
            records: vec![
                CountRecord {
                    input_id: 0,
                    meas_id: 0,
                    outcome: 1,
                    count: 7,
                },
                CountRecord {
                    input_id: 0,
                    meas_id: 0,
                    outcome: 2,
                    count: 3,
                },
            ],
        };
        let f = frequencies(&manual).unwrap();
        assert!((f.records[0].f - 0.7).abs() < 1e-15);
        assert!((f.records[0].s - 0.021_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn convergence_rate() {
        let ch = D2Channel::amplitude_damping(0.4).unwrap();
        let settings = tomography_settings();
        for shots in [100_u64, 10_000, 1_000_000] {
            let c = simulate_counts(&ch, &settings, shots, 42).unwrap();
            let f = frequencies(&c).unwrap();
            let band = 5.0 / (shots as f64).sqrt();
            for (s, r) in settings.iter().zip(&f.records) {
                let p = exact_probability(&ch, s, 0).unwrap();
                assert!(
                    (r.f - p).abs() <= band.max(5.0 * 0.5 / (shots as f64).sqrt()),
                    "shots={shots}: f={} p={p}",
                    r.f
                );
            }
        }
    }

    #[test]
    fn counts_json_roundtrip_and_validation() {
        let ch = D2Channel::amplitude_damping(0.3).unwrap();
        let c = simulate_counts(&ch, &tomography_settings(), 500, 11).unwrap();
        let mut buf = Vec::new();
        write_counts_json(&mut buf, &c).unwrap();
        let back = read_counts_json(buf.as_slice()).unwrap();
        assert_eq!(c, back);
        // corrupt a count: the sum invariant must trip
        let mut bad = c.clone();
        bad.records[0].count += 1;
        let mut buf = Vec::new();
        write_counts_json(&mut buf, &bad).unwrap();
        assert!(read_counts_json(buf.as_slice()).is_err());
    }

    #[test]
    fn points_pairing_and_csv_roundtrip() {
        let ch = D2Channel::amplitude_damping(0.3).unwrap();
        let settings = grid_settings(5).unwrap();
        let c = simulate_counts(&ch, &settings, 10_000, 1).unwrap();
        let pts = to_points(&frequencies(&c).unwrap());
        assert_eq!(pts.len(), 25);
        let mut buf = Vec::new();
        write_correlations_csv(&mut buf, &pts).unwrap();
        let back = read_correlations_csv(buf.as_slice()).unwrap();
        assert_eq!(pts.len(), back.len());
        for (a, b) in pts.iter().zip(&back) {
            assert_eq!(a.pair_id, b.pair_id);
            assert_eq!(a.meas_id, b.meas_id);
            assert!((a.point.p11 - b.point.p11).abs() < 1e-15);
            assert!((a.point.s11.unwrap() - b.point.s11.unwrap()).abs() < 1e-15);
        }
        assert!(read_correlations_csv(&b"bad header\n1,2,3"[..]).is_err());
        assert!(read_correlations_csv(
            &b"pair_id,meas_id,p11,p12,s11,s12\n0,0,1.5,0.2,,\n"[..]
        )
        .is_err());
    }

    #[test]
    fn empty_counts_give_empty_frequencies() {
        let empty = CountsTable {
            channel: None,
            shots: 10,
            seed: 0,
            settings: vec![],
            records: vec![],
        };
        assert!(frequencies(&empty).unwrap().records.is_empty());
    }
}
