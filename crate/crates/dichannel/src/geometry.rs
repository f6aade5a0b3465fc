//! The convex set of binary input/output correlations of a dihedrally
//! covariant channel: analytic amplitude-damping boundary, numeric
//! support-function boundary, membership, areas and the equivalence-class
//! parameter.

use serde::{Deserialize, Serialize};

use crate::channel::D2Channel;
use crate::error::GeometryError;

/// Grid size for the support-function angle sweep.
pub const SUPPORT_GRID: usize = 4096;

/// Default number of boundary support directions.
pub const BOUNDARY_DIRECTIONS: usize = 2048;

/// Default membership slack for analytically exact points.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// A pair of conditional probabilities `(p_{1|1}, p_{1|2})`, optionally
/// with per-coordinate standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub p11: f64,
    pub p12: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s11: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s12: Option<f64>,
}

impl CorrelationPoint {
    pub fn new(p11: f64, p12: f64) -> Self {
        CorrelationPoint {
            p11,
            p12,
            s11: None,
            s12: None,
        }
    }

    pub fn with_errors(p11: f64, p12: f64, s11: f64, s12: f64) -> Self {
        CorrelationPoint {
            p11,
            p12,
            s11: Some(s11),
            s12: Some(s12),
        }
    }
}

/// Cartesian coordinates on the correlation square: `|x + y| <= 1` and
/// `|x - y| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYPoint {
    pub x: f64,
    pub y: f64,
}

impl XYPoint {
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if (x + y).abs() > 1.0 + 1e-12 || (x - y).abs() > 1.0 + 1e-12 {
            return Err(GeometryError::OutsideSquare { x, y });
        }
        Ok(XYPoint { x, y })
    }
}

/// `p11 = (1 + x - y)/2`, `p12 = (1 + x + y)/2`.
pub fn xy_to_p(q: &XYPoint) -> CorrelationPoint {
    CorrelationPoint::new(0.5 * (1.0 + q.x - q.y), 0.5 * (1.0 + q.x + q.y))
}

/// Inverse of [`xy_to_p`].
pub fn p_to_xy(p: &CorrelationPoint) -> XYPoint {
    XYPoint {
        x: p.p11 + p.p12 - 1.0,
        y: p.p12 - p.p11,
    }
}

/// Left-hand side of the amplitude-damping correlation inequality in
/// Cartesian coordinates; membership in the AD set is `lhs <= 1 - lambda`.
pub fn ad_lhs(q: &XYPoint) -> Result<f64, GeometryError> {
    let (x, y) = (q.x, q.y);
    let mut r1 = 1.0 - 2.0 * y - x * x + y * y;
    let mut r2 = 1.0 + 2.0 * y - x * x + y * y;
    for r in [&mut r1, &mut r2] {
        if *r < 0.0 {
            if *r < -1e-12 {
                return Err(GeometryError::OutsideSquare { x, y });
            }
            *r = 0.0;
        }
    }
    Ok(0.25 * (r1.sqrt() - r2.sqrt()).powi(2))
}

/// Analytic membership test for the amplitude-damping correlation set.
pub fn ad_contains(lambda: f64, q: &XYPoint) -> Result<bool, GeometryError> {
    Ok(ad_lhs(q)? <= 1.0 - lambda + 1e-9)
}

// The angular profile maximized inside the support function:
// psi(phi) = w c3 cos(phi) + g sqrt(d2^2 sin^2 phi + d3^2 cos^2 phi),
// where d2 is the larger transverse semi-axis magnitude.
fn psi(ch: &D2Channel, w: f64, g: f64, cos_phi: f64) -> f64 {
    let t2 = ch.d1.abs().max(ch.d2.abs());
    let t3 = ch.d3;
    let m2 = cos_phi * cos_phi;
    w * ch.c3 * cos_phi + g * (t2 * t2 * (1.0 - m2) + t3 * t3 * m2).sqrt()
}

fn psi_max_grid(ch: &D2Channel, w: f64, g: f64, grid: usize) -> f64 {
    // sin(phi) enters squared only, so phi in [0, pi] suffices
    let step = std::f64::consts::PI / grid as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0;
    for i in 0..=grid {
        let v = psi(ch, w, g, (i as f64 * step).cos());
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // golden-section refinement on the bracketing interval
    let mut lo = (best_i.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_i + 1).min(grid)) as f64 * step;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = psi(ch, w, g, x1.cos());
    let mut f2 = psi(ch, w, g, x2.cos());
    for _ in 0..64 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = psi(ch, w, g, x1.cos());
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = psi(ch, w, g, x2.cos());
        }
    }
    best.max(f1).max(f2)
}

// Exact maximization of psi over phi: endpoints of cos(phi), the
// transverse point, and the interior stationary points of
// a m + g sqrt(t2^2 + (t3^2 - t2^2) m^2) over m = cos(phi).
fn psi_max_closed(ch: &D2Channel, w: f64, g: f64) -> f64 {
    let a = w * ch.c3;
    let t2 = ch.d1.abs().max(ch.d2.abs());
    let t3 = ch.d3.abs();
    let mut best = f64::NEG_INFINITY;
    let mut eval = |m: f64| {
        let v = a * m + g * (t2 * t2 * (1.0 - m * m) + t3 * t3 * m * m).sqrt();
        if v > best {
            best = v;
        }
    };
    eval(1.0);
    eval(-1.0);
    eval(0.0);
    let delta = t3 * t3 - t2 * t2;
    let denom = delta * (g * g * delta - a * a);
    if denom.abs() > 1e-300 {
        let m2 = a * a * t2 * t2 / denom;
        if (0.0..=1.0).contains(&m2) {
            let m = m2.sqrt();
            eval(m);
            eval(-m);
        }
    }
    best
}

fn support_from_psi(w: f64, psi_max: f64) -> f64 {
    w.max(0.0).max(0.5 * w + 0.5 * psi_max)
}

/// Support function `h(u)` of the correlation set: the maximum of
/// `u1 p11 + u2 p12` over valid binary effects and pairs of input states.
pub fn support(ch: &D2Channel, u: [f64; 2]) -> Result<f64, GeometryError> {
    support_with_grid(ch, u, SUPPORT_GRID)
}

/// Like [`support`] with an explicit angle-grid resolution.
pub fn support_with_grid(
    ch: &D2Channel,
    u: [f64; 2],
    grid: usize,
) -> Result<f64, GeometryError> {
    if !ch.is_cp_explicit() {
        return Err(GeometryError::UnphysicalChannel);
    }
    let w = u[0] + u[1];
    let g = u[0].abs() + u[1].abs();
    Ok(support_from_psi(w, psi_max_grid(ch, w, g, grid)))
}

/// Closed-form support evaluation; agrees with [`support`] to better than
/// its grid accuracy and is used on hot paths. No physicality check.
pub(crate) fn support_closed(ch: &D2Channel, u: [f64; 2]) -> f64 {
    let w = u[0] + u[1];
    let g = u[0].abs() + u[1].abs();
    support_from_psi(w, psi_max_closed(ch, w, g))
}

/// Convex correlation set, represented by sampled support values over
/// uniformly spaced directions and the induced boundary polyline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub directions: Vec<[f64; 2]>,
    pub support_values: Vec<f64>,
    pub vertices: Vec<[f64; 2]>,
}

pub(crate) fn unit_directions(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [th.cos(), th.sin()]
        })
        .collect()
}

/// Clip a polygon against the half-plane `u . p <= h` (Sutherland-Hodgman).
pub(crate) fn clip_halfplane(poly: &[[f64; 2]], u: [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let ds = u[0] * s[0] + u[1] * s[1] - h;
        let de = u[0] * e[0] + u[1] * e[1] - h;
        if ds <= 0.0 {
            out.push(s);
            if de > 0.0 {
                let t = ds / (ds - de);
                out.push([s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]);
            }
        } else if de <= 0.0 {
            let t = ds / (ds - de);
            out.push([s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])]);
        }
    }
    out
}

pub(crate) fn halfplane_intersection(dirs: &[[f64; 2]], support: &[f64]) -> Vec<[f64; 2]> {
    let mut poly = vec![[-1.0, -1.0], [2.0, -1.0], [2.0, 2.0], [-1.0, 2.0]];
    for (u, &h) in dirs.iter().zip(support.iter()) {
        poly = clip_halfplane(&poly, *u, h);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

pub(crate) fn shoelace(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a.abs()
}

impl Region {
    /// Boundary of the correlation set of a physical channel from `n`
    /// uniformly spaced support directions.
    pub fn boundary(ch: &D2Channel, n: usize) -> Result<Region, GeometryError> {
        if !ch.is_cp_explicit() {
            return Err(GeometryError::UnphysicalChannel);
        }
        let directions = unit_directions(n.max(64));
        let support_values: Vec<f64> = directions.iter().map(|u| support_closed(ch, *u)).collect();
        let vertices = halfplane_intersection(&directions, &support_values);
        Ok(Region {
            directions,
            support_values,
            vertices,
        })
    }

    /// Signed distance from the region: positive outside, negative inside.
    pub fn margin(&self, p: &CorrelationPoint) -> f64 {
        self.directions
            .iter()
            .zip(self.support_values.iter())
            .map(|(u, h)| u[0] * p.p11 + u[1] * p.p12 - h)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst directional excess after subtracting `k` propagated standard
    /// errors per direction. Without stored errors this equals
    /// [`Region::margin`].
    pub fn margin_k_sigma(&self, p: &CorrelationPoint, k: f64) -> f64 {
        let (s11, s12) = (p.s11.unwrap_or(0.0), p.s12.unwrap_or(0.0));
        self.directions
            .iter()
            .zip(self.support_values.iter())
            .map(|(u, h)| {
                let sigma = (u[0] * u[0] * s11 * s11 + u[1] * u[1] * s12 * s12).sqrt();
                u[0] * p.p11 + u[1] * p.p12 - h - k * sigma
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &CorrelationPoint, slack: f64) -> bool {
        self.margin(p) <= slack
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn intersect_area(&self, other: &Region) -> f64 {
        let mut poly = self.vertices.clone();
        for (u, &h) in other.directions.iter().zip(other.support_values.iter()) {
            poly = clip_halfplane(&poly, *u, h);
            if poly.is_empty() {
                return 0.0;
            }
        }
        shoelace(&poly)
    }

    pub fn union_area(&self, other: &Region) -> f64 {
        self.area() + other.area() - self.intersect_area(other)
    }

    /// Writes the boundary polyline as CSV with columns `p11,p12`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "p11,p12")?;
        for v in &self.vertices {
            writeln!(w, "{:.17e},{:.17e}", v[0], v[1])?;
        }
        Ok(())
    }
}

/// Relative difference between union and intersection:
/// `(A_union - A_inter) / A_union`, in `[0, 1]`.
pub fn delta(r1: &Region, r2: &Region) -> Result<f64, GeometryError> {
    let union = r1.union_area(r2);
    if union <= 0.0 {
        return Err(GeometryError::EmptyRegion);
    }
    let inter = r1.intersect_area(r2);
    Ok(((union - inter) / union).clamp(0.0, 1.0))
}

/// Equivalence-class parameter `mu = (1 - c3)(d2^2 - d3^2) / (c3 d3^2)`.
pub fn mu(d2: f64, d3: f64, c3: f64) -> Result<f64, GeometryError> {
    if c3 == 0.0 || d3 == 0.0 {
        return Err(GeometryError::UndefinedClass { c3, d3 });
    }
    Ok((1.0 - c3) * (d2 * d2 - d3 * d3) / (c3 * d3 * d3))
}
