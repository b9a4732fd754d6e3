//! The variational profile
//!
//! ```text
//! h(x,y,z) = M^{2x} (x−y+z)^{x−y+z} (2−2x−z)^{2−2x−z}
//!            / [ (x−y)^{x−y} (2y)^{2y} (z−2y)^{z−2y} (1−x)^{1−x} (1−x−z)^{1−x−z} ]
//! ```
//!
//! on `D = {0 ≤ x ≤ 1, 0 ≤ z ≤ 1−x, 0 ≤ y ≤ min(z/2, x)}` with `0⁰ = 1`,
//! and a multistart maximizer whose result should equal `f(M)²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::heavytail::f_edge;

/// Slack allowed when testing membership in `D`.
pub const DOMAIN_TOL: f64 = 1e-12;
const ZERO_CLAMP: f64 = 1e-300;
const GRID: usize = 50;
const STARTS: usize = 10;
const MAX_ITERS: usize = 200;
const GRAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub value: f64,
    /// `∇ log h`; absent on the boundary of `D`, where some component diverges.
    pub log_gradient: Option<[f64; 3]>,
}

#[inline]
fn xlogx(a: f64) -> f64 {
    if a < ZERO_CLAMP {
        0.0
    } else {
        a * a.ln()
    }
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return domain(format!("the profile needs M > 0, got {m}"));
    }
    Ok(())
}

pub fn in_domain(x: f64, y: f64, z: f64) -> bool {
    let t = DOMAIN_TOL;
    x >= -t && x <= 1.0 + t && z >= -t && z <= 1.0 - x + t && y >= -t && y <= (z / 2.0).min(x) + t
}

fn check_point(x: f64, y: f64, z: f64) -> Result<()> {
    if !(x.is_finite() && y.is_finite() && z.is_finite()) || !in_domain(x, y, z) {
        return domain(format!("({x}, {y}, {z}) lies outside D"));
    }
    Ok(())
}

/// `log h` without the domain check.
fn log_h_unchecked(ln_m: f64, x: f64, y: f64, z: f64) -> f64 {
    2.0 * x * ln_m + xlogx(x - y + z) - xlogx(x - y) - xlogx(2.0 * y) - xlogx(z - 2.0 * y)
        + xlogx(2.0 - 2.0 * x - z)
        - xlogx(1.0 - x)
        - xlogx(1.0 - x - z)
}

pub fn log_h(m: f64, x: f64, y: f64, z: f64) -> Result<f64> {
    check_m(m)?;
    check_point(x, y, z)?;
    Ok(log_h_unchecked(m.ln(), x, y, z))
}

pub fn h_eval(m: f64, x: f64, y: f64, z: f64) -> Result<f64> {
    log_h(m, x, y, z).map(f64::exp)
}

/// The log arguments of the gradient, all positive exactly in the interior.
fn interior_parts(x: f64, y: f64, z: f64) -> Option<[f64; 7]> {
    let parts = [x - y + z, x - y, 2.0 * y, z - 2.0 * y, 2.0 - 2.0 * x - z, 1.0 - x, 1.0 - x - z];
    parts.iter().all(|&a| a > 0.0).then_some(parts)
}

/// Smallest log argument of the gradient; positive exactly in the interior of `D`.
pub fn interior_parts_min(x: f64, y: f64, z: f64) -> f64 {
    [x - y + z, x - y, 2.0 * y, z - 2.0 * y, 2.0 - 2.0 * x - z, 1.0 - x, 1.0 - x - z]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

fn log_grad_unchecked(ln_m: f64, x: f64, y: f64, z: f64) -> Option<[f64; 3]> {
    let [a, b, y2, c, e, one_x, g] = interior_parts(x, y, z)?;
    let gx = 2.0 * ln_m + (a.ln() + one_x.ln() + g.ln()) - (b.ln() + 2.0 * e.ln());
    let gy = 2.0 * c.ln() + b.ln() - 2.0 * y2.ln() - a.ln();
    let gz = a.ln() + g.ln() - c.ln() - e.ln();
    Some([gx, gy, gz])
}

/// `∇ log h` at an interior point.
pub fn log_gradient(m: f64, x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
    check_m(m)?;
    check_point(x, y, z)?;
    match log_grad_unchecked(m.ln(), x, y, z) {
        Some(g) => Ok(g),
        None => domain(format!("({x}, {y}, {z}) is on the boundary of D")),
    }
}

/// `∇ h` at an interior point.
pub fn h_grad(m: f64, x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
    let g = log_gradient(m, x, y, z)?;
    let h = h_eval(m, x, y, z)?;
    Ok(g.map(|v| v * h))
}

pub fn point(m: f64, x: f64, y: f64, z: f64) -> Result<ProfilePoint> {
    Ok(ProfilePoint {
        x,
        y,
        z,
        value: h_eval(m, x, y, z)?,
        log_gradient: log_grad_unchecked(m.ln(), x, y, z),
    })
}

/// `max(4, (M² + 1)²/M²)` for `M > 1`, else 4; equals `f(M)²`.
pub fn sup_closed_form(m: f64) -> f64 {
    if m > 1.0 {
        let m2 = m * m;
        (m2 + 1.0).powi(2) / m2
    } else {
        4.0
    }
}

/// Coordinates `(u, v, w) ∈ [0,1]³` covering `D`:
/// `x = u`, `z = (1 − u) v`, `y = w · min(z/2, x)`.
fn from_box(u: f64, v: f64, w: f64) -> (f64, f64, f64) {
    let x = u;
    let z = (1.0 - u) * v;
    let y = w * (z / 2.0).min(x);
    (x, y, z)
}

struct Objective {
    ln_m: f64,
}

impl Objective {
    fn value(&self, p: [f64; 3]) -> f64 {
        let (x, y, z) = from_box(p[0], p[1], p[2]);
        log_h_unchecked(self.ln_m, x, y, z)
    }

    /// Gradient in box coordinates: chain rule in the interior, one-sided
    /// differences where `D`'s boundary makes the log gradient diverge.
    fn gradient(&self, p: [f64; 3]) -> [f64; 3] {
        let [u, v, w] = p;
        let (x, y, z) = from_box(u, v, w);
        if let Some([gx, gy, gz]) = log_grad_unchecked(self.ln_m, x, y, z) {
            let half = (1.0 - u) * v / 2.0;
            let (mm, dm_du, dm_dv) = if half < u {
                (half, -v / 2.0, (1.0 - u) / 2.0)
            } else {
                (u, 1.0, 0.0)
            };
            return [
                gx - gz * v + gy * w * dm_du,
                gz * (1.0 - u) + gy * w * dm_dv,
                gy * mm,
            ];
        }
        let h = 1e-7;
        let f0 = self.value(p);
        let mut g = [0.0; 3];
        for i in 0..3 {
            let mut q = p;
            if p[i] + h <= 1.0 {
                q[i] += h;
                g[i] = (self.value(q) - f0) / h;
            } else {
                q[i] -= h;
                g[i] = (f0 - self.value(q)) / h;
            }
        }
        g
    }
}

fn clamp01(p: [f64; 3]) -> [f64; 3] {
    p.map(|c| c.clamp(0.0, 1.0))
}

/// Projected gradient ascent with Barzilai–Borwein steps and Armijo backtracking.
fn ascend(obj: &Objective, start: [f64; 3]) -> ([f64; 3], f64) {
    let mut p = start;
    let mut f = obj.value(p);
    let mut g = obj.gradient(p);
    let mut step = 1e-2;
    for _ in 0..MAX_ITERS {
        let target = clamp01([p[0] + g[0], p[1] + g[1], p[2] + g[2]]);
        let proj_norm = (0..3).map(|i| (target[i] - p[i]).powi(2)).sum::<f64>().sqrt();
        if proj_norm <= GRAD_TOL {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            let q = clamp01([p[0] + t * g[0], p[1] + t * g[1], p[2] + t * g[2]]);
            let fq = obj.value(q);
            let moved: f64 = (0..3).map(|i| g[i] * (q[i] - p[i])).sum();
            if fq >= f + 1e-4 * moved && q != p {
                accepted = Some((q, fq));
                break;
            }
            t *= 0.5;
        }
        let Some((q, fq)) = accepted else { break };
        let gq = obj.gradient(q);
        let s: Vec<f64> = (0..3).map(|i| q[i] - p[i]).collect();
        let yv: Vec<f64> = (0..3).map(|i| gq[i] - g[i]).collect();
        let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        // ascent on a concave-looking patch has s·y < 0
        step = if sy < 0.0 { (ss / -sy).clamp(1e-8, 1e2) } else { (2.0 * t).min(1e2) };
        p = q;
        f = fq;
        g = gq;
    }
    (p, f)
}

/// Golden-section maximization of `g` on `[a, b]` after a coarse scan.
fn golden_max(g: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let scan = 400;
    let mut best = (a, g(a));
    for i in 1..=scan {
        let x = a + (b - a) * i as f64 / scan as f64;
        let v = g(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let width = (b - a) / scan as f64;
    let (mut lo, mut hi) = ((best.0 - width).max(a), (best.0 + width).min(b));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = g(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = g(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = g(mid);
    if fm >= best.1 {
        (mid, fm)
    } else {
        best
    }
}

type Curve = fn(f64) -> (f64, f64);

/// One-parameter families in `D` that carry the candidate maximizers of
/// the case analysis: faces where a constraint is tight, and the curve of
/// interior critical points.
fn case_curves() -> Vec<(Curve, f64, f64)> {
    vec![
        (|_| (0.0, 0.0), 0.0, 1.0),
        (|x| (0.0, 1.0 - x), 0.0, 1.0),
        (|x| (0.0, x * (1.0 - x)), 0.0, 1.0),
        (|x| (x, 2.0 * x), 0.0, 1.0 / 3.0),
        (|x| (x, 1.0 - x), 0.0, 1.0 / 3.0),
        (|x| (x, 4.0 * x * (1.0 - x) / (x + 1.0)), 0.0, 1.0 / 3.0),
        (|x| ((x - x * x) / (1.0 + 3.0 * x), 1.0 - x), 0.0, 1.0),
        (|x| ((x - x * x) / (x + 3.0), (2.0 * x - 2.0 * x * x) / (x + 1.0)), 0.0, 1.0),
    ]
}

/// Global maximum of `h` over `D`.
pub fn sup_h(m: f64) -> Result<ProfilePoint> {
    check_m(m)?;
    let obj = Objective { ln_m: m.ln() };
    let mut grid: Vec<([f64; 3], f64)> = Vec::with_capacity(GRID * GRID * GRID);
    let node = |i: usize| i as f64 / (GRID - 1) as f64;
    for i in 0..GRID {
        for j in 0..GRID {
            for k in 0..GRID {
                let p = [node(i), node(j), node(k)];
                grid.push((p, obj.value(p)));
            }
        }
    }
    // stable sort keeps the start order fixed for equal values
    grid.sort_by(|a, b| b.1.total_cmp(&a.1));
    let starts: Vec<[f64; 3]> = grid.iter().take(STARTS).map(|g| g.0).collect();
    let mut candidates: Vec<(f64, f64, f64, f64)> = starts
        .par_iter()
        .map(|&s| {
            let (p, v) = ascend(&obj, s);
            let (x, y, z) = from_box(p[0], p[1], p[2]);
            (x, y, z, v)
        })
        .collect();
    for (curve, a, b) in case_curves() {
        let g = |x: f64| {
            let (y, z) = curve(x);
            if in_domain(x, y, z) {
                log_h_unchecked(obj.ln_m, x, y, z)
            } else {
                f64::NEG_INFINITY
            }
        };
        let (x, v) = golden_max(g, a, b);
        let (y, z) = curve(x);
        candidates.push((x, y, z, v));
    }
    let (x, y, z, _) = candidates
        .into_iter()
        .filter(|c| c.3.is_finite())
        .fold(None, |best: Option<(f64, f64, f64, f64)>, c| match best {
            Some(b) if b.3 >= c.3 => Some(b),
            _ => Some(c),
        })
        .expect("the corner (0,0,0) is always a finite candidate");
    point(m, x.clamp(0.0, 1.0), y.max(0.0), z.max(0.0))
}

/// `|sup h − f(M)²|` from the numerical maximizer.
pub fn sup_consistency(m: f64) -> Result<f64> {
    let sup = sup_h(m)?.value;
    let f = f_edge(m)?;
    Ok((sup - f * f).abs())
}
