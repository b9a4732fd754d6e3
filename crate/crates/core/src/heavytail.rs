//! Entry distributions with a prescribed fourth-power tail constant, the
//! Fréchet law of the rescaled maximum entry, and the push-forward law
//! `f(ζ_c)` that describes the top of the spectrum.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Result};

/// Tail constant of the pure Pareto parameterization (`q = 1`).
pub const PURE_PARETO_C: f64 = 0.25;

/// A right-continuous reference distribution function, possibly with atoms.
///
/// `cdf_left(x)` is the left limit `F(x⁻)`; continuous laws keep the default.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Short identifier written into reports.
    fn id(&self) -> String;
}

/// Symmetric entry law `sign · X` where `X ~ Pareto(4, x_m)` with probability
/// `q` and `X = b_atom` otherwise.
///
/// The two constraints `q·x_m⁴ = c` and `2·q·x_m² + (1 − q)·b_atom² = 1`
/// fix the tail constant and the variance exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub c: f64,
    pub q: f64,
    pub x_m: f64,
    pub b_atom: f64,
}

impl TailSpec {
    /// Residual of `q·x_m⁴ = c`.
    pub fn tail_residual(&self) -> f64 {
        self.q * self.x_m.powi(4) - self.c
    }

    /// Residual of the unit-variance equation.
    pub fn variance_residual(&self) -> f64 {
        2.0 * self.q * self.x_m * self.x_m + (1.0 - self.q) * self.b_atom * self.b_atom - 1.0
    }

    /// Exact `P(|a| ≥ x)`.
    pub fn tail_probability(&self, x: f64) -> f64 {
        let pareto = if x <= self.x_m {
            1.0
        } else {
            (self.x_m / x).powi(4)
        };
        let atom = if x <= self.b_atom { 1.0 } else { 0.0 };
        self.q * pareto + (1.0 - self.q) * atom
    }
}

/// Default mixture weight when the caller does not pick one.
fn default_weight(c: f64) -> f64 {
    if c == PURE_PARETO_C {
        1.0
    } else if c >= 1.0 / 16.0 {
        // puts half of the variance on the Pareto component
        1.0 / (16.0 * c)
    } else {
        0.5
    }
}

/// Build the entry law for tail constant `c`, optionally fixing the Pareto
/// weight `q`.
pub fn make_tail_spec(c: f64, q: Option<f64>) -> Result<TailSpec> {
    if !(c > 0.0 && c.is_finite()) {
        return param(format!("tail constant c must be positive and finite, got {c}"));
    }
    let q = q.unwrap_or_else(|| default_weight(c));
    if !(q > 0.0 && q <= 1.0) {
        return param(format!("mixture weight q must lie in (0, 1], got {q}"));
    }
    let pareto_variance = 2.0 * (c * q).sqrt();
    if pareto_variance > 1.0 + 1e-12 {
        return param(format!(
            "variance constraint violated: 2·sqrt(c·q) = {pareto_variance} > 1 (c={c}, q={q})"
        ));
    }
    let x_m = (c / q).powf(0.25);
    let b_atom = if q == 1.0 {
        if (pareto_variance - 1.0).abs() > 1e-12 {
            return param(format!(
                "variance constraint violated: q = 1 forces 2·sqrt(c) = 1, got {pareto_variance}"
            ));
        }
        0.0
    } else {
        ((1.0 - pareto_variance).max(0.0) / (1.0 - q)).sqrt()
    };
    Ok(TailSpec { c, q, x_m, b_atom })
}

/// Draw one entry. Consumes a fixed number of uniforms per call so streams
/// stay aligned across specs with the same `q`.
pub fn sample_entry<R: Rng + ?Sized>(spec: &TailSpec, rng: &mut R) -> f64 {
    let magnitude = if spec.q >= 1.0 || rng.gen::<f64>() < spec.q {
        // 1 - U lies in (0, 1]
        let u = 1.0 - rng.gen::<f64>();
        spec.x_m * u.powf(-0.25)
    } else {
        spec.b_atom
    };
    if rng.gen::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Fréchet law with shape 4 and scale `(c/2)^{1/4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetLaw {
    pub c: f64,
}

impl FrechetLaw {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return param(format!("tail constant c must be positive, got {c}"));
        }
        Ok(Self { c })
    }
}

/// `P(ζ_c ≤ x) = exp(−(c/2)·x⁻⁴)` for `x > 0`.
pub fn frechet_cdf(law: &FrechetLaw, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("Fréchet CDF needs x > 0, got {x}"));
    }
    Ok((-0.5 * law.c * x.powi(-4)).exp())
}

pub fn frechet_quantile(law: &FrechetLaw, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("quantile needs 0 < u < 1, got {u}"));
    }
    Ok((0.5 * law.c / -u.ln()).powf(0.25))
}

impl Cdf for FrechetLaw {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-0.5 * self.c * x.powi(-4)).exp()
        }
    }

    fn id(&self) -> String {
        format!("frechet(c={})", self.c)
    }
}

/// The edge map: `2` on `(0, 1]` and `x + 1/x` beyond.
pub fn f_edge(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("f_edge needs x > 0, got {x}"));
    }
    Ok(if x <= 1.0 { 2.0 } else { x + 1.0 / x })
}

/// Right inverse of `f_edge` on `[1, ∞)`.
pub fn f_edge_inverse(y: f64) -> f64 {
    0.5 * (y + (y * y - 4.0).max(0.0).sqrt())
}

/// Law of `f(ζ_c)`: an atom of mass `exp(−c/2)` at 2 plus a continuous part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLimitLaw {
    pub c: f64,
}

impl EdgeLimitLaw {
    pub fn new(c: f64) -> Result<Self> {
        FrechetLaw::new(c).map(|_| Self { c })
    }

    pub fn atom_mass(&self) -> f64 {
        (-0.5 * self.c).exp()
    }
}

pub fn edge_limit_cdf(law: &EdgeLimitLaw, y: f64) -> f64 {
    if y < 2.0 {
        0.0
    } else {
        (-0.5 * law.c * f_edge_inverse(y).powi(-4)).exp()
    }
}

pub fn edge_limit_sample<R: Rng + ?Sized>(law: &EdgeLimitLaw, rng: &mut R) -> f64 {
    let frechet = FrechetLaw { c: law.c };
    loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            let x = frechet_quantile(&frechet, u).expect("u in (0,1)");
            return f_edge(x).expect("quantile is positive");
        }
    }
}

impl Cdf for EdgeLimitLaw {
    fn cdf(&self, x: f64) -> f64 {
        edge_limit_cdf(self, x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x <= 2.0 {
            0.0
        } else {
            edge_limit_cdf(self, x)
        }
    }

    fn id(&self) -> String {
        format!("edge_limit(c={})", self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_pareto_default() {
        let spec = make_tail_spec(0.25, None).unwrap();
        assert_eq!(spec.q, 1.0);
        // 2·x_m² = 1 and x_m⁴ = 1/4
        assert!((spec.x_m - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(spec.tail_residual().abs() < 1e-12);
        assert!(spec.variance_residual().abs() < 1e-12);
    }

    #[test]
    fn mixture_solution() {
        let spec = make_tail_spec(1.0, Some(0.125)).unwrap();
        assert!((spec.x_m - 8f64.powf(0.25)).abs() < 1e-12);
        assert!((spec.x_m - 1.68179).abs() < 1e-5);
        let expected_b = ((1.0 - 2.0 * 0.125f64.sqrt()) / 0.875).sqrt();
        assert!((spec.b_atom - expected_b).abs() < 1e-14);
        assert!((spec.b_atom - 0.57862).abs() < 1e-4);
        assert!(spec.tail_residual().abs() < 1e-12);
        assert!(spec.variance_residual().abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair_rejected() {
        let err = make_tail_spec(1.0, Some(1.0)).unwrap_err();
        assert!(err.to_string().contains("variance constraint"));
        assert!(make_tail_spec(-1.0, None).is_err());
        assert!(make_tail_spec(0.1, Some(1.0)).is_err());
    }

    #[test]
    fn defaults_are_feasible() {
        for &c in &[1e-3, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0] {
            let spec = make_tail_spec(c, None).unwrap();
            assert!(spec.tail_residual().abs() < 1e-12, "c={c}");
            assert!(spec.variance_residual().abs() < 1e-12, "c={c}");
        }
    }

    #[test]
    fn sample_moments_and_symmetry() {
        let spec = make_tail_spec(0.25, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut sum, mut sum_sq, mut positive) = (0.0, 0.0, 0usize);
        for _ in 0..n {
            let a = sample_entry(&spec, &mut rng);
            sum += a;
            sum_sq += a * a;
            positive += (a > 0.0) as usize;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
        let frac = positive as f64 / n as f64;
        assert!((0.49..=0.51).contains(&frac), "positive fraction {frac}");
    }

    #[test]
    fn mixture_symmetry() {
        let spec = make_tail_spec(1.0, Some(0.125)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let positive = (0..1_000_000)
            .filter(|_| sample_entry(&spec, &mut rng) > 0.0)
            .count();
        let frac = positive as f64 / 1e6;
        assert!((0.49..=0.51).contains(&frac), "positive fraction {frac}");
    }

    #[test]
    fn sample_tail_constant() {
        let spec = make_tail_spec(0.25, None).unwrap();
        // exact tail of Pareto(4, 2^{-1/2}) beyond 10 is 10⁻⁴/4
        assert!((spec.tail_probability(10.0) * 1e4 - 0.25).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000_000usize;
        let beyond = (0..n)
            .filter(|_| sample_entry(&spec, &mut rng).abs() > 10.0)
            .count();
        let scaled = 1e4 * beyond as f64 / n as f64;
        assert!((scaled - 0.25).abs() < 0.05, "x⁴·tail = {scaled}");
    }

    #[test]
    fn frechet_values() {
        let law = FrechetLaw::new(2.0).unwrap();
        assert!((frechet_cdf(&law, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((frechet_cdf(&law, 1e6).unwrap() - 1.0).abs() < 1e-15);
        let quarter = FrechetLaw::new(0.25).unwrap();
        assert!((frechet_cdf(&quarter, 1.0).unwrap() - 0.882497).abs() < 1e-6);
        assert!(frechet_cdf(&law, 0.0).is_err());
        assert!(frechet_cdf(&law, -1.0).is_err());
    }

    #[test]
    fn frechet_quantile_values() {
        let law = FrechetLaw::new(2.0).unwrap();
        assert!((frechet_quantile(&law, (-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-14);
        let median = frechet_quantile(&law, 0.5).unwrap();
        assert!((median - 2f64.ln().powf(-0.25)).abs() < 1e-14);
        assert!((median - 1.09596).abs() < 1e-5);
        let mut last = 0.0;
        for &u in &[0.9, 0.99, 0.9999, 1.0 - 1e-9, 1.0 - 1e-15] {
            let x = frechet_quantile(&law, u).unwrap();
            assert!(x > last);
            last = x;
        }
        assert!(last > 1e3);
        assert!(frechet_quantile(&law, 0.0).is_err());
        assert!(frechet_quantile(&law, 1.0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf_on_log_grid() {
        for &c in &[0.25, 1.0, 2.0] {
            let law = FrechetLaw::new(c).unwrap();
            let mut prev = 0.0;
            for i in 0..=200 {
                let x = 10f64.powf(-1.0 + 3.0 * i as f64 / 200.0);
                let u = frechet_cdf(&law, x).unwrap();
                assert!(u >= prev);
                prev = u;
                if u > 1e-300 && u < 1.0 {
                    let back = frechet_quantile(&law, u).unwrap();
                    // ln u loses relative precision as u → 1
                    let tol = x * (1e-13 + 1e-15 / -u.ln());
                    assert!((back - x).abs() <= tol, "c={c} x={x} back={back}");
                }
            }
        }
    }

    #[test]
    fn edge_map() {
        assert_eq!(f_edge(2.0).unwrap(), 2.5);
        assert_eq!(f_edge(1.0).unwrap(), 2.0);
        assert_eq!(f_edge(0.3).unwrap(), 2.0);
        assert!(f_edge(0.0).is_err());
        let x = 1e3;
        assert!((f_edge(x).unwrap() - 1000.001).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 1..10_000 {
            let y = f_edge(i as f64 * 1e-3).unwrap();
            assert!(y >= prev);
            prev = y;
        }
    }

    #[test]
    fn edge_law_values() {
        let law = EdgeLimitLaw::new(2.0).unwrap();
        assert_eq!(edge_limit_cdf(&law, 1.9), 0.0);
        assert!((edge_limit_cdf(&law, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((edge_limit_cdf(&law, 2.5) - (-1.0f64 / 16.0).exp()).abs() < 1e-15);
        assert!((edge_limit_cdf(&law, 2.5) - 0.939413).abs() < 1e-6);
        assert_eq!(law.cdf_left(2.0), 0.0);
    }

    #[test]
    fn edge_law_single_jump() {
        for &c in &[0.25, 2.0] {
            let law = EdgeLimitLaw::new(c).unwrap();
            let mut prev = 0.0;
            let mut biggest_jump: f64 = 0.0;
            for i in 0..=20_000 {
                let y = 1.0 + i as f64 * 2e-4;
                let v = edge_limit_cdf(&law, y);
                assert!(v >= prev);
                // skip the atom and the steep square-root onset just above it
                if !(-1e-9..0.01).contains(&(y - 2.0)) {
                    biggest_jump = biggest_jump.max(v - prev);
                }
                prev = v;
            }
            // right-continuity at 2, with the square-root onset of f⁻¹
            assert!((edge_limit_cdf(&law, 2.0 + 1e-12) - law.atom_mass()).abs() < 1e-5);
            assert!(biggest_jump < 0.01, "extra jump {biggest_jump}");
        }
    }

    #[test]
    fn edge_law_atom_frequency() {
        let law = EdgeLimitLaw::new(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut at_two = 0;
        for _ in 0..n {
            let y = edge_limit_sample(&law, &mut rng);
            assert!(y >= 2.0);
            at_two += (y == 2.0) as usize;
        }
        let frac = at_two as f64 / n as f64;
        assert!((frac - (-1.0f64).exp()).abs() < 0.01, "atom fraction {frac}");
    }
}
