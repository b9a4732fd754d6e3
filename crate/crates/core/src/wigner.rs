//! Heavy-tailed Wigner samples, their extreme entries, and the split into
//! small, medium and big parts together with the events that control it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::heavytail::{sample_entry, TailSpec};
use crate::spectra::SymMatrix;

/// Default dimension cap for dense storage.
pub const DEFAULT_MAX_DIM: usize = 4096;

pub const DEFAULT_DELTA1: f64 = 0.01;
pub const DEFAULT_DELTA2: f64 = 0.02;

/// `n × n` symmetric matrix of raw entries `a_ij`; the matrix of interest is `raw / √n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSample {
    pub n: usize,
    pub raw: SymMatrix,
    pub seed: u64,
}

impl WignerSample {
    /// Wrap an existing symmetric matrix, e.g. a hand-built fixture.
    pub fn from_raw(raw: SymMatrix, seed: u64) -> Result<Self> {
        if !raw.is_exactly_symmetric() {
            return Err(Error::Input("raw matrix must be exactly symmetric".into()));
        }
        Ok(Self {
            n: raw.dim(),
            raw,
            seed,
        })
    }

    pub fn normalized(&self) -> SymMatrix {
        let scale = 1.0 / (self.n as f64).sqrt();
        let data = self.raw.as_slice().iter().map(|a| a * scale).collect();
        SymMatrix::from_row_major(self.n, data).expect("square by construction")
    }
}

/// Sample with the default dimension cap.
pub fn sample_wigner(n: usize, spec: &TailSpec, seed: u64) -> Result<WignerSample> {
    sample_wigner_capped(n, spec, seed, DEFAULT_MAX_DIM)
}

/// Upper triangle (diagonal included) is drawn row by row from one ChaCha8
/// stream seeded with `seed`, then mirrored.
pub fn sample_wigner_capped(
    n: usize,
    spec: &TailSpec,
    seed: u64,
    max_dim: usize,
) -> Result<WignerSample> {
    if n < 2 {
        return param(format!("dimension must be at least 2, got {n}"));
    }
    if n > max_dim {
        return Err(Error::Resource(format!(
            "dimension {n} exceeds the configured cap {max_dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            raw.set_sym(i, j, sample_entry(spec, &mut rng));
        }
    }
    Ok(WignerSample { n, raw, seed })
}

/// `n^{-1/2} · max_{i ≤ j} |a_ij|`, diagonal included.
pub fn max_offdiag(sample: &WignerSample) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..sample.n {
        for &a in &sample.raw.row(i)[i..] {
            best = best.max(a.abs());
        }
    }
    best / (sample.n as f64).sqrt()
}

/// Largest diagonal magnitude under the two scalings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagMax {
    /// `n^{-1/2} · max_i |a_ii|`
    pub sqrt_scaled: f64,
    /// `n^{-1/4} · max_i |a_ii|`
    pub quarter_scaled: f64,
}

pub fn max_diag(sample: &WignerSample) -> DiagMax {
    let m = (0..sample.n).fold(0.0f64, |m, i| m.max(sample.raw.get(i, i).abs()));
    let n = sample.n as f64;
    DiagMax {
        sqrt_scaled: m / n.sqrt(),
        quarter_scaled: m / n.powf(0.25),
    }
}

/// The `k` largest values of `n^{-1/2}|a_ij|` over `i ≤ j`, descending.
pub fn max_order_stats(sample: &WignerSample, k: usize) -> Result<Vec<f64>> {
    let n = sample.n;
    let total = n * (n + 1) / 2;
    if k < 1 || k > total {
        return param(format!("k={k} outside [1, {total}]"));
    }
    let mut all: Vec<f64> = Vec::with_capacity(total);
    for i in 0..n {
        all.extend(sample.raw.row(i)[i..].iter().map(|a| a.abs()));
    }
    let cmp = |a: &f64, b: &f64| b.total_cmp(a);
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, cmp);
        all.truncate(k);
    }
    all.sort_unstable_by(cmp);
    let root = (n as f64).sqrt();
    // a fresh Vec: collecting from `all` in place would keep its n²/2 capacity
    Ok(all.iter().map(|a| a / root).collect())
}

/// Raw-scale cut points of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub delta1: f64,
    pub delta2: f64,
    pub kappa: f64,
    /// `n^{1/4 − δ1}`
    pub small: f64,
    /// `n^{3/8 + δ2}`
    pub medium: f64,
    /// `κ √n`
    pub big: f64,
}

/// Entry classes on the normalized scale. Every entry lands in exactly one
/// of `small`, `medium`, `big`, and `big` splits further into
/// `big_kappa` (at most `κ√n`) and `big_beyond` (above `κ√n`).
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionParts {
    pub small: SymMatrix,
    pub medium: SymMatrix,
    pub big: SymMatrix,
    pub big_kappa: SymMatrix,
    pub big_beyond: SymMatrix,
    pub thresholds: Thresholds,
}

pub fn decompose(sample: &WignerSample, delta1: f64, delta2: f64, kappa: f64) -> Result<DecompositionParts> {
    if !(delta1 > 0.0 && delta1 < 1.0 / 64.0) {
        return param(format!("δ1 must lie in (0, 1/64), got {delta1}"));
    }
    if !(delta2 > 0.0 && delta2 < 1.0 / 32.0) {
        return param(format!("δ2 must lie in (0, 1/32), got {delta2}"));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param(format!("κ must be positive, got {kappa}"));
    }
    let n = sample.n;
    let nf = n as f64;
    let thresholds = Thresholds {
        delta1,
        delta2,
        kappa,
        small: nf.powf(0.25 - delta1),
        medium: nf.powf(0.375 + delta2),
        big: kappa * nf.sqrt(),
    };
    let scale = 1.0 / nf.sqrt();
    let mut small = SymMatrix::zeros(n);
    let mut medium = SymMatrix::zeros(n);
    let mut big = SymMatrix::zeros(n);
    let mut big_kappa = SymMatrix::zeros(n);
    let mut big_beyond = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let a = sample.raw.get(i, j);
            let v = a * scale;
            let mag = a.abs();
            // ties go to the lighter class
            if mag <= thresholds.small {
                small.set_sym(i, j, v);
            } else if mag <= thresholds.medium {
                medium.set_sym(i, j, v);
            } else {
                big.set_sym(i, j, v);
                if mag <= thresholds.big {
                    big_kappa.set_sym(i, j, v);
                } else {
                    big_beyond.set_sym(i, j, v);
                }
            }
        }
    }
    Ok(DecompositionParts {
        small,
        medium,
        big,
        big_kappa,
        big_beyond,
        thresholds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFlags {
    /// Every row of the medium part has at most `⌈n^{8δ1}⌉` non-zero entries.
    pub e0: bool,
    /// Big entries are off-diagonal and no two share a row.
    pub e1: bool,
    /// The part beyond `κ√n` has at most `2m` non-zero entries.
    pub e2: bool,
    pub m: usize,
}

impl EventFlags {
    pub fn all(&self) -> bool {
        self.e0 && self.e1 && self.e2
    }
}

/// `⌈n^{8δ1}⌉`
pub fn medium_row_budget(n: usize, delta1: f64) -> usize {
    (n as f64).powf(8.0 * delta1).ceil() as usize
}

fn row_nonzeros(m: &SymMatrix, i: usize) -> usize {
    m.row(i).iter().filter(|v| **v != 0.0).count()
}

pub fn detect_events(parts: &DecompositionParts, m: usize) -> Result<EventFlags> {
    if m < 1 {
        return param("sparsity budget m must be at least 1");
    }
    let n = parts.small.dim();
    let budget = medium_row_budget(n, parts.thresholds.delta1);
    let e0 = (0..n).all(|i| row_nonzeros(&parts.medium, i) <= budget);
    let e1 = (0..n).all(|i| parts.big.get(i, i) == 0.0 && row_nonzeros(&parts.big, i) <= 1);
    let e2 = parts.big_beyond.count_nonzero() <= 2 * m;
    Ok(EventFlags { e0, e1, e2, m })
}

/// Default sparsity budget `⌈ln n⌉`.
pub fn default_budget(n: usize) -> usize {
    ((n as f64).ln().ceil() as usize).max(1)
}
