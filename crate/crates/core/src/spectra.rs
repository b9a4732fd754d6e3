//! Dense symmetric eigenvalues and the trace-difference inequalities.
//!
//! Eigenvalues come from Householder reduction to tridiagonal form followed
//! by implicit-shift QL iteration. Trace powers are always evaluated from
//! spectra, never by repeated multiplication.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Relative asymmetry tolerated by [`eigvals_sym`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Maximum QL sweeps per eigenvalue.
pub const MAX_SWEEPS: usize = 50;

/// Relative size below which an off-diagonal entry is treated as zero.
pub const QL_TOL: f64 = 1e-14;

/// Dense square matrix stored row-major. Callers keep it symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Build from row-major data; the caller is responsible for symmetry.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return input(format!("expected {} entries for n={n}, got {}", n * n, data.len()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return input("rows must form a square matrix");
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Write `v` at `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    fn check_symmetric(&self) -> Result<()> {
        let scale = self.max_abs();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > SYMMETRY_TOL * scale {
                    return input(format!("matrix is not symmetric at ({i},{j}): difference {d}"));
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return input(format!("dimension mismatch: {} vs {}", self.n, other.n));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(SymMatrix { n: self.n, data })
    }

    pub fn matmul(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        SymMatrix { n, data: out }
    }

    /// Principal submatrix on the rows/columns that carry a non-zero entry.
    /// Zero rows only contribute zero eigenvalues.
    fn compact(&self) -> Option<SymMatrix> {
        let active: Vec<usize> = (0..self.n)
            .filter(|&i| self.row(i).iter().any(|v| *v != 0.0))
            .collect();
        if active.len() == self.n {
            return None;
        }
        let k = active.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in &active {
            for &j in &active {
                data.push(self.get(i, j));
            }
        }
        Some(SymMatrix { n: k, data })
    }
}

/// Eigenvalues in descending order plus the identity residuals measured at
/// construction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub source_dim: usize,
    /// `|Σλ − tr A| / (n · scale)`.
    pub trace_residual: f64,
    /// `|Σλ² − ‖A‖_F²| / max(‖A‖_F², tiny)`.
    pub frobenius_residual: f64,
}

impl Spectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `λ_i` with the convention `λ_i = 0` for `i > n` (1-based).
    pub fn lambda(&self, i: usize) -> f64 {
        if i == 0 || i > self.values.len() {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    pub fn norm(&self) -> f64 {
        self.largest().abs().max(self.smallest().abs())
    }

    pub fn power_sum(&self, p: u32) -> f64 {
        self.values.iter().map(|v| v.powi(p as i32)).sum()
    }
}

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n−1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn to_dense(&self) -> SymMatrix {
        let n = self.diag.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, self.diag[i]);
            if i + 1 < n {
                m.set_sym(i, i + 1, self.off[i]);
            }
        }
        m
    }
}

/// Householder reduction `A = Q T Qᵀ`; only `T` is kept.
pub fn tridiagonalize(matrix: &SymMatrix) -> Tridiagonal {
    let n = matrix.n;
    let mut a = matrix.data.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n {
        diag[k] = a[k * n + k];
        if k + 1 == n {
            break;
        }
        let m = n - k - 1;
        let x = &a[k * n + k + 1..(k + 1) * n];
        let tail_sq: f64 = x[1..].iter().map(|t| t * t).sum();
        if tail_sq == 0.0 {
            off[k] = x[0];
            continue;
        }
        let norm = (x[0] * x[0] + tail_sq).sqrt();
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let v = &mut v[..m];
        v.copy_from_slice(x);
        v[0] -= alpha;
        let vtv = v[0] * v[0] + tail_sq;
        let beta = 2.0 / vtv;
        off[k] = alpha;

        // p = β·A₂₂·v, then w = p − (β/2)(pᵀv)·v
        let w = &mut w[..m];
        for i in 0..m {
            let start = (k + 1 + i) * n + k + 1;
            let row = &a[start..start + m];
            w[i] = beta * dot(row, v);
        }
        let kappa = 0.5 * beta * dot(w, v);
        for (wi, vi) in w.iter_mut().zip(v.iter()) {
            *wi -= kappa * vi;
        }
        // A₂₂ ← A₂₂ − v wᵀ − w vᵀ
        for i in 0..m {
            let start = (k + 1 + i) * n + k + 1;
            let row = &mut a[start..start + m];
            let (vi, wi) = (v[i], w[i]);
            for ((r, vj), wj) in row.iter_mut().zip(v.iter()).zip(w.iter()) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    Tridiagonal { diag, off }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators keep the loop vectorizable without reassociation flags
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. Returns eigenvalues
/// (unsorted, in QL order) and, when requested, the row-major eigenvector
/// matrix `Z` with `T = Z diag(λ) Zᵀ` (column j of `Z` pairs with `λ_j`).
pub fn tridiagonal_eigen(
    t: &Tridiagonal,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = t.diag.len();
    let mut d = t.diag.clone();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&t.off);
    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= QL_TOL * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    sweeps: MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// All eigenvalues of a symmetric matrix, descending.
pub fn eigvals_sym(matrix: &SymMatrix) -> Result<Spectrum> {
    matrix.check_symmetric()?;
    let n = matrix.n;
    let t = tridiagonalize(matrix);
    let (mut values, _) = tridiagonal_eigen(&t, false)?;
    values.sort_by(|a, b| b.total_cmp(a));

    let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
    let trace_residual = (values.iter().sum::<f64>() - matrix.trace()).abs() / (n.max(1) as f64 * scale);
    let fro = matrix.frobenius_sq();
    let frobenius_residual =
        (values.iter().map(|v| v * v).sum::<f64>() - fro).abs() / fro.max(f64::MIN_POSITIVE);
    Ok(Spectrum {
        values,
        source_dim: n,
        trace_residual,
        frobenius_residual,
    })
}

/// `‖Z Λ Zᵀ − T‖_F / ‖T‖_F` for the tridiagonal reduction `T` of `matrix`
/// and its computed eigenpairs.
pub fn reconstruction_residual(matrix: &SymMatrix) -> Result<f64> {
    matrix.check_symmetric()?;
    let n = matrix.n;
    let t = tridiagonalize(matrix);
    let (vals, z) = tridiagonal_eigen(&t, true)?;
    let z = z.expect("vectors requested");
    let dense = t.to_dense();
    let mut err = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| z[i * n + k] * vals[k] * z[j * n + k]).sum();
            err += (s - dense.get(i, j)).powi(2);
        }
    }
    Ok(err.sqrt() / dense.frobenius_sq().sqrt().max(f64::MIN_POSITIVE))
}

/// `max_i |λ_i|`. All-zero rows are dropped first, which leaves the norm unchanged.
pub fn operator_norm(matrix: &SymMatrix) -> Result<f64> {
    match matrix.compact() {
        Some(small) if small.n == 0 => Ok(0.0),
        Some(small) => Ok(eigvals_sym(&small)?.norm()),
        None => Ok(eigvals_sym(matrix)?.norm()),
    }
}

fn same_dim(s: &SymMatrix, q: &SymMatrix) -> Result<()> {
    if s.n != q.n {
        return input(format!("dimension mismatch: {} vs {}", s.n, q.n));
    }
    Ok(())
}

/// `tr((S+Q)^p) − tr(S^p)` from the two spectra.
pub fn trace_power_diff(s: &SymMatrix, q: &SymMatrix, p: u32) -> Result<f64> {
    same_dim(s, q)?;
    if p == 0 {
        return input("exponent p must be at least 1");
    }
    let sum = eigvals_sym(&s.add(q)?)?;
    let base = eigvals_sym(s)?;
    Ok(sum.power_sum(p) - base.power_sum(p))
}

/// Slacks of the two-sided even trace-difference bound
/// `‖S+Q‖^{2p} − 7m‖S‖^{2p} ≤ tr((S+Q)^{2p}) − tr(S^{2p}) ≤ 4m‖S+Q‖^{2p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichSlack {
    pub lower: f64,
    pub upper: f64,
    /// `max(1, ‖S+Q‖^{2p})`, the natural tolerance scale.
    pub scale: f64,
}

/// Tolerance used when deciding whether `λ_{2m+1}(Q)` vanishes.
fn rank_tol(q: &Spectrum) -> f64 {
    1e-12 * q.norm().max(1.0)
}

fn check_rank_budget(q_spec: &Spectrum, m: usize) -> Result<()> {
    let l = q_spec.lambda(2 * m + 1);
    if l.abs() > rank_tol(q_spec) {
        return input(format!("λ_{}(Q) = {l} is not zero", 2 * m + 1));
    }
    Ok(())
}

pub fn weyl_sandwich_margin(s: &SymMatrix, q: &SymMatrix, p: u32, m: usize) -> Result<SandwichSlack> {
    same_dim(s, q)?;
    let n = s.n;
    if p == 0 {
        return input("p must be at least 1");
    }
    if m < 1 || 6 * (m + 1) > n {
        return input(format!("rank budget m={m} outside [1, n/6 − 1] for n={n}"));
    }
    let s_spec = eigvals_sym(s)?;
    if s_spec.largest() < 0.0 {
        return input("λ_1(S) must be non-negative");
    }
    let q_spec = eigvals_sym(q)?;
    check_rank_budget(&q_spec, m)?;
    let sum_spec = eigvals_sym(&s.add(q)?)?;

    let two_p = 2 * p;
    let diff = sum_spec.power_sum(two_p) - s_spec.power_sum(two_p);
    let big = sum_spec.norm().powi(two_p as i32);
    let small = s_spec.norm().powi(two_p as i32);
    Ok(SandwichSlack {
        lower: diff - (big - 7.0 * m as f64 * small),
        upper: 4.0 * m as f64 * big - diff,
        scale: big.max(1.0),
    })
}

/// Odd trace-difference bound slack with its tolerance scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddSlack {
    pub slack: f64,
    pub scale: f64,
}

/// `2m·λ_1(S+Q)^{2p+1} + λ_n(S+Q)^{2p+1} + 3m·‖S‖^{2p+1} − (tr((S+Q)^{2p+1}) − tr(S^{2p+1}))`.
pub fn odd_trace_margin(s: &SymMatrix, q: &SymMatrix, p: u32, m: usize) -> Result<OddSlack> {
    same_dim(s, q)?;
    let n = s.n;
    if m < 1 || 4 * (m + 1) > n {
        return input(format!("rank budget m={m} outside [1, n/4 − 1] for n={n}"));
    }
    let q_spec = eigvals_sym(q)?;
    check_rank_budget(&q_spec, m)?;
    let s_spec = eigvals_sym(s)?;
    let sum_spec = eigvals_sym(&s.add(q)?)?;
    let odd = (2 * p + 1) as i32;
    let diff = sum_spec.power_sum(odd as u32) - s_spec.power_sum(odd as u32);
    let rhs = 2.0 * m as f64 * sum_spec.largest().powi(odd)
        + sum_spec.smallest().powi(odd)
        + 3.0 * m as f64 * s_spec.norm().powi(odd);
    let scale = sum_spec.norm().max(s_spec.norm()).powi(odd).max(1.0);
    Ok(OddSlack {
        slack: rhs - diff,
        scale,
    })
}
