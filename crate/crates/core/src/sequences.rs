//! Catalan, `f`, `s` and `b` tables at depth beyond brute force, the counting
//! polynomial `s(p, M)`, and its `2p`-th root.
//!
//! Two independent routes fill the tables. The exact route (big integers,
//! shallow depth) follows the published recursions, which subtract. The
//! log-space route reaches any depth using only sums of non-negative terms:
//! `f` from its closed form, `s` from its recursion, and `r = b − f − s`
//! (vertices other than the first two) from
//!
//! ```text
//! r_{l+1,t} = 2 r_{l,t} + s_{l,t} + [t = 1] C_l + Σ_{a=1}^{l−1} (C_{l−a} b_{a,t} + C_a r_{l−a,t})
//! ```
//!
//! which follows from the same three constructions of `C(l + 1)`.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};

pub const DEFAULT_EXACT_DEPTH: usize = 40;

/// Relative agreement required between the exact and log-space tables.
pub const AGREEMENT_TOL: f64 = 1e-10;

/// A non-negative real stored as its natural log (`−∞` for zero).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogNumber {
    pub log_value: f64,
}

impl LogNumber {
    pub const ZERO: Self = Self {
        log_value: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self { log_value: 0.0 };

    pub fn from_ln(log_value: f64) -> Self {
        Self { log_value }
    }

    /// Panics on negative or NaN input; these tables never hold either.
    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogNumber needs a non-negative value, got {x}");
        Self { log_value: x.ln() }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        Self {
            log_value: ln_biguint(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }

    pub fn ln(&self) -> f64 {
        self.log_value
    }

    /// May overflow to `+∞`.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn powi(self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { Self::ZERO };
        }
        Self::from_ln(self.log_value * k as f64)
    }

    /// Stable log-sum-exp of many terms.
    pub fn sum_all(terms: &[LogNumber]) -> Self {
        let top = terms.iter().map(|t| t.log_value).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let acc: f64 = terms.iter().map(|t| (t.log_value - top).exp()).sum();
        Self::from_ln(top + acc.ln())
    }

    /// Relative difference `|x/y − 1|`, zero when both vanish.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (false, false) => (self.log_value - other.log_value).exp_m1().abs(),
            _ => f64::INFINITY,
        }
    }
}

impl Add for LogNumber {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.log_value >= rhs.log_value {
            (self.log_value, rhs.log_value)
        } else {
            (rhs.log_value, self.log_value)
        };
        if lo == f64::NEG_INFINITY {
            return Self::from_ln(hi);
        }
        Self::from_ln(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogNumber {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::from_ln(self.log_value + rhs.log_value)
    }
}

impl fmt::Display for LogNumber {
    /// Scientific notation that survives magnitudes beyond `f64::MAX`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let log10 = self.log_value / std::f64::consts::LN_10;
        let mut exponent = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exponent);
        if mantissa >= 9.999_999_999_999_5 {
            mantissa = 1.0;
            exponent += 1.0;
        }
        write!(f, "{mantissa:.12}e{exponent}")
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn catalan(l: usize) -> BigUint {
    binomial(2 * l as u64, l as u64) / BigUint::from(l as u64 + 1)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `f_{l,t} = binom(l+k, k+1) − binom(l+k, k)` with `k = l − t`.
///
/// Returns 0 outside `1 ≤ t ≤ l + 1`, and `f_{l,l+1} = 1`.
pub fn f_closed(l: usize, t: usize) -> BigUint {
    if l == 0 || t == 0 || t > l + 1 {
        return BigUint::zero();
    }
    if t == l + 1 {
        return BigUint::one();
    }
    let k = (l - t) as u64;
    let n = l as u64 + k;
    let hi = binomial(n, k + 1);
    let lo = binomial(n, k);
    if hi > lo {
        hi - lo
    } else {
        BigUint::zero()
    }
}

/// `f` rows from `f_{l+1,t} = f_{l,t−1} + f_{l,t} + Σ_{a=1}^{l−1} C_a f_{l−a,t}`,
/// indexed `[l][t − 1]` with an empty row 0.
pub fn f_recursion_table(l_max: usize) -> Vec<Vec<BigUint>> {
    let cat: Vec<BigUint> = (0..=l_max).map(catalan).collect();
    let mut f: Vec<Vec<BigUint>> = vec![Vec::new(); l_max + 1];
    if l_max == 0 {
        return f;
    }
    f[1] = vec![BigUint::zero(), BigUint::one()];
    for l in 1..l_max {
        let mut row = vec![BigUint::zero(); l + 2];
        for t in 1..=l + 2 {
            let mut acc = get(&f[l], t - 1) + get(&f[l], t);
            for a in 1..l {
                acc += &cat[a] * get(&f[l - a], t);
            }
            row[t - 1] = acc;
        }
        f[l + 1] = row;
    }
    f
}

fn get(row: &[BigUint], t: usize) -> BigUint {
    if t == 0 || t > row.len() {
        BigUint::zero()
    } else {
        row[t - 1].clone()
    }
}

fn getl(row: &[LogNumber], t: usize) -> LogNumber {
    if t == 0 || t > row.len() {
        LogNumber::ZERO
    } else {
        row[t - 1]
    }
}

/// Exact rows indexed `[l][t − 1]`, `1 ≤ t ≤ l + 1`; row 0 is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTables {
    pub depth: usize,
    pub b: Vec<Vec<BigUint>>,
    pub f: Vec<Vec<BigUint>>,
    pub s: Vec<Vec<BigUint>>,
}

/// Log-space rows, same indexing as [`ExactTables`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogTables {
    pub depth: usize,
    pub b: Vec<Vec<LogNumber>>,
    pub f: Vec<Vec<LogNumber>>,
    pub s: Vec<Vec<LogNumber>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountTables {
    pub l_max: usize,
    pub catalan: Vec<BigUint>,
    pub exact: ExactTables,
    pub log: LogTables,
}

impl CountTables {
    pub fn build(l_max: usize) -> Result<Self> {
        build_tables(l_max)
    }

    /// Exact value when tabulated, otherwise the log-space one.
    pub fn b_log(&self, l: usize, t: usize) -> LogNumber {
        getl(&self.log.b[l], t)
    }

    pub fn b_exact(&self, l: usize, t: usize) -> Option<BigUint> {
        (l <= self.exact.depth).then(|| get(&self.exact.b[l], t))
    }

    /// Largest relative gap between exact and log-space entries.
    pub fn agreement(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 1..=self.exact.depth {
            for (ex, lg) in [
                (&self.exact.b[l], &self.log.b[l]),
                (&self.exact.f[l], &self.log.f[l]),
                (&self.exact.s[l], &self.log.s[l]),
            ] {
                for (e, g) in ex.iter().zip(lg) {
                    worst = worst.max(LogNumber::from_biguint(e).rel_diff(g));
                }
            }
        }
        worst
    }

    /// CSV with columns `l,t,b,f,s`: exact digits where available, else
    /// log-space values in scientific notation.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Resource(format!("writing table CSV: {e}"));
        w.write_record(["l", "t", "b", "f", "s"]).map_err(io)?;
        for l in 1..=self.l_max {
            for t in 1..=l + 1 {
                let cols: [String; 3] = if l <= self.exact.depth {
                    [
                        self.exact.b[l][t - 1].to_string(),
                        self.exact.f[l][t - 1].to_string(),
                        self.exact.s[l][t - 1].to_string(),
                    ]
                } else {
                    [
                        self.log.b[l][t - 1].to_string(),
                        self.log.f[l][t - 1].to_string(),
                        self.log.s[l][t - 1].to_string(),
                    ]
                };
                w.write_record([l.to_string(), t.to_string(), cols[0].clone(), cols[1].clone(), cols[2].clone()])
                    .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Resource(format!("writing table CSV: {e}")))?;
        Ok(())
    }
}

pub fn build_tables(l_max: usize) -> Result<CountTables> {
    build_tables_with_exact_depth(l_max, DEFAULT_EXACT_DEPTH)
}

pub fn build_tables_with_exact_depth(l_max: usize, exact_depth: usize) -> Result<CountTables> {
    if l_max < 1 {
        return param("table depth must be at least 1");
    }
    if l_max > 5000 {
        return param(format!("table depth {l_max} exceeds 5000"));
    }
    let catalan: Vec<BigUint> = (0..=l_max).map(catalan).collect();
    let exact = exact_tables(&catalan, l_max.min(exact_depth));
    let log = log_tables(&catalan, l_max);
    Ok(CountTables {
        l_max,
        catalan,
        exact,
        log,
    })
}

fn exact_tables(cat: &[BigUint], depth: usize) -> ExactTables {
    let mut f = vec![Vec::new(); depth + 1];
    let mut s: Vec<Vec<BigUint>> = vec![Vec::new(); depth + 1];
    let mut b: Vec<Vec<BigUint>> = vec![Vec::new(); depth + 1];
    for l in 1..=depth {
        f[l] = (1..=l + 1).map(|t| f_closed(l, t)).collect();
    }
    if depth >= 1 {
        s[1] = vec![BigUint::one(), BigUint::zero()];
        b[1] = vec![BigUint::one(), BigUint::one()];
    }
    let signed = |x: BigUint| BigInt::from_biguint(Sign::Plus, x);
    for l in 1..depth {
        // s_{l+1,1} = C_l; s_{l+1,t} = s_{l,t−1} + Σ_{a=1}^{l−1} C_a s_{l−a,t−1}
        let mut srow = vec![BigUint::zero(); l + 2];
        srow[0] = cat[l].clone();
        for t in 2..=l + 2 {
            let mut acc = get(&s[l], t - 1);
            for a in 1..l {
                acc += &cat[a] * get(&s[l - a], t - 1);
            }
            srow[t - 1] = acc;
        }
        s[l + 1] = srow;

        let mut brow = vec![BigUint::zero(); l + 2];
        for t in 2..=l + 2 {
            let mut acc = BigInt::zero();
            for a in 0..l {
                acc += signed(&cat[a] * get(&b[l - a], t)) * 2;
            }
            acc += signed(get(&f[l], t - 1)) - signed(get(&f[l], t));
            acc += signed(get(&s[l], t - 1)) - signed(get(&s[l], t));
            for a in 1..l {
                acc += signed(&cat[a] * get(&s[l - a], t - 1)) - signed(&cat[a] * get(&s[l - a], t));
            }
            brow[t - 1] = acc.to_biguint().expect("b entries are non-negative");
        }
        // the recursion covers t ≥ 2; the remaining entry comes from Σ_t b = (l+2) C_{l+1}
        let rest: BigUint = brow[1..].iter().sum();
        let total = BigUint::from(l as u64 + 2) * &cat[l + 1];
        brow[0] = total - rest;
        b[l + 1] = brow;
    }
    ExactTables { depth, b, f, s }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln binom(n, k)` from a log-factorial table; `−∞` when `k > n`.
fn ln_binom(lf: &[f64], n: usize, k: usize) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        lf[n] - lf[k] - lf[n - k]
    }
}

fn log_tables(cat: &[BigUint], depth: usize) -> LogTables {
    let lf = ln_factorials(2 * depth + 2);
    let lcat: Vec<LogNumber> = cat.iter().map(LogNumber::from_biguint).collect();
    let mut f = vec![Vec::new(); depth + 1];
    for l in 1..=depth {
        // f_{l,t} = binom(2l − t, l − t) (t − 1) / (l − t + 1), and f_{l,l+1} = 1
        f[l] = (1..=l + 1)
            .map(|t| {
                if t == l + 1 {
                    LogNumber::ONE
                } else if t == 1 {
                    LogNumber::ZERO
                } else {
                    let ln = ln_binom(&lf, 2 * l - t, l - t) + ((t - 1) as f64).ln() - ((l - t + 1) as f64).ln();
                    LogNumber::from_ln(ln)
                }
            })
            .collect();
    }
    let mut s: Vec<Vec<LogNumber>> = vec![Vec::new(); depth + 1];
    let mut r: Vec<Vec<LogNumber>> = vec![Vec::new(); depth + 1];
    let mut b: Vec<Vec<LogNumber>> = vec![Vec::new(); depth + 1];
    s[1] = vec![LogNumber::ONE, LogNumber::ZERO];
    r[1] = vec![LogNumber::ZERO, LogNumber::ZERO];
    b[1] = vec![LogNumber::ONE, LogNumber::ONE];
    let mut terms = Vec::with_capacity(2 * depth + 4);
    for l in 1..depth {
        let mut srow = vec![LogNumber::ZERO; l + 2];
        srow[0] = lcat[l];
        for t in 2..=l + 2 {
            terms.clear();
            terms.push(getl(&s[l], t - 1));
            for a in 1..l {
                terms.push(lcat[a] * getl(&s[l - a], t - 1));
            }
            srow[t - 1] = LogNumber::sum_all(&terms);
        }
        let two = LogNumber::from_f64(2.0);
        let mut rrow = vec![LogNumber::ZERO; l + 2];
        for t in 1..=l + 2 {
            terms.clear();
            terms.push(two * getl(&r[l], t));
            terms.push(getl(&s[l], t));
            if t == 1 {
                terms.push(lcat[l]);
            }
            for a in 1..l {
                terms.push(lcat[l - a] * getl(&b[a], t));
                terms.push(lcat[a] * getl(&r[l - a], t));
            }
            rrow[t - 1] = LogNumber::sum_all(&terms);
        }
        let brow = (1..=l + 2)
            .map(|t| LogNumber::sum_all(&[getl(&f[l + 1], t), srow[t - 1], rrow[t - 1]]))
            .collect();
        s[l + 1] = srow;
        r[l + 1] = rrow;
        b[l + 1] = brow;
    }
    LogTables { depth, b, f, s }
}

/// Upper limit on `l_0` in the inner sum of `s(p, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum L0Cap {
    /// `l_0 ≤ min(⌊(t − 1)/2⌋, l)`
    #[default]
    HalfTMinusOne,
    /// `l_0 ≤ min(⌊t/2⌋, l)`
    HalfT,
}

impl L0Cap {
    pub fn bound(self, t: usize, l: usize) -> usize {
        match self {
            L0Cap::HalfTMinusOne => ((t - 1) / 2).min(l),
            L0Cap::HalfT => (t / 2).min(l),
        }
    }
}

fn check_poly_args(p: usize, m: f64, tables: &CountTables) -> Result<()> {
    if p < 2 {
        return param(format!("s(p, M) needs p ≥ 2, got {p}"));
    }
    if !(m > 0.0) || !m.is_finite() {
        return domain(format!("s(p, M) needs M > 0, got {m}"));
    }
    if tables.l_max < p - 1 {
        return param(format!("tables of depth {} cannot evaluate p={p}", tables.l_max));
    }
    Ok(())
}

/// `s(p, M) = Σ_{l=1}^{p−1} M^{2l} Σ_{t=1}^{p−l+1} Σ_{l_0} binom(l−l_0+t−1, l−l_0) binom(t, 2l_0) b_{p−l,t}`.
pub fn s_poly(p: usize, m: f64, tables: &CountTables, cap: L0Cap) -> Result<LogNumber> {
    check_poly_args(p, m, tables)?;
    let lf = ln_factorials(2 * p + 2);
    let ln_m2 = 2.0 * m.ln();
    let mut terms = Vec::new();
    for l in 1..p {
        for t in 1..=p - l + 1 {
            let bt = tables.b_log(p - l, t);
            if bt.is_zero() {
                continue;
            }
            for l0 in 0..=cap.bound(t, l) {
                let ln = l as f64 * ln_m2
                    + ln_binom(&lf, l - l0 + t - 1, l - l0)
                    + ln_binom(&lf, t, 2 * l0)
                    + bt.ln();
                terms.push(LogNumber::from_ln(ln));
            }
        }
    }
    Ok(LogNumber::sum_all(&terms))
}

/// `s(p, M)^{1/(2p)}`, which tends to `f(M)` as `p → ∞`.
pub fn edge_limit_estimate(p: usize, m: f64, tables: &CountTables, cap: L0Cap) -> Result<f64> {
    let s = s_poly(p, m, tables, cap)?;
    Ok((s.ln() / (2 * p) as f64).exp())
}

/// One `t` of an inequality audit. `None` marks an inequality that does not
/// apply at this `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub t: usize,
    /// `f_{l−1,t} ≤ s_{l,t} ≤ f_{l,t+1}`
    pub squeeze: Option<bool>,
    /// `f_{l,t} ≤ b_{l,t} ≤ (l+1)^{120} f_{l,t}` for `2 ≤ t ≤ l + 1`
    pub f_sandwich: Option<bool>,
    /// `binom(2l+1−t, l) / (4l) ≤ b_{l,t}`
    pub bsizes_lower: bool,
    /// `b_{l,t} ≤ (l+1)^{120} binom(2l+1−t, l)`
    pub bsizes_upper: bool,
    /// `b_{l,t} / binom(2l+1−t, l)`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsAudit {
    pub l: usize,
    pub exact: bool,
    pub rows: Vec<AuditRow>,
}

impl BoundsAudit {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| {
            r.squeeze != Some(false) && r.f_sandwich != Some(false) && r.bsizes_lower && r.bsizes_upper
        })
    }
}

pub fn bounds_audit(l: usize, tables: &CountTables) -> Result<BoundsAudit> {
    if l < 1 || l > tables.l_max {
        return param(format!("audit index l={l} outside [1, {}]", tables.l_max));
    }
    if l <= tables.exact.depth {
        Ok(audit_exact(l, &tables.exact))
    } else {
        Ok(audit_log(l, &tables.log))
    }
}

fn audit_exact(l: usize, ex: &ExactTables) -> BoundsAudit {
    let poly = BigUint::from(l as u64 + 1).pow(120);
    let f_prev = |t: usize| if l >= 2 { get(&ex.f[l - 1], t) } else { BigUint::zero() };
    let rows = (1..=l + 1)
        .map(|t| {
            let b = get(&ex.b[l], t);
            let f = get(&ex.f[l], t);
            let s = get(&ex.s[l], t);
            let squeeze = (l >= 2).then(|| f_prev(t) <= s && s <= get(&ex.f[l], t + 1));
            let f_sandwich = (t >= 2).then(|| f <= b && b <= &poly * &f);
            let binom = binomial((2 * l + 1 - t) as u64, l as u64);
            BoundsAudit::row(
                t,
                squeeze,
                f_sandwich,
                BigUint::from(4 * l as u64) * &b >= binom,
                b <= &poly * &binom,
                LogNumber::from_biguint(&b).ln() - LogNumber::from_biguint(&binom).ln(),
            )
        })
        .collect();
    BoundsAudit { l, exact: true, rows }
}

fn audit_log(l: usize, lg: &LogTables) -> BoundsAudit {
    // log-space comparisons allow for accumulated rounding
    let slack = 1e-9 * (l as f64);
    let le = |a: LogNumber, b: LogNumber| a.is_zero() || a.ln() <= b.ln() + slack;
    let poly = 120.0 * ((l + 1) as f64).ln();
    let lf = ln_factorials(2 * l + 2);
    let rows = (1..=l + 1)
        .map(|t| {
            let b = getl(&lg.b[l], t);
            let f = getl(&lg.f[l], t);
            let s = getl(&lg.s[l], t);
            let squeeze = Some(le(getl(&lg.f[l - 1], t), s) && le(s, getl(&lg.f[l], t + 1)));
            let f_sandwich = (t >= 2).then(|| le(f, b) && le(b, LogNumber::from_ln(f.ln() + poly)));
            let binom = LogNumber::from_ln(ln_binom(&lf, 2 * l + 1 - t, l));
            BoundsAudit::row(
                t,
                squeeze,
                f_sandwich,
                le(binom, LogNumber::from_ln(b.ln() + (4.0 * l as f64).ln())),
                le(b, LogNumber::from_ln(binom.ln() + poly)),
                b.ln() - binom.ln(),
            )
        })
        .collect();
    BoundsAudit { l, exact: false, rows }
}

impl BoundsAudit {
    fn row(
        t: usize,
        squeeze: Option<bool>,
        f_sandwich: Option<bool>,
        bsizes_lower: bool,
        bsizes_upper: bool,
        ln_ratio: f64,
    ) -> AuditRow {
        AuditRow {
            t,
            squeeze,
            f_sandwich,
            bsizes_lower,
            bsizes_upper,
            ratio: ln_ratio.exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), BigUint::one());
        assert_eq!(catalan(3), BigUint::from(5u32));
        assert_eq!(catalan(10), BigUint::from(16796u32));
        for l in 0..30 {
            let conv: BigUint = (0..=l).map(|a| catalan(a) * catalan(l - a)).sum();
            assert_eq!(conv, catalan(l + 1));
        }
    }

    #[test]
    fn f_closed_values() {
        assert_eq!(f_closed(2, 2), BigUint::one());
        assert_eq!(f_closed(1, 2), BigUint::one());
        assert_eq!(f_closed(3, 1), BigUint::zero());
        assert_eq!(f_closed(3, 5), BigUint::zero());
        assert_eq!(f_closed(3, 0), BigUint::zero());
        let rec = f_recursion_table(60);
        for l in 1..=60 {
            for t in 1..=l + 1 {
                assert_eq!(rec[l][t - 1], f_closed(l, t), "l={l} t={t}");
            }
        }
    }

    #[test]
    fn second_row() {
        let tables = build_tables(3).unwrap();
        assert_eq!(tables.exact.b[2], big(&[3, 2, 1]));
        assert_eq!(tables.exact.s[2], big(&[1, 1, 0]));
        assert_eq!(tables.exact.s[3], big(&[2, 2, 1, 0]));
        assert!(tables.agreement() < AGREEMENT_TOL);
    }

    #[test]
    fn identities_exact() {
        let tables = build_tables(40).unwrap();
        for l in 1..=40 {
            let c = &tables.catalan[l];
            let total: BigUint = tables.exact.b[l].iter().sum();
            assert_eq!(total, BigUint::from(l as u64 + 1) * c);
            let weighted: BigUint = tables.exact.b[l]
                .iter()
                .enumerate()
                .map(|(i, b)| b * BigUint::from(i as u64 + 1))
                .sum();
            assert_eq!(weighted, BigUint::from(2 * l as u64 + 1) * c);
            assert_eq!(tables.exact.b[l][l], BigUint::one());
            assert_eq!(tables.exact.f[l][l], BigUint::one());
            assert_eq!(tables.exact.s[l][0], tables.catalan[l - 1]);
        }
        assert!(tables.agreement() < AGREEMENT_TOL, "{}", tables.agreement());
    }

    #[test]
    fn log_number_arithmetic() {
        let a = LogNumber::from_f64(3.0);
        let b = LogNumber::from_f64(5.0);
        assert!(((a + b).value() - 8.0).abs() < 1e-14);
        assert!(((a * b).value() - 15.0).abs() < 1e-13);
        assert_eq!(a + LogNumber::ZERO, a);
        assert!((a * LogNumber::ZERO).is_zero());
        let huge = LogNumber::from_ln(2000.0);
        assert_eq!((huge + LogNumber::ONE).ln(), 2000.0);
        assert_eq!(LogNumber::from_f64(1234.5).to_string(), "1.234500000000e3");
        let big = LogNumber::from_ln(1000.0 * std::f64::consts::LN_10 + 2.5f64.ln()).to_string();
        assert!(big.starts_with("2.50000000") && big.ends_with("e1000"), "{big}");
        let x = BigUint::from(7u32).pow(900);
        assert!((LogNumber::from_biguint(&x).ln() - 900.0 * 7f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn s_poly_small_p() {
        let tables = build_tables(10).unwrap();
        for &m in &[0.1, 1.0, 3.0] {
            let s = s_poly(2, m, &tables, L0Cap::HalfTMinusOne).unwrap().value();
            assert!((s - 3.0 * m * m).abs() < 1e-12 * s);
            let v = s_poly(2, m, &tables, L0Cap::HalfT).unwrap().value();
            assert!((v - 4.0 * m * m).abs() < 1e-12 * v);
        }
        assert!(s_poly(2, 0.0, &tables, L0Cap::default()).is_err());
        assert!(s_poly(1, 1.0, &tables, L0Cap::default()).is_err());
        assert!(s_poly(12, 1.0, &tables, L0Cap::default()).is_err());
    }

    #[test]
    fn s_poly_small_m_is_quadratic() {
        let tables = build_tables(12).unwrap();
        let r1 = s_poly(8, 1e-4, &tables, L0Cap::default()).unwrap().value() / 1e-8;
        let r2 = s_poly(8, 1e-5, &tables, L0Cap::default()).unwrap().value() / 1e-10;
        assert!((r1 - r2).abs() < 1e-6 * r2);
    }

    #[test]
    fn audits_small() {
        let tables = build_tables(45).unwrap();
        for l in 1..=45 {
            let audit = bounds_audit(l, &tables).unwrap();
            assert_eq!(audit.exact, l <= 40);
            assert!(audit.all_hold(), "l={l}: {audit:?}");
            let last = audit.rows.last().unwrap();
            assert!((last.ratio - 1.0).abs() < 1e-12);
        }
        assert!(bounds_audit(0, &tables).is_err());
    }

    #[test]
    fn csv_dump() {
        let tables = build_tables_with_exact_depth(4, 2).unwrap();
        let mut buf = Vec::new();
        tables.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "l,t,b,f,s");
        assert_eq!(lines[1], "1,1,1,0,1");
        assert_eq!(lines.len(), 1 + 2 + 3 + 4 + 5);
        assert!(lines[6].starts_with("3,1,"));
        assert!(lines[6].contains('e'));
    }
}
