//! Monte Carlo campaigns over Wigner samples, goodness-of-fit summaries,
//! and the records / report files they produce.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{param, Error, Result};
use crate::heavytail::{f_edge, make_tail_spec, Cdf, EdgeLimitLaw, FrechetLaw, TailSpec};
use crate::spectra::{eigvals_sym, operator_norm};
use crate::wigner::{
    decompose, default_budget, detect_events, max_order_stats, sample_wigner_capped, DEFAULT_DELTA1,
    DEFAULT_DELTA2, DEFAULT_MAX_DIM,
};

pub const DEFAULT_KAPPA: f64 = 0.5;
pub const DEFAULT_K_MAX: usize = 4;

/// Campaign parameters. The JSON form uses exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub c: f64,
    /// Pareto weight of the entry mixture; `None` picks the default for `c`.
    pub q: Option<f64>,
    pub delta1: f64,
    pub delta2: f64,
    pub kappa: f64,
    /// Sparsity budget of the big-entry event; `None` means `⌈ln n⌉`.
    pub m: Option<usize>,
    pub k_max: usize,
    pub master_seed: u64,
    pub output_path: Option<String>,
    /// Compute the spectrum of the full matrix.
    pub eigen: bool,
    /// Compute `‖A_s‖`, `‖A_m‖`, `‖A_bκ‖`.
    pub part_norms: bool,
    pub max_dim: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_list: vec![128],
            trials: 10,
            c: 0.25,
            q: None,
            delta1: DEFAULT_DELTA1,
            delta2: DEFAULT_DELTA2,
            kappa: DEFAULT_KAPPA,
            m: None,
            k_max: DEFAULT_K_MAX,
            master_seed: 0,
            output_path: None,
            eigen: true,
            part_norms: true,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return param("n_list must not be empty");
        }
        if self.trials < 1 {
            return param("trials must be at least 1");
        }
        if self.k_max < 1 {
            return param("k_max must be at least 1");
        }
        for &n in &self.n_list {
            if n < 2 * self.k_max.max(1) {
                return param(format!("n={n} is too small for k_max={}", self.k_max));
            }
            if n > self.max_dim {
                return Err(Error::Resource(format!("n={n} exceeds max_dim={}", self.max_dim)));
            }
        }
        if self.m == Some(0) {
            return param("m must be at least 1");
        }
        self.tail_spec()?;
        if !(self.delta1 > 0.0 && self.delta1 < 1.0 / 64.0) {
            return param(format!("delta1 must lie in (0, 1/64), got {}", self.delta1));
        }
        if !(self.delta2 > 0.0 && self.delta2 < 1.0 / 32.0) {
            return param(format!("delta2 must lie in (0, 1/32), got {}", self.delta2));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return param(format!("kappa must be positive, got {}", self.kappa));
        }
        Ok(())
    }

    pub fn tail_spec(&self) -> Result<TailSpec> {
        make_tail_spec(self.c, self.q)
    }

    pub fn budget(&self, n: usize) -> usize {
        self.m.unwrap_or_else(|| default_budget(n))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }
}

/// Name and constants of the per-trial seed derivation.
pub const SEED_ALGORITHM: &str = "splitmix64 chain: s = mix(mix(mix(master) ^ n) ^ trial)";
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_MUL1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MUL2: u64 = 0x94D0_49BB_1331_11EB;

/// One SplitMix64 output step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL2);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ trial as u64)
}

pub fn seed_metadata(master: u64) -> Value {
    json!({
        "algorithm": SEED_ALGORITHM,
        "constants": [
            format!("{GOLDEN_GAMMA:#018x}"),
            format!("{MIX_MUL1:#018x}"),
            format!("{MIX_MUL2:#018x}"),
        ],
        "master_seed": master,
        "rng": "ChaCha8 seeded with seed_from_u64(s); upper triangle row-major",
    })
}

/// One Monte Carlo sample. Spectral statistics refer to the normalized matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    /// `λ_1 ≥ λ_2 ≥ …`, empty when the spectrum was skipped.
    pub lambda_top: Vec<f64>,
    /// `λ_n ≤ λ_{n−1} ≤ …`
    pub lambda_bottom: Vec<f64>,
    /// Largest scaled entry magnitudes, descending; `max_stats[0] = max A`.
    pub max_stats: Vec<f64>,
    pub norm_a: Option<f64>,
    pub norm_as: Option<f64>,
    pub norm_am: Option<f64>,
    pub norm_abk: Option<f64>,
    pub e0: bool,
    pub e1: bool,
    pub e2: bool,
    pub trace_residual: Option<f64>,
    pub frobenius_residual: Option<f64>,
}

impl TrialRecord {
    pub fn lambda1(&self) -> Option<f64> {
        self.lambda_top.first().copied()
    }

    pub fn max_a(&self) -> f64 {
        self.max_stats[0]
    }

    /// `k`-th largest eigenvalue magnitude, from the tracked edge eigenvalues.
    pub fn abs_eigen(&self, k: usize) -> Option<f64> {
        let mut all: Vec<f64> = self
            .lambda_top
            .iter()
            .chain(&self.lambda_bottom)
            .map(|v| v.abs())
            .collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all.get(k.checked_sub(1)?).copied()
    }
}

pub fn run_trial(cfg: &ExperimentConfig, spec: &TailSpec, n: usize, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.master_seed, n, trial);
    let sample = sample_wigner_capped(n, spec, seed, cfg.max_dim)?;
    let max_stats = max_order_stats(&sample, cfg.k_max)?;
    let parts = decompose(&sample, cfg.delta1, cfg.delta2, cfg.kappa)?;
    let events = detect_events(&parts, cfg.budget(n))?;
    let (mut lambda_top, mut lambda_bottom) = (Vec::new(), Vec::new());
    let (mut norm_a, mut trace_residual, mut frobenius_residual) = (None, None, None);
    if cfg.eigen {
        let spectrum = eigvals_sym(&sample.normalized())?;
        lambda_top = spectrum.values[..cfg.k_max].to_vec();
        lambda_bottom = spectrum.values.iter().rev().take(cfg.k_max).copied().collect();
        norm_a = Some(spectrum.norm());
        trace_residual = Some(spectrum.trace_residual);
        frobenius_residual = Some(spectrum.frobenius_residual);
    }
    let (mut norm_as, mut norm_am, mut norm_abk) = (None, None, None);
    if cfg.part_norms {
        norm_as = Some(operator_norm(&parts.small)?);
        norm_am = Some(operator_norm(&parts.medium)?);
        norm_abk = Some(operator_norm(&parts.big_kappa)?);
    }
    Ok(TrialRecord {
        n,
        trial,
        seed,
        lambda_top,
        lambda_bottom,
        max_stats,
        norm_a,
        norm_as,
        norm_am,
        norm_abk,
        e0: events.e0,
        e1: events.e1,
        e2: events.e2,
        trace_residual,
        frobenius_residual,
    })
}

/// All trials for every `n`, using the ambient rayon pool.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let spec = cfg.tail_spec()?;
    let jobs: Vec<(usize, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    // the indexed collect keeps job order whatever the scheduling
    jobs.par_iter()
        .map(|&(n, t)| run_trial(cfg, &spec, n, t))
        .collect()
}

/// [`run_trials`] on a dedicated pool of `workers` threads.
pub fn run_trials_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<TrialRecord>> {
    if workers < 1 {
        return param("workers must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| run_trials(cfg))
}

/// Kolmogorov–Smirnov distance to a right-continuous CDF, atom-aware:
/// at each distinct sample point both `F(x)` and `F(x⁻)` are compared.
pub fn ks_statistic(samples: &[f64], cdf: &dyn Cdf) -> Result<f64> {
    if samples.is_empty() {
        return param("KS statistic needs at least one sample");
    }
    if samples.iter().any(|x| x.is_nan()) {
        return param("KS statistic got a NaN sample");
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((at - cdf.cdf(x)).abs()).max((below - cdf.cdf_left(x)).abs());
        i = j;
    }
    Ok(d.min(1.0))
}

/// Two-sample KS distance between empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return param("two-sample KS needs non-empty samples");
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs());
    }
    Ok(d)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(xs: &[f64], q: f64) -> f64 {
    let pos = q * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (pos - lo as f64) * (xs[hi] - xs[lo])
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    Some(quantile_sorted(&xs, 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        let mut xs = values.to_vec();
        xs.sort_by(f64::total_cmp);
        Self {
            p05: quantile_sorted(&xs, 0.05),
            p50: quantile_sorted(&xs, 0.5),
            p95: quantile_sorted(&xs, 0.95),
        }
    }
}

/// Summary of one statistic at one `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfReport {
    pub statistic: String,
    pub n: usize,
    pub trials: usize,
    /// Identifier of the reference law, if any.
    pub reference: Option<String>,
    pub ks: Option<f64>,
    pub quantiles: Quantiles,
    /// Median of the paired deviations
    /// `|λ_(k) − f(max_(k) A)|`, where the statistic has a pairing.
    pub median_abs_deviation: Option<f64>,
    pub config_echo: Option<ExperimentConfig>,
    pub seed_metadata: Option<Value>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl EcdfReport {
    pub fn with_provenance(mut self, cfg: &ExperimentConfig) -> Self {
        self.config_echo = Some(cfg.clone());
        self.seed_metadata = Some(seed_metadata(cfg.master_seed));
        self
    }
}

fn single_n(records: &[TrialRecord]) -> Result<usize> {
    let Some(first) = records.first() else {
        return param("no records");
    };
    if records.iter().any(|r| r.n != first.n) {
        return param("records mix several dimensions");
    }
    Ok(first.n)
}

fn report(
    statistic: &str,
    n: usize,
    values: Vec<f64>,
    reference: Option<&dyn Cdf>,
    median_abs_deviation: Option<f64>,
) -> Result<EcdfReport> {
    let ks = reference.map(|r| ks_statistic(&values, r)).transpose()?;
    Ok(EcdfReport {
        statistic: statistic.to_string(),
        n,
        trials: values.len(),
        reference: reference.map(|r| r.id()),
        ks,
        quantiles: Quantiles::of(&values),
        median_abs_deviation,
        config_echo: None,
        seed_metadata: None,
        values,
    })
}

/// `λ_1` against the law of `f(ζ_c)`, with the paired deviations `|λ_1 − f(max A)|`.
pub fn lambda1_report(records: &[TrialRecord], c: f64) -> Result<EcdfReport> {
    let n = single_n(records)?;
    let law = EdgeLimitLaw::new(c)?;
    let mut values = Vec::with_capacity(records.len());
    let mut devs = Vec::with_capacity(records.len());
    for r in records {
        let l1 = r.lambda1().ok_or_else(|| Error::Input("record has no spectrum".into()))?;
        values.push(l1);
        devs.push((l1 - f_edge(r.max_a())?).abs());
    }
    report("lambda1", n, values, Some(&law), median(&devs))
}

/// `max A` against the Fréchet law `ζ_c`.
pub fn max_entry_report(records: &[TrialRecord], c: f64) -> Result<EcdfReport> {
    let n = single_n(records)?;
    let law = FrechetLaw::new(c)?;
    let values = records.iter().map(|r| r.max_a()).collect();
    report("max_entry", n, values, Some(&law), None)
}

/// Deviations `λ_(k) − f(max_(k) A)` for the `k`-th largest eigenvalue magnitude.
pub fn k_edge_report(records: &[TrialRecord], k: usize) -> Result<EcdfReport> {
    let n = single_n(records)?;
    let mut devs = Vec::with_capacity(records.len());
    for r in records {
        if k < 1 || k > r.max_stats.len() || k > r.lambda_top.len() {
            return param(format!("k={k} outside the tracked range"));
        }
        let lk = r.abs_eigen(k).expect("k within tracked range");
        devs.push(lk - f_edge(r.max_stats[k - 1])?);
    }
    let mad = median(&devs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    report(&format!("lambda_({k})_deviation"), n, devs, None, mad)
}

/// Fraction of records with `λ_1 ≥ max(max A, 2) − t`.
pub fn liminf_fraction(records: &[TrialRecord], t: f64) -> Result<f64> {
    let mut hits = 0usize;
    for r in records {
        let l1 = r.lambda1().ok_or_else(|| Error::Input("record has no spectrum".into()))?;
        if l1 >= r.max_a().max(2.0) - t {
            hits += 1;
        }
    }
    Ok(hits as f64 / records.len().max(1) as f64)
}

/// Two-sample KS between `λ_1` and `−λ_n`.
pub fn symmetry_ks(records: &[TrialRecord]) -> Result<f64> {
    let top: Vec<f64> = records.iter().filter_map(|r| r.lambda1()).collect();
    let bottom: Vec<f64> = records
        .iter()
        .filter_map(|r| r.lambda_bottom.first().map(|v| -v))
        .collect();
    ks_two_sample(&top, &bottom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub n: usize,
    pub trials: usize,
    pub median_norm_as: f64,
    pub median_norm_am: f64,
    pub median_norm_abk: f64,
    pub e0_rate: f64,
    pub e1_rate: f64,
    pub e2_rate: f64,
    /// Records with `E1` true but `‖A_bκ‖ > κ + 1e−9`.
    pub bigish_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub rows: Vec<DecompositionRow>,
    /// Median `‖A_m‖` strictly decreases along increasing `n`.
    pub medium_decreasing: bool,
    /// Largest per-`n` median of `‖A_s‖`.
    pub max_median_norm_as: f64,
}

pub fn decomposition_report(records: &[TrialRecord], kappa: f64) -> Result<DecompositionSummary> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return param("the decomposition summary needs at least two dimensions");
    }
    let mut rows = Vec::new();
    for &n in &ns {
        let group: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
        let pick = |f: fn(&TrialRecord) -> Option<f64>| -> Result<f64> {
            let vals: Option<Vec<f64>> = group.iter().map(|r| f(r)).collect();
            let vals = vals.ok_or_else(|| Error::Input("records lack part norms".into()))?;
            Ok(median(&vals).expect("group is non-empty"))
        };
        let rate = |f: fn(&TrialRecord) -> bool| group.iter().filter(|r| f(r)).count() as f64 / group.len() as f64;
        let bigish_violations = group
            .iter()
            .filter(|r| r.e1 && r.norm_abk.is_some_and(|v| v > kappa + 1e-9))
            .count();
        rows.push(DecompositionRow {
            n,
            trials: group.len(),
            median_norm_as: pick(|r| r.norm_as)?,
            median_norm_am: pick(|r| r.norm_am)?,
            median_norm_abk: pick(|r| r.norm_abk)?,
            e0_rate: rate(|r| r.e0),
            e1_rate: rate(|r| r.e1),
            e2_rate: rate(|r| r.e2),
            bigish_violations,
        });
    }
    let medium_decreasing = rows.windows(2).all(|w| w[1].median_norm_am < w[0].median_norm_am);
    let max_median_norm_as = rows.iter().map(|r| r.median_norm_as).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecompositionSummary {
        rows,
        medium_decreasing,
        max_median_norm_as,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = vec!["n".into(), "trial".into(), "seed".into()];
    h.extend((1..=k).map(|i| format!("lambda{i}")));
    h.extend((0..k).map(|i| if i == 0 { "lambdaN".to_string() } else { format!("lambdaN-{i}") }));
    h.extend((1..=k).map(|i| format!("max{i}")));
    for name in ["normA", "normAs", "normAm", "normAbk", "e0", "e1", "e2", "traceRes", "froRes"] {
        h.push(name.into());
    }
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn padded(values: &[f64], k: usize) -> impl Iterator<Item = String> + '_ {
    (0..k).map(move |i| opt(values.get(i).copied()))
}

/// Records as CSV. Leading `#` lines carry the config and seed metadata as
/// JSON; floats use the shortest representation that round-trips.
pub fn write_records<W: Write>(records: &[TrialRecord], cfg: Option<&ExperimentConfig>, out: W) -> Result<()> {
    let mut out = out;
    let k = cfg
        .map(|c| c.k_max)
        .or_else(|| records.first().map(|r| r.max_stats.len()))
        .unwrap_or(DEFAULT_K_MAX);
    let werr = |e: std::io::Error| Error::Resource(format!("writing records: {e}"));
    if let Some(cfg) = cfg {
        writeln!(out, "# config: {}", serde_json::to_string(cfg)?).map_err(werr)?;
        writeln!(out, "# seed: {}", seed_metadata(cfg.master_seed)).map_err(werr)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let cerr = |e: csv::Error| Error::Resource(format!("writing records: {e}"));
    w.write_record(header(k)).map_err(cerr)?;
    for r in records {
        let mut row: Vec<String> = vec![r.n.to_string(), r.trial.to_string(), r.seed.to_string()];
        row.extend(padded(&r.lambda_top, k));
        row.extend(padded(&r.lambda_bottom, k));
        row.extend(padded(&r.max_stats, k));
        for v in [r.norm_a, r.norm_as, r.norm_am, r.norm_abk] {
            row.push(opt(v));
        }
        for e in [r.e0, r.e1, r.e2] {
            row.push(if e { "1" } else { "0" }.into());
        }
        row.push(opt(r.trace_residual));
        row.push(opt(r.frobenius_residual));
        w.write_record(&row).map_err(cerr)?;
    }
    w.flush().map_err(werr)?;
    Ok(())
}

pub fn persist_records(records: &[TrialRecord], cfg: Option<&ExperimentConfig>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut buf = BufWriter::new(file);
    write_records(records, cfg, &mut buf)?;
    buf.flush().map_err(io_err(path))
}

/// Records plus the embedded config, if the file carries one.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRecords {
    pub records: Vec<TrialRecord>,
    pub config: Option<ExperimentConfig>,
}

pub fn load_records(path: &Path) -> Result<LoadedRecords> {
    let file = File::open(path).map_err(io_err(path))?;
    let text: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(io_err(path))?;
    parse_records(&text, path)
}

fn parse_records(lines: &[String], path: &Path) -> Result<LoadedRecords> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        message,
    };
    let mut config = None;
    let mut body = String::new();
    let mut first_body_line = None;
    for (i, line) in lines.iter().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(json) = rest.trim_start().strip_prefix("config:") {
                config = Some(serde_json::from_str(json.trim()).map_err(|e| perr(i + 1, format!("bad config echo: {e}")))?);
            }
            continue;
        }
        first_body_line.get_or_insert(i + 1);
        body.push_str(line);
        body.push('\n');
    }
    let offset = first_body_line.unwrap_or(1);
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let head = reader.headers().map_err(|e| perr(offset, e.to_string()))?.clone();
    let k = head
        .iter()
        .filter(|h| h.strip_prefix("lambda").is_some_and(|r| r.parse::<usize>().is_ok()))
        .count();
    let expected = header(k);
    if head.iter().ne(expected.iter().map(String::as_str)) {
        return Err(perr(offset, format!("unexpected header, wanted {}", expected.join(","))));
    }
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = offset + 1 + idx;
        let row = row.map_err(|e| perr(line, e.to_string()))?;
        let cell = |j: usize| row.get(j).unwrap_or("");
        let int = |j: usize| -> Result<u64> {
            cell(j).parse::<u64>().map_err(|e| perr(line, format!("column {}: {e}", expected[j])))
        };
        let float = |j: usize| -> Result<Option<f64>> {
            let s = cell(j);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>()
                .map(Some)
                .map_err(|e| perr(line, format!("column {}: {e}", expected[j])))
        };
        let flag = |j: usize| -> Result<bool> {
            match cell(j) {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(perr(line, format!("column {}: expected 0 or 1, got {other:?}", expected[j]))),
            }
        };
        let list = |start: usize| -> Result<Vec<f64>> {
            let mut v = Vec::new();
            for j in start..start + k {
                if let Some(x) = float(j)? {
                    v.push(x);
                }
            }
            Ok(v)
        };
        let base = 3 + 3 * k;
        records.push(TrialRecord {
            n: int(0)? as usize,
            trial: int(1)? as usize,
            seed: int(2)?,
            lambda_top: list(3)?,
            lambda_bottom: list(3 + k)?,
            max_stats: list(3 + 2 * k)?,
            norm_a: float(base)?,
            norm_as: float(base + 1)?,
            norm_am: float(base + 2)?,
            norm_abk: float(base + 3)?,
            e0: flag(base + 4)?,
            e1: flag(base + 5)?,
            e2: flag(base + 6)?,
            trace_residual: float(base + 7)?,
            frobenius_residual: float(base + 8)?,
        });
    }
    Ok(LoadedRecords { records, config })
}

pub fn persist_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn load_report(path: &Path) -> Result<EcdfReport> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heavytail::{edge_limit_sample, frechet_quantile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            n_list: vec![64],
            trials: 2,
            master_seed: 1,
            ..Default::default()
        }
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(trial_seed(1, 64, 0), trial_seed(1, 64, 0));
        assert_ne!(trial_seed(1, 64, 0), trial_seed(1, 64, 1));
        assert_ne!(trial_seed(1, 64, 0), trial_seed(1, 65, 0));
        assert_ne!(trial_seed(1, 64, 0), trial_seed(2, 64, 0));
        // reference output of SplitMix64 seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn determinism_and_record_shape() {
        let cfg = small_cfg();
        let a = run_trials(&cfg).unwrap();
        let b = run_trials_with_workers(&cfg, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for r in &a {
            assert!(r.lambda_top.windows(2).all(|w| w[0] >= w[1]));
            assert!(r.lambda_bottom.windows(2).all(|w| w[0] <= w[1]));
            let norm = r.lambda_top[0].abs().max(r.lambda_bottom[0].abs());
            assert!((r.norm_a.unwrap() - norm).abs() < 1e-10);
            assert_eq!(r.abs_eigen(1), r.norm_a);
        }
    }

    #[test]
    fn ks_examples() {
        let law = FrechetLaw::new(2.0).unwrap();
        let median = frechet_quantile(&law, 0.5).unwrap();
        assert!((ks_statistic(&[median], &law).unwrap() - 0.5).abs() < 1e-12);
        let xs: Vec<f64> = (0..10_000)
            .map(|i| frechet_quantile(&law, (i as f64 + 0.5) / 10_000.0).unwrap())
            .collect();
        assert!(ks_statistic(&xs, &law).unwrap() < 0.02);
        let shifted: Vec<f64> = (0..100).map(|i| 1e6 + i as f64).collect();
        assert!(ks_statistic(&shifted, &law).unwrap() > 0.999);
        assert!(ks_statistic(&[], &law).is_err());

        // the atom at 2 must not inflate the distance
        let edge = EdgeLimitLaw::new(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ys: Vec<f64> = (0..10_000).map(|_| edge_limit_sample(&edge, &mut rng)).collect();
        assert!(ks_statistic(&ys, &edge).unwrap() < 0.02);
    }

    #[test]
    fn two_sample_ks() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&a, &[10.0, 11.0]).unwrap(), 1.0);
    }

    #[test]
    fn records_round_trip() {
        let cfg = ExperimentConfig {
            trials: 5,
            ..small_cfg()
        };
        let mut records = run_trials(&cfg).unwrap();
        records[1].norm_as = None;
        let mut buf = Vec::new();
        write_records(&records, Some(&cfg), &mut buf).unwrap();
        let lines: Vec<String> = String::from_utf8(buf).unwrap().lines().map(String::from).collect();
        assert!(lines[0].starts_with("# config: "));
        assert!(lines[2].starts_with("n,trial,seed,lambda1,lambda2,lambda3,lambda4,lambdaN,lambdaN-1"));
        let loaded = parse_records(&lines, Path::new("mem")).unwrap();
        assert_eq!(loaded.records, records);
        assert_eq!(loaded.config, Some(cfg));
    }

    #[test]
    fn malformed_records_name_the_line() {
        let mut buf = Vec::new();
        let cfg = small_cfg();
        write_records(&run_trials(&cfg).unwrap(), Some(&cfg), &mut buf).unwrap();
        let mut lines: Vec<String> = String::from_utf8(buf).unwrap().lines().map(String::from).collect();
        lines[4] = lines[4].replacen(",0,", ",zero,", 1).replacen("64,", "6x4,", 1);
        match parse_records(&lines, Path::new("mem")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let bad = r#"{"n_list": [64], "trails": 3}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
        let good: ExperimentConfig = serde_json::from_str(r#"{"n_list": [64], "trials": 3}"#).unwrap();
        assert_eq!(good.trials, 3);
        assert_eq!(good.k_max, DEFAULT_K_MAX);
    }
}
