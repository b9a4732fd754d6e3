//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cycles::c_family;
use crate::error::{Error, Result};
use crate::experiments::{
    lambda1_report, max_entry_report, persist_records, persist_report, run_trials_with_workers, ExperimentConfig,
    TrialRecord,
};
use crate::heavytail::f_edge;
use crate::profile::{sup_closed_form, sup_h};
use crate::sequences::{bounds_audit, build_tables, catalan, edge_limit_estimate, L0Cap};
use crate::verify;

/// Environment variable that replaces the default output directory.
pub const OUT_ENV: &str = "WIGNER_EDGE_OUT";
pub const DEFAULT_OUT: &str = "wigner-edge-out";

#[derive(Debug, Parser)]
#[command(name = "wigner-edge", version, about = "Edge statistics of heavy-tailed Wigner matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON file with experiment settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Matrix dimensions, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Tail constant c in x⁴·P(|a| > x) → c.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub delta1: Option<f64>,
    #[arg(long, global = true)]
    pub delta2: Option<f64>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Sparsity budget of the big-entry event (default ⌈ln n⌉).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Number of edge eigenvalues and order statistics kept per trial.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest half-length for the combinatorics run.
    #[arg(long, global = true)]
    pub lmax: Option<usize>,
    /// Exponent p of s(p, M).
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Threshold M for `limit` and `profile`.
    #[arg(long = "M", global = true)]
    pub big_m: Option<f64>,
    /// Output directory (default: $WIGNER_EDGE_OUT or ./wigner-edge-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo campaign and write records plus reports.
    Simulate,
    /// KS distance of the largest scaled entry against the Fréchet law.
    Maxlaw,
    /// KS distance of λ_1 against the law of f(ζ_c).
    Lambda1,
    /// Cycle census, count tables and their exact audits.
    Combinatorics,
    /// s(p, M)^{1/(2p)} against f(M).
    Limit,
    /// Numerical sup of the variational profile against f(M)².
    Profile,
    /// Every acceptance check.
    Verify,
}

impl Cli {
    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Config file (if any) with flag overrides applied.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = &self.n {
            cfg.n_list = n.clone();
        }
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    cfg.$field = v;
                }
            };
        }
        set!(trials => trials);
        set!(c => c);
        set!(delta1 => delta1);
        set!(delta2 => delta2);
        set!(kappa => kappa);
        set!(kmax => k_max);
        set!(seed => master_seed);
        if self.m.is_some() {
            cfg.m = self.m;
        }
        cfg.output_path = Some(self.out_dir().display().to_string());
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parse `argv` (program name first), run, and return the exit code:
/// 0 when every assertion holds, 1 on a failed assertion or runtime error,
/// 2 on bad arguments.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    run_with_output(argv, &mut out)
}

pub fn run_with_output<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parameter(_) | Error::Domain(_) | Error::Input(_) | Error::Parse { .. } | Error::Json(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Simulate => simulate(cli, out),
        Command::Maxlaw => maxlaw(cli, out),
        Command::Lambda1 => lambda1(cli, out),
        Command::Combinatorics => combinatorics(cli, out),
        Command::Limit => limit(cli, out),
        Command::Profile => profile(cli, out),
        Command::Verify => verify_all(cli, out),
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::Resource(format!("writing to stdout: {e}")))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn by_n(records: &[TrialRecord], n: usize) -> Vec<TrialRecord> {
    records.iter().filter(|r| r.n == n).cloned().collect()
}

fn simulate(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let cfg = cli.experiment_config()?;
    let records = run_trials_with_workers(&cfg, cli.workers())?;
    let dir = cli.out_dir();
    ensure_dir(&dir)?;
    let path = dir.join("records.csv");
    persist_records(&records, Some(&cfg), &path)?;
    say(out, format_args!("wrote {} records to {}", records.len(), path.display()))?;
    for &n in &cfg.n_list {
        let group = by_n(&records, n);
        let max = max_entry_report(&group, cfg.c)?.with_provenance(&cfg);
        persist_report(&max, &dir.join(format!("max_entry_n{n}.json")))?;
        let mut line = format!("n={n}: KS(max A) = {:.4}", max.ks.unwrap_or(f64::NAN));
        if cfg.eigen {
            let l1 = lambda1_report(&group, cfg.c)?.with_provenance(&cfg);
            persist_report(&l1, &dir.join(format!("lambda1_n{n}.json")))?;
            line.push_str(&format!(
                ", KS(λ1) = {:.4}, median |λ1 − f(max A)| = {:.4}",
                l1.ks.unwrap_or(f64::NAN),
                l1.median_abs_deviation.unwrap_or(f64::NAN)
            ));
        }
        say(out, format_args!("{line}"))?;
    }
    Ok(true)
}

fn maxlaw(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let mut cfg = cli.experiment_config()?;
    cfg.eigen = false;
    cfg.part_norms = false;
    let records = run_trials_with_workers(&cfg, cli.workers())?;
    let dir = cli.out_dir();
    ensure_dir(&dir)?;
    for &n in &cfg.n_list {
        let report = max_entry_report(&by_n(&records, n), cfg.c)?.with_provenance(&cfg);
        persist_report(&report, &dir.join(format!("max_entry_n{n}.json")))?;
        say(
            out,
            format_args!(
                "n={n} trials={}: KS(max A, Fréchet c={}) = {:.4}",
                report.trials,
                cfg.c,
                report.ks.unwrap_or(f64::NAN)
            ),
        )?;
    }
    Ok(true)
}

fn lambda1(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let mut cfg = cli.experiment_config()?;
    cfg.part_norms = false;
    let records = run_trials_with_workers(&cfg, cli.workers())?;
    let dir = cli.out_dir();
    ensure_dir(&dir)?;
    for &n in &cfg.n_list {
        let report = lambda1_report(&by_n(&records, n), cfg.c)?.with_provenance(&cfg);
        persist_report(&report, &dir.join(format!("lambda1_n{n}.json")))?;
        say(
            out,
            format_args!(
                "n={n} trials={}: KS(λ1, f(ζ_c)) = {:.4}, median |λ1 − f(max A)| = {:.4}",
                report.trials,
                report.ks.unwrap_or(f64::NAN),
                report.median_abs_deviation.unwrap_or(f64::NAN)
            ),
        )?;
    }
    Ok(true)
}

fn combinatorics(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let lmax = cli.lmax.unwrap_or(verify::CENSUS_MAX_L);
    let mut ok = true;
    let mut sizes = Vec::new();
    let dir = cli.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from));
    if let Some(dir) = &dir {
        ensure_dir(dir)?;
    }
    for l in 1..=lmax.min(verify::CENSUS_MAX_L) {
        let family = c_family(l)?;
        if num_bigint::BigUint::from(family.len()) != catalan(l) {
            say(out, format_args!("|C({l})| = {} differs from the Catalan number {}", family.len(), catalan(l)))?;
            ok = false;
        }
        sizes.push(family.len().to_string());
        if let Some(dir) = &dir {
            let text: String = family.iter().map(|mc| format!("{}\n", mc.cycle)).collect();
            let path = dir.join(format!("cycles_l{l}.txt"));
            std::fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
        }
    }
    say(out, format_args!("|C(l)| for l = 1..{}: {}", sizes.len(), sizes.join(",")))?;

    let table = verify::criterion_02_table_consistency()?;
    say(out, format_args!("{table}"))?;
    ok &= table.passed;
    let depth = lmax.max(40);
    let tables = build_tables(depth)?;
    let mut audit_ok = true;
    for l in 1..=depth.min(tables.exact.depth) {
        audit_ok &= bounds_audit(l, &tables)?.all_hold();
    }
    say(
        out,
        format_args!(
            "exact inequality audits for l ≤ {}: {}",
            tables.exact.depth,
            if audit_ok { "all hold" } else { "VIOLATED" }
        ),
    )?;
    ok &= audit_ok;
    if let Some(dir) = &dir {
        let path = dir.join("tables.csv");
        let file = std::fs::File::create(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
        tables.write_csv(std::io::BufWriter::new(file))?;
        say(out, format_args!("wrote {}", path.display()))?;
    }
    Ok(ok)
}

fn limit(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let p = cli.p.unwrap_or(300);
    let ms: Vec<f64> = match cli.big_m {
        Some(m) => vec![m],
        None => verify::LIMIT_MS.to_vec(),
    };
    let tables = build_tables(p.saturating_sub(1).max(1))?;
    let mut ok = true;
    for m in ms {
        let target = f_edge(m)?;
        for cap in [L0Cap::HalfTMinusOne, L0Cap::HalfT] {
            let est = edge_limit_estimate(p, m, &tables, cap)?;
            ok &= est.is_finite() && est > 0.0;
            say(
                out,
                format_args!(
                    "M={m} p={p} cap={cap:?}: s(p,M)^(1/2p) = {est:.6}, f(M) = {target:.6}, rel. error {:.3e}",
                    (est - target).abs() / target
                ),
            )?;
        }
    }
    Ok(ok)
}

fn profile(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let ms: Vec<f64> = match cli.big_m {
        Some(m) => vec![m],
        None => verify::PROFILE_MS.to_vec(),
    };
    let mut ok = true;
    for m in ms {
        let p = sup_h(m)?;
        let target = sup_closed_form(m);
        let rel = (p.value - target).abs() / target;
        ok &= rel <= 1e-6;
        say(
            out,
            format_args!(
                "M={m}: sup={} at x={:.6}, y={:.6}, z={:.6}; f(M)^2 = {target} (rel. gap {rel:.1e})",
                fmt_sup(p.value),
                p.x,
                p.y,
                p.z
            ),
        )?;
    }
    Ok(ok)
}

/// Drops digits below the optimizer's accuracy so 6.25 prints as `6.25`.
fn fmt_sup(v: f64) -> String {
    let s = format!("{v:.9}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn verify_all(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let seed = cli.seed.unwrap_or(VERIFY_SEED);
    let checks = verify::run_all(cli.workers(), seed, Some(&cli.out_dir()))?;
    for c in &checks {
        say(out, format_args!("{c}"))?;
    }
    Ok(checks.iter().all(|c| c.passed))
}

/// Master seed of the `verify` campaigns unless `--seed` is given.
pub const VERIFY_SEED: u64 = 2026;
