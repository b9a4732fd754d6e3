//! The largest scaled entry of a heavy-tailed Wigner matrix against the Fréchet law.
//!
//!     cargo run --release --example max_entry_law

use wigner_edge::experiments::{max_entry_report, run_trials, ExperimentConfig};

fn main() -> wigner_edge::Result<()> {
    let cfg = ExperimentConfig {
        n_list: vec![100, 400, 1000],
        trials: 500,
        eigen: false,
        part_norms: false,
        master_seed: 11,
        ..Default::default()
    };
    let records = run_trials(&cfg)?;
    for &n in &cfg.n_list {
        let group: Vec<_> = records.iter().filter(|r| r.n == n).cloned().collect();
        let report = max_entry_report(&group, cfg.c)?;
        println!(
            "n={n:>5}: KS={:.4} median={:.4} p95={:.4}",
            report.ks.unwrap_or(f64::NAN),
            report.quantiles.p50,
            report.quantiles.p95
        );
    }
    Ok(())
}
