//! Run a small campaign, persist it, reload it and summarize the decomposition events.
//!
//!     cargo run --release --example campaign

use wigner_edge::experiments::{
    decomposition_report, lambda1_report, load_records, persist_records, run_trials, ExperimentConfig,
};

fn main() -> wigner_edge::Result<()> {
    let cfg = ExperimentConfig {
        n_list: vec![128, 512],
        trials: 40,
        master_seed: 5,
        ..Default::default()
    };
    let records = run_trials(&cfg)?;
    let path = std::env::temp_dir().join("wigner-edge-campaign.csv");
    persist_records(&records, Some(&cfg), &path)?;
    let loaded = load_records(&path)?;
    println!("reloaded {} records from {}", loaded.records.len(), path.display());
    for &n in &cfg.n_list {
        let group: Vec<_> = loaded.records.iter().filter(|r| r.n == n).cloned().collect();
        let l1 = lambda1_report(&group, cfg.c)?;
        println!(
            "n={n}: median λ1={:.4}, median |λ1 − f(max A)|={:.4}",
            l1.quantiles.p50,
            l1.median_abs_deviation.unwrap_or(f64::NAN)
        );
    }
    let summary = decomposition_report(&loaded.records, cfg.kappa)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    Ok(())
}
