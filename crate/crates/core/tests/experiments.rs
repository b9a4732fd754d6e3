use std::fs;

use wigner_edge::experiments::{
    load_records, load_report, max_entry_report, persist_records, persist_report, run_trials, run_trials_with_workers,
    trial_seed, ExperimentConfig,
};
use wigner_edge::Error;

fn small_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        n_list: vec![24, 48],
        trials: 6,
        master_seed: seed,
        ..Default::default()
    }
}

#[test]
fn records_survive_a_round_trip_with_their_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(3);
    let records = run_trials(&cfg).unwrap();
    let path = dir.path().join("records.csv");
    persist_records(&records, Some(&cfg), &path).unwrap();
    let loaded = load_records(&path).unwrap();
    assert_eq!(loaded.records, records);
    assert_eq!(loaded.config.as_ref(), Some(&cfg));
    let rerun = run_trials(loaded.config.as_ref().unwrap()).unwrap();
    assert_eq!(rerun, records);
}

#[test]
fn reports_round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(4);
    let records = run_trials(&cfg).unwrap();
    let group: Vec<_> = records.into_iter().filter(|r| r.n == 48).collect();
    let report = max_entry_report(&group, cfg.c).unwrap().with_provenance(&cfg);
    let path = dir.path().join("report.json");
    persist_report(&report, &path).unwrap();
    let back = load_report(&path).unwrap();
    assert_eq!(back.ks, report.ks);
    assert_eq!(back.config_echo, Some(cfg));
    assert!(back.seed_metadata.is_some());
}

#[test]
fn concurrent_writers_do_not_interfere() {
    let dir = tempfile::tempdir().unwrap();
    let handles: Vec<_> = (0..4u64)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.csv"));
            std::thread::spawn(move || {
                let cfg = small_config(i);
                let records = run_trials(&cfg).unwrap();
                persist_records(&records, Some(&cfg), &path).unwrap();
                (path, records)
            })
        })
        .collect();
    for h in handles {
        let (path, records) = h.join().unwrap();
        assert_eq!(load_records(&path).unwrap().records, records);
    }
}

#[test]
fn corrupted_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(5);
    let path = dir.path().join("records.csv");
    persist_records(&run_trials(&cfg).unwrap(), Some(&cfg), &path).unwrap();
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    let target = lines.len() - 2;
    lines[target] = lines[target].replacen(',', ",x", 2);
    fs::write(&path, lines.join("\n")).unwrap();
    match load_records(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line as usize, target + 1),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = small_config(6);
    let one = run_trials_with_workers(&cfg, 1).unwrap();
    let three = run_trials_with_workers(&cfg, 3).unwrap();
    assert_eq!(one, three);
}

#[test]
fn trial_seeds_are_distinct() {
    let mut seeds: Vec<u64> = [100usize, 200]
        .iter()
        .flat_map(|&n| (0..1000).map(move |t| trial_seed(9, n, t)))
        .collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 2000);
}

#[test]
fn config_files_reject_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"n_list": [32], "trials": 2, "bogus": 1}"#).unwrap();
    assert!(ExperimentConfig::from_json_file(&path).is_err());
    fs::write(&path, r#"{"n_list": [32], "trials": 2, "c": 0.1}"#).unwrap();
    let cfg = ExperimentConfig::from_json_file(&path).unwrap();
    assert_eq!((cfg.n_list, cfg.trials, cfg.c), (vec![32], 2, 0.1));
}
