//! One test per acceptance criterion, plus the Monte Carlo invariants that
//! ride on the same campaigns. The campaigns are shared across tests.

use std::sync::OnceLock;

use wigner_edge::cli::VERIFY_SEED;
use wigner_edge::experiments::{k_edge_report, liminf_fraction, symmetry_ks};
use wigner_edge::verify::{self, Campaign, Check};

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn max_law() -> &'static Campaign {
    static C: OnceLock<Campaign> = OnceLock::new();
    C.get_or_init(|| Campaign::run(verify::max_law_config(VERIFY_SEED), workers()).unwrap())
}

fn edge_law() -> &'static Campaign {
    static C: OnceLock<Campaign> = OnceLock::new();
    C.get_or_init(|| Campaign::run(verify::edge_law_config(VERIFY_SEED), workers()).unwrap())
}

fn decomposition() -> &'static Campaign {
    static C: OnceLock<Campaign> = OnceLock::new();
    C.get_or_init(|| {
        Campaign::run(
            verify::decomposition_config(VERIFY_SEED, verify::DECOMPOSITION_TRIALS),
            workers(),
        )
        .unwrap()
    })
}

fn assert_passes(check: Check) {
    println!("{check}");
    assert!(check.passed, "{check}");
}

#[test]
fn criterion_01_cycle_census() {
    assert_passes(verify::criterion_01_cycle_census().unwrap());
}

#[test]
fn criterion_02_table_consistency() {
    assert_passes(verify::criterion_02_table_consistency().unwrap());
}

#[test]
fn criterion_03_inequality_audits() {
    assert_passes(verify::criterion_03_inequality_audits().unwrap());
}

#[test]
fn criterion_04_limit_of_s() {
    assert_passes(verify::criterion_04_limit_of_s().unwrap());
}

#[test]
fn criterion_05_variational_closed_form() {
    assert_passes(verify::criterion_05_variational().unwrap());
}

#[test]
fn criterion_06_trace_sandwich() {
    assert_passes(verify::criterion_06_trace_sandwich().unwrap());
}

#[test]
fn criterion_07_frechet_max_entry_law() {
    assert_passes(verify::criterion_07_frechet_max(max_law()).unwrap());
}

#[test]
fn criterion_08_edge_limit_law() {
    assert_passes(verify::criterion_08_edge_law(edge_law()).unwrap());
}

#[test]
fn criterion_09_decomposition_behavior() {
    assert_passes(verify::criterion_09_decomposition(decomposition()).unwrap());
}

#[test]
fn criterion_10_eigensolver_quality() {
    assert_passes(verify::criterion_10_eigensolver(&[edge_law(), decomposition()]).unwrap());
}

#[test]
fn criterion_11_determinism() {
    assert_passes(verify::criterion_11_determinism().unwrap());
}

#[test]
fn smallest_eigenvalue_mirrors_the_largest() {
    let ks = symmetry_ks(&edge_law().at(1024)).unwrap();
    assert!(ks < 0.1, "KS(−λ_n, λ_1) = {ks}");
}

#[test]
fn top_eigenvalue_stays_above_the_edge_or_the_maximum() {
    let frac = liminf_fraction(&edge_law().at(1024), 0.5).unwrap();
    assert!(frac >= 0.95, "fraction {frac}");
}

#[test]
fn second_edge_statistic_tracks_the_second_largest_entry() {
    let c = edge_law();
    let small = k_edge_report(&c.at(128), 2).unwrap().median_abs_deviation.unwrap();
    let big = k_edge_report(&c.at(1024), 2).unwrap().median_abs_deviation.unwrap();
    assert!(big < small, "median deviation {big} at n=1024 vs {small} at n=128");
    for r in c.at(1024) {
        assert!(r.abs_eigen(2).unwrap() <= r.abs_eigen(1).unwrap());
    }
}

#[test]
fn records_carry_consistent_norms() {
    for r in decomposition().records.iter() {
        let top = r.lambda1().unwrap().abs().max(r.lambda_bottom[0].abs());
        assert!((r.norm_a.unwrap() - top).abs() <= 1e-10 * top.max(1.0), "{r:?}");
    }
}
