use std::collections::BTreeSet;

use num_bigint::BigUint;
use wigner_edge::cycles::{
    c_family, check_lemma1, check_parity_lemma, enumerate_closed_walks, enumerate_even_cycles, is_dyck_path, mark,
    multiplicity_tables, recursive_construction, to_dyck, Cycle,
};
use wigner_edge::sequences::catalan;

#[test]
fn recursive_construction_partitions_the_next_family() {
    for l in 1..=5 {
        let parts = recursive_construction(l).unwrap();
        let mut seen = BTreeSet::new();
        let mut total = 0;
        for part in &parts {
            for c in part {
                total += 1;
                assert!(seen.insert(c.clone()), "l={l}: {c} built twice");
            }
        }
        let next: BTreeSet<Cycle> = c_family(l + 1).unwrap().into_iter().map(|mc| mc.cycle).collect();
        assert_eq!(total, next.len(), "l={l}");
        assert_eq!(seen, next, "l={l}");
    }
}

#[test]
fn unmarked_out_edges_stay_within_budget_up_to_half_length_six() {
    for l in 1..=6 {
        for cycle in enumerate_even_cycles(l).unwrap() {
            let mc = mark(&cycle).unwrap();
            assert!(check_lemma1(&mc).is_empty(), "{cycle}");
        }
    }
}

#[test]
fn marking_gives_dyck_paths_and_balanced_counts() {
    for l in 1..=6 {
        for cycle in enumerate_even_cycles(l).unwrap() {
            let mc = mark(&cycle).unwrap();
            assert!(is_dyck_path(&to_dyck(&mc)), "{cycle}");
            let weighted: usize = mc.nk.iter().enumerate().map(|(k, n)| k * n).sum();
            assert_eq!(weighted, l, "{cycle}");
        }
    }
}

#[test]
fn family_members_have_l_plus_one_vertices_and_total_multiplicity() {
    for l in 1..=7 {
        let family = c_family(l).unwrap();
        assert_eq!(BigUint::from(family.len()), catalan(l));
        for mc in &family {
            let c = &mc.cycle;
            assert_eq!(c.distinct_vertices(), l + 1, "{c}");
            let total: usize = (0..c.distinct_vertices() as u8).map(|v| c.multiplicity(v)).sum();
            assert_eq!(total, 2 * l + 1, "{c}");
        }
    }
}

#[test]
fn row_aggregates_match_catalan_identities() {
    for l in 1..=7 {
        let row = multiplicity_tables(l).unwrap();
        let c = catalan(l);
        let sum: BigUint = row.b.iter().sum();
        let weighted: BigUint = row.b.iter().enumerate().map(|(i, b)| b * BigUint::from(i + 1)).sum();
        assert_eq!(sum, &c * BigUint::from(l + 1), "l={l}");
        assert_eq!(weighted, &c * BigUint::from(2 * l + 1), "l={l}");
        assert_eq!(row.b[l], BigUint::from(1u8), "b_(l,l+1) at l={l}");
    }
}

/// Every vertex-disjoint set of off-diagonal edges of `walk`.
fn matchings(edges: &[(u8, u8)]) -> Vec<BTreeSet<(u8, u8)>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << edges.len()) {
        let chosen: BTreeSet<(u8, u8)> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
        let mut used = BTreeSet::new();
        if chosen.iter().all(|&(a, b)| a != b && used.insert(a) && used.insert(b)) {
            out.push(chosen);
        }
    }
    out
}

#[test]
fn parity_lemma_sweep_over_short_walks() {
    let mut cases = 0usize;
    for len in 2..=8 {
        for walk in enumerate_closed_walks(len, false).unwrap() {
            let distinct: Vec<(u8, u8)> = walk.edge_counts().into_iter().map(|(e, _)| e).collect();
            for special in matchings(&distinct) {
                if special.len() == distinct.len() {
                    continue;
                }
                assert!(check_parity_lemma(&walk, &special).unwrap(), "{walk} with {special:?}");
                cases += 1;
            }
        }
    }
    assert!(cases > 1000);
}

#[test]
fn parity_lemma_rejects_colorings_outside_its_hypotheses() {
    let walk: Cycle = "0,1,2,1,0".parse().unwrap();
    let all: BTreeSet<_> = walk.edge_counts().into_iter().map(|(e, _)| e).collect();
    assert!(check_parity_lemma(&walk, &all).is_err());
    let sharing: BTreeSet<_> = [(0, 1), (1, 2)].into_iter().collect();
    let triangle: Cycle = "0,1,2,0,3,0".parse().unwrap();
    assert!(check_parity_lemma(&triangle, &sharing).is_err());
}
