use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wigner_edge::experiments::ks_statistic;
use wigner_edge::heavytail::{
    edge_limit_cdf, edge_limit_sample, f_edge, f_edge_inverse, frechet_cdf, frechet_quantile, make_tail_spec,
    sample_entry, EdgeLimitLaw, FrechetLaw,
};

#[test]
fn edge_law_samples_match_their_cdf() {
    let law = EdgeLimitLaw::new(0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<f64> = (0..100_000).map(|_| edge_limit_sample(&law, &mut rng)).collect();
    assert!(ks_statistic(&draws, &law).unwrap() < 0.01);
    let atom = draws.iter().filter(|&&y| y == 2.0).count() as f64 / draws.len() as f64;
    assert!((atom - law.atom_mass()).abs() < 0.01);
}

#[test]
fn entry_signs_are_balanced() {
    for q in [None, Some(0.05)] {
        let spec = make_tail_spec(0.1, q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let positive = (0..1_000_000).filter(|_| sample_entry(&spec, &mut rng) > 0.0).count() as f64 / 1e6;
        assert!((0.49..=0.51).contains(&positive), "{q:?}: {positive}");
    }
}

proptest! {
    #[test]
    fn tail_specs_are_exact(c in 0.001f64..0.25, q_frac in 0.05f64..1.0) {
        let spec = make_tail_spec(c, Some(q_frac.min(1.0))).unwrap();
        prop_assert!(spec.tail_residual().abs() < 1e-12);
        prop_assert!(spec.variance_residual().abs() < 1e-12);
        let x = 10.0 * spec.x_m.max(spec.b_atom).max(1.0);
        prop_assert!((x.powi(4) * spec.tail_probability(x) - c).abs() < 1e-12 * c.max(1.0));
    }

    #[test]
    fn frechet_quantile_inverts_the_cdf(c in 0.01f64..4.0, u in 1e-6f64..(1.0 - 1e-6)) {
        let law = FrechetLaw::new(c).unwrap();
        let x = frechet_quantile(&law, u).unwrap();
        prop_assert!((frechet_cdf(&law, x).unwrap() - u).abs() < 1e-12);
    }

    #[test]
    fn edge_map_inverse_round_trips(x in 1.0f64..1e6) {
        let y = f_edge(x).unwrap();
        prop_assert!((f_edge_inverse(y) - x).abs() < 1e-6 * x.max(1.0));
    }

    #[test]
    fn edge_cdf_is_monotone(c in 0.01f64..2.0, a in 0.0f64..10.0, d in 0.0f64..5.0) {
        let law = EdgeLimitLaw::new(c).unwrap();
        prop_assert!(edge_limit_cdf(&law, a + d) >= edge_limit_cdf(&law, a));
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(make_tail_spec(0.0, None).is_err());
    assert!(make_tail_spec(-1.0, None).is_err());
    assert!(FrechetLaw::new(f64::NAN).is_err());
    assert!(f_edge(0.0).is_err());
    assert!(frechet_quantile(&FrechetLaw::new(1.0).unwrap(), 1.0).is_err());
}
