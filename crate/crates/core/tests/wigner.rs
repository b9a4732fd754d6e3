use proptest::prelude::*;
use wigner_edge::heavytail::make_tail_spec;
use wigner_edge::wigner::{decompose, detect_events, max_offdiag, max_order_stats, sample_wigner};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_parts_rebuild_the_matrix(n in 2usize..80, seed in any::<u64>(), kappa in 0.05f64..1.0) {
        let spec = make_tail_spec(0.25, None).unwrap();
        let sample = sample_wigner(n, &spec, seed).unwrap();
        let parts = decompose(&sample, 0.01, 0.02, kappa).unwrap();
        let a = sample.normalized();
        let sum = parts.small.add(&parts.medium).unwrap().add(&parts.big).unwrap();
        let split = parts.big_kappa.add(&parts.big_beyond).unwrap();
        prop_assert_eq!(sum.as_slice(), a.as_slice());
        prop_assert_eq!(split.as_slice(), parts.big.as_slice());
        prop_assert!(detect_events(&parts, 1).is_ok());
    }

    #[test]
    fn order_statistics_are_sorted_and_led_by_the_maximum(n in 4usize..60, seed in any::<u64>()) {
        let spec = make_tail_spec(0.1, Some(0.2)).unwrap();
        let sample = sample_wigner(n, &spec, seed).unwrap();
        let stats = max_order_stats(&sample, 4).unwrap();
        prop_assert_eq!(stats[0], max_offdiag(&sample));
        prop_assert!(stats.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn samples_are_reproducible_and_symmetric(n in 2usize..50, seed in any::<u64>()) {
        let spec = make_tail_spec(0.25, None).unwrap();
        let a = sample_wigner(n, &spec, seed).unwrap();
        prop_assert!(a.raw.is_exactly_symmetric());
        prop_assert_eq!(a, sample_wigner(n, &spec, seed).unwrap());
    }
}

#[test]
fn order_statistics_do_not_hold_on_to_the_entry_buffer() {
    let spec = make_tail_spec(0.25, None).unwrap();
    let sample = sample_wigner(300, &spec, 1).unwrap();
    let stats = max_order_stats(&sample, 4).unwrap();
    assert_eq!(stats.len(), 4);
    assert!(stats.capacity() <= 16, "capacity {}", stats.capacity());
}
