use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use wigner_edge::cycles::multiplicity_tables;
use wigner_edge::sequences::{binomial, build_tables, catalan, f_closed, s_poly, L0Cap};

/// `s(p, 1)` as an exact integer from enumerated `b` rows.
fn s_at_one_from_enumeration(p: usize, cap: L0Cap) -> BigUint {
    let mut total = BigUint::from(0u8);
    for l in 1..p {
        let row = multiplicity_tables(p - l).unwrap();
        for t in 1..=p - l + 1 {
            let b = &row.b[t - 1];
            for l0 in 0..=cap.bound(t, l) {
                total += binomial((l - l0 + t - 1) as u64, (l - l0) as u64) * binomial(t as u64, 2 * l0 as u64) * b;
            }
        }
    }
    total
}

#[test]
fn s_poly_at_one_matches_enumeration_term_by_term() {
    let tables = build_tables(10).unwrap();
    for p in 2..=7 {
        for cap in [L0Cap::HalfTMinusOne, L0Cap::HalfT] {
            let exact = s_at_one_from_enumeration(p, cap).to_f64().unwrap();
            let got = s_poly(p, 1.0, &tables, cap).unwrap().value();
            assert!((got - exact).abs() <= 1e-12 * exact, "p={p} {cap:?}: {got} vs {exact}");
        }
    }
}

#[test]
fn s_poly_at_p_two_is_a_pure_power_of_m() {
    let tables = build_tables(4).unwrap();
    for m in [0.3, 1.0, 2.5] {
        let a = s_poly(2, m, &tables, L0Cap::HalfTMinusOne).unwrap().value();
        let b = s_poly(2, m, &tables, L0Cap::HalfT).unwrap().value();
        assert!((a - 3.0 * m * m).abs() < 1e-12 * a);
        assert!((b - 4.0 * m * m).abs() < 1e-12 * b);
    }
}

#[test]
fn tables_agree_with_enumeration_and_closed_forms() {
    let tables = build_tables(60).unwrap();
    for l in 1..=7 {
        let row = multiplicity_tables(l).unwrap();
        for t in 1..=l + 1 {
            assert_eq!(tables.b_exact(l, t).as_ref(), Some(&row.b[t - 1]), "b({l},{t})");
            assert_eq!(&tables.exact.f[l][t - 1], &row.f[t - 1], "f({l},{t})");
            assert_eq!(&tables.exact.s[l][t - 1], &row.s[t - 1], "s({l},{t})");
        }
    }
    for l in 1..=40 {
        let sum: BigUint = (1..=l + 1).map(|t| tables.b_exact(l, t).unwrap()).sum();
        assert_eq!(sum, catalan(l) * BigUint::from(l + 1), "l={l}");
        for t in 1..=l + 1 {
            assert_eq!(tables.exact.f[l][t - 1], f_closed(l, t), "f({l},{t})");
        }
    }
    assert!(tables.agreement() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_poly_increases_with_m(p in 2usize..60, m in 0.05f64..6.0, bump in 1.001f64..2.0) {
        let tables = build_tables(60).unwrap();
        let a = s_poly(p, m, &tables, L0Cap::HalfTMinusOne).unwrap();
        let b = s_poly(p, m * bump, &tables, L0Cap::HalfTMinusOne).unwrap();
        prop_assert!(b.ln() > a.ln());
    }

    #[test]
    fn larger_l0_cap_never_decreases_s(p in 2usize..60, m in 0.05f64..6.0) {
        let tables = build_tables(60).unwrap();
        let a = s_poly(p, m, &tables, L0Cap::HalfTMinusOne).unwrap();
        let b = s_poly(p, m, &tables, L0Cap::HalfT).unwrap();
        prop_assert!(b.ln() >= a.ln() - 1e-12);
    }
}
