//! Randomized check of the two trace-difference inequalities for a sparse
//! perturbation `Q` made of `m` disjoint symmetric entry pairs.
//!
//!     cargo run --release --example trace_sandwich [cases]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_edge::spectra::{eigvals_sym, odd_trace_margin, weyl_sandwich_margin, SymMatrix};

fn pair_matrix(n: usize, m: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..2 * m {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut q = SymMatrix::zeros(n);
    for k in 0..m {
        q.set_sym(idx[2 * k], idx[2 * k + 1], rng.gen_range(-3.0..3.0));
    }
    q
}

fn main() -> wigner_edge::Result<()> {
    let cases: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_lower, mut worst_upper, mut worst_odd) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for _ in 0..cases {
        let n = rng.gen_range(12..=30);
        let m = rng.gen_range(1..=(n / 6 - 1).min(3));
        let p = rng.gen_range(1..=6);
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                s.set_sym(i, j, rng.gen_range(-1.0..1.0) / (n as f64).sqrt());
            }
        }
        if eigvals_sym(&s)?.largest() < 0.0 {
            let neg: Vec<f64> = s.as_slice().iter().map(|v| -v).collect();
            s = SymMatrix::from_row_major(n, neg)?;
        }
        let q = pair_matrix(n, m, &mut rng);
        let even = weyl_sandwich_margin(&s, &q, p, m)?;
        worst_lower = worst_lower.min(even.lower / even.scale);
        worst_upper = worst_upper.min(even.upper / even.scale);
        let odd = odd_trace_margin(&s, &q, p, m)?;
        worst_odd = worst_odd.min(odd.slack / odd.scale);
    }
    println!("{cases} cases, smallest slack / scale:");
    println!("  even lower {worst_lower:.3e}");
    println!("  even upper {worst_upper:.3e}");
    println!("  odd        {worst_odd:.3e}");
    Ok(())
}
