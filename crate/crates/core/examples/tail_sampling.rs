//! Draw heavy-tailed entries and compare the empirical tail with `c / x⁴`.
//!
//!     cargo run --release --example tail_sampling

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wigner_edge::heavytail::{make_tail_spec, sample_entry};

fn main() -> wigner_edge::Result<()> {
    let spec = make_tail_spec(0.25, None)?;
    println!(
        "c={} q={:.4} x_m={:.4} atom={:.4} (variance residual {:.1e})",
        spec.c,
        spec.q,
        spec.x_m,
        spec.b_atom,
        spec.variance_residual()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws: Vec<f64> = (0..1_000_000).map(|_| sample_entry(&spec, &mut rng)).collect();
    let var = draws.iter().map(|a| a * a).sum::<f64>() / draws.len() as f64;
    println!("sample variance {var:.4}");
    println!("{:>6} {:>14} {:>14}", "x", "P(|a|>x)", "exact");
    for x in [1.0, 2.0, 4.0, 8.0] {
        let hits = draws.iter().filter(|a| a.abs() > x).count() as f64 / draws.len() as f64;
        println!("{x:>6} {hits:>14.3e} {:>14.3e}", spec.tail_probability(x));
    }
    Ok(())
}
