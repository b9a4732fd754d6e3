//! How fast does `s(p, M)^{1/(2p)}` approach `f(M)`?
//!
//!     cargo run --release --example limit_of_s

use wigner_edge::heavytail::f_edge;
use wigner_edge::sequences::{build_tables, edge_limit_estimate, L0Cap};

fn main() -> wigner_edge::Result<()> {
    let tables = build_tables(299)?;
    println!("{:>5} {:>6} {:>12} {:>12} {:>10}", "M", "p", "estimate", "f(M)", "rel.err");
    for &m in &[0.5, 1.0, 2.0, 4.0] {
        let target = f_edge(m)?;
        for &p in &[50, 100, 200, 300] {
            for cap in [L0Cap::HalfTMinusOne, L0Cap::HalfT] {
                let est = edge_limit_estimate(p, m, &tables, cap)?;
                let tag = if cap == L0Cap::HalfT { "*" } else { "" };
                println!(
                    "{m:>5} {p:>6} {est:>12.6} {target:>12.6} {:>10.4}{tag}",
                    (est - target).abs() / target
                );
            }
        }
    }
    println!("(* rows cap l0 at t/2 instead of (t-1)/2)");
    Ok(())
}
