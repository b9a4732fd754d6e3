//! Build the b/f/s count tables and audit the bounds on them.
//!
//!     cargo run --release --example count_tables

use wigner_edge::sequences::{bounds_audit, build_tables};

fn main() -> wigner_edge::Result<()> {
    let tables = build_tables(200)?;
    println!("exact/log agreement up to l={}: {:.1e}", tables.exact.depth, tables.agreement());
    for l in [5, 10, 20, 40] {
        let audit = bounds_audit(l, &tables)?;
        let worst = audit.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        println!("l={l:>3}: all bounds hold = {}, max b/binom = {worst:.3}", audit.all_hold());
    }
    for t in [1, 2, 10, 100] {
        println!("ln b(200, {t}) = {:.4}", tables.b_log(200, t).ln());
    }
    tables.write_csv(std::io::sink())?;
    Ok(())
}
