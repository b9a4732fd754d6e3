//! Enumerate the marked cycle families and tabulate them by number of marked vertices.
//!
//!     cargo run --release --example cycle_census

use wigner_edge::cycles::{c_family, check_lemma1, multiplicity_row, recursive_construction};

fn main() -> wigner_edge::Result<()> {
    for l in 1..=6 {
        let family = c_family(l)?;
        let row = multiplicity_row(l, &family);
        let violations: usize = family.iter().map(|mc| check_lemma1(mc).len()).sum();
        let b: Vec<String> = row.b.iter().map(|v| v.to_string()).collect();
        println!("l={l} |C(l)|={:>4} b_(l,t)=[{}] violations={violations}", family.len(), b.join(" "));
    }
    let parts = recursive_construction(3)?;
    println!(
        "C(4) from C(3): {} + {} + {} cycles",
        parts[0].len(),
        parts[1].len(),
        parts[2].len()
    );
    for c in c_family(3)?.iter().take(5) {
        println!("  {}", c.cycle);
    }
    Ok(())
}
