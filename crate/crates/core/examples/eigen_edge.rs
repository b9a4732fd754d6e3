//! One heavy-tailed Wigner matrix: top eigenvalues next to `f` of the top entries.
//!
//!     cargo run --release --example eigen_edge

use wigner_edge::heavytail::{f_edge, make_tail_spec};
use wigner_edge::spectra::{eigvals_sym, reconstruction_residual};
use wigner_edge::wigner::{max_order_stats, sample_wigner};

fn main() -> wigner_edge::Result<()> {
    let spec = make_tail_spec(0.25, None)?;
    let sample = sample_wigner(1024, &spec, 3)?;
    let matrix = sample.normalized();
    let spectrum = eigvals_sym(&matrix)?;
    let maxima = max_order_stats(&sample, 4)?;
    println!("{:>3} {:>10} {:>10} {:>10}", "k", "λ_k", "max_k A", "f(max_k)");
    for (k, &m) in maxima.iter().enumerate() {
        println!("{:>3} {:>10.5} {:>10.5} {:>10.5}", k + 1, spectrum.lambda(k + 1), m, f_edge(m)?);
    }
    println!("λ_n = {:.5}", spectrum.smallest());
    println!("‖ZΛZᵀ − A‖/‖A‖ = {:.2e}", reconstruction_residual(&matrix)?);
    Ok(())
}
