//! Maximize the variational profile and compare with `f(M)²`.
//!
//!     cargo run --release --example variational_profile

use wigner_edge::profile::{h_eval, sup_closed_form, sup_h};

fn main() -> wigner_edge::Result<()> {
    for m in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let p = sup_h(m)?;
        println!(
            "M={m:<5} sup={:.9} closed form={:.9} at (x,y,z)=({:.4}, {:.4}, {:.4})",
            p.value,
            sup_closed_form(m),
            p.x,
            p.y,
            p.z
        );
    }
    println!("h(2; 0.6, 1/15, 0.3) = {:.9}", h_eval(2.0, 0.6, 1.0 / 15.0, 0.3)?);
    Ok(())
}
