//! Edge statistics of heavy-tailed Wigner matrices whose entries satisfy
//! `x⁴·P(|a| ≥ x) → c`.
//!
//! The crate samples such matrices, computes their spectra, evaluates the
//! limit law `f(ζ_c)` of the largest eigenvalue, and reproduces the exact
//! cycle-counting machinery (`C(l)`, `b_{l,t}`, `s(p, M)`) behind it, along
//! with the variational identity `sup h = f(M)²`.

pub mod cli;
pub mod cycles;
pub mod experiments;
pub mod error;
pub mod heavytail;
pub mod profile;
pub mod sequences;
pub mod spectra;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
