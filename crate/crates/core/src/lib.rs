//! Alignment-free Hardy-type Bell test on eight qubits.
//!
//! Alice holds qubits 1–4 and Bob qubits 5–8. Each party can measure in one
//! of two settings, F = (σ_z, σ_z, σ_x, σ_x) or G = (σ_z, σ_x, σ_z, σ_x), with
//! an arbitrary common rotation of all four devices, and coarse-grains the 16
//! outcomes into a single ±1 value. This crate
//!
//! * reconstructs the shared state |η⟩ from the three zero-probability
//!   requirements ([`eta`]),
//! * evaluates P(F_A=1,F_B=1) = 0, P(F_A=1|G_B=1) = 1, P(F_B=1|G_A=1) = 1 and
//!   P(G_A=1,G_B=1) = 9/112 exactly, for any apparatus rotations
//!   ([`measurement`]),
//! * enumerates every local deterministic strategy to show the four
//!   statements are incompatible with local hidden variables ([`lhv`]),
//! * and samples finite-shot experiments ([`montecarlo`]).
//!
//! ```
//! use eta_core::eta::solve_eta;
//! use eta_core::config::{DEFAULT_NULLSPACE_TOL, P_GAGB_TARGET};
//!
//! let solution = solve_eta(DEFAULT_NULLSPACE_TOL)?;
//! assert_eq!(solution.nullspace_dimension, 1);
//! assert!((solution.p_gagb - P_GAGB_TARGET).abs() < 1e-9);
//! # Ok::<(), eta_core::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod config;
mod error;
pub mod eta;
pub mod json;
pub mod lhv;
pub mod linalg;
pub mod measurement;
pub mod montecarlo;
mod party;
pub mod spin;

pub use error::{Error, Result};
pub use party::{Family, Party, RotationRole};

// The guide's code listings compile and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/singlet-subspace.md")]
    mod singlet_subspace {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/reconstructing-eta.md")]
    mod reconstructing_eta {}
    #[doc = include_str!("../../../book/src/local-hidden-variables.md")]
    mod local_hidden_variables {}
    #[doc = include_str!("../../../book/src/finite-shots.md")]
    mod finite_shots {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
