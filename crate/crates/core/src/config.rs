//! Numerical tolerances shared by every module.
//!
//! All targets checked by this crate are exact rationals, so double precision
//! leaves many orders of magnitude between "numerically zero" and anything
//! physically meaningful. Keeping the thresholds in one record makes that
//! margin auditable.

use serde::{Deserialize, Serialize};

/// Agreement required for state-level identities: normalization, eigen
/// residuals, nullspace membership, exact-zero table entries.
pub const TOL_EXACT: f64 = 1e-10;

/// Agreement required for unitarity and Hermiticity of small operators.
pub const TOL_UNITARY: f64 = 1e-12;

/// Agreement required for the four Hardy quantities.
pub const TOL_CLAIM: f64 = 1e-9;

/// Default relative nullspace threshold for the constraint solver.
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-8;

/// Smallest conditioning probability accepted by [`crate::measurement::conditional`].
pub const MIN_CONDITION_PROB: f64 = 1e-12;

/// |z| bound used by the finite-shot acceptance checks.
pub const Z_BOUND: f64 = 4.0;

/// Exact value of P(G_A = +1, G_B = +1).
pub const P_GAGB_TARGET: f64 = 9.0 / 112.0;

/// Snapshot of the tolerances, embedded in reports so a reader can tell which
/// thresholds produced a pass/fail verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub exact: f64,
    pub unitary: f64,
    pub claim: f64,
    pub nullspace: f64,
    pub z_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: TOL_EXACT,
            unitary: TOL_UNITARY,
            claim: TOL_CLAIM,
            nullspace: DEFAULT_NULLSPACE_TOL,
            z_bound: Z_BOUND,
        }
    }
}
