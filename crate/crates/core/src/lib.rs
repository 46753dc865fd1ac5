//! Monotone submodular maximization under a cardinality constraint.
//!
//! The crate is organized around a counted oracle: every [`Objective`] is wrapped in an
//! [`Oracle`] that validates queries and counts each value or marginal-gain request as one
//! function evaluation. Solvers in [`solvers`] only talk to the oracle, so the `total_cost` of a
//! [`Solution`] is exactly the number of evaluations a solver issued.
//!
//! Shipped objectives ([`objectives`]) cover weighted coverage, Gaussian-process information
//! gain (log-determinant), exemplar clustering (facility location) and expected penalty
//! reduction for sensor placement. [`dataio`] builds their data backings and [`refcheck`] holds
//! the independent verification oracles used by tests.

pub mod dataio;
pub mod error;
pub mod objectives;
pub mod oracle;
pub mod refcheck;
pub mod rng;
pub mod solution;
pub mod solvers;

pub use error::{Error, Result};
pub use oracle::{ElementId, GroundSet, Objective, Oracle, OracleCounter, SelectionContext};
pub use solution::Solution;
pub use solvers::{Algorithm, SolverConfig, TieBreak};

/// Relative tolerance used for equality-of-gain checks throughout the crate.
pub const GAIN_TOLERANCE: f64 = 1e-9;

/// `true` when `a` and `b` agree within `tol` relative to the larger magnitude (absolute near 0).
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tol * scale
}
