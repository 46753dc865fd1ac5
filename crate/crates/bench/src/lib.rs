//! Experiment harness for the `stochgreedy` solvers: TOML sweep specs, CSV run records,
//! cost matching for Sample-Greedy, and utility-vs-cost curve aggregation.

pub mod curve;
pub mod instance;
pub mod matchp;
pub mod records;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use curve::{emit_curve, CurveAxis, CurvePoint};
pub use instance::Instance;
pub use matchp::{match_p_to_cost, PMatch};
pub use records::{read_rows, Row, RunRecord};
pub use spec::SweepSpec;
pub use sweep::{run_sweep, run_sweep_to_file, SweepResult};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "STOCHGREEDY_THREADS";
