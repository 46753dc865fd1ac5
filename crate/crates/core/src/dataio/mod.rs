//! Data backings for the shipped objectives and the file formats they are read from.
//!
//! * Vector datasets: CSV (comma separated, `.` decimal point, optional header detected by a
//!   non-numeric first line) or the binary layout described on [`VectorFormat::Binary`].
//! * Kernel matrices: squared-exponential kernels built from vector datasets.
//! * Scenario tables: `sensor,scenario,time` CSV plus a TOML sidecar with probabilities and
//!   the penalty model; see [`load_scenarios`].

mod kernel;
mod scenarios;
mod vectors;

pub use kernel::{build_kernel, build_kernel_with, KernelMatrix, KernelParams, KernelStorage};
pub use scenarios::{
    generate_scenarios, load_scenarios, write_scenarios, PenaltyModel, ScenarioModel, ScenarioSpec,
    ScenarioTable,
};
pub use vectors::{
    gaussian_mixture, load_vectors, write_vectors, MixtureParams, Normalization, VectorDataset,
    VectorFormat,
};
