//! Sweep configuration files.
//!
//! A sweep is described by a TOML file:
//!
//! ```toml
//! version = 1
//! output = "results/desk.csv"        # relative paths resolve against this file's directory
//! algorithms = ["lazy_greedy", "stochastic_greedy"]
//! k = [10, 50]
//! epsilon = [0.1]                    # used by stochastic_greedy*, threshold_greedy
//! p = [0.5]                          # used by sample_greedy unless match_p is set
//! match_p = false                    # pick p per (k, epsilon) to match stochastic cost
//! match_reference = "stochastic_greedy"
//! seeds = 5                          # seeds 0..seeds
//!
//! [dataset]
//! kind = "gaussian_mixture"          # or csv, binary, scenarios, generated_scenarios, random_coverage
//! n = 2000
//!
//! [objective]
//! family = "logdet"                  # or facility, penalty, coverage
//! bandwidth = 0.75
//! sigma = 1.0
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use stochgreedy::dataio::{MixtureParams, Normalization, ScenarioModel, VectorFormat};
use stochgreedy::Algorithm;

pub const SPEC_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub version: u32,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub algorithms: Vec<String>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub match_p: bool,
    #[serde(default = "default_reference")]
    pub match_reference: String,
    pub seeds: u64,
    pub dataset: DatasetSpec,
    pub objective: ObjectiveFamily,
}

fn default_reference() -> String {
    Algorithm::StochasticGreedy.name().to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    GaussianMixture {
        #[serde(default)]
        name: Option<String>,
        #[serde(default = "mixture_n")]
        n: usize,
        #[serde(default = "mixture_dim")]
        dim: usize,
        #[serde(default = "mixture_clusters")]
        clusters: usize,
        #[serde(default = "mixture_spread")]
        spread: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "unit_norm")]
        normalization: Normalization,
    },
    Csv {
        #[serde(default)]
        name: Option<String>,
        path: PathBuf,
        #[serde(default = "unit_norm")]
        normalization: Normalization,
    },
    Binary {
        #[serde(default)]
        name: Option<String>,
        path: PathBuf,
        #[serde(default = "unit_norm")]
        normalization: Normalization,
    },
    Scenarios {
        #[serde(default)]
        name: Option<String>,
        csv: PathBuf,
        spec: PathBuf,
    },
    GeneratedScenarios {
        #[serde(default)]
        name: Option<String>,
        sensors: usize,
        scenarios: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        radius: Option<f64>,
    },
    RandomCoverage {
        #[serde(default)]
        name: Option<String>,
        n: usize,
        universe: usize,
        density: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn mixture_n() -> usize {
    MixtureParams::default().n
}
fn mixture_dim() -> usize {
    MixtureParams::default().dim
}
fn mixture_clusters() -> usize {
    MixtureParams::default().clusters
}
fn mixture_spread() -> f64 {
    MixtureParams::default().spread
}
fn unit_norm() -> Normalization {
    Normalization::PerVectorUnitNorm
}

impl DatasetSpec {
    /// The name written to the `dataset` column.
    pub fn name(&self) -> String {
        let given = match self {
            DatasetSpec::GaussianMixture { name, .. }
            | DatasetSpec::Csv { name, .. }
            | DatasetSpec::Binary { name, .. }
            | DatasetSpec::Scenarios { name, .. }
            | DatasetSpec::GeneratedScenarios { name, .. }
            | DatasetSpec::RandomCoverage { name, .. } => name.clone(),
        };
        given.unwrap_or_else(|| match self {
            DatasetSpec::GaussianMixture { n, dim, seed, .. } => {
                format!("gaussian_mixture_n{n}_d{dim}_s{seed}")
            }
            DatasetSpec::Csv { path, .. } | DatasetSpec::Binary { path, .. } => file_stem(path),
            DatasetSpec::Scenarios { csv, .. } => file_stem(csv),
            DatasetSpec::GeneratedScenarios {
                sensors,
                scenarios,
                seed,
                ..
            } => {
                format!("scenarios_{sensors}x{scenarios}_s{seed}")
            }
            DatasetSpec::RandomCoverage {
                n, universe, seed, ..
            } => {
                format!("coverage_n{n}_u{universe}_s{seed}")
            }
        })
    }

    pub(crate) fn vector_format(&self) -> Option<VectorFormat> {
        match self {
            DatasetSpec::Csv { .. } => Some(VectorFormat::Csv),
            DatasetSpec::Binary { .. } => Some(VectorFormat::Binary),
            _ => None,
        }
    }

    pub(crate) fn scenario_model(radius: Option<f64>) -> ScenarioModel {
        let mut model = ScenarioModel::default();
        if let Some(r) = radius {
            model.radius = r;
        }
        model
    }

    fn resolve(&mut self, base: &Path) {
        match self {
            DatasetSpec::Csv { path, .. } | DatasetSpec::Binary { path, .. } => {
                *path = base.join(&*path);
            }
            DatasetSpec::Scenarios { csv, spec, .. } => {
                *csv = base.join(&*csv);
                *spec = base.join(&*spec);
            }
            _ => {}
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveFamily {
    Logdet {
        #[serde(default = "default_bandwidth")]
        bandwidth: f64,
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// Exemplar clustering with `e₀` at the origin unless `exemplar` is given.
    Facility {
        #[serde(default)]
        exemplar: Option<Vec<f64>>,
    },
    Penalty,
    Coverage,
}

fn default_bandwidth() -> f64 {
    0.75
}
fn default_sigma() -> f64 {
    1.0
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).context("malformed sweep spec")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Parses and validates `path`, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read sweep spec {}", path.display()))?;
        let mut spec = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        spec.dataset.resolve(base);
        if let Some(out) = &spec.output {
            spec.output = Some(base.join(out));
        }
        Ok(spec)
    }

    /// Checks everything that does not need the dataset loaded.
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.version == SPEC_VERSION,
            "unsupported spec version {} (expected {SPEC_VERSION})",
            self.version
        );
        ensure!(!self.algorithms.is_empty(), "algorithms must not be empty");
        ensure!(!self.k.is_empty(), "k must not be empty");
        ensure!(self.seeds >= 1, "seeds must be at least 1");
        let algorithms = self.parsed_algorithms()?;
        if algorithms.iter().any(|a| a.uses_epsilon()) || self.match_p {
            ensure!(
                !self.epsilon.is_empty(),
                "epsilon must not be empty for the chosen algorithms"
            );
        }
        for &e in &self.epsilon {
            ensure!(e > 0.0 && e < 1.0, "epsilon must lie in (0, 1), got {e}");
        }
        for &p in &self.p {
            ensure!(p > 0.0 && p <= 1.0, "p must lie in (0, 1], got {p}");
        }
        if algorithms.contains(&Algorithm::SampleGreedy) && !self.match_p {
            ensure!(
                !self.p.is_empty(),
                "p must not be empty when sample_greedy runs without match_p"
            );
        }
        if self.match_p {
            let reference = self.reference()?;
            if !matches!(
                reference,
                Algorithm::StochasticGreedy | Algorithm::StochasticGreedyLazy
            ) {
                bail!("match_reference must be a stochastic_greedy variant, got {reference}");
            }
            ensure!(self.k.iter().all(|&k| k > 0), "match_p needs every k ≥ 1");
        }
        Ok(())
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>> {
        self.algorithms
            .iter()
            .map(|name| name.parse::<Algorithm>().map_err(anyhow::Error::from))
            .collect()
    }

    pub fn reference(&self) -> Result<Algorithm> {
        Ok(self.match_reference.parse::<Algorithm>()?)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds).collect()
    }
}
