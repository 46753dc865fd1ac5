use std::sync::Arc;

use anyhow::{bail, Context, Result};
use stochgreedy::dataio::{
    build_kernel, gaussian_mixture, generate_scenarios, load_scenarios, load_vectors, KernelParams,
    MixtureParams, ScenarioTable, VectorDataset,
};
use stochgreedy::objectives::{FacilityLocation, LogDet, PenaltyReduction, WeightedCoverage};
use stochgreedy::refcheck::instances::random_coverage;
use stochgreedy::{Algorithm, Objective, Solution, SolverConfig};

use crate::spec::{DatasetSpec, ObjectiveFamily};

/// A loaded dataset with its objective, ready to hand to any solver.
pub enum Instance {
    LogDet(LogDet),
    Facility(FacilityLocation),
    Penalty(PenaltyReduction),
    Coverage(WeightedCoverage),
}

enum Loaded {
    Vectors(Arc<VectorDataset>),
    Scenarios(Arc<ScenarioTable>),
    Coverage(WeightedCoverage),
}

fn load(dataset: &DatasetSpec) -> Result<Loaded> {
    Ok(match dataset {
        DatasetSpec::GaussianMixture {
            n,
            dim,
            clusters,
            spread,
            seed,
            normalization,
            ..
        } => {
            let params = MixtureParams {
                n: *n,
                dim: *dim,
                clusters: *clusters,
                spread: *spread,
                seed: *seed,
                ..Default::default()
            };
            Loaded::Vectors(Arc::new(gaussian_mixture(&params, *normalization)?))
        }
        DatasetSpec::Csv {
            path,
            normalization,
            ..
        }
        | DatasetSpec::Binary {
            path,
            normalization,
            ..
        } => {
            let format = dataset.vector_format().expect("vector dataset");
            Loaded::Vectors(Arc::new(load_vectors(path, format, *normalization)?))
        }
        DatasetSpec::Scenarios { csv, spec, .. } => {
            Loaded::Scenarios(Arc::new(load_scenarios(csv, spec)?))
        }
        DatasetSpec::GeneratedScenarios {
            sensors,
            scenarios,
            seed,
            radius,
            ..
        } => {
            let model = DatasetSpec::scenario_model(*radius);
            Loaded::Scenarios(Arc::new(generate_scenarios(
                *sensors, *scenarios, *seed, &model,
            )?))
        }
        DatasetSpec::RandomCoverage {
            n,
            universe,
            density,
            seed,
            ..
        } => Loaded::Coverage(random_coverage(*n, *universe, *density, *seed)?),
    })
}

impl Instance {
    pub fn build(dataset: &DatasetSpec, family: &ObjectiveFamily) -> Result<Self> {
        let name = dataset.name();
        let loaded = load(dataset).with_context(|| format!("loading dataset '{name}'"))?;
        let instance = match (family, loaded) {
            (ObjectiveFamily::Logdet { bandwidth, sigma }, Loaded::Vectors(data)) => {
                let params = KernelParams {
                    bandwidth: *bandwidth,
                    sigma: *sigma,
                };
                let kernel = build_kernel(data, &params)?;
                Instance::LogDet(LogDet::new(Arc::new(kernel), *sigma)?)
            }
            (ObjectiveFamily::Facility { exemplar }, Loaded::Vectors(data)) => {
                Instance::Facility(FacilityLocation::from_dataset(data, exemplar.as_deref())?)
            }
            (ObjectiveFamily::Penalty, Loaded::Scenarios(table)) => {
                Instance::Penalty(PenaltyReduction::new(table)?)
            }
            (ObjectiveFamily::Coverage, Loaded::Coverage(obj)) => Instance::Coverage(obj),
            (family, _) => bail!("objective {family:?} cannot be built from dataset '{name}'"),
        };
        Ok(instance)
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::LogDet(o) => o.ground().size(),
            Instance::Facility(o) => o.ground().size(),
            Instance::Penalty(o) => o.ground().size(),
            Instance::Coverage(o) => o.ground().size(),
        }
    }

    pub fn run(&self, algorithm: Algorithm, cfg: &SolverConfig) -> stochgreedy::Result<Solution> {
        match self {
            Instance::LogDet(o) => algorithm.run(o, cfg),
            Instance::Facility(o) => algorithm.run(o, cfg),
            Instance::Penalty(o) => algorithm.run(o, cfg),
            Instance::Coverage(o) => algorithm.run(o, cfg),
        }
    }
}
