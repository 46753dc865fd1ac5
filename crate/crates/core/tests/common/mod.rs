#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use stochgreedy::dataio::{
    build_kernel, gaussian_mixture, generate_scenarios, KernelParams, MixtureParams, Normalization,
    ScenarioModel, VectorDataset,
};
use stochgreedy::objectives::{FacilityLocation, LogDet, PenaltyReduction, WeightedCoverage};
use stochgreedy::{ElementId, GroundSet, Objective, Result};

/// universe {a,b,c,d}; 0→{a,b}, 1→{b,c}, 2→{c}, 3→{d}
pub fn example_c() -> WeightedCoverage {
    WeightedCoverage::unit(4, vec![vec![0, 1], vec![1, 2], vec![2], vec![3]]).unwrap()
}

pub fn points(n: usize, dim: usize, seed: u64) -> Arc<VectorDataset> {
    let params = MixtureParams {
        n,
        dim,
        clusters: 4,
        seed,
        ..Default::default()
    };
    Arc::new(gaussian_mixture(&params, Normalization::PerVectorUnitNorm).unwrap())
}

pub fn logdet(n: usize, seed: u64) -> LogDet {
    let kernel = build_kernel(points(n, 5, seed), &KernelParams::default()).unwrap();
    LogDet::new(Arc::new(kernel), 1.0).unwrap()
}

pub fn facility(n: usize, seed: u64) -> FacilityLocation {
    FacilityLocation::from_dataset(points(n, 5, seed), None).unwrap()
}

pub fn penalty(sensors: usize, scenarios: usize, seed: u64) -> PenaltyReduction {
    let model = ScenarioModel {
        radius: 0.3,
        ..Default::default()
    };
    PenaltyReduction::new(Arc::new(
        generate_scenarios(sensors, scenarios, seed, &model).unwrap(),
    ))
    .unwrap()
}

/// Counts every raw call into the wrapped objective, independently of the oracle's counter.
pub struct Counting<O> {
    pub inner: O,
    pub values: AtomicU64,
    pub gains: AtomicU64,
}

impl<O> Counting<O> {
    pub fn new(inner: O) -> Self {
        Counting {
            inner,
            values: AtomicU64::new(0),
            gains: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.values.load(Ordering::SeqCst) + self.gains.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.values.store(0, Ordering::SeqCst);
        self.gains.store(0, Ordering::SeqCst);
    }
}

impl<O: Objective> Objective for Counting<O> {
    type State = O::State;

    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn initial_state(&self) -> O::State {
        self.inner.initial_state()
    }

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        self.values.fetch_add(1, Ordering::SeqCst);
        self.inner.value(set)
    }

    fn gain(&self, state: &O::State, e: ElementId) -> Result<f64> {
        self.gains.fetch_add(1, Ordering::SeqCst);
        self.inner.gain(state, e)
    }

    fn insert(&self, state: &mut O::State, e: ElementId) -> Result<()> {
        self.inner.insert(state, e)
    }
}

pub fn ids(v: &[usize]) -> Vec<ElementId> {
    v.iter().map(|&i| ElementId(i)).collect()
}
