//! Shipped objective functions.
//!
//! Each objective keeps incremental state so that a marginal query after `|A|` commits costs
//! far less than re-evaluating `f` from scratch.

mod coverage;
mod facility;
mod logdet;
mod penalty;

pub use coverage::WeightedCoverage;
pub use facility::{DistanceSource, FacilityLocation};
pub use logdet::LogDet;
pub use penalty::PenaltyReduction;

use crate::error::{Error, Result};
use crate::oracle::{ElementId, GroundSet, Objective};

/// Additive objective `f(A) = Σ_{e∈A} w_e`. Both monotone and submodular with equality, which
/// makes lazy bounds exact; mostly useful in tests and cost accounting checks.
#[derive(Clone, Debug)]
pub struct Modular {
    ground: GroundSet,
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid(format!(
                "modular weight {i} must be finite and non-negative, got {}",
                weights[i]
            )));
        }
        Ok(Modular {
            ground: GroundSet::new(weights.len()),
            weights,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Objective for Modular {
    type State = ();

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn initial_state(&self) {}

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        Ok(set.iter().map(|e| self.weights[e.0]).sum())
    }

    fn gain(&self, _: &(), e: ElementId) -> Result<f64> {
        Ok(self.weights[e.0])
    }

    fn insert(&self, _: &mut (), _: ElementId) -> Result<()> {
        Ok(())
    }
}
