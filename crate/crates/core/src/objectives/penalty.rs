use std::sync::Arc;

use crate::dataio::{PenaltyModel, ScenarioTable};
use crate::error::{Error, Result};
use crate::oracle::{ElementId, GroundSet, Objective};

/// Expected penalty reduction for sensor placement,
/// `R(A) = Σ_i P(i) · (π_i(∞) − π_i(T(A, i)))` with `T(A, i) = min_{s∈A} T(s, i)`.
///
/// Each `π_i` must be non-decreasing in the detection time so that earlier detection never
/// costs more; this is checked at construction.
#[derive(Clone, Debug)]
pub struct PenaltyReduction {
    ground: GroundSet,
    table: Arc<ScenarioTable>,
    penalties: Vec<PenaltyModel>,
    at_infinity: Vec<f64>,
}

impl PenaltyReduction {
    /// Uses the table's own penalty model for every scenario.
    pub fn new(table: Arc<ScenarioTable>) -> Result<Self> {
        let penalties = vec![table.penalty().clone(); table.num_scenarios()];
        Self::with_penalties(table, penalties)
    }

    /// One penalty function per scenario.
    pub fn with_penalties(table: Arc<ScenarioTable>, penalties: Vec<PenaltyModel>) -> Result<Self> {
        if penalties.len() != table.num_scenarios() {
            return Err(Error::invalid(format!(
                "{} penalty functions for {} scenarios",
                penalties.len(),
                table.num_scenarios()
            )));
        }
        for (i, p) in penalties.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::invalid(format!("penalty for scenario {i}: {e}")))?;
        }
        let at_infinity = penalties.iter().map(PenaltyModel::at_infinity).collect();
        Ok(PenaltyReduction {
            ground: GroundSet::new(table.num_sensors()),
            table,
            penalties,
            at_infinity,
        })
    }

    pub fn table(&self) -> &ScenarioTable {
        &self.table
    }

    pub fn penalties(&self) -> &[PenaltyModel] {
        &self.penalties
    }

    /// `R(V)`: the reduction obtained by placing a sensor everywhere.
    pub fn best_possible(&self) -> f64 {
        let all: Vec<ElementId> = self.ground.elements().collect();
        self.value(&all).unwrap_or(0.0)
    }
}

impl Objective for PenaltyReduction {
    /// Per-scenario earliest detection time over `A` (`∞` when undetected).
    type State = Vec<f64>;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![f64::INFINITY; self.table.num_scenarios()]
    }

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        let mut earliest = self.initial_state();
        for &e in set {
            self.insert(&mut earliest, e)?;
        }
        Ok(earliest
            .iter()
            .zip(&self.penalties)
            .zip(self.table.probabilities())
            .zip(&self.at_infinity)
            .map(|(((&t, pi), &p), &top)| p * (top - pi.penalty(t)))
            .sum())
    }

    fn gain(&self, earliest: &Vec<f64>, e: ElementId) -> Result<f64> {
        let times = self.table.sensor_times(e.0);
        let mut total = 0.0;
        for (i, (&now, &t)) in earliest.iter().zip(times).enumerate() {
            if t < now {
                let pi = &self.penalties[i];
                total += self.table.probabilities()[i] * (pi.penalty(now) - pi.penalty(t));
            }
        }
        Ok(total)
    }

    fn insert(&self, earliest: &mut Vec<f64>, e: ElementId) -> Result<()> {
        for (now, &t) in earliest.iter_mut().zip(self.table.sensor_times(e.0)) {
            if t < *now {
                *now = t;
            }
        }
        Ok(())
    }
}
