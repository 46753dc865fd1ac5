use crate::error::{Error, Result};
use crate::oracle::{ElementId, GroundSet, Objective};

/// Weighted set coverage: `f(A)` is the total weight of universe items covered by `A`.
#[derive(Clone, Debug)]
pub struct WeightedCoverage {
    ground: GroundSet,
    weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl WeightedCoverage {
    pub fn new(weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        let universe = weights.len();
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid(format!(
                "item weight {i} must be finite and non-negative, got {}",
                weights[i]
            )));
        }
        let mut covers = covers;
        for (e, items) in covers.iter_mut().enumerate() {
            if let Some(&bad) = items.iter().find(|&&j| j >= universe) {
                return Err(Error::invalid(format!(
                    "element {e} covers item {bad}, outside universe of size {universe}"
                )));
            }
            items.sort_unstable();
            items.dedup();
        }
        Ok(WeightedCoverage {
            ground: GroundSet::new(covers.len()),
            weights,
            covers,
        })
    }

    /// Unit weights on a universe of `universe_size` items.
    pub fn unit(universe_size: usize, covers: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(vec![1.0; universe_size], covers)
    }

    pub fn universe_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covers(&self, e: ElementId) -> &[usize] {
        &self.covers[e.0]
    }

    pub fn all_covers(&self) -> &[Vec<usize>] {
        &self.covers
    }
}

impl Objective for WeightedCoverage {
    /// Which universe items are already covered.
    type State = Vec<bool>;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn initial_state(&self) -> Vec<bool> {
        vec![false; self.weights.len()]
    }

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        let mut covered = self.initial_state();
        let mut total = 0.0;
        for e in set {
            for &j in &self.covers[e.0] {
                if !std::mem::replace(&mut covered[j], true) {
                    total += self.weights[j];
                }
            }
        }
        Ok(total)
    }

    fn gain(&self, covered: &Vec<bool>, e: ElementId) -> Result<f64> {
        Ok(self.covers[e.0]
            .iter()
            .filter(|&&j| !covered[j])
            .map(|&j| self.weights[j])
            .sum())
    }

    fn insert(&self, covered: &mut Vec<bool>, e: ElementId) -> Result<()> {
        for &j in &self.covers[e.0] {
            covered[j] = true;
        }
        Ok(())
    }
}
