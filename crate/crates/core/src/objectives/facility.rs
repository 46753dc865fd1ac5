use std::sync::Arc;

use crate::dataio::VectorDataset;
use crate::error::{Error, Result};
use crate::oracle::{ElementId, GroundSet, Objective};

/// Largest ground set for which [`DistanceSource::from_dataset`] precomputes the full matrix.
pub const MATERIALIZE_LIMIT: usize = 20_000;

/// Pairwise dissimilarities `d(u, v) ≥ 0` between ground-set elements.
#[derive(Clone, Debug)]
pub enum DistanceSource {
    /// Row-major `n × n` matrix.
    Matrix { n: usize, data: Arc<[f64]> },
    /// Squared Euclidean distance between dataset rows, computed on demand.
    SquaredEuclidean(Arc<VectorDataset>),
}

impl DistanceSource {
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "distance row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
                return Err(Error::invalid(format!(
                    "distance d({i}, {j}) = {} must be finite and non-negative",
                    row[j]
                )));
            }
            data.extend(row);
        }
        Ok(DistanceSource::Matrix {
            n,
            data: data.into(),
        })
    }

    /// Squared Euclidean distances, precomputed when `n ≤ MATERIALIZE_LIMIT`.
    pub fn from_dataset(data: Arc<VectorDataset>) -> Self {
        if data.n() <= MATERIALIZE_LIMIT {
            Self::materialized(&data)
        } else {
            DistanceSource::SquaredEuclidean(data)
        }
    }

    pub fn materialized(data: &VectorDataset) -> Self {
        let n = data.n();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = data.squared_distance(i, j);
                m[i * n + j] = d;
                m[j * n + i] = d;
            }
        }
        DistanceSource::Matrix { n, data: m.into() }
    }

    pub fn n(&self) -> usize {
        match self {
            DistanceSource::Matrix { n, .. } => *n,
            DistanceSource::SquaredEuclidean(d) => d.n(),
        }
    }

    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        match self {
            DistanceSource::Matrix { n, data } => data[u * n + v],
            DistanceSource::SquaredEuclidean(d) => d.squared_distance(u, v),
        }
    }
}

/// Exemplar-clustering objective `f(A) = L({e₀}) − L(A ∪ {e₀})` with
/// `L(S) = (1/|V|) Σ_{v∈V} min_{a∈S} d(v, a)` and an auxiliary exemplar `e₀` outside `V`.
#[derive(Clone, Debug)]
pub struct FacilityLocation {
    ground: GroundSet,
    distances: DistanceSource,
    auxiliary: Vec<f64>,
}

impl FacilityLocation {
    /// `auxiliary[v]` is `d(v, e₀)`.
    pub fn new(distances: DistanceSource, auxiliary: Vec<f64>) -> Result<Self> {
        let n = distances.n();
        if auxiliary.len() != n {
            return Err(Error::invalid(format!(
                "{} auxiliary distances for {n} points",
                auxiliary.len()
            )));
        }
        if let Some(v) = auxiliary.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid(format!(
                "auxiliary distance of point {v} is {}, must be finite and non-negative",
                auxiliary[v]
            )));
        }
        Ok(FacilityLocation {
            ground: GroundSet::new(n),
            distances,
            auxiliary,
        })
    }

    /// Squared Euclidean clustering on `data` with `e₀` at `exemplar` (the origin when `None`).
    pub fn from_dataset(data: Arc<VectorDataset>, exemplar: Option<&[f64]>) -> Result<Self> {
        let origin = vec![0.0; data.dim()];
        let e0 = exemplar.unwrap_or(&origin);
        if e0.len() != data.dim() {
            return Err(Error::invalid(format!(
                "auxiliary exemplar has dimension {}, dataset has {}",
                e0.len(),
                data.dim()
            )));
        }
        let auxiliary = (0..data.n())
            .map(|v| {
                data.row(v)
                    .iter()
                    .zip(e0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum()
            })
            .collect();
        Self::new(DistanceSource::from_dataset(data), auxiliary)
    }

    pub fn distances(&self) -> &DistanceSource {
        &self.distances
    }

    pub fn auxiliary(&self) -> &[f64] {
        &self.auxiliary
    }

    /// `L({e₀})`, the largest value `f` can reach.
    pub fn baseline_loss(&self) -> f64 {
        self.auxiliary.iter().sum::<f64>() / self.ground.size().max(1) as f64
    }
}

impl Objective for FacilityLocation {
    /// Per-point distance to the nearest member of `A ∪ {e₀}`.
    type State = Vec<f64>;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn initial_state(&self) -> Vec<f64> {
        self.auxiliary.clone()
    }

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        let mut nearest = self.initial_state();
        for &e in set {
            self.insert(&mut nearest, e)?;
        }
        let n = self.ground.size() as f64;
        Ok(self
            .auxiliary
            .iter()
            .zip(&nearest)
            .map(|(a, m)| a - m)
            .sum::<f64>()
            / n)
    }

    fn gain(&self, nearest: &Vec<f64>, e: ElementId) -> Result<f64> {
        let n = nearest.len();
        let total: f64 = nearest
            .iter()
            .enumerate()
            .map(|(v, &m)| (m - self.distances.distance(v, e.0)).max(0.0))
            .sum();
        Ok(total / n as f64)
    }

    fn insert(&self, nearest: &mut Vec<f64>, e: ElementId) -> Result<()> {
        for (v, m) in nearest.iter_mut().enumerate() {
            let d = self.distances.distance(v, e.0);
            if d < *m {
                *m = d;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::Normalization;
    use crate::oracle::Oracle;
    use approx::assert_relative_eq;

    fn unit_vectors() -> FacilityLocation {
        let data =
            VectorDataset::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]], Normalization::None)
                .unwrap();
        FacilityLocation::from_dataset(Arc::new(data), None).unwrap()
    }

    #[test]
    fn two_unit_vectors_with_origin_exemplar() {
        let obj = unit_vectors();
        assert_eq!(obj.auxiliary(), &[1.0, 1.0]);
        let oracle = Oracle::new(&obj);
        assert_relative_eq!(oracle.eval(&[ElementId(0)]).unwrap(), 0.5);
        assert_relative_eq!(oracle.eval(&[ElementId(0), ElementId(1)]).unwrap(), 1.0);
        assert_relative_eq!(obj.baseline_loss(), 1.0);
    }

    #[test]
    fn duplicate_of_committed_point_adds_nothing() {
        let data = VectorDataset::from_rows(
            vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            Normalization::None,
        )
        .unwrap();
        let obj = FacilityLocation::from_dataset(Arc::new(data), None).unwrap();
        let oracle = Oracle::new(&obj);
        let mut ctx = oracle.context(3);
        oracle.commit(ElementId(0), &mut ctx).unwrap();
        assert_eq!(oracle.marginal(ElementId(1), &ctx).unwrap(), 0.0);
    }

    #[test]
    fn negative_distances_are_rejected() {
        assert!(DistanceSource::from_matrix(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).is_err());
        assert!(DistanceSource::from_matrix(vec![vec![0.0, 1.0]]).is_err());
        let d = DistanceSource::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(FacilityLocation::new(d.clone(), vec![1.0]).is_err());
        assert!(FacilityLocation::new(d, vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn on_demand_and_materialized_sources_agree() {
        let data = Arc::new(
            VectorDataset::from_rows(
                vec![
                    vec![0.3, 0.1],
                    vec![-1.0, 2.0],
                    vec![0.5, 0.5],
                    vec![2.0, -0.7],
                ],
                Normalization::None,
            )
            .unwrap(),
        );
        let dense = DistanceSource::materialized(&data);
        let lazy = DistanceSource::SquaredEuclidean(data);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(dense.distance(u, v), lazy.distance(u, v));
            }
        }
    }
}
