//! Independent verification oracles. Nothing in [`crate::solvers`] depends on this module.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::dataio::{KernelMatrix, PenaltyModel, ScenarioTable};
use crate::error::{Error, Result};
use crate::objectives::DistanceSource;
use crate::oracle::{ElementId, Objective};
use crate::rng::stream_rng;
use crate::solvers::{sample_size, RemainingPool};

/// Largest number of subsets [`brute_force_opt`] is willing to enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    pub opt_set: Vec<ElementId>,
    pub opt_value: f64,
    pub enumerated: u128,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exact optimum over all `k`-subsets, enumerated in lexicographic order so the
/// lexicographically smallest optimal set wins ties. For a monotone objective this is also the
/// optimum over subsets of size at most `k`.
pub fn brute_force_opt<O: Objective + ?Sized>(obj: &O, k: usize) -> Result<BruteForceResult> {
    let n = obj.ground().size();
    if k > n {
        return Err(Error::invalid(format!(
            "k = {k} exceeds ground set size {n}"
        )));
    }
    guard(n, k)?;
    let mut best: Option<(Vec<ElementId>, f64)> = None;
    let mut enumerated = 0u128;
    for_each_subset(n, k, |set| {
        enumerated += 1;
        let v = obj.value(set)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((set.to_vec(), v));
        }
        Ok(())
    })?;
    let (opt_set, opt_value) = best.expect("at least one subset");
    Ok(BruteForceResult {
        opt_set,
        opt_value,
        enumerated,
    })
}

/// Like [`brute_force_opt`] but over every subset of size `0..=k`; used to confirm that the
/// size-exactly-`k` search loses nothing on monotone objectives.
pub fn brute_force_opt_upto<O: Objective + ?Sized>(obj: &O, k: usize) -> Result<BruteForceResult> {
    let mut best = brute_force_opt(obj, 0)?;
    for size in 1..=k {
        let r = brute_force_opt(obj, size)?;
        best.enumerated += r.enumerated;
        if r.opt_value > best.opt_value {
            best.opt_set = r.opt_set;
            best.opt_value = r.opt_value;
        }
    }
    Ok(best)
}

fn guard(n: usize, k: usize) -> Result<()> {
    let count = binomial(n, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::Refused {
            n,
            k,
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn for_each_subset(
    n: usize,
    k: usize,
    mut visit: impl FnMut(&[ElementId]) -> Result<()>,
) -> Result<()> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut set: Vec<ElementId> = idx.iter().map(|&i| ElementId(i)).collect();
    loop {
        visit(&set)?;
        // Advance to the next combination in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(());
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in pos..k {
            set[j] = ElementId(idx[j]);
        }
    }
}

/// Raw data of an objective, re-evaluated straight from its closed form with no caches.
pub enum ObjectiveSpec<'a> {
    Coverage {
        covers: &'a [Vec<usize>],
        weights: &'a [f64],
    },
    LogDet {
        kernel: &'a KernelMatrix,
        sigma: f64,
    },
    Facility {
        distances: &'a DistanceSource,
        auxiliary: &'a [f64],
    },
    Penalty {
        table: &'a ScenarioTable,
        penalties: &'a [PenaltyModel],
    },
}

pub fn definitional_recompute(spec: &ObjectiveSpec<'_>, set: &[ElementId]) -> Result<f64> {
    let distinct: HashSet<_> = set.iter().collect();
    if distinct.len() != set.len() {
        return Err(Error::invalid("set has duplicate elements"));
    }
    match *spec {
        ObjectiveSpec::Coverage { covers, weights } => {
            let union: HashSet<usize> = set
                .iter()
                .flat_map(|e| covers[e.0].iter().copied())
                .collect();
            Ok(union.iter().map(|&j| weights[j]).sum())
        }
        ObjectiveSpec::LogDet { kernel, sigma } => {
            let m = set.len();
            if m == 0 {
                return Ok(0.0);
            }
            let inv = 1.0 / (sigma * sigma);
            let mat = DMatrix::from_fn(m, m, |i, j| {
                let k = kernel.get(set[i].0, set[j].0);
                if i == j {
                    1.0 + inv * k
                } else {
                    inv * k
                }
            });
            let det = mat.lu().determinant();
            if det.is_nan() || det <= 0.0 {
                return Err(Error::NumericDomain {
                    element: set[m - 1].0,
                    message: format!("determinant {det} is not positive"),
                });
            }
            Ok(0.5 * det.ln())
        }
        ObjectiveSpec::Facility {
            distances,
            auxiliary,
        } => {
            let n = auxiliary.len();
            let loss = |with_set: bool| -> f64 {
                let mut total = 0.0;
                for (v, &aux) in auxiliary.iter().enumerate() {
                    let mut best = aux;
                    if with_set {
                        for a in set {
                            best = best.min(distances.distance(v, a.0));
                        }
                    }
                    total += best;
                }
                total / n as f64
            };
            Ok(loss(false) - loss(true))
        }
        ObjectiveSpec::Penalty { table, penalties } => {
            let mut total = 0.0;
            for (i, pi) in penalties.iter().enumerate() {
                let t = set
                    .iter()
                    .map(|s| table.time(s.0, i))
                    .fold(f64::INFINITY, f64::min);
                total += table.probabilities()[i] * (pi.at_infinity() - pi.penalty(t));
            }
            Ok(total)
        }
    }
}

/// Fraction of `trials` samples of size `sample_size(n, k, ε)`, drawn without replacement from
/// `n` elements, that contain at least one of `m` marked elements.
pub fn hit_probability_probe(
    n: usize,
    k: usize,
    epsilon: f64,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if m > k {
        return Err(Error::invalid(format!("m = {m} exceeds k = {k}")));
    }
    if trials < 10_000 {
        return Err(Error::invalid(format!(
            "need at least 10^4 trials, got {trials}"
        )));
    }
    let s = sample_size(n, k, epsilon)?;
    let mut pool = RemainingPool::new(n);
    let mut hits = 0usize;
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        if pool.sample(s, &mut rng).iter().any(|e| e.0 < m) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Outcome of [`check_properties`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PropertyReport {
    pub triples: usize,
    pub monotonicity_violations: usize,
    pub submodularity_violations: usize,
    /// Incremental marginal disagreeing with `value(A ∪ {e}) − value(A)`.
    pub consistency_violations: usize,
    pub negative_values: usize,
}

impl PropertyReport {
    pub fn is_clean(&self) -> bool {
        self.monotonicity_violations == 0
            && self.submodularity_violations == 0
            && self.consistency_violations == 0
            && self.negative_values == 0
    }
}

/// Samples `triples` random `(A, B, e)` with `A ⊆ B` and `e ∉ B`, and checks non-negativity,
/// monotonicity `f(A) ≤ f(B) + tol`, diminishing returns `Δ(e|A) ≥ Δ(e|B) − tol`, and that the
/// incremental marginals match value differences within `tol` (relative).
pub fn check_properties<O: Objective + ?Sized>(
    obj: &O,
    triples: usize,
    tol: f64,
    seed: u64,
) -> Result<PropertyReport> {
    use rand::seq::SliceRandom;
    use rand::Rng;

    let n = obj.ground().size();
    let mut report = PropertyReport::default();
    if n == 0 {
        return Ok(report);
    }
    let mut rng = stream_rng(seed, 0);
    let mut order: Vec<ElementId> = obj.ground().elements().collect();
    for _ in 0..triples {
        order.shuffle(&mut rng);
        let b_len = rng.random_range(0..n);
        let big = &order[..b_len];
        let e = order[b_len];
        let small: Vec<ElementId> = big
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();

        let mut state_a = obj.initial_state();
        for &x in &small {
            obj.insert(&mut state_a, x)?;
        }
        let mut state_b = obj.initial_state();
        for &x in big {
            obj.insert(&mut state_b, x)?;
        }
        let gain_a = obj.gain(&state_a, e)?;
        let gain_b = obj.gain(&state_b, e)?;
        let f_a = obj.value(&small)?;
        let f_b = obj.value(big)?;
        let mut with_e = small.clone();
        with_e.push(e);
        let f_ae = obj.value(&with_e)?;

        report.triples += 1;
        if f_a < -tol || f_b < -tol {
            report.negative_values += 1;
        }
        if f_a > f_b + tol * f_b.abs().max(1.0) {
            report.monotonicity_violations += 1;
        }
        if gain_a < gain_b - tol * gain_b.abs().max(1.0) {
            report.submodularity_violations += 1;
        }
        if !crate::approx_eq(gain_a, f_ae - f_a, tol) {
            report.consistency_violations += 1;
        }
    }
    Ok(report)
}

/// Random instance generators shared by tests and the acceptance harness.
pub mod instances {
    use rand::Rng;

    use crate::error::Result;
    use crate::objectives::{Modular, WeightedCoverage};
    use crate::rng::stream_rng;

    /// Coverage over `universe` items with small integer weights; each element covers each
    /// item independently with probability `density`.
    pub fn random_coverage(
        n: usize,
        universe: usize,
        density: f64,
        seed: u64,
    ) -> Result<WeightedCoverage> {
        let mut rng = stream_rng(seed, 0);
        let weights = (0..universe)
            .map(|_| rng.random_range(1..=5) as f64)
            .collect();
        let covers = (0..n)
            .map(|_| (0..universe).filter(|_| rng.random_bool(density)).collect())
            .collect();
        WeightedCoverage::new(weights, covers)
    }

    /// Modular objective with integer weights in `0..=max`.
    pub fn random_modular(n: usize, max: u32, seed: u64) -> Result<Modular> {
        let mut rng = stream_rng(seed, 0);
        Modular::new((0..n).map(|_| rng.random_range(0..=max) as f64).collect())
    }

    /// Random PSD matrix `G Gᵀ / dim` from a Gaussian `n × dim` factor.
    pub fn random_psd(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = stream_rng(seed, 0);
        let g: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = g[i].iter().zip(&g[j]).map(|(a, b)| a * b).sum::<f64>() / dim as f64;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }
}
