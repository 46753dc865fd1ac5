use anyhow::{bail, ensure, Result};
use rayon::prelude::*;
use stochgreedy::{Algorithm, SolverConfig};

use crate::instance::Instance;

/// Relative gap between the two mean costs that counts as a match.
pub const MATCH_TOLERANCE: f64 = 0.05;
const MAX_BISECTIONS: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct PMatch {
    pub p: f64,
    /// Mean Sample-Greedy cost at `p`.
    pub sample_cost: f64,
    /// Mean cost of the reference Stochastic-Greedy run.
    pub target_cost: f64,
    /// Set when no `p` lands within [`MATCH_TOLERANCE`]; `p` is then the closest one tried.
    pub warning: Option<String>,
}

impl PMatch {
    pub fn relative_gap(&self) -> f64 {
        (self.sample_cost - self.target_cost).abs() / self.target_cost.max(1.0)
    }
}

fn mean_cost(
    instance: &Instance,
    algorithm: Algorithm,
    cfg: &SolverConfig,
    seeds: &[u64],
) -> Result<f64> {
    let costs = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = cfg.clone().with_seed(seed);
            instance.run(algorithm, &cfg).map(|s| s.total_cost as f64)
        })
        .collect::<stochgreedy::Result<Vec<f64>>>()?;
    Ok(costs.iter().sum::<f64>() / costs.len() as f64)
}

/// Bisects `p ∈ (0, 1]` until Sample-Greedy's mean cost over `seeds` is within 5% of the
/// reference algorithm's mean cost at `(k, ε)`.
///
/// Each seed fixes the subsample draws, and a larger `p` keeps a superset of the elements kept
/// at a smaller one, so the search sees a nearly monotone cost curve.
pub fn match_p_to_cost(
    instance: &Instance,
    k: usize,
    epsilon: f64,
    seeds: &[u64],
    reference: Algorithm,
) -> Result<PMatch> {
    if k == 0 {
        bail!("k = 0 has no cost to match; p is undefined");
    }
    ensure!(!seeds.is_empty(), "need at least one seed");
    let base = SolverConfig::new(k).with_epsilon(epsilon);
    let target = mean_cost(instance, reference, &base, seeds)?;

    let mut best: Option<(f64, f64)> = None;
    let mut consider = |p: f64, cost: f64| {
        let gap = (cost - target).abs();
        if best.is_none_or(|(_, c)| gap < (c - target).abs()) {
            best = Some((p, cost));
        }
        gap <= MATCH_TOLERANCE * target
    };

    let (mut lo, mut hi) = (0.0, 1.0);
    let mut p = 1.0;
    for _ in 0..=MAX_BISECTIONS {
        let cost = mean_cost(
            instance,
            Algorithm::SampleGreedy,
            &base.clone().with_p(p),
            seeds,
        )?;
        if consider(p, cost) {
            return Ok(PMatch {
                p,
                sample_cost: cost,
                target_cost: target,
                warning: None,
            });
        }
        if p == 1.0 && cost < target {
            // Even the full ground set is cheaper than the target.
            break;
        }
        if cost < target {
            lo = p;
        } else {
            hi = p;
        }
        p = 0.5 * (lo + hi);
    }
    let (p, cost) = best.expect("at least one probe ran");
    Ok(PMatch {
        p,
        sample_cost: cost,
        target_cost: target,
        warning: Some(format!(
            "no p matches mean cost {target:.1} within {:.0}%; closest p = {p} gives {cost:.1}",
            MATCH_TOLERANCE * 100.0
        )),
    })
}
