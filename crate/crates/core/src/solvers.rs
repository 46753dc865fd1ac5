//! Selection algorithms for `max f(A) s.t. |A| ≤ k`.
//!
//! All solvers query the objective only through a fresh [`Oracle`], so `Solution::total_cost`
//! is the exact number of evaluations each one issued. Ties between equal gains always go to
//! the lowest element id, which makes the lazy variants pick exactly what their eager
//! counterparts pick and keeps results independent of parallel scoring.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::{ElementId, Objective, Oracle, SelectionContext};
use crate::rng::{stream_rng, RANDOM_SELECTION_STREAM, SUBSAMPLE_STREAM};
use crate::solution::{Solution, TraceBuilder};

/// Candidate batches at least this large are scored on the rayon pool.
const PARALLEL_SCORING_MIN: usize = 512;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LowestId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub k: usize,
    pub epsilon: f64,
    pub p: f64,
    pub seed: u64,
    pub tie_break: TieBreak,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 0,
            epsilon: 0.1,
            p: 1.0,
            seed: 0,
            tie_break: TieBreak::LowestId,
        }
    }
}

impl SolverConfig {
    pub fn new(k: usize) -> Self {
        SolverConfig {
            k,
            ..Default::default()
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check_k(&self, n: usize) -> Result<()> {
        if self.k > n {
            return Err(Error::invalid(format!(
                "k = {} exceeds ground set size {n}",
                self.k
            )));
        }
        Ok(())
    }

    fn check_epsilon(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    fn check_p(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid(format!(
                "p must lie in (0, 1], got {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// The shipped algorithms, by their CLI/CSV names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    RandomSelection,
    NaiveGreedy,
    LazyGreedy,
    StochasticGreedy,
    StochasticGreedyLazy,
    SampleGreedy,
    ThresholdGreedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::RandomSelection,
        Algorithm::NaiveGreedy,
        Algorithm::LazyGreedy,
        Algorithm::StochasticGreedy,
        Algorithm::StochasticGreedyLazy,
        Algorithm::SampleGreedy,
        Algorithm::ThresholdGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RandomSelection => "random_selection",
            Algorithm::NaiveGreedy => "naive_greedy",
            Algorithm::LazyGreedy => "lazy_greedy",
            Algorithm::StochasticGreedy => "stochastic_greedy",
            Algorithm::StochasticGreedyLazy => "stochastic_greedy_lazy",
            Algorithm::SampleGreedy => "sample_greedy",
            Algorithm::ThresholdGreedy => "threshold_greedy",
        }
    }

    pub fn uses_epsilon(self) -> bool {
        matches!(
            self,
            Algorithm::StochasticGreedy
                | Algorithm::StochasticGreedyLazy
                | Algorithm::ThresholdGreedy
        )
    }

    pub fn uses_p(self) -> bool {
        self == Algorithm::SampleGreedy
    }

    /// Whether the output depends on the seed.
    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Algorithm::RandomSelection
                | Algorithm::StochasticGreedy
                | Algorithm::StochasticGreedyLazy
                | Algorithm::SampleGreedy
        )
    }

    pub fn run<O: Objective + ?Sized>(self, obj: &O, cfg: &SolverConfig) -> Result<Solution> {
        match self {
            Algorithm::RandomSelection => random_selection(obj, cfg),
            Algorithm::NaiveGreedy => naive_greedy(obj, cfg),
            Algorithm::LazyGreedy => lazy_greedy(obj, cfg),
            Algorithm::StochasticGreedy => stochastic_greedy(obj, cfg),
            Algorithm::StochasticGreedyLazy => stochastic_greedy_lazy(obj, cfg),
            Algorithm::SampleGreedy => sample_greedy(obj, cfg),
            Algorithm::ThresholdGreedy => threshold_greedy(obj, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm '{s}'")))
    }
}

/// Per-round sample size `ceil((n/k) ln(1/ε))`, clamped to `[1, n]`.
pub fn sample_size(n: usize, k: usize, epsilon: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("sample size needs a non-empty ground set"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k must lie in [1, {n}], got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let raw = (n as f64 / k as f64) * (1.0 / epsilon).ln();
    // Guard against ln rounding a value that is mathematically integral just above it.
    let nearest = raw.round();
    let s = if (raw - nearest).abs() <= 1e-12 * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok((s as usize).clamp(1, n))
}

/// Unselected elements, kept in a permutable buffer so a round's sample is a partial
/// Fisher-Yates shuffle of its prefix.
#[derive(Clone, Debug)]
pub(crate) struct RemainingPool {
    items: Vec<ElementId>,
    position: Vec<usize>,
}

impl RemainingPool {
    pub(crate) fn new(n: usize) -> Self {
        RemainingPool {
            items: (0..n).map(ElementId).collect(),
            position: (0..n).collect(),
        }
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    /// Draws `s` distinct elements uniformly without replacement.
    pub(crate) fn sample<R: Rng + ?Sized>(&mut self, s: usize, rng: &mut R) -> &[ElementId] {
        let s = s.min(self.items.len());
        for i in 0..s {
            let j = rng.random_range(i..self.items.len());
            self.swap(i, j);
        }
        &self.items[..s]
    }

    pub(crate) fn remove(&mut self, e: ElementId) {
        let i = self.position[e.0];
        let last = self.items.len() - 1;
        self.swap(i, last);
        self.items.pop();
        self.position[e.0] = usize::MAX;
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.items.swap(i, j);
        self.position[self.items[i].0] = i;
        self.position[self.items[j].0] = j;
    }
}

/// Scores `candidates` in order. Large batches run in parallel; the result is the same either way.
fn score<O: Objective + ?Sized>(
    oracle: &Oracle<'_, O>,
    ctx: &SelectionContext<O::State>,
    candidates: &[ElementId],
) -> Result<Vec<f64>> {
    if candidates.len() >= PARALLEL_SCORING_MIN {
        candidates
            .par_iter()
            .map(|&e| oracle.marginal(e, ctx))
            .collect()
    } else {
        candidates
            .iter()
            .map(|&e| oracle.marginal(e, ctx))
            .collect()
    }
}

/// `true` when `(gain, e)` ranks above `(best_gain, best)`: larger gain, then lower id.
#[inline]
fn beats(gain: f64, e: ElementId, best_gain: f64, best: ElementId) -> bool {
    match gain.total_cmp(&best_gain) {
        Ordering::Greater => true,
        Ordering::Equal => e < best,
        Ordering::Less => false,
    }
}

fn argmax(candidates: &[ElementId], gains: &[f64]) -> Option<(ElementId, f64)> {
    candidates
        .iter()
        .zip(gains)
        .fold(None, |best, (&e, &g)| match best {
            Some((b, bg)) if !beats(g, e, bg, b) => Some((b, bg)),
            _ => Some((e, g)),
        })
}

/// Heap entry for lazy evaluation; orders by bound, then by lowest id.
#[derive(Clone, Copy, Debug)]
struct LazyBound {
    rho: f64,
    element: ElementId,
}

impl PartialEq for LazyBound {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LazyBound {}

impl PartialOrd for LazyBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LazyBound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rho
            .total_cmp(&other.rho)
            .then_with(|| other.element.cmp(&self.element))
    }
}

/// Upper bounds `ρ(e)` and the selection size at which each was last refreshed.
struct Bounds {
    rho: Vec<f64>,
    stamp: Vec<usize>,
}

const NEVER: usize = usize::MAX;

impl Bounds {
    fn new(n: usize) -> Self {
        Bounds {
            rho: vec![f64::INFINITY; n],
            stamp: vec![NEVER; n],
        }
    }

    fn entry(&self, e: ElementId) -> LazyBound {
        LazyBound {
            rho: self.rho[e.0],
            element: e,
        }
    }

    fn is_fresh(&self, e: ElementId, round: usize) -> bool {
        self.stamp[e.0] == round
    }

    fn refresh(&mut self, e: ElementId, gain: f64, round: usize) {
        self.rho[e.0] = gain;
        self.stamp[e.0] = round;
    }
}

/// Pops until the top of `heap` carries a bound refreshed in `round`, refreshing stale tops.
fn lazy_pop<O: Objective + ?Sized>(
    oracle: &Oracle<'_, O>,
    ctx: &SelectionContext<O::State>,
    heap: &mut BinaryHeap<LazyBound>,
    bounds: &mut Bounds,
    round: usize,
) -> Result<Option<(ElementId, f64)>> {
    while let Some(top) = heap.pop() {
        let e = top.element;
        if bounds.is_fresh(e, round) {
            return Ok(Some((e, bounds.rho[e.0])));
        }
        let gain = oracle.marginal(e, ctx)?;
        bounds.refresh(e, gain, round);
        heap.push(bounds.entry(e));
    }
    Ok(None)
}

/// Stochastic-Greedy: each round samples `s = ceil((n/k) ln(1/ε))` unselected elements and
/// adds the one with the largest marginal gain.
pub fn stochastic_greedy<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    cfg.check_epsilon()?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    if cfg.k == 0 {
        return trace.finish(&oracle);
    }
    let s = sample_size(n, cfg.k, cfg.epsilon)?;
    let mut ctx = oracle.context(cfg.k);
    let mut pool = RemainingPool::new(n);
    for round in 0..cfg.k {
        let mut rng = stream_rng(cfg.seed, round as u64);
        let batch = pool.sample(s, &mut rng).to_vec();
        let gains = score(&oracle, &ctx, &batch)?;
        let (best, gain) = argmax(&batch, &gains).expect("sample is non-empty while |A| < k ≤ n");
        oracle.commit(best, &mut ctx)?;
        pool.remove(best);
        trace.push(best, gain, oracle.evaluations());
    }
    trace.finish(&oracle)
}

/// Stochastic-Greedy with lazy evaluation inside each sample.
///
/// Bounds `ρ(e)` live for the whole run, so elements that were scored in an earlier round and
/// are drawn again start from their old (still valid) upper bound. Draws the same samples as
/// [`stochastic_greedy`] for a given seed and therefore picks the same elements.
pub fn stochastic_greedy_lazy<O: Objective + ?Sized>(
    obj: &O,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    cfg.check_epsilon()?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    if cfg.k == 0 {
        return trace.finish(&oracle);
    }
    let s = sample_size(n, cfg.k, cfg.epsilon)?;
    let mut ctx = oracle.context(cfg.k);
    let mut pool = RemainingPool::new(n);
    let mut bounds = Bounds::new(n);
    let mut heap = BinaryHeap::with_capacity(s);
    for round in 0..cfg.k {
        let mut rng = stream_rng(cfg.seed, round as u64);
        heap.clear();
        heap.extend(pool.sample(s, &mut rng).iter().map(|&e| bounds.entry(e)));
        let (best, gain) = lazy_pop(&oracle, &ctx, &mut heap, &mut bounds, round)?
            .expect("sample is non-empty while |A| < k ≤ n");
        oracle.commit(best, &mut ctx)?;
        pool.remove(best);
        trace.push(best, gain, oracle.evaluations());
    }
    trace.finish(&oracle)
}

/// Classic greedy: every round scores all unselected elements.
pub fn naive_greedy<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    let mut ctx = oracle.context(cfg.k);
    for _ in 0..cfg.k {
        let candidates: Vec<ElementId> = obj
            .ground()
            .elements()
            .filter(|&e| !ctx.contains(e))
            .collect();
        let gains = score(&oracle, &ctx, &candidates)?;
        let (best, gain) = argmax(&candidates, &gains).expect("k ≤ n leaves a candidate");
        oracle.commit(best, &mut ctx)?;
        trace.push(best, gain, oracle.evaluations());
    }
    trace.finish(&oracle)
}

/// Lazy (accelerated) greedy over the whole ground set.
pub fn lazy_greedy<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    let candidates: Vec<ElementId> = obj.ground().elements().collect();
    lazy_greedy_over(&oracle, &candidates, cfg.k, &mut trace)?;
    trace.finish(&oracle)
}

fn lazy_greedy_over<O: Objective + ?Sized>(
    oracle: &Oracle<'_, O>,
    candidates: &[ElementId],
    k: usize,
    trace: &mut TraceBuilder,
) -> Result<()> {
    let mut ctx = oracle.context(k);
    let mut bounds = Bounds::new(oracle.ground().size());
    let mut heap: BinaryHeap<LazyBound> = candidates.iter().map(|&e| bounds.entry(e)).collect();
    for round in 0..k {
        let Some((best, gain)) = lazy_pop(oracle, &ctx, &mut heap, &mut bounds, round)? else {
            break;
        };
        oracle.commit(best, &mut ctx)?;
        trace.push(best, gain, oracle.evaluations());
    }
    Ok(())
}

/// Threshold-Greedy with lazy bound reuse.
///
/// Thresholds decay geometrically, `w = d, d(1−ε), d(1−ε)², …`, from the best singleton value
/// `d` down to `(ε/n)·d`. At each threshold the unselected elements are scanned in id order and
/// any element whose marginal gain reaches `w` is added. Elements whose last known bound is
/// already below `w` are skipped without a query. May return fewer than `k` elements.
pub fn threshold_greedy<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    cfg.check_epsilon()?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    if cfg.k == 0 {
        return trace.finish(&oracle);
    }
    let mut ctx = oracle.context(cfg.k);
    let mut bounds = Bounds::new(n);
    let all: Vec<ElementId> = obj.ground().elements().collect();
    let singletons = score(&oracle, &ctx, &all)?;
    for (&e, &g) in all.iter().zip(&singletons) {
        bounds.refresh(e, g, 0);
    }
    let d = singletons.iter().copied().fold(0.0_f64, f64::max);

    let floor = cfg.epsilon / n as f64 * d;
    let mut w = d;
    'sweep: while ctx.len() < cfg.k && w >= floor {
        for &e in &all {
            if ctx.contains(e) || bounds.rho[e.0] < w {
                continue;
            }
            let round = ctx.len();
            if !bounds.is_fresh(e, round) {
                let gain = oracle.marginal(e, &ctx)?;
                bounds.refresh(e, gain, round);
            }
            let gain = bounds.rho[e.0];
            if gain >= w {
                oracle.commit(e, &mut ctx)?;
                trace.push(e, gain, oracle.evaluations());
                if ctx.len() == cfg.k {
                    break 'sweep;
                }
            }
        }
        if w == 0.0 {
            // Every singleton is worthless; one pass at w = 0 already took what it could.
            break;
        }
        w *= 1.0 - cfg.epsilon;
    }
    trace.finish(&oracle)
}

/// Lazy greedy on a Bernoulli(p) subsample of the ground set.
pub fn sample_greedy<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    cfg.check_p()?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    let mut rng = stream_rng(cfg.seed, SUBSAMPLE_STREAM);
    let kept: Vec<ElementId> = obj
        .ground()
        .elements()
        .filter(|_| rng.random_bool(cfg.p))
        .collect();
    if kept.is_empty() {
        if cfg.k > 0 {
            trace.warn(format!("empty subsample at p = {}", cfg.p));
        }
        return trace.finish(&oracle);
    }
    lazy_greedy_over(&oracle, &kept, cfg.k.min(kept.len()), &mut trace)?;
    trace.finish(&oracle)
}

/// `k` elements drawn uniformly without replacement. The only charged query is the final
/// evaluation of the chosen set; the per-prefix utilities are reporting queries.
pub fn random_selection<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<Solution> {
    let n = obj.ground().size();
    cfg.check_k(n)?;
    let oracle = Oracle::new(obj);
    let mut trace = TraceBuilder::start(&oracle)?;
    if cfg.k == 0 {
        return trace.finish(&oracle);
    }
    let mut rng = stream_rng(cfg.seed, RANDOM_SELECTION_STREAM);
    let mut pool = RemainingPool::new(n);
    let picks = pool.sample(cfg.k, &mut rng).to_vec();

    let mut ctx = oracle.context(cfg.k);
    let mut gains = Vec::with_capacity(picks.len());
    for &e in &picks {
        gains.push(oracle.report_marginal(e, &ctx)?);
        oracle.commit(e, &mut ctx)?;
    }
    let final_value = oracle.eval(&picks)?;
    let last = picks.len() - 1;
    for (i, (&e, &g)) in picks.iter().zip(&gains).enumerate() {
        let cost = if i == last { oracle.evaluations() } else { 0 };
        trace.push(e, g, cost);
    }
    let mut solution = trace.finish(&oracle)?;
    solution.final_utility = final_value;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Modular, WeightedCoverage};

    fn example_c() -> WeightedCoverage {
        WeightedCoverage::unit(4, vec![vec![0, 1], vec![1, 2], vec![2], vec![3]]).unwrap()
    }

    #[test]
    fn sample_size_examples() {
        assert_eq!(sample_size(100, 10, 0.1).unwrap(), 24);
        assert_eq!(sample_size(100, 100, (-1.0f64).exp()).unwrap(), 1);
        assert_eq!(sample_size(10, 1, 1e-9).unwrap(), 10);
    }

    #[test]
    fn sample_size_rejects_bad_parameters() {
        assert!(sample_size(0, 0, 0.1).is_err());
        assert!(sample_size(10, 0, 0.1).is_err());
        assert!(sample_size(10, 11, 0.1).is_err());
        assert!(sample_size(10, 2, 0.0).is_err());
        assert!(sample_size(10, 2, 1.0).is_err());
        assert!(sample_size(10, 2, f64::NAN).is_err());
    }

    #[test]
    fn pool_samples_are_distinct_and_removal_keeps_positions() {
        let mut pool = RemainingPool::new(20);
        let mut rng = stream_rng(1, 0);
        let s: Vec<_> = pool.sample(8, &mut rng).to_vec();
        let mut sorted = s.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        for &e in &s {
            pool.remove(e);
        }
        assert_eq!(pool.len(), 12);
        let rest: Vec<_> = pool.sample(100, &mut rng).to_vec();
        assert_eq!(rest.len(), 12);
        assert!(rest.iter().all(|e| !s.contains(e)));
    }

    #[test]
    fn naive_greedy_on_example_c() {
        let sol = naive_greedy(&example_c(), &SolverConfig::new(2)).unwrap();
        assert_eq!(sol.indices(), vec![0, 1]);
        assert_eq!(sol.final_utility, 3.0);
        assert_eq!(sol.total_cost, 4 + 3);
        assert_eq!(sol.cost_trace, vec![4, 7]);
        assert_eq!(sol.utility_trace, vec![2.0, 3.0]);
    }

    #[test]
    fn naive_greedy_cost_formula() {
        let obj = Modular::new(vec![1.0, 5.0, 2.0, 4.0, 3.0]).unwrap();
        let sol = naive_greedy(&obj, &SolverConfig::new(5)).unwrap();
        assert_eq!(sol.total_cost, 15);
        assert_eq!(sol.indices(), vec![1, 3, 4, 2, 0]);
    }

    #[test]
    fn lazy_greedy_modular_cost_is_n_plus_k_minus_one() {
        let obj = Modular::new(vec![1.0, 5.0, 2.0, 4.0, 3.0, 3.0, 0.5]).unwrap();
        for k in 1..=7 {
            let sol = lazy_greedy(&obj, &SolverConfig::new(k)).unwrap();
            assert_eq!(sol.total_cost, 7 + (k as u64 - 1), "k = {k}");
            let naive = naive_greedy(&obj, &SolverConfig::new(k)).unwrap();
            assert_eq!(sol.selected, naive.selected);
        }
    }

    #[test]
    fn lazy_greedy_on_example_c() {
        let sol = lazy_greedy(&example_c(), &SolverConfig::new(2)).unwrap();
        assert_eq!(sol.indices(), vec![0, 1]);
        assert_eq!(sol.final_utility, 3.0);
        assert!(sol.total_cost <= 7);
    }

    #[test]
    fn k_zero_gives_empty_solutions_without_cost() {
        let obj = example_c();
        let cfg = SolverConfig::new(0);
        for alg in Algorithm::ALL {
            let sol = alg.run(&obj, &cfg).unwrap();
            assert!(sol.is_empty(), "{alg}");
            assert_eq!(sol.total_cost, 0, "{alg}");
            assert_eq!(sol.final_utility, 0.0, "{alg}");
        }
    }

    #[test]
    fn k_above_n_is_rejected() {
        let obj = example_c();
        let cfg = SolverConfig::new(5);
        for alg in Algorithm::ALL {
            if alg == Algorithm::SampleGreedy {
                continue;
            }
            assert!(
                matches!(alg.run(&obj, &cfg), Err(Error::InvalidInput(_))),
                "{alg}"
            );
        }
    }

    #[test]
    fn epsilon_and_p_are_validated() {
        let obj = example_c();
        for eps in [0.0, 1.0, -0.5, f64::NAN] {
            let cfg = SolverConfig::new(2).with_epsilon(eps);
            assert!(stochastic_greedy(&obj, &cfg).is_err());
            assert!(stochastic_greedy_lazy(&obj, &cfg).is_err());
            assert!(threshold_greedy(&obj, &cfg).is_err());
        }
        for p in [0.0, 1.5, -1.0] {
            assert!(sample_greedy(&obj, &SolverConfig::new(2).with_p(p)).is_err());
        }
    }

    #[test]
    fn stochastic_lazy_k1_costs_exactly_s() {
        let obj = Modular::new((0..50).map(|i| (i * 7 % 13) as f64).collect()).unwrap();
        let cfg = SolverConfig::new(1).with_epsilon(0.5);
        let s = sample_size(50, 1, 0.5).unwrap() as u64;
        for seed in 0..10 {
            let sol = stochastic_greedy_lazy(&obj, &cfg.clone().with_seed(seed)).unwrap();
            assert_eq!(sol.total_cost, s);
        }
    }

    #[test]
    fn stochastic_greedy_cost_bound() {
        let obj = Modular::new((0..200).map(|i| ((i * 31) % 17) as f64).collect()).unwrap();
        for (k, eps) in [(5, 0.1), (20, 0.5), (50, 0.01), (200, 0.3)] {
            let s = sample_size(200, k, eps).unwrap() as u64;
            let sol = stochastic_greedy(&obj, &SolverConfig::new(k).with_epsilon(eps).with_seed(3))
                .unwrap();
            assert_eq!(sol.len(), k);
            assert!(sol.total_cost <= k as u64 * s);
        }
    }

    #[test]
    fn stochastic_lazy_is_cheaper_on_modular_objective() {
        let obj = Modular::new((0..300).map(|i| ((i * 37) % 101) as f64 + 1.0).collect()).unwrap();
        let cfg = SolverConfig::new(30).with_epsilon(0.1).with_seed(11);
        let plain = stochastic_greedy(&obj, &cfg).unwrap();
        let lazy = stochastic_greedy_lazy(&obj, &cfg).unwrap();
        assert_eq!(plain.selected, lazy.selected);
        assert!(lazy.total_cost < plain.total_cost);
    }

    #[test]
    fn threshold_greedy_k_equals_n_takes_everything() {
        let obj = WeightedCoverage::unit(6, (0..6).map(|i| vec![i]).collect()).unwrap();
        for eps in [0.01, 0.3, 0.9] {
            let sol = threshold_greedy(&obj, &SolverConfig::new(6).with_epsilon(eps)).unwrap();
            let mut idx = sol.indices();
            idx.sort();
            assert_eq!(idx, (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn threshold_greedy_all_zero_objective() {
        let obj = Modular::new(vec![0.0; 4]).unwrap();
        let sol = threshold_greedy(&obj, &SolverConfig::new(2).with_epsilon(0.5)).unwrap();
        assert_eq!(sol.indices(), vec![0, 1]);
        assert_eq!(sol.final_utility, 0.0);
    }

    #[test]
    fn sample_greedy_p_one_matches_lazy_greedy() {
        let obj = example_c();
        let lazy = lazy_greedy(&obj, &SolverConfig::new(3)).unwrap();
        let sampled = sample_greedy(&obj, &SolverConfig::new(3).with_p(1.0).with_seed(9)).unwrap();
        assert_eq!(lazy, sampled);
    }

    #[test]
    fn sample_greedy_clamps_budget_to_subsample() {
        let obj = Modular::new(vec![1.0; 200]).unwrap();
        let cfg = SolverConfig::new(150).with_p(0.05);
        for seed in 0..5 {
            let sol = sample_greedy(&obj, &cfg.clone().with_seed(seed)).unwrap();
            assert!(sol.len() < 150);
            assert!(sol.warning.is_none());
        }
    }

    #[test]
    fn sample_greedy_empty_subsample_warns() {
        let obj = Modular::new(vec![1.0; 3]).unwrap();
        let cfg = SolverConfig::new(2).with_p(1e-12);
        let sol = sample_greedy(&obj, &cfg).unwrap();
        assert!(sol.is_empty());
        assert_eq!(sol.total_cost, 0);
        assert!(sol.warning.is_some());
    }

    #[test]
    fn random_selection_costs_one_and_is_seeded() {
        let obj = example_c();
        for k in 1..=4 {
            let cfg = SolverConfig::new(k).with_seed(42);
            let a = random_selection(&obj, &cfg).unwrap();
            let b = random_selection(&obj, &cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.total_cost, 1);
            assert_eq!(a.cost_trace.last(), Some(&1));
            assert_eq!(a.len(), k);
        }
        let all = random_selection(&obj, &SolverConfig::new(4).with_seed(5)).unwrap();
        let mut idx = all.indices();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert_eq!(all.final_utility, 4.0);
    }

    #[test]
    fn algorithm_names_roundtrip() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("greedy".parse::<Algorithm>().is_err());
    }
}
