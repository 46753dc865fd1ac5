//! Self-checks run by the hidden `verify` subcommand.

use anyhow::Result;
use stochgreedy::refcheck::{brute_force_opt, check_properties, hit_probability_probe, instances};
use stochgreedy::solvers::{lazy_greedy, naive_greedy};
use stochgreedy::SolverConfig;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Hit-probability probe at `(n, k, ε) = (100, 10, 0.1)` for `m ∈ {1, 5, 10}`, checked against
/// `(1 − ε)·m/k − 3·SE`.
pub fn hit_probability_checks(trials: usize, seed: u64) -> Result<Vec<Check>> {
    let (n, k, eps) = (100, 10, 0.1);
    let mut out = Vec::new();
    for m in [1, 5, 10] {
        let q = hit_probability_probe(n, k, eps, m, trials, seed)?;
        let se = (q * (1.0 - q) / trials as f64).sqrt();
        let bound = (1.0 - eps) * m as f64 / k as f64 - 3.0 * se;
        out.push(Check {
            name: format!("hit_probability m={m}"),
            passed: q >= bound,
            detail: format!("frequency {q:.4} vs bound {bound:.4} over {trials} trials"),
        });
    }
    Ok(out)
}

/// Lazy/naive agreement and the `(1 − 1/e)` guarantee on small random coverage instances,
/// plus the sampled monotonicity/submodularity suite.
pub fn solver_checks(instances_count: u64, seed: u64) -> Result<Vec<Check>> {
    let bound = 1.0 - (-1.0f64).exp();
    let (mut mismatches, mut violations, mut dirty) = (0, 0, 0);
    for i in 0..instances_count {
        let obj = instances::random_coverage(12, 30, 0.2, seed.wrapping_add(i))?;
        let k = 1 + (i as usize % 5);
        let cfg = SolverConfig::new(k);
        let naive = naive_greedy(&obj, &cfg)?;
        if lazy_greedy(&obj, &cfg)?.selected != naive.selected {
            mismatches += 1;
        }
        if naive.final_utility < bound * brute_force_opt(&obj, k)?.opt_value - 1e-12 {
            violations += 1;
        }
        if !check_properties(&obj, 100, 1e-9, seed.wrapping_add(i))?.is_clean() {
            dirty += 1;
        }
    }
    let check = |name: &str, bad: usize, what: &str| Check {
        name: name.to_string(),
        passed: bad == 0,
        detail: format!("{bad} {what} in {instances_count} instances"),
    };
    Ok(vec![
        check("lazy_equals_naive", mismatches, "mismatches"),
        check("greedy_guarantee", violations, "violations"),
        check("coverage_properties", dirty, "dirty property reports"),
    ])
}
