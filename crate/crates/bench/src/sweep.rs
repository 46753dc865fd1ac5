use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use stochgreedy::{Algorithm, SolverConfig};

use crate::instance::Instance;
use crate::matchp::{match_p_to_cost, PMatch};
use crate::records::{summarize, write_rows, CellKey, Row, RunRecord};
use crate::spec::SweepSpec;

/// A cell with the matched `p` that produced it, when `match_p` was on.
#[derive(Clone, Debug)]
pub struct MatchedCell {
    pub k: usize,
    pub epsilon: f64,
    pub matched: PMatch,
}

pub struct SweepResult {
    pub rows: Vec<Row>,
    pub matches: Vec<MatchedCell>,
}

impl SweepResult {
    pub fn runs(&self) -> impl Iterator<Item = &RunRecord> {
        self.rows.iter().filter_map(Row::as_run)
    }
}

fn cells(
    spec: &SweepSpec,
    dataset: &str,
    n: usize,
    matches: &[MatchedCell],
) -> Result<Vec<CellKey>> {
    let mut out = Vec::new();
    for algorithm in spec.parsed_algorithms()? {
        for &k in &spec.k {
            let mut push = |epsilon, p| {
                out.push(CellKey {
                    algorithm,
                    dataset: dataset.to_string(),
                    n,
                    k,
                    epsilon,
                    p,
                });
            };
            if algorithm.uses_epsilon() {
                spec.epsilon.iter().for_each(|&e| push(Some(e), None));
            } else if algorithm.uses_p() && spec.match_p {
                for m in matches.iter().filter(|m| m.k == k) {
                    push(Some(m.epsilon), Some(m.matched.p));
                }
            } else if algorithm.uses_p() {
                spec.p.iter().for_each(|&p| push(None, Some(p)));
            } else {
                push(None, None);
            }
        }
    }
    Ok(out)
}

fn run_cell(instance: &Instance, cell: &CellKey, seed: u64) -> Result<RunRecord> {
    let mut cfg = SolverConfig::new(cell.k).with_seed(seed);
    if let Some(e) = cell.epsilon.filter(|_| cell.algorithm.uses_epsilon()) {
        cfg = cfg.with_epsilon(e);
    }
    if let Some(p) = cell.p {
        cfg = cfg.with_p(p);
    }
    let start = Instant::now();
    let solution = instance
        .run(cell.algorithm, &cfg)
        .with_context(|| format!("{} at k = {}, seed = {seed}", cell.algorithm, cell.k))?;
    Ok(RunRecord {
        cell: cell.clone(),
        seed,
        final_utility: solution.final_utility,
        total_cost: solution.total_cost,
        reporting_evals: solution.reporting_evals,
        wall_time_ms: start.elapsed().as_millis() as u64,
        warning: solution.warning,
    })
}

/// Runs every (cell, seed) of `spec` and returns the rows in spec order: for each algorithm,
/// each k, each ε or p, the per-seed runs followed by a mean and a std row.
///
/// The spec, dataset and objective are all validated before the first run. Deterministic
/// algorithms run once per cell; their record is repeated for every seed.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let instance = Instance::build(&spec.dataset, &spec.objective)?;
    let n = instance.n();
    if let Some(&k) = spec.k.iter().find(|&&k| k > n) {
        bail!("k = {k} exceeds the ground set size {n}");
    }
    let dataset = spec.dataset.name();
    let seeds = spec.seed_list();

    let mut matches = Vec::new();
    if spec.match_p && spec.parsed_algorithms()?.contains(&Algorithm::SampleGreedy) {
        let reference = spec.reference()?;
        for &k in &spec.k {
            for &epsilon in &spec.epsilon {
                let matched = match_p_to_cost(&instance, k, epsilon, &seeds, reference)?;
                matches.push(MatchedCell {
                    k,
                    epsilon,
                    matched,
                });
            }
        }
    }

    let cells = cells(spec, &dataset, n, &matches)?;
    let jobs: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            let seeds: &[u64] = if c.algorithm.is_randomized() {
                &seeds
            } else {
                &seeds[..1]
            };
            seeds.iter().map(move |&s| (i, s))
        })
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(i, seed)| run_cell(&instance, &cells[i], seed).map(|r| (i, r)))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(records.len() + 2 * cells.len());
    let mut records = records.into_iter().peekable();
    for (i, cell) in cells.iter().enumerate() {
        let mut runs = Vec::with_capacity(seeds.len());
        while let Some((_, r)) = records.next_if(|(j, _)| *j == i) {
            runs.push(r);
        }
        if !cell.algorithm.is_randomized() {
            let only = runs.pop().expect("one run per deterministic cell");
            runs = seeds
                .iter()
                .map(|&seed| RunRecord {
                    seed,
                    ..only.clone()
                })
                .collect();
        }
        let refs: Vec<&RunRecord> = runs.iter().collect();
        let [mean, std] = summarize(cell, &refs);
        rows.extend(runs.into_iter().map(Row::Run));
        rows.push(Row::Summary(mean));
        rows.push(Row::Summary(std));
    }
    Ok(SweepResult { rows, matches })
}

/// Runs the sweep and writes its CSV to `output` (or the spec's own output path). Nothing is
/// written unless every run succeeds.
pub fn run_sweep_to_file(
    spec: &SweepSpec,
    output: Option<&Path>,
) -> Result<(PathBuf, SweepResult)> {
    let path = match (output, &spec.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => p.clone(),
        (None, None) => bail!("no output path: set `output` in the spec or pass --output"),
    };
    let result = run_sweep(spec)?;
    write_rows(&path, &result.rows)?;
    Ok((path, result))
}
