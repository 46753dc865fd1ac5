use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use stochgreedy::Algorithm;
use stochgreedy_bench::{
    emit_curve, match_p_to_cost, read_rows, run_sweep_to_file, verify, CurveAxis, Instance,
    SweepSpec, THREADS_ENV,
};

#[derive(Parser)]
#[command(
    name = "stochgreedy",
    version,
    about = "Submodular maximization benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of a sweep spec and write the run records as CSV.
    Sweep {
        spec: PathBuf,
        /// Overrides the spec's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Aggregate run records into mean ± std points per cell.
    Curve {
        records: PathBuf,
        #[arg(long, value_enum, default_value = "cost")]
        x: CurveAxis,
        /// Keep only runs with this k.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "curve.csv")]
        output: PathBuf,
    },
    /// Find the Sample-Greedy p whose mean cost matches Stochastic-Greedy's.
    Matchp {
        /// Sweep spec supplying the dataset and objective.
        spec: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value = "stochastic_greedy")]
        reference: Algorithm,
    },
    #[command(hide = true)]
    Verify {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Sweep { spec, output } => {
            let spec = SweepSpec::load(&spec)?;
            let (path, result) = run_sweep_to_file(&spec, output.as_deref())?;
            for m in &result.matches {
                eprintln!(
                    "matched p = {} at k = {}, epsilon = {} (cost {:.1} vs {:.1})",
                    m.matched.p, m.k, m.epsilon, m.matched.sample_cost, m.matched.target_cost
                );
                if let Some(w) = &m.matched.warning {
                    eprintln!("warning: {w}");
                }
            }
            println!(
                "{} records written to {}",
                result.runs().count(),
                path.display()
            );
        }
        Command::Curve {
            records,
            x,
            k,
            output,
        } => {
            let runs: Vec<_> = read_rows(&records)?
                .iter()
                .filter_map(|r| r.as_run())
                .filter(|r| k.is_none_or(|k| r.cell.k == k))
                .cloned()
                .collect();
            let points = emit_curve(&runs, x, &output)?;
            println!("{} points written to {}", points.len(), output.display());
        }
        Command::Matchp {
            spec,
            k,
            epsilon,
            seeds,
            reference,
        } => {
            let spec = SweepSpec::load(&spec)?;
            let instance = Instance::build(&spec.dataset, &spec.objective)?;
            let seeds: Vec<u64> = (0..seeds).collect();
            let m = match_p_to_cost(&instance, k, epsilon, &seeds, reference)?;
            if let Some(w) = &m.warning {
                eprintln!("warning: {w}");
            }
            println!("p = {}", m.p);
            println!("sample_greedy mean cost = {:.1}", m.sample_cost);
            println!("{reference} mean cost = {:.1}", m.target_cost);
        }
        Command::Verify { trials, seed } => {
            let mut checks = verify::hit_probability_checks(trials, seed)?;
            checks.extend(verify::solver_checks(50, seed)?);
            for c in &checks {
                println!("{c}");
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
