use std::fs;
use std::path::Path;
use std::process::Command;

use stochgreedy::Algorithm;
use stochgreedy_bench::records::Row;
use stochgreedy_bench::{
    curve::curve_points, match_p_to_cost, read_rows, run_sweep, run_sweep_to_file, CurveAxis,
    Instance, SweepSpec,
};

fn spec(body: &str) -> SweepSpec {
    SweepSpec::from_toml(&format!("version = 1\n{body}")).unwrap()
}

const COVERAGE: &str = r#"
[dataset]
kind = "random_coverage"
n = 40
universe = 60
density = 0.1
seed = 4

[objective]
family = "coverage"
"#;

const VECTORS: &str = r#"
[dataset]
kind = "gaussian_mixture"
n = 200
dim = 6
clusters = 5

[objective]
family = "logdet"
"#;

#[test]
fn random_selection_sweep_has_unit_cost() {
    let s = spec(&format!(
        "algorithms = [\"random_selection\"]\nk = [5]\nseeds = 3\n{COVERAGE}"
    ));
    let result = run_sweep(&s).unwrap();
    let runs: Vec<_> = result.runs().collect();
    assert_eq!(runs.len(), 3);
    assert!(runs.iter().all(|r| r.total_cost == 1));
    assert_eq!(
        runs.iter().map(|r| r.seed).collect::<Vec<_>>(),
        vec![0, 1, 2]
    );
    // Three runs, then the mean and std rows.
    assert_eq!(result.rows.len(), 5);
}

#[test]
fn lazy_and_naive_agree_per_k() {
    let s = spec(&format!(
        "algorithms = [\"lazy_greedy\", \"naive_greedy\"]\nk = [1, 5, 12]\nseeds = 2\n{VECTORS}"
    ));
    let result = run_sweep(&s).unwrap();
    for k in [1, 5, 12] {
        let pick = |alg| {
            result
                .runs()
                .find(|r| r.cell.algorithm == alg && r.cell.k == k)
                .unwrap()
        };
        let (lazy, naive) = (pick(Algorithm::LazyGreedy), pick(Algorithm::NaiveGreedy));
        assert_eq!(lazy.final_utility, naive.final_utility);
        assert!(lazy.total_cost <= naive.total_cost);
    }
}

#[test]
fn cost_columns_respect_bounds() {
    let s = spec(&format!(
        "algorithms = [\"stochastic_greedy\", \"stochastic_greedy_lazy\"]\nk = [4, 20]\nepsilon = [0.5, 0.05]\nseeds = 4\n{VECTORS}"
    ));
    let result = run_sweep(&s).unwrap();
    for r in result.runs() {
        let (n, k, eps) = (r.cell.n, r.cell.k, r.cell.epsilon.unwrap());
        let bound = k * stochgreedy::solvers::sample_size(n, k, eps).unwrap();
        assert!(r.total_cost <= bound as u64);
        if r.cell.algorithm == Algorithm::StochasticGreedyLazy {
            let plain = result
                .runs()
                .find(|p| {
                    p.cell.algorithm == Algorithm::StochasticGreedy
                        && p.cell.k == k
                        && p.cell.epsilon == r.cell.epsilon
                        && p.seed == r.seed
                })
                .unwrap();
            assert!(r.total_cost <= plain.total_cost);
            assert_eq!(r.final_utility, plain.final_utility);
        }
    }
}

#[test]
fn invalid_specs_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs.csv");
    let missing = r#"
[dataset]
kind = "csv"
path = "/definitely/not/here.csv"

[objective]
family = "facility"
"#;
    let bad_k = spec(&format!(
        "algorithms = [\"lazy_greedy\"]\nk = [5, 41]\nseeds = 1\n{COVERAGE}"
    ));
    let bad_data = spec(&format!(
        "algorithms = [\"lazy_greedy\"]\nk = [5]\nseeds = 1\n{missing}"
    ));
    let mismatched = spec(&format!(
        "algorithms = [\"lazy_greedy\"]\nk = [5]\nseeds = 1\n{}",
        COVERAGE.replace("\"coverage\"", "\"logdet\"")
    ));
    for s in [bad_k, bad_data, mismatched] {
        assert!(run_sweep_to_file(&s, Some(&out)).is_err());
        assert!(!out.exists());
    }
    let unknown = format!(
        "version = 1\nalgorithms = [\"lazy_greedy\", \"bogus\"]\nk = [5]\nseeds = 1\n{COVERAGE}"
    );
    assert!(SweepSpec::from_toml(&unknown).is_err());
}

#[test]
fn matched_p_lands_within_five_percent() {
    let instance = Instance::build(
        &spec(&format!(
            "algorithms = [\"lazy_greedy\"]\nk = [1]\nseeds = 1\n{VECTORS}"
        ))
        .dataset,
        &stochgreedy_bench::spec::ObjectiveFamily::Logdet {
            bandwidth: 0.75,
            sigma: 1.0,
        },
    )
    .unwrap();
    let seeds: Vec<u64> = (0..6).collect();
    let m = match_p_to_cost(&instance, 10, 0.3, &seeds, Algorithm::StochasticGreedyLazy).unwrap();
    assert!(m.warning.is_none(), "{m:?}");
    assert!(m.relative_gap() <= 0.05);
    assert!(m.p > 0.0 && m.p <= 1.0);
    // Measured independently by running both sides.
    let mean = |alg: Algorithm, p: f64| {
        seeds
            .iter()
            .map(|&s| {
                let cfg = stochgreedy::SolverConfig::new(10)
                    .with_epsilon(0.3)
                    .with_p(p)
                    .with_seed(s);
                instance.run(alg, &cfg).unwrap().total_cost as f64
            })
            .sum::<f64>()
            / seeds.len() as f64
    };
    let (sample, target) = (
        mean(Algorithm::SampleGreedy, m.p),
        mean(Algorithm::StochasticGreedyLazy, 1.0),
    );
    assert!((sample - target).abs() <= 0.05 * target);
    assert_eq!(
        m,
        match_p_to_cost(&instance, 10, 0.3, &seeds, Algorithm::StochasticGreedyLazy).unwrap()
    );
    assert!(match_p_to_cost(&instance, 0, 0.3, &seeds, Algorithm::StochasticGreedy).is_err());
}

#[test]
fn unattainable_match_warns_with_closest_p() {
    // Plain sampling at tiny ε costs more than lazy greedy on the full set.
    let instance = Instance::build(
        &spec(&format!(
            "algorithms = [\"lazy_greedy\"]\nk = [1]\nseeds = 1\n{VECTORS}"
        ))
        .dataset,
        &stochgreedy_bench::spec::ObjectiveFamily::Logdet {
            bandwidth: 0.75,
            sigma: 1.0,
        },
    )
    .unwrap();
    let m = match_p_to_cost(&instance, 10, 0.001, &[0, 1], Algorithm::StochasticGreedy).unwrap();
    assert!(m.warning.is_some());
    assert_eq!(m.p, 1.0);
}

#[test]
fn stochastic_curve_cost_falls_as_epsilon_grows() {
    let s = spec(&format!("algorithms = [\"stochastic_greedy\"]\nk = [10]\nepsilon = [0.01, 0.1, 0.5, 0.9]\nseeds = 5\n{VECTORS}"));
    let runs: Vec<_> = run_sweep(&s).unwrap().runs().cloned().collect();
    let points = curve_points(&runs, CurveAxis::Cost).unwrap();
    let mut by_eps: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.cell.epsilon.unwrap(), p.cost_mean))
        .collect();
    by_eps.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(by_eps.windows(2).all(|w| w[1].1 < w[0].1), "{by_eps:?}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stochgreedy"))
}

fn write_spec(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("sweep.toml");
    fs::write(
        &path,
        format!("version = 1\noutput = \"out/runs.csv\"\n{body}"),
    )
    .unwrap();
    path
}

#[test]
fn cli_sweep_then_curve() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = write_spec(
        dir.path(),
        &format!("algorithms = [\"lazy_greedy\", \"stochastic_greedy\", \"sample_greedy\"]\nk = [3, 6]\nepsilon = [0.2]\nmatch_p = true\nseeds = 2\n{COVERAGE}"),
    );
    let out = bin()
        .arg("sweep")
        .arg(&spec_path)
        .env("STOCHGREEDY_THREADS", "2")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let records = dir.path().join("out/runs.csv");
    let rows = read_rows(&records).unwrap();
    assert_eq!(
        rows.iter().filter(|r| matches!(r, Row::Run(_))).count(),
        3 * 2 * 2
    );

    let curve = dir.path().join("curve.csv");
    let out = bin()
        .args([
            "curve",
            records.to_str().unwrap(),
            "--x",
            "k",
            "--output",
            curve.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("algorithm,dataset,k,epsilon,p,runs,x,"));
    assert_eq!(text.lines().count(), 1 + 3 * 2);
}

#[test]
fn cli_errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = write_spec(
        dir.path(),
        &format!("algorithms = [\"greediest\"]\nk = [3]\nseeds = 1\n{COVERAGE}"),
    );
    let out = bin().arg("sweep").arg(&spec_path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("greediest"));
    assert!(!dir.path().join("out").exists());

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, stochgreedy_bench::records::COLUMNS.join(",") + "\n").unwrap();
    let out = bin()
        .args(["curve", empty.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin()
        .arg("sweep")
        .arg(&spec_path)
        .env("STOCHGREEDY_THREADS", "many")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn cli_matchp_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = write_spec(
        dir.path(),
        &format!("algorithms = [\"lazy_greedy\"]\nk = [5]\nseeds = 1\n{VECTORS}"),
    );
    let out = bin()
        .args([
            "matchp",
            spec_path.to_str().unwrap(),
            "--k",
            "10",
            "--epsilon",
            "0.3",
            "--seeds",
            "4",
            "--reference",
            "stochastic_greedy_lazy",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("p = "));
    let out = bin()
        .args([
            "matchp",
            spec_path.to_str().unwrap(),
            "--k",
            "0",
            "--epsilon",
            "0.3",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin()
        .args(["verify", "--trials", "10000"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}
