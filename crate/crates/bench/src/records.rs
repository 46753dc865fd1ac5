//! Sweep output rows and their CSV form.
//!
//! Columns, in order:
//!
//! | column          | run rows                          | mean / std rows          |
//! |-----------------|-----------------------------------|--------------------------|
//! | kind            | `run`                             | `mean` or `std`          |
//! | algorithm       | solver name                       | same                     |
//! | dataset         | dataset name                      | same                     |
//! | n, k            | integers                          | same                     |
//! | epsilon, p      | real or empty when unused         | same                     |
//! | seed            | integer                           | empty                    |
//! | final_utility   | real                              | statistic over seeds     |
//! | total_cost      | integer                           | statistic (real)         |
//! | reporting_evals | integer                           | statistic (real)         |
//! | wall_time_ms    | integer                           | statistic (real)         |
//! | warning         | text or empty                     | empty                    |
//!
//! Reals use the shortest representation that parses back to the same `f64`. The std rows hold
//! the sample standard deviation (0 for a single seed).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use stochgreedy::Algorithm;

pub const COLUMNS: [&str; 13] = [
    "kind",
    "algorithm",
    "dataset",
    "n",
    "k",
    "epsilon",
    "p",
    "seed",
    "final_utility",
    "total_cost",
    "reporting_evals",
    "wall_time_ms",
    "warning",
];

/// Identifies one sweep cell: everything but the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct CellKey {
    pub algorithm: Algorithm,
    pub dataset: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub cell: CellKey,
    pub seed: u64,
    pub final_utility: f64,
    pub total_cost: u64,
    pub reporting_evals: u64,
    pub wall_time_ms: u64,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    Mean,
    Std,
}

impl Statistic {
    fn name(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Std => "std",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRecord {
    pub cell: CellKey,
    pub statistic: Statistic,
    pub final_utility: f64,
    pub total_cost: f64,
    pub reporting_evals: f64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Row {
    Run(RunRecord),
    Summary(SummaryRecord),
}

impl Row {
    pub fn as_run(&self) -> Option<&RunRecord> {
        match self {
            Row::Run(r) => Some(r),
            Row::Summary(_) => None,
        }
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if values.iter().all(|&v| v == values[0]) {
        // Exact, where summing and dividing could leave a rounding residue.
        return (values[0], 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// The mean and std rows for `runs`, which must all belong to `cell`.
pub fn summarize(cell: &CellKey, runs: &[&RunRecord]) -> [SummaryRecord; 2] {
    let column =
        |f: &dyn Fn(&RunRecord) -> f64| mean_std(&runs.iter().map(|r| f(r)).collect::<Vec<_>>());
    let utility = column(&|r| r.final_utility);
    let cost = column(&|r| r.total_cost as f64);
    let reporting = column(&|r| r.reporting_evals as f64);
    let wall = column(&|r| r.wall_time_ms as f64);
    let row = |statistic, pick: fn((f64, f64)) -> f64| SummaryRecord {
        cell: cell.clone(),
        statistic,
        final_utility: pick(utility),
        total_cost: pick(cost),
        reporting_evals: pick(reporting),
        wall_time_ms: pick(wall),
    };
    [row(Statistic::Mean, |s| s.0), row(Statistic::Std, |s| s.1)]
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fields(row: &Row) -> Vec<String> {
    let (kind, cell) = match row {
        Row::Run(r) => ("run", &r.cell),
        Row::Summary(s) => (s.statistic.name(), &s.cell),
    };
    let mut out = vec![
        kind.to_string(),
        cell.algorithm.name().to_string(),
        cell.dataset.clone(),
        cell.n.to_string(),
        cell.k.to_string(),
        opt_f64(cell.epsilon),
        opt_f64(cell.p),
    ];
    match row {
        Row::Run(r) => out.extend([
            r.seed.to_string(),
            r.final_utility.to_string(),
            r.total_cost.to_string(),
            r.reporting_evals.to_string(),
            r.wall_time_ms.to_string(),
            r.warning.clone().unwrap_or_default(),
        ]),
        Row::Summary(s) => out.extend([
            String::new(),
            s.final_utility.to_string(),
            s.total_cost.to_string(),
            s.reporting_evals.to_string(),
            s.wall_time_ms.to_string(),
            String::new(),
        ]),
    }
    out
}

pub fn to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(fields(row))?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes next to `path` first and renames, so readers never see a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    fs::write(&tmp, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    write_atomic(path, &to_csv(rows)?)
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, T::Err> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

fn parse_row(rec: &csv::StringRecord) -> Result<Row> {
    if rec.len() != COLUMNS.len() {
        bail!("expected {} fields, found {}", COLUMNS.len(), rec.len());
    }
    let get = |i: usize| &rec[i];
    let num = |i: usize| -> Result<f64> {
        get(i)
            .parse::<f64>()
            .with_context(|| format!("column {} = '{}'", COLUMNS[i], get(i)))
    };
    let int = |i: usize| -> Result<u64> {
        get(i)
            .parse::<u64>()
            .with_context(|| format!("column {} = '{}'", COLUMNS[i], get(i)))
    };
    let cell = CellKey {
        algorithm: get(1).parse()?,
        dataset: get(2).to_string(),
        n: int(3)? as usize,
        k: int(4)? as usize,
        epsilon: parse_opt(get(5)).with_context(|| format!("epsilon = '{}'", get(5)))?,
        p: parse_opt(get(6)).with_context(|| format!("p = '{}'", get(6)))?,
    };
    let statistic = match get(0) {
        "run" => {
            return Ok(Row::Run(RunRecord {
                cell,
                seed: int(7)?,
                final_utility: num(8)?,
                total_cost: int(9)?,
                reporting_evals: int(10)?,
                wall_time_ms: int(11)?,
                warning: Some(get(12).to_string()).filter(|w| !w.is_empty()),
            }))
        }
        "mean" => Statistic::Mean,
        "std" => Statistic::Std,
        other => bail!("unknown row kind '{other}'"),
    };
    Ok(Row::Summary(SummaryRecord {
        cell,
        statistic,
        final_utility: num(8)?,
        total_cost: num(9)?,
        reporting_evals: num(10)?,
        wall_time_ms: num(11)?,
    }))
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header = reader.headers()?.clone();
    if header.iter().ne(COLUMNS) {
        bail!(
            "{}: header does not match the record schema",
            path.display()
        );
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.with_context(|| format!("{}:{line}", path.display()))?;
        rows.push(parse_row(&rec).with_context(|| format!("{}:{line}", path.display()))?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell() -> CellKey {
        CellKey {
            algorithm: Algorithm::StochasticGreedy,
            dataset: "toy".into(),
            n: 10,
            k: 3,
            epsilon: Some(0.1),
            p: None,
        }
    }

    fn run(seed: u64, utility: f64, cost: u64) -> RunRecord {
        RunRecord {
            cell: cell(),
            seed,
            final_utility: utility,
            total_cost: cost,
            reporting_evals: 2,
            wall_time_ms: 1,
            warning: None,
        }
    }

    #[test]
    fn mean_and_sample_std() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.2909944487358056).abs() < 1e-15);
    }

    #[test]
    fn csv_roundtrip() {
        let a = run(0, 0.1 + 0.2, 24);
        let mut b = run(1, 1.0 / 3.0, 30);
        b.warning = Some("empty subsample, p = 0.01".into());
        let [mean, std] = summarize(&cell(), &[&a, &b]);
        assert_eq!(mean.total_cost, 27.0);
        let rows = vec![
            Row::Run(a),
            Row::Run(b),
            Row::Summary(mean),
            Row::Summary(std),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/runs.csv");
        write_rows(&path, &rows).unwrap();
        assert_eq!(read_rows(&path).unwrap(), rows);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("kind,algorithm,dataset,n,k,epsilon,p,seed,final_utility,"));
        assert!(text.contains("\"empty subsample, p = 0.01\""));
    }

    #[test]
    fn malformed_rows_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut text = COLUMNS.join(",");
        text.push_str("\nrun,lazy_greedy,toy,10,3,,,0,1.5,12,2,0,\nrun,lazy_greedy,toy,10,3,,,x,1.5,12,2,0,\n");
        fs::write(&path, text).unwrap();
        let err = format!("{:#}", read_rows(&path).unwrap_err());
        assert!(err.contains(":3"), "{err}");
    }
}
