use std::cmp::Ordering;
use std::path::Path;

use anyhow::{bail, Result};
use clap::ValueEnum;

use crate::records::{mean_std, write_atomic, CellKey, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveAxis {
    /// Mean oracle cost of the cell.
    Cost,
    K,
}

/// One aggregated point: all runs of a cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub cell: CellKey,
    pub runs: usize,
    pub x: f64,
    pub utility_mean: f64,
    pub utility_std: f64,
    pub cost_mean: f64,
    pub cost_std: f64,
}

pub const CURVE_COLUMNS: [&str; 11] = [
    "algorithm",
    "dataset",
    "k",
    "epsilon",
    "p",
    "runs",
    "x",
    "utility_mean",
    "utility_std",
    "cost_mean",
    "cost_std",
];

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    a.unwrap_or(f64::NEG_INFINITY)
        .total_cmp(&b.unwrap_or(f64::NEG_INFINITY))
}

/// Mean ± std of utility and cost per cell, sorted so each curve is contiguous: by dataset and
/// algorithm, then along the x axis (for `k`, curves are further split by ε and p; for cost,
/// by k).
pub fn curve_points(records: &[RunRecord], axis: CurveAxis) -> Result<Vec<CurvePoint>> {
    if records.is_empty() {
        bail!("no run records to aggregate");
    }
    let mut groups: Vec<(CellKey, Vec<&RunRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(c, _)| *c == r.cell) {
            Some((_, runs)) => runs.push(r),
            None => groups.push((r.cell.clone(), vec![r])),
        }
    }
    let mut points: Vec<CurvePoint> = groups
        .into_iter()
        .map(|(cell, runs)| {
            let (utility_mean, utility_std) =
                mean_std(&runs.iter().map(|r| r.final_utility).collect::<Vec<_>>());
            let (cost_mean, cost_std) =
                mean_std(&runs.iter().map(|r| r.total_cost as f64).collect::<Vec<_>>());
            let x = match axis {
                CurveAxis::Cost => cost_mean,
                CurveAxis::K => cell.k as f64,
            };
            CurvePoint {
                runs: runs.len(),
                cell,
                x,
                utility_mean,
                utility_std,
                cost_mean,
                cost_std,
            }
        })
        .collect();
    points.sort_by(|a, b| {
        let (ca, cb) = (&a.cell, &b.cell);
        ca.dataset
            .cmp(&cb.dataset)
            .then(ca.algorithm.cmp(&cb.algorithm))
            .then_with(|| match axis {
                CurveAxis::K => cmp_opt(ca.epsilon, cb.epsilon).then(cmp_opt(ca.p, cb.p)),
                CurveAxis::Cost => ca.k.cmp(&cb.k),
            })
            .then(a.x.total_cmp(&b.x))
            .then(cmp_opt(ca.epsilon, cb.epsilon))
            .then(cmp_opt(ca.p, cb.p))
    });
    Ok(points)
}

pub fn curve_csv(points: &[CurvePoint]) -> Result<Vec<u8>> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_COLUMNS)?;
    for p in points {
        w.write_record([
            p.cell.algorithm.name().to_string(),
            p.cell.dataset.clone(),
            p.cell.k.to_string(),
            opt(p.cell.epsilon),
            opt(p.cell.p),
            p.runs.to_string(),
            p.x.to_string(),
            p.utility_mean.to_string(),
            p.utility_std.to_string(),
            p.cost_mean.to_string(),
            p.cost_std.to_string(),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn emit_curve(records: &[RunRecord], axis: CurveAxis, path: &Path) -> Result<Vec<CurvePoint>> {
    let points = curve_points(records, axis)?;
    write_atomic(path, &curve_csv(&points)?)?;
    Ok(points)
}
