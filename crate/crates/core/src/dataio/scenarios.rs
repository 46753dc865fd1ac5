use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Penalty `π(t)` for detecting a scenario at time `t`. All models are non-decreasing in `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PenaltyModel {
    /// `π(t) = min(t, t_max)`, so `π(∞) = t_max`.
    CappedLinear { t_max: f64 },
    /// `π(t) = 0` for `t ≤ tau`, `z` otherwise (including `∞`).
    Step { tau: f64, z: f64 },
    /// Right-continuous step function: `π(t) = values[j]` for the largest `j` with
    /// `times[j] ≤ t`, `0` before `times[0]`, and `at_infinity` for undetected scenarios.
    Piecewise {
        times: Vec<f64>,
        values: Vec<f64>,
        at_infinity: f64,
    },
}

impl PenaltyModel {
    pub fn penalty(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return self.at_infinity();
        }
        match self {
            PenaltyModel::CappedLinear { t_max } => t.min(*t_max),
            PenaltyModel::Step { tau, z } => {
                if t <= *tau {
                    0.0
                } else {
                    *z
                }
            }
            PenaltyModel::Piecewise { times, values, .. } => {
                match times.partition_point(|&b| b <= t) {
                    0 => 0.0,
                    j => values[j - 1],
                }
            }
        }
    }

    pub fn at_infinity(&self) -> f64 {
        match self {
            PenaltyModel::CappedLinear { t_max } => *t_max,
            PenaltyModel::Step { z, .. } => *z,
            PenaltyModel::Piecewise { at_infinity, .. } => *at_infinity,
        }
    }

    /// Rejects penalties that are non-finite, negative, or that decrease as detection gets later.
    pub fn validate(&self) -> Result<()> {
        match self {
            PenaltyModel::CappedLinear { t_max } => {
                if !(t_max.is_finite() && *t_max >= 0.0) {
                    return Err(Error::invalid(format!(
                        "t_max must be finite and non-negative, got {t_max}"
                    )));
                }
            }
            PenaltyModel::Step { tau, z } => {
                if !(tau.is_finite() && z.is_finite() && *z >= 0.0) {
                    return Err(Error::invalid(format!(
                        "step penalty needs finite tau and z ≥ 0, got tau={tau}, z={z}"
                    )));
                }
            }
            PenaltyModel::Piecewise {
                times,
                values,
                at_infinity,
            } => {
                if times.len() != values.len() {
                    return Err(Error::invalid(
                        "piecewise penalty needs as many values as breakpoints",
                    ));
                }
                if times
                    .iter()
                    .chain(values)
                    .chain([at_infinity])
                    .any(|x| !x.is_finite())
                {
                    return Err(Error::invalid("piecewise penalty must be finite"));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid(
                        "piecewise penalty breakpoints must be strictly increasing",
                    ));
                }
                let mut prev = 0.0;
                for &v in values.iter().chain([at_infinity]) {
                    if v < prev {
                        return Err(Error::invalid(format!(
                            "penalty decreases with detection time ({prev} then {v})"
                        )));
                    }
                    prev = v;
                }
            }
        }
        Ok(())
    }
}

/// Detection times `T(s, i)` for every sensor location and scenario, plus the scenario
/// distribution and the penalty model. `∞` means the sensor never detects the scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioTable {
    num_sensors: usize,
    num_scenarios: usize,
    times: Vec<f64>,
    probabilities: Vec<f64>,
    penalty: PenaltyModel,
}

impl ScenarioTable {
    /// `times[s][i]` is the detection time of sensor `s` for scenario `i`.
    pub fn new(
        times: Vec<Vec<f64>>,
        probabilities: Vec<f64>,
        penalty: PenaltyModel,
    ) -> Result<Self> {
        let num_sensors = times.len();
        let num_scenarios = probabilities.len();
        let mut flat = Vec::with_capacity(num_sensors * num_scenarios);
        for (s, row) in times.into_iter().enumerate() {
            if row.len() != num_scenarios {
                return Err(Error::invalid(format!(
                    "sensor {s} has {} detection times for {num_scenarios} scenarios",
                    row.len()
                )));
            }
            flat.extend(row);
        }
        Self::from_flat(num_sensors, num_scenarios, flat, probabilities, penalty)
    }

    fn from_flat(
        num_sensors: usize,
        num_scenarios: usize,
        times: Vec<f64>,
        probabilities: Vec<f64>,
        penalty: PenaltyModel,
    ) -> Result<Self> {
        if num_sensors == 0 || num_scenarios == 0 {
            return Err(Error::invalid(
                "scenario table needs at least one sensor and one scenario",
            ));
        }
        if let Some(pos) = times.iter().position(|t| t.is_nan() || *t < 0.0) {
            return Err(Error::invalid(format!(
                "detection time of sensor {} in scenario {} must be ≥ 0 or inf",
                pos / num_scenarios,
                pos % num_scenarios
            )));
        }
        if let Some(i) = probabilities
            .iter()
            .position(|p| !(p.is_finite() && *p >= 0.0))
        {
            return Err(Error::invalid(format!(
                "probability of scenario {i} must be finite and non-negative"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "scenario probabilities sum to {total}, not 1"
            )));
        }
        penalty.validate()?;
        Ok(ScenarioTable {
            num_sensors,
            num_scenarios,
            times,
            probabilities,
            penalty,
        })
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn num_scenarios(&self) -> usize {
        self.num_scenarios
    }

    #[inline]
    pub fn time(&self, sensor: usize, scenario: usize) -> f64 {
        self.times[sensor * self.num_scenarios + scenario]
    }

    /// Detection times of one sensor across all scenarios.
    #[inline]
    pub fn sensor_times(&self, sensor: usize) -> &[f64] {
        &self.times[sensor * self.num_scenarios..(sensor + 1) * self.num_scenarios]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn penalty(&self) -> &PenaltyModel {
        &self.penalty
    }
}

/// Generative model for synthetic scenario tables.
///
/// Sensor locations are dropped uniformly in the unit square and joined when closer than
/// `radius`, giving a random geometric graph whose edges carry delay `length / speed`. Each
/// scenario injects a contaminant at a uniformly chosen location at time 0; `T(s, i)` is the
/// shortest-path delay to `s`. Unreachable locations and delays above `horizon` are `∞`, and
/// each remaining pair independently fails to detect with probability `miss_rate`. Scenarios
/// are equally likely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioModel {
    pub radius: f64,
    pub speed: f64,
    pub horizon: f64,
    pub miss_rate: f64,
    pub penalty: PenaltyModel,
}

impl Default for ScenarioModel {
    fn default() -> Self {
        ScenarioModel {
            radius: 0.15,
            speed: 1.0,
            horizon: 1.0,
            miss_rate: 0.05,
            penalty: PenaltyModel::CappedLinear { t_max: 1.0 },
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Pending(f64, usize);

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn shortest_delays(adjacency: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Pending(0.0, source));
    while let Some(Pending(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adjacency[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Pending(nd, v));
            }
        }
    }
    dist
}

pub fn generate_scenarios(
    num_sensors: usize,
    num_scenarios: usize,
    seed: u64,
    model: &ScenarioModel,
) -> Result<ScenarioTable> {
    if num_sensors == 0 || num_scenarios == 0 {
        return Err(Error::invalid("need at least one sensor and one scenario"));
    }
    if !(model.radius > 0.0 && model.speed > 0.0 && model.horizon >= 0.0) {
        return Err(Error::invalid(
            "radius and speed must be positive, horizon non-negative",
        ));
    }
    if !(0.0..=1.0).contains(&model.miss_rate) {
        return Err(Error::invalid(format!(
            "miss_rate must lie in [0, 1], got {}",
            model.miss_rate
        )));
    }
    model.penalty.validate()?;

    let mut rng = stream_rng(seed, 0);
    let sites: Vec<(f64, f64)> = (0..num_sensors)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let mut adjacency = vec![Vec::new(); num_sensors];
    for u in 0..num_sensors {
        for v in u + 1..num_sensors {
            let len = (sites[u].0 - sites[v].0).hypot(sites[u].1 - sites[v].1);
            if len <= model.radius {
                let delay = len / model.speed;
                adjacency[u].push((v, delay));
                adjacency[v].push((u, delay));
            }
        }
    }

    let mut times = vec![f64::INFINITY; num_sensors * num_scenarios];
    for i in 0..num_scenarios {
        let source = rng.random_range(0..num_sensors);
        let delays = shortest_delays(&adjacency, source);
        for (s, &d) in delays.iter().enumerate() {
            let missed = rng.random::<f64>() < model.miss_rate;
            if d <= model.horizon && !missed {
                times[s * num_scenarios + i] = d;
            }
        }
    }
    let probabilities = vec![1.0 / num_scenarios as f64; num_scenarios];
    ScenarioTable::from_flat(
        num_sensors,
        num_scenarios,
        times,
        probabilities,
        model.penalty.clone(),
    )
}

/// Sidecar describing a scenario CSV: table shape, scenario probabilities and penalty model.
///
/// ```toml
/// version = 1
/// num_sensors = 2
/// num_scenarios = 1
/// probabilities = [1.0]   # optional, uniform when absent; rescaled to sum to 1
///
/// [penalty]
/// model = "capped_linear" # or "step" (tau, z) or "piecewise" (times, values, at_infinity)
/// t_max = 10.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub version: u32,
    pub num_sensors: usize,
    pub num_scenarios: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    pub penalty: PenaltyModel,
}

pub const SCENARIO_SPEC_VERSION: u32 = 1;
const SCENARIO_HEADER: &str = "sensor,scenario,time";

/// Reads a `sensor,scenario,time` CSV and its TOML sidecar. Pairs absent from the CSV are
/// never detected; times are non-negative decimals or the literal `inf`.
pub fn load_scenarios(
    csv_path: impl AsRef<Path>,
    spec_path: impl AsRef<Path>,
) -> Result<ScenarioTable> {
    let spec_shown = spec_path.as_ref().display().to_string();
    let spec: ScenarioSpec = toml::from_str(&fs::read_to_string(spec_path.as_ref())?)
        .map_err(|e| Error::load(&spec_shown, None, e.to_string()))?;
    if spec.version != SCENARIO_SPEC_VERSION {
        return Err(Error::load(
            &spec_shown,
            None,
            format!("unsupported version {}", spec.version),
        ));
    }
    let (ns, ni) = (spec.num_sensors, spec.num_scenarios);
    if ns == 0 || ni == 0 {
        return Err(Error::load(
            &spec_shown,
            None,
            "num_sensors and num_scenarios must be ≥ 1",
        ));
    }
    let probabilities = match &spec.probabilities {
        None => vec![1.0 / ni as f64; ni],
        Some(p) => {
            if p.len() != ni {
                return Err(Error::load(
                    &spec_shown,
                    None,
                    format!("{} probabilities for {ni} scenarios", p.len()),
                ));
            }
            let total: f64 = p.iter().sum();
            if p.iter().any(|x| !(x.is_finite() && *x >= 0.0))
                || !(total > 0.0 && total.is_finite())
            {
                return Err(Error::load(
                    &spec_shown,
                    None,
                    "probabilities are not normalizable",
                ));
            }
            p.iter().map(|x| x / total).collect()
        }
    };

    let csv_shown = csv_path.as_ref().display().to_string();
    let text = fs::read_to_string(csv_path.as_ref())?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SCENARIO_HEADER => {}
        _ => {
            return Err(Error::load(
                &csv_shown,
                Some(1),
                format!("expected header '{SCENARIO_HEADER}'"),
            ))
        }
    }
    let mut times = vec![f64::INFINITY; ns * ni];
    let mut seen = vec![false; ns * ni];
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::load(&csv_shown, Some(lineno), msg);
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", cells.len())));
        }
        let s: usize = cells[0]
            .parse()
            .map_err(|_| err(format!("bad sensor index '{}'", cells[0])))?;
        let i: usize = cells[1]
            .parse()
            .map_err(|_| err(format!("bad scenario index '{}'", cells[1])))?;
        if s >= ns || i >= ni {
            return Err(err(format!(
                "pair ({s}, {i}) outside {ns} sensors × {ni} scenarios"
            )));
        }
        let t = if cells[2] == "inf" {
            f64::INFINITY
        } else {
            cells[2]
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite())
                .ok_or_else(|| err(format!("bad time '{}'", cells[2])))?
        };
        if t < 0.0 {
            return Err(err(format!("negative detection time {t}")));
        }
        let at = s * ni + i;
        if std::mem::replace(&mut seen[at], true) {
            return Err(err(format!("duplicate pair ({s}, {i})")));
        }
        times[at] = t;
    }
    ScenarioTable::from_flat(ns, ni, times, probabilities, spec.penalty)
        .map_err(|e| Error::load(&csv_shown, None, e.to_string()))
}

/// Writes `table` in the format read by [`load_scenarios`]; undetected pairs are omitted.
pub fn write_scenarios(
    table: &ScenarioTable,
    csv_path: impl AsRef<Path>,
    spec_path: impl AsRef<Path>,
) -> Result<()> {
    let mut csv = String::from(SCENARIO_HEADER);
    csv.push('\n');
    for s in 0..table.num_sensors {
        for (i, &t) in table.sensor_times(s).iter().enumerate() {
            if t.is_finite() {
                writeln!(csv, "{s},{i},{t}").expect("writing to a String");
            }
        }
    }
    fs::write(csv_path, csv)?;
    let spec = ScenarioSpec {
        version: SCENARIO_SPEC_VERSION,
        num_sensors: table.num_sensors,
        num_scenarios: table.num_scenarios,
        probabilities: Some(table.probabilities.clone()),
        penalty: table.penalty.clone(),
    };
    let text = toml::to_string(&spec).map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(spec_path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(
        dir: &tempfile::TempDir,
        csv: &str,
        spec: &str,
    ) -> (std::path::PathBuf, std::path::PathBuf) {
        let c = dir.path().join("t.csv");
        let s = dir.path().join("t.toml");
        fs::write(&c, csv).unwrap();
        fs::write(&s, spec).unwrap();
        (c, s)
    }

    const SPEC_2X1: &str = "version = 1\nnum_sensors = 2\nnum_scenarios = 1\n[penalty]\nmodel = \"capped_linear\"\nt_max = 10.0\n";

    #[test]
    fn loads_two_sensors_one_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let (c, s) = write(&dir, "sensor,scenario,time\n0,0,2\n1,0,5\n", SPEC_2X1);
        let t = load_scenarios(c, s).unwrap();
        assert_eq!(t.sensor_times(0), &[2.0]);
        assert_eq!(t.sensor_times(1), &[5.0]);
        assert_eq!(t.probabilities(), &[1.0]);
    }

    #[test]
    fn missing_pair_is_infinite() {
        let dir = tempfile::tempdir().unwrap();
        let (c, s) = write(&dir, "sensor,scenario,time\n0,0,inf\n", SPEC_2X1);
        let t = load_scenarios(c, s).unwrap();
        assert_eq!(t.time(0, 0), f64::INFINITY);
        assert_eq!(t.time(1, 0), f64::INFINITY);
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        for (csv, line) in [
            ("sensor,scenario,time\n0,0,1\n1,0,-3\n", 3),
            ("sensor,scenario,time\n0,0,1\n0,0,2\n", 3),
            ("sensor,scenario,time\n0,5,1\n", 2),
            ("sensor,scenario,time\n0,0,x\n", 2),
            ("time,sensor,scenario\n", 1),
        ] {
            let (c, s) = write(&dir, csv, SPEC_2X1);
            match load_scenarios(c, s) {
                Err(Error::Load { line: Some(l), .. }) => assert_eq!(l, line, "{csv}"),
                other => panic!("{csv}: {other:?}"),
            }
        }
    }

    #[test]
    fn probabilities_are_normalized_or_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let spec = "version = 1\nnum_sensors = 1\nnum_scenarios = 2\nprobabilities = [1.0, 3.0]\n[penalty]\nmodel = \"step\"\ntau = 1.0\nz = 2.0\n";
        let (c, s) = write(&dir, "sensor,scenario,time\n0,1,0.5\n", spec);
        assert_eq!(load_scenarios(c, s).unwrap().probabilities(), &[0.25, 0.75]);
        let spec = spec.replace("[1.0, 3.0]", "[0.0, 0.0]");
        let (c, s) = write(&dir, "sensor,scenario,time\n", &spec);
        assert!(load_scenarios(c, s).is_err());
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let model = ScenarioModel::default();
        let a = generate_scenarios(40, 25, 9, &model).unwrap();
        let b = generate_scenarios(40, 25, 9, &model).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_scenarios(40, 25, 10, &model).unwrap());
        let one = generate_scenarios(5, 1, 0, &model).unwrap();
        assert_eq!(one.probabilities(), &[1.0]);
        assert!(generate_scenarios(0, 3, 0, &model).is_err());
    }

    #[test]
    fn write_then_load_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let table = generate_scenarios(30, 12, 3, &ScenarioModel::default()).unwrap();
        let (c, s) = (dir.path().join("x.csv"), dir.path().join("x.toml"));
        write_scenarios(&table, &c, &s).unwrap();
        let back = load_scenarios(&c, &s).unwrap();
        assert_eq!(back.num_sensors(), 30);
        for sensor in 0..30 {
            assert_eq!(back.sensor_times(sensor), table.sensor_times(sensor));
        }
        for (a, b) in back.probabilities().iter().zip(table.probabilities()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn penalty_models() {
        let capped = PenaltyModel::CappedLinear { t_max: 10.0 };
        assert_eq!(capped.penalty(3.0), 3.0);
        assert_eq!(capped.penalty(12.0), 10.0);
        assert_eq!(capped.penalty(f64::INFINITY), 10.0);
        let step = PenaltyModel::Step { tau: 2.0, z: 5.0 };
        assert_eq!(step.penalty(2.0), 0.0);
        assert_eq!(step.penalty(2.5), 5.0);
        let pw = PenaltyModel::Piecewise {
            times: vec![1.0, 4.0],
            values: vec![2.0, 3.0],
            at_infinity: 7.0,
        };
        assert_eq!(pw.penalty(0.5), 0.0);
        assert_eq!(pw.penalty(1.0), 2.0);
        assert_eq!(pw.penalty(10.0), 3.0);
        assert_eq!(pw.penalty(f64::INFINITY), 7.0);
        assert!(pw.validate().is_ok());
        let low_inf = PenaltyModel::Piecewise {
            times: vec![1.0],
            values: vec![2.0],
            at_infinity: 1.0,
        };
        assert!(low_inf.validate().is_err());
        assert!(PenaltyModel::CappedLinear { t_max: -1.0 }
            .validate()
            .is_err());
    }
}
