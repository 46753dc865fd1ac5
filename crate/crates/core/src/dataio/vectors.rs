use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

const BINARY_MAGIC: &[u8; 8] = b"SGVEC001";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// Scale every row to Euclidean norm 1; zero rows are rejected.
    PerVectorUnitNorm,
    /// Center every column and divide by its population standard deviation. Constant columns
    /// become all zero.
    PerFeatureZscore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorFormat {
    Csv,
    /// Little-endian: the 8 bytes `SGVEC001`, `n: u64`, `dim: u64`, then `n · dim` `f64`
    /// values in row-major order.
    Binary,
}

/// `n` points of dimension `dim`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorDataset {
    n: usize,
    dim: usize,
    data: Vec<f64>,
    normalization: Normalization,
}

impl VectorDataset {
    pub fn from_rows(rows: Vec<Vec<f64>>, normalization: Normalization) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "row {i} has {} values, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), dim, data, normalization)
    }

    pub fn from_flat(
        n: usize,
        dim: usize,
        data: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if data.len() != n * dim {
            return Err(Error::invalid(format!(
                "{} values cannot fill {n} rows of dimension {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value in row {}",
                pos / dim.max(1)
            )));
        }
        let mut ds = VectorDataset {
            n,
            dim,
            data,
            normalization: Normalization::None,
        };
        ds.normalize(normalization)?;
        Ok(ds)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim.max(1)).take(self.n)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn normalize(&mut self, mode: Normalization) -> Result<()> {
        match mode {
            Normalization::None => {}
            Normalization::PerVectorUnitNorm => {
                let dim = self.dim;
                for (i, row) in self.data.chunks_mut(dim.max(1)).enumerate() {
                    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        return Err(Error::invalid(format!(
                            "row {i} is the zero vector and cannot be scaled to unit norm"
                        )));
                    }
                    row.iter_mut().for_each(|x| *x /= norm);
                }
            }
            Normalization::PerFeatureZscore => {
                let (n, dim) = (self.n, self.dim);
                for j in 0..dim {
                    let mean = (0..n).map(|i| self.data[i * dim + j]).sum::<f64>() / n as f64;
                    let var = (0..n)
                        .map(|i| (self.data[i * dim + j] - mean).powi(2))
                        .sum::<f64>()
                        / n as f64;
                    let sd = var.sqrt();
                    for i in 0..n {
                        let x = &mut self.data[i * dim + j];
                        *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
                    }
                }
            }
        }
        self.normalization = mode;
        Ok(())
    }
}

pub fn load_vectors(
    path: impl AsRef<Path>,
    format: VectorFormat,
    normalization: Normalization,
) -> Result<VectorDataset> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let (n, dim, data) = match format {
        VectorFormat::Csv => parse_csv(&shown, &fs::read_to_string(path)?)?,
        VectorFormat::Binary => parse_binary(&shown, &fs::read(path)?)?,
    };
    let mut ds = VectorDataset::from_flat(n, dim, data, Normalization::None)
        .map_err(|e| Error::load(&shown, None, e.to_string()))?;
    ds.normalize(normalization)
        .map_err(|e| Error::load(&shown, None, e.to_string()))?;
    Ok(ds)
}

fn parse_csv(path: &str, text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    if let Some((_, first)) = lines.peek() {
        let is_header = first
            .split(',')
            .any(|cell| cell.trim().parse::<f64>().is_err());
        if is_header {
            lines.next();
        }
    }
    let mut dim = None;
    let mut n = 0;
    let mut data = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut count = 0;
        for cell in line.split(',') {
            let x: f64 = cell.trim().parse().map_err(|_| {
                Error::load(
                    path,
                    Some(lineno),
                    format!("row {n}: non-numeric cell '{}'", cell.trim()),
                )
            })?;
            if !x.is_finite() {
                return Err(Error::load(
                    path,
                    Some(lineno),
                    format!("row {n}: non-finite value"),
                ));
            }
            data.push(x);
            count += 1;
        }
        match dim {
            None => dim = Some(count),
            Some(d) if d != count => {
                return Err(Error::load(
                    path,
                    Some(lineno),
                    format!("row {n}: ragged row with {count} values, expected {d}"),
                ))
            }
            _ => {}
        }
        n += 1;
    }
    match dim {
        Some(dim) => Ok((n, dim, data)),
        None => Err(Error::load(path, None, "no data rows")),
    }
}

fn parse_binary(path: &str, bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 24 || &bytes[..8] != BINARY_MAGIC {
        return Err(Error::load(path, None, "missing SGVEC001 header"));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (n, dim) = (word(8) as usize, word(16) as usize);
    let body = &bytes[24..];
    let expected = n
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::load(path, None, "header dimensions overflow"))?;
    if body.len() != expected {
        return Err(Error::load(
            path,
            None,
            format!(
                "header declares {n}×{dim} values but body holds {} bytes",
                body.len()
            ),
        ));
    }
    if n == 0 {
        return Err(Error::load(path, None, "no data rows"));
    }
    let data: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::load(
            path,
            None,
            format!("row {}: non-finite value", pos / dim.max(1)),
        ));
    }
    Ok((n, dim, data))
}

pub fn write_vectors(
    path: impl AsRef<Path>,
    format: VectorFormat,
    data: &VectorDataset,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    match format {
        VectorFormat::Csv => {
            for row in data.rows() {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        VectorFormat::Binary => {
            out.write_all(BINARY_MAGIC)?;
            out.write_all(&(data.n as u64).to_le_bytes())?;
            out.write_all(&(data.dim as u64).to_le_bytes())?;
            for x in &data.data {
                out.write_all(&x.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Isotropic Gaussian mixture used for synthetic benchmarks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub n: usize,
    pub dim: usize,
    pub clusters: usize,
    /// Standard deviation of points around their cluster center.
    pub spread: f64,
    /// Standard deviation of the cluster centers around the origin.
    pub center_scale: f64,
    pub seed: u64,
}

impl Default for MixtureParams {
    fn default() -> Self {
        MixtureParams {
            n: 2_000,
            dim: 22,
            clusters: 20,
            spread: 0.5,
            center_scale: 1.0,
            seed: 0,
        }
    }
}

pub fn gaussian_mixture(
    params: &MixtureParams,
    normalization: Normalization,
) -> Result<VectorDataset> {
    if params.n == 0 || params.dim == 0 || params.clusters == 0 {
        return Err(Error::invalid("mixture needs n, dim and clusters ≥ 1"));
    }
    if !(params.spread >= 0.0 && params.center_scale >= 0.0) {
        return Err(Error::invalid("mixture scales must be non-negative"));
    }
    let mut rng = stream_rng(params.seed, 0);
    let centers: Vec<f64> = (0..params.clusters * params.dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            params.center_scale * z
        })
        .collect::<Vec<f64>>();
    let mut data = Vec::with_capacity(params.n * params.dim);
    for _ in 0..params.n {
        let c = rng.random_range(0..params.clusters);
        for j in 0..params.dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(centers[c * params.dim + j] + params.spread * z);
        }
    }
    VectorDataset::from_flat(params.n, params.dim, data, normalization)
}
