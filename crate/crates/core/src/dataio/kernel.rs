use std::fmt;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use serde::{Deserialize, Serialize};

use super::VectorDataset;
use crate::error::{Error, Result};

/// Kernels over at most this many points are materialized in full.
pub const MATERIALIZE_LIMIT: usize = 20_000;
const DEFAULT_ROW_CACHE: usize = 1_024;

/// Squared-exponential kernel `exp(−‖x − x'‖² / h²)` and observation noise `σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub bandwidth: f64,
    pub sigma: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            bandwidth: 0.75,
            sigma: 1.0,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("bandwidth", self.bandwidth), ("sigma", self.sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "kernel {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelStorage {
    /// Dense when `n ≤ MATERIALIZE_LIMIT`, on demand otherwise.
    #[default]
    Auto,
    Dense,
    /// Rows computed when first requested and kept in an LRU cache of this many rows.
    OnDemand {
        cache_rows: usize,
    },
}

enum Storage {
    Dense(Vec<Arc<[f64]>>),
    OnDemand {
        data: Arc<VectorDataset>,
        inv_h2: f64,
        cache: Mutex<LruCache<usize, Arc<[f64]>>>,
    },
}

/// Symmetric kernel matrix over a ground set.
pub struct KernelMatrix {
    n: usize,
    storage: Storage,
}

impl fmt::Debug for KernelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.storage {
            Storage::Dense(_) => "dense",
            Storage::OnDemand { .. } => "on-demand",
        };
        f.debug_struct("KernelMatrix")
            .field("n", &self.n)
            .field("storage", &kind)
            .finish()
    }
}

impl KernelMatrix {
    /// Wraps an explicit matrix; it must be square, finite and symmetric within 1e-12.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "kernel row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!(
                    "kernel row {i} has a non-finite entry"
                )));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in rows[..i].iter().enumerate() {
                if (row[j] - other[i]).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "kernel is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(KernelMatrix {
            n,
            storage: Storage::Dense(rows.into_iter().map(Arc::from).collect()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn row(&self, i: usize) -> Arc<[f64]> {
        match &self.storage {
            Storage::Dense(rows) => rows[i].clone(),
            Storage::OnDemand {
                data,
                inv_h2,
                cache,
            } => {
                if let Some(row) = cache.lock().expect("kernel cache poisoned").get(&i) {
                    return row.clone();
                }
                let row: Arc<[f64]> = (0..self.n).map(|j| se_entry(data, i, j, *inv_h2)).collect();
                cache
                    .lock()
                    .expect("kernel cache poisoned")
                    .put(i, row.clone());
                row
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(rows) => rows[i][j],
            Storage::OnDemand { data, inv_h2, .. } => se_entry(data, i, j, *inv_h2),
        }
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        match &self.storage {
            Storage::Dense(rows) => rows[i][i],
            Storage::OnDemand { .. } => 1.0,
        }
    }

    /// Dense copy, mainly for verification.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

#[inline]
fn se_entry(data: &VectorDataset, i: usize, j: usize, inv_h2: f64) -> f64 {
    // Order the pair so K(i, j) and K(j, i) go through identical floating-point operations.
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    (-data.squared_distance(a, b) * inv_h2).exp()
}

pub fn build_kernel(data: Arc<VectorDataset>, params: &KernelParams) -> Result<KernelMatrix> {
    build_kernel_with(data, params, KernelStorage::Auto)
}

pub fn build_kernel_with(
    data: Arc<VectorDataset>,
    params: &KernelParams,
    storage: KernelStorage,
) -> Result<KernelMatrix> {
    params.validate()?;
    let n = data.n();
    if n == 0 {
        return Err(Error::invalid(
            "cannot build a kernel over an empty dataset",
        ));
    }
    let inv_h2 = 1.0 / (params.bandwidth * params.bandwidth);
    if !inv_h2.is_finite() {
        return Err(Error::invalid(format!(
            "bandwidth {} underflows",
            params.bandwidth
        )));
    }
    let storage = match storage {
        KernelStorage::Auto if n <= MATERIALIZE_LIMIT => KernelStorage::Dense,
        KernelStorage::Auto => KernelStorage::OnDemand {
            cache_rows: DEFAULT_ROW_CACHE,
        },
        other => other,
    };
    let storage = match storage {
        KernelStorage::Dense => {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                m[i * n + i] = 1.0;
                for j in i + 1..n {
                    let d = data.squared_distance(i, j);
                    if !d.is_finite() {
                        return Err(Error::invalid(format!(
                            "non-finite distance between rows {i} and {j}"
                        )));
                    }
                    let k = (-d * inv_h2).exp();
                    m[i * n + j] = k;
                    m[j * n + i] = k;
                }
            }
            Storage::Dense(m.chunks(n).map(Arc::from).collect())
        }
        KernelStorage::OnDemand { cache_rows } => Storage::OnDemand {
            data,
            inv_h2,
            cache: Mutex::new(LruCache::new(
                NonZeroUsize::new(cache_rows.max(1)).expect("non-zero"),
            )),
        },
        KernelStorage::Auto => unreachable!(),
    };
    Ok(KernelMatrix { n, storage })
}
