use std::sync::Arc;

use crate::dataio::KernelMatrix;
use crate::error::{Error, Result};
use crate::oracle::{ElementId, GroundSet, Objective};

/// Schur complements down to this value are treated as round-off and clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Gaussian-process information gain `f(A) = ½ log det(I + σ⁻² K_{A,A})`.
///
/// The state holds the lower Cholesky factor `L` of `M_A = I + σ⁻² K_{A,A}`, extended by one
/// row per commit. For a candidate `e` with `b = σ⁻² K_{A,e}` and `L y = b`,
///
/// ```text
/// f(A ∪ {e}) − f(A) = ½ log(1 + σ⁻² K_{e,e} − ‖y‖²)
/// ```
///
/// since `1 + σ⁻² K_{e,e} − ‖y‖²` is the Schur complement of `M_A` in `M_{A∪{e}}`.
#[derive(Clone, Debug)]
pub struct LogDet {
    ground: GroundSet,
    kernel: Arc<KernelMatrix>,
    inv_noise: f64,
}

/// Cholesky factor of `I + σ⁻² K_{A,A}` and the kernel rows of the selected elements.
#[derive(Clone, Debug, Default)]
pub struct LogDetState {
    rows: Vec<Arc<[f64]>>,
    factor: Vec<Vec<f64>>,
}

impl LogDetState {
    /// Lower-triangular factor, one row per selected element.
    pub fn factor(&self) -> &[Vec<f64>] {
        &self.factor
    }
}

impl LogDet {
    pub fn new(kernel: Arc<KernelMatrix>, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!(
                "noise sigma must be finite and positive, got {sigma}"
            )));
        }
        Ok(LogDet {
            ground: GroundSet::new(kernel.n()),
            kernel,
            inv_noise: 1.0 / (sigma * sigma),
        })
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn sigma(&self) -> f64 {
        (1.0 / self.inv_noise).sqrt()
    }

    /// Solves `L y = σ⁻² K_{A,e}` and returns `(y, σ⁻² K_{e,e} − ‖y‖²)`.
    fn residual(&self, state: &LogDetState, e: ElementId) -> (Vec<f64>, f64) {
        let m = state.factor.len();
        let mut y = Vec::with_capacity(m + 1);
        let mut norm = 0.0;
        for (i, lrow) in state.factor.iter().enumerate() {
            let mut acc = self.inv_noise * state.rows[i][e.0];
            for (l, yj) in lrow[..i].iter().zip(&y) {
                acc -= l * yj;
            }
            let yi = acc / lrow[i];
            norm += yi * yi;
            y.push(yi);
        }
        (y, self.inv_noise * self.kernel.diag(e.0) - norm)
    }

    fn clamp_residual(&self, e: ElementId, r: f64) -> Result<f64> {
        if r < -PSD_TOLERANCE || r.is_nan() {
            return Err(Error::NumericDomain {
                element: e.0,
                message: format!("kernel is not positive semi-definite (Schur complement {r:e})"),
            });
        }
        Ok(r.max(0.0))
    }
}

impl Objective for LogDet {
    type State = LogDetState;

    fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn initial_state(&self) -> LogDetState {
        LogDetState::default()
    }

    fn value(&self, set: &[ElementId]) -> Result<f64> {
        let mut state = self.initial_state();
        let mut total = 0.0;
        for &e in set {
            total += self.gain(&state, e)?;
            self.insert(&mut state, e)?;
        }
        Ok(total)
    }

    fn gain(&self, state: &LogDetState, e: ElementId) -> Result<f64> {
        let (_, r) = self.residual(state, e);
        Ok(0.5 * self.clamp_residual(e, r)?.ln_1p())
    }

    fn insert(&self, state: &mut LogDetState, e: ElementId) -> Result<()> {
        let (mut y, r) = self.residual(state, e);
        let r = self.clamp_residual(e, r)?;
        y.push((1.0 + r).sqrt());
        state.factor.push(y);
        state.rows.push(self.kernel.row(e.0));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Oracle;
    use approx::assert_relative_eq;

    fn identity(n: usize) -> Arc<KernelMatrix> {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Arc::new(KernelMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn one_by_one_kernel() {
        let obj = LogDet::new(identity(1), 1.0).unwrap();
        let oracle = Oracle::new(&obj);
        assert_eq!(oracle.eval(&[]).unwrap(), 0.0);
        assert_relative_eq!(
            oracle.eval(&[ElementId(0)]).unwrap(),
            0.5 * 2f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn diagonal_kernel_gain_is_independent_of_selection() {
        let obj = LogDet::new(identity(2), 1.0).unwrap();
        let oracle = Oracle::new(&obj);
        let mut ctx = oracle.context(2);
        oracle.commit(ElementId(0), &mut ctx).unwrap();
        let g = oracle.marginal(ElementId(1), &ctx).unwrap();
        assert_relative_eq!(g, 0.5 * 2f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn duplicate_point_gain_matches_determinant() {
        // K = [[1,1],[1,1]], σ = 1: det(I + K) = 3, so Δ(1|{0}) = ½ ln 3 − ½ ln 2.
        let kernel =
            Arc::new(KernelMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap());
        let obj = LogDet::new(kernel, 1.0).unwrap();
        let mut state = obj.initial_state();
        obj.insert(&mut state, ElementId(0)).unwrap();
        let g = obj.gain(&state, ElementId(1)).unwrap();
        assert_relative_eq!(g, 0.5 * 1.5f64.ln(), max_relative = 1e-12);
        // Smaller noise drives the duplicate's gain to ½ ln 2 of the noise-only term, not beyond.
        let tight = LogDet::new(obj.kernel.clone(), 1e-3).unwrap();
        let mut state = tight.initial_state();
        tight.insert(&mut state, ElementId(0)).unwrap();
        assert!(tight.gain(&state, ElementId(1)).unwrap() <= 0.5 * 2f64.ln() + 1e-9);
    }

    #[test]
    fn non_psd_kernel_is_reported() {
        // [[1,2],[2,1]] has eigenvalue −1; with tiny noise the Schur complement goes negative.
        let kernel =
            Arc::new(KernelMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap());
        let obj = LogDet::new(kernel, 1e-2).unwrap();
        let mut state = obj.initial_state();
        obj.insert(&mut state, ElementId(0)).unwrap();
        match obj.gain(&state, ElementId(1)) {
            Err(Error::NumericDomain { element, .. }) => assert_eq!(element, 1),
            other => panic!("expected numeric-domain error, got {other:?}"),
        }
    }

    #[test]
    fn sigma_must_be_positive() {
        assert!(LogDet::new(identity(2), 0.0).is_err());
        assert!(LogDet::new(identity(2), f64::NAN).is_err());
    }
}
