//! Abstract square linear maps and Perron-style power iteration.
//!
//! A [`LinearOperator`] is a dimension plus an apply-to-vector action. It
//! unifies dense matrices with the matrix-free lifted operators built in
//! [`crate::lift`]: callers that only need a spectral radius never have to
//! know whether the operator was ever materialized.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use std::sync::Arc;

/// Iterates below this Euclidean norm are treated as having collapsed to
/// zero (nilpotent direction).
const UNDERFLOW_FLOOR: f64 = 1e-300;

/// A square linear map given by its action on vectors.
///
/// `cone_invariant` is a promise that the map sends a fixed proper cone into
/// itself and that `start` lies in that cone's interior; power iteration
/// started there converges to the Perron value when the dominant eigenvalue
/// is simple. The apply closure captures read-only state and is safe to call
/// from multiple threads.
#[derive(Clone)]
pub struct LinearOperator {
    dim: usize,
    cone_invariant: bool,
    start: Vec<f64>,
    apply_fn: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl LinearOperator {
    pub fn new(
        dim: usize,
        cone_invariant: bool,
        start: Vec<f64>,
        apply: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(start.len(), dim, "start vector length must equal dim");
        Self {
            dim,
            cone_invariant,
            start,
            apply_fn: Arc::new(apply),
        }
    }

    /// Wraps a dense square matrix. Entrywise nonnegative matrices keep the
    /// nonnegative orthant invariant, so they get `cone_invariant = true`
    /// with the all-ones interior start.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let cone = a.is_nonnegative();
        let m = a.clone();
        Ok(Self::new(n, cone, vec![1.0; n], move |v| m.apply(v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cone_invariant(&self) -> bool {
        self.cone_invariant
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "operator apply length mismatch");
        let out = (self.apply_fn)(v);
        debug_assert_eq!(out.len(), self.dim);
        out
    }

    /// Materializes the operator column by column. Quadratic in `dim`; only
    /// for small operators and equivalence tests.
    pub fn to_dense(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply(&e);
            e[j] = 0.0;
            for (i, &value) in col.iter().enumerate() {
                out.set(i, j, value);
            }
        }
        out
    }
}

impl std::fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearOperator")
            .field("dim", &self.dim)
            .field("cone_invariant", &self.cone_invariant)
            .finish()
    }
}

/// Result of a power iteration run.
#[derive(Debug, Clone)]
pub struct PowerIteration {
    /// Rayleigh estimate of the dominant eigenvalue.
    pub value: f64,
    /// Whether the successive-estimate criterion was met before `max_iter`.
    pub converged: bool,
    pub iterations: usize,
    /// Final unit iterate; for a converged cone-invariant operator this is
    /// the Perron direction, inside the cone.
    pub vector: Vec<f64>,
}

/// Suggested iteration cap for a given operator dimension.
pub fn default_max_iter(dim: usize) -> usize {
    100 * dim.max(1)
}

/// Estimates the dominant eigenvalue of `op` by renormalized power iteration
/// started at the operator's designated cone-interior vector.
///
/// Convergence is declared when the relative change of the Rayleigh estimate
/// stays below `tol` on two consecutive steps; a near-degenerate dominant
/// pair keeps the estimate oscillating and is reported as `converged =
/// false` instead of a wrong value. An iterate collapsing below the
/// underflow floor means the start vector was annihilated (nilpotent
/// direction) and yields `(0.0, converged)`.
pub fn power_iteration(op: &LinearOperator, tol: f64, max_iter: usize) -> PowerIteration {
    let dim = op.dim();
    let mut v: Vec<f64> = op.start().to_vec();
    let norm = l2(&v);
    if norm < UNDERFLOW_FLOOR {
        v = vec![1.0; dim];
    }
    normalize(&mut v);

    let mut prev = f64::NAN;
    let mut lambda = 0.0;
    let mut stable = 0usize;
    for it in 1..=max_iter {
        let w = op.apply(&v);
        let norm_w = l2(&w);
        if !norm_w.is_finite() {
            return PowerIteration {
                value: lambda,
                converged: false,
                iterations: it,
                vector: v,
            };
        }
        if norm_w < UNDERFLOW_FLOOR {
            return PowerIteration {
                value: 0.0,
                converged: true,
                iterations: it,
                vector: v,
            };
        }
        lambda = dot(&v, &w);
        v = w;
        normalize(&mut v);

        if prev.is_finite() && (lambda - prev).abs() <= tol * lambda.abs().max(UNDERFLOW_FLOOR) {
            stable += 1;
            if stable >= 2 {
                let value = if op.cone_invariant() { lambda.max(0.0) } else { lambda };
                return PowerIteration {
                    value,
                    converged: true,
                    iterations: it,
                    vector: v,
                };
            }
        } else {
            stable = 0;
        }
        prev = lambda;
    }
    PowerIteration {
        value: if op.cone_invariant() { lambda.max(0.0) } else { lambda },
        converged: false,
        iterations: max_iter,
        vector: v,
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = l2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dense_diagonal_converges_to_dominant() {
        let a = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        let op = LinearOperator::from_matrix(&a).unwrap();
        let pi = power_iteration(&op, 1e-10, default_max_iter(2));
        assert!(pi.converged);
        assert_relative_eq!(pi.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn nilpotent_reports_zero() {
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let op = LinearOperator::from_matrix(&a).unwrap();
        let pi = power_iteration(&op, 1e-10, 1000);
        assert!(pi.converged);
        assert_eq!(pi.value, 0.0);
    }

    #[test]
    fn oscillating_estimate_is_reported_unconverged() {
        // Dominant pair +-sqrt(2): the Rayleigh estimate alternates and must
        // not be reported as converged.
        let a = Matrix::from_rows(&[&[0.0, 2.0], &[1.0, 0.0]]).unwrap();
        let op = LinearOperator::from_matrix(&a).unwrap();
        let pi = power_iteration(&op, 1e-10, 2000);
        assert!(!pi.converged);
    }

    #[test]
    fn to_dense_reproduces_matrix() {
        let a = Matrix::from_rows(&[&[1.0, -2.0, 0.0], &[0.5, 0.0, 3.0], &[0.0, 1.0, 1.0]])
            .unwrap();
        let op = LinearOperator::from_matrix(&a).unwrap();
        assert_eq!(op.to_dense(), a);
    }

    #[test]
    fn matches_dense_spectral_radius_on_nonnegative_input() {
        let a = Matrix::from_rows(&[&[0.3, 0.7, 0.1], &[0.2, 0.1, 0.9], &[0.5, 0.4, 0.2]])
            .unwrap();
        let op = LinearOperator::from_matrix(&a).unwrap();
        let pi = power_iteration(&op, 1e-12, default_max_iter(3));
        assert!(pi.converged);
        assert_relative_eq!(pi.value, a.spectral_radius().unwrap(), max_relative = 1e-9);
    }
}
