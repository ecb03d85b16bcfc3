//! The input to every bound: a finite set of square matrices of equal size.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A set `{A_1, ..., A_m}` of real `n x n` matrices plus the hypothesis
/// metadata the summed upper bounds depend on.
///
/// `nonnegative` is detected automatically (every entry of every matrix is
/// `>= 0`, which makes the nonnegative orthant a common invariant cone).
/// `cone_asserted` is a caller claim that some common invariant proper cone
/// exists without exhibiting it; it is recorded in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    matrices: Vec<Matrix>,
    nonnegative: bool,
    cone_asserted: bool,
}

impl MatrixSet {
    pub fn new(matrices: Vec<Matrix>) -> Result<Self> {
        let first = matrices.first().ok_or(Error::EmptySet)?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let n = first.rows();
        for a in &matrices {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n}x{n}"),
                    got: format!("{}x{}", a.rows(), a.cols()),
                });
            }
        }
        let nonnegative = matrices.iter().all(Matrix::is_nonnegative);
        Ok(Self {
            matrices,
            nonnegative,
            cone_asserted: false,
        })
    }

    /// Marks the set as leaving a common proper cone invariant.
    pub fn with_cone_asserted(mut self, asserted: bool) -> Self {
        self.cone_asserted = asserted;
        self
    }

    /// Number of matrices `m`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires m >= 1
    }

    /// Common side `n`.
    pub fn dim(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> &Matrix {
        &self.matrices[i]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_cone_asserted(&self) -> bool {
        self.cone_asserted
    }

    /// Whether the invariant-cone hypothesis behind the summed upper bounds
    /// is available. A singleton set needs no cone: its joint spectral
    /// radius is the plain spectral radius.
    pub fn has_cone_hypothesis(&self) -> bool {
        self.nonnegative || self.cone_asserted || self.matrices.len() == 1
    }

    /// Entrywise sum of the set.
    pub fn sum(&self) -> Matrix {
        let mut acc = self.matrices[0].clone();
        for a in &self.matrices[1..] {
            acc = acc.add(a);
        }
        acc
    }

    /// Largest spectral norm over the set; the prescaling factor used by the
    /// lifted bounds.
    pub fn max_spectral_norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(Matrix::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// The set with every matrix multiplied by `c`.
    pub fn scaled(&self, c: f64) -> MatrixSet {
        MatrixSet {
            matrices: self.matrices.iter().map(|a| a.scale(c)).collect(),
            nonnegative: self.nonnegative && c >= 0.0,
            cone_asserted: self.cone_asserted,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(matches!(MatrixSet::new(vec![]), Err(Error::EmptySet)));

        let a = Matrix::identity(2);
        let b = Matrix::identity(3);
        assert!(matches!(
            MatrixSet::new(vec![a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn detects_nonnegativity() {
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[2.0, 0.5]]).unwrap();
        let b = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let set = MatrixSet::new(vec![a, b]).unwrap();
        assert!(set.is_nonnegative());
        assert!(set.has_cone_hypothesis());

        let c = Matrix::from_rows(&[&[1.0, -0.1], &[0.0, 1.0]]).unwrap();
        let set = MatrixSet::new(vec![c.clone(), c]).unwrap();
        assert!(!set.is_nonnegative());
        assert!(!set.has_cone_hypothesis());
        assert!(set.with_cone_asserted(true).has_cone_hypothesis());
    }

    #[test]
    fn singleton_always_has_hypothesis() {
        let c = Matrix::from_rows(&[&[1.0, -5.0], &[2.0, 1.0]]).unwrap();
        let set = MatrixSet::new(vec![c]).unwrap();
        assert!(set.has_cone_hypothesis());
    }
}
