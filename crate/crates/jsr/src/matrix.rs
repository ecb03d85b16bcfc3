//! Dense real matrices, Kronecker operations, and symmetric-matrix
//! vectorization.
//!
//! Storage is row-major `f64`. Eigenvalue-based quantities (spectral radius,
//! spectral norm) use a dense solver and are meant for sides up to a few
//! hundred; anything larger should go through the matrix-free operators in
//! [`crate::lift`].

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Relative tolerance under which `svec` accepts a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A dense real matrix in row-major order: `data[i * cols + j] = A[i, j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Creates a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData {
                expected: 1,
                got: 0,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidData {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Creates a matrix from row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidData { expected: 1, got: 0 });
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("row of length {cols}"),
                    got: format!("row of length {}", r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Matrix sum. Panics on shape mismatch.
    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix add shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|x| c * x).collect())
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix mul shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let row_out = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                let row_rhs = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in row_out.iter_mut().zip(row_rhs) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on shape mismatch.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matrix apply shape mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, x)| a * x).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
    }

    /// Maximum absolute entrywise deviation from the transpose.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Averages the matrix with its transpose.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }

    /// Largest eigenvalue modulus.
    ///
    /// Dense nonsymmetric solve; accurate to roughly 1e-10 relative for sides
    /// up to a few dozen. The zero matrix returns exactly 0.
    ///
    /// The QR sweep can stall on structured matrices (our lifted sums hit
    /// this), so the Schur iteration is capped and retried under a diagonal
    /// grading similarity; if every attempt stalls the radius comes from
    /// repeated squaring of the normalized matrix, which is hang-free and
    /// accurate far below the advertised tolerance.
    pub fn spectral_radius(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.data.iter().all(|&x| x == 0.0) {
            return Ok(0.0);
        }
        let n = self.rows;
        let m = self.to_na();
        let sweeps = 100 * n.max(10);
        if let Some(r) = schur_radius(m.clone(), sweeps) {
            return Ok(r);
        }
        for beta in [1.01_f64, 1.07] {
            let mut graded = m.clone();
            for i in 0..n {
                for j in 0..n {
                    graded[(i, j)] *= beta.powi(j as i32 - i as i32);
                }
            }
            if let Some(r) = schur_radius(graded, sweeps) {
                return Ok(r);
            }
        }
        Ok(self.radius_by_squaring())
    }

    /// `rho = lim ||M^{2^j}||^{1/2^j}`, evaluated with per-step Frobenius
    /// renormalization. Sixty squarings push the defectivity error factor
    /// `(C k^d)^{1/k}` to one for any practical conditioning.
    fn radius_by_squaring(&self) -> f64 {
        let mut cur = self.to_na();
        let norm0 = cur.norm();
        if norm0 == 0.0 || !norm0.is_finite() {
            return 0.0;
        }
        cur /= norm0;
        let mut log_rho = norm0.ln();
        let mut weight = 0.5f64;
        for _ in 0..60 {
            let squared = &cur * &cur;
            let t = squared.norm();
            if t == 0.0 {
                return 0.0;
            }
            log_rho += weight * t.ln();
            weight *= 0.5;
            cur = squared / t;
        }
        log_rho.exp()
    }

    /// Largest singular value, computed as `sqrt(rho(A^T A))`.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        // Gram matrix is symmetric PSD; use the symmetric solver.
        let gram = self.transpose().mul(self);
        let eig = nalgebra::SymmetricEigen::new(gram.to_na());
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x));
        lmax.max(0.0).sqrt()
    }

    /// Kronecker product: block matrix with `(i, j)` block `A[i, j] * B`.
    pub fn kron(&self, b: &Matrix) -> Matrix {
        let (p1, q1) = (self.rows, self.cols);
        let (p2, q2) = (b.rows, b.cols);
        let mut out = Matrix::zeros(p1 * p2, q1 * q2);
        for i1 in 0..p1 {
            for j1 in 0..q1 {
                let a = self.get(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..p2 {
                    for j2 in 0..q2 {
                        out.data[(i1 * p2 + i2) * q1 * q2 + (j1 * q2 + j2)] = a * b.get(i2, j2);
                    }
                }
            }
        }
        out
    }

    /// k-fold Kronecker power. `k = 1` returns a copy of the matrix.
    ///
    /// Materializes the full matrix, so the resulting side is capped by
    /// `max_side`; larger powers must go through a matrix-free operator.
    pub fn kron_power(&self, k: u32, max_side: usize) -> Result<Matrix> {
        if k == 0 {
            return Err(Error::InvalidData { expected: 1, got: 0 });
        }
        let side = checked_pow(self.rows.max(self.cols), k).unwrap_or(u64::MAX);
        if side > max_side as u64 {
            return Err(Error::Capacity {
                what: format!("Kronecker power side {}^{k}", self.rows.max(self.cols)),
                limit: format!("{max_side} (use a matrix-free operator for larger powers)"),
            });
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.kron(self);
        }
        Ok(out)
    }

    pub(crate) fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_na(m: &DMatrix<f64>) -> Matrix {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Matrix::from_raw(m.nrows(), m.ncols(), data)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

fn schur_radius(m: DMatrix<f64>, max_sweeps: usize) -> Option<f64> {
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, max_sweeps)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max),
    )
}

pub(crate) fn checked_pow(base: usize, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u64)?;
    }
    Some(acc)
}

/// Coordinates of a symmetric `n x n` matrix, length `n(n+1)/2`.
///
/// Ordering is upper-triangular row-major and unscaled:
/// `(x11, x12, ..., x1n, x22, ..., xnn)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymVec {
    n: usize,
    coords: Vec<f64>,
}

impl SymVec {
    pub fn new(n: usize, coords: Vec<f64>) -> Result<Self> {
        let expected = sym_len(n);
        if coords.len() != expected {
            return Err(Error::InvalidData {
                expected,
                got: coords.len(),
            });
        }
        Ok(Self { n, coords })
    }

    pub(crate) fn from_raw(n: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), sym_len(n));
        Self { n, coords }
    }

    /// Side of the underlying symmetric matrix.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// Number of coordinates of a symmetric `n x n` matrix.
#[inline]
pub fn sym_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(i, j)`, `i <= j`, in the fixed svec ordering.
#[inline]
pub(crate) fn sym_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

pub(crate) fn svec_slice(n: usize, x: &[f64], out: &mut [f64]) {
    let mut pos = 0;
    for i in 0..n {
        for j in i..n {
            out[pos] = x[i * n + j];
            pos += 1;
        }
    }
}

pub(crate) fn unsvec_slice(n: usize, v: &[f64], out: &mut [f64]) {
    let mut pos = 0;
    for i in 0..n {
        for j in i..n {
            out[i * n + j] = v[pos];
            out[j * n + i] = v[pos];
            pos += 1;
        }
    }
}

/// Packs a symmetric matrix into its coordinate vector.
///
/// Rejects input whose asymmetry exceeds [`SYMMETRY_TOL`] relative to the
/// largest entry; entries are symmetrized before packing.
pub fn svec(x: &Matrix) -> Result<SymVec> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let scale = x.max_abs();
    let asym = x.asymmetry();
    if asym > SYMMETRY_TOL * scale.max(1e-300) {
        return Err(Error::NotSymmetric {
            asymmetry: asym / scale.max(1e-300),
        });
    }
    let n = x.rows();
    let sym = x.symmetrized();
    let mut coords = vec![0.0; sym_len(n)];
    svec_slice(n, sym.data(), &mut coords);
    Ok(SymVec::from_raw(n, coords))
}

/// Unpacks a coordinate vector back into a symmetric matrix.
pub fn unsvec(v: &SymVec) -> Matrix {
    let n = v.n();
    let mut data = vec![0.0; n * n];
    unsvec_slice(n, v.coords(), &mut data);
    Matrix::from_raw(n, n, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_rows(&[&[a, b], &[c, d]]).unwrap()
    }

    #[test]
    fn construction_validates_shape_and_finiteness() {
        assert!(matches!(
            Matrix::new(2, 2, vec![1.0, 2.0, 3.0]),
            Err(Error::InvalidData { expected: 4, got: 3 })
        ));
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            Matrix::new(1, 1, vec![f64::INFINITY]),
            Err(Error::NonFinite)
        ));
        assert!(Matrix::new(2, 3, vec![0.0; 6]).is_ok());
    }

    #[test]
    fn spectral_radius_identity() {
        let r = Matrix::identity(3).spectral_radius().unwrap();
        assert_relative_eq!(r, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn spectral_radius_nilpotent_is_zero() {
        let r = m2(0.0, 1.0, 0.0, 0.0).spectral_radius().unwrap();
        assert!(r.abs() < 1e-12, "got {r}");
    }

    #[test]
    fn spectral_radius_rank_one() {
        // eigenvalues {0, 2}
        let r = m2(1.0, 1.0, 1.0, 1.0).spectral_radius().unwrap();
        assert_relative_eq!(r, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn spectral_radius_rejects_non_square() {
        let m = Matrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(m.spectral_radius(), Err(Error::NotSquare { rows: 2, cols: 3 })));
    }

    #[test]
    fn spectral_norm_identity_and_diagonal() {
        assert_relative_eq!(Matrix::identity(4).spectral_norm(), 1.0, max_relative = 1e-12);
        let d = m2(3.0, 0.0, 0.0, -2.0);
        assert_relative_eq!(d.spectral_norm(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn spectral_norm_shear() {
        // Frozen from the Gram eigenvalue (3 + sqrt 5)/2; the norm is the
        // golden ratio.
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let norm = m2(1.0, 1.0, 0.0, 1.0).spectral_norm();
        assert_relative_eq!(norm, golden, max_relative = 1e-12);
    }

    #[test]
    fn kron_identity_and_scalar() {
        let i2 = Matrix::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));

        let scalar = Matrix::new(1, 1, vec![2.0]).unwrap();
        let b = m2(1.0, -1.0, 0.5, 3.0);
        assert_eq!(scalar.kron(&b), b.scale(2.0));
    }

    #[test]
    fn kron_power_basics() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a.kron_power(1, 4096).unwrap(), a);
        assert_eq!(a.kron_power(2, 4096).unwrap(), a.kron(&a));
        assert!(matches!(
            a.kron_power(20, 4096),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn svec_ordering_and_length() {
        let v = svec(&Matrix::identity(2)).unwrap();
        assert_eq!(v.coords(), &[1.0, 0.0, 1.0]);

        let x = Matrix::from_rows(&[
            &[1.0, 2.0, 3.0],
            &[2.0, 4.0, 5.0],
            &[3.0, 5.0, 6.0],
        ])
        .unwrap();
        let v = svec(&x).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.coords(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn svec_rejects_asymmetric() {
        let x = m2(1.0, 2.0, 2.5, 1.0);
        assert!(matches!(svec(&x), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn unsvec_svec_round_trip() {
        let x = Matrix::from_rows(&[
            &[0.3, -1.2, 0.0],
            &[-1.2, 2.0, 0.7],
            &[0.0, 0.7, -0.4],
        ])
        .unwrap();
        assert_eq!(unsvec(&svec(&x).unwrap()), x);
    }

    #[test]
    fn radius_by_squaring_agrees_with_eigensolver() {
        let m = Matrix::from_rows(&[
            &[0.9, -0.4, 0.1],
            &[0.3, 0.2, -0.7],
            &[0.0, 0.5, 0.6],
        ])
        .unwrap();
        let by_squaring = m.radius_by_squaring();
        let by_eigen = m.spectral_radius().unwrap();
        assert_relative_eq!(by_squaring, by_eigen, max_relative = 1e-9);

        let jordan = m2(1.0, 1.0, 0.0, 1.0);
        assert_relative_eq!(jordan.radius_by_squaring(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn transpose_of_kron_is_kron_of_transposes() {
        let a = m2(1.0, 2.0, -1.0, 0.5);
        let b = m2(0.0, 1.0, 3.0, -2.0);
        assert_eq!(a.kron(&b).transpose(), a.transpose().kron(&b.transpose()));
    }
}
