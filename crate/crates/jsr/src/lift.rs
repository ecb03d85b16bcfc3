//! Semidefinite and Kronecker liftings, dense and matrix-free.
//!
//! The semidefinite lift `M_A` represents `X -> A X A^T` restricted to
//! symmetric matrices in the unscaled svec coordinates; its spectral radius
//! is the square of the spectral radius of `A`, and it keeps the positive
//! semidefinite cone invariant. Dense construction is column-by-column via
//! the action on the symmetric basis `E_ii`, `E_ij + E_ji`.
//!
//! Large lifted sums are never materialized: [`make_operator`] returns a
//! matrix-free [`LinearOperator`] whose Kronecker-power action costs
//! `O(m k n^{k+1})` per apply instead of the `O(m n^{2k})` dense product.

use crate::error::{Error, Result};
use crate::matrix::{checked_pow, sym_index, sym_len, svec_slice, unsvec_slice, Matrix, SymVec};
use crate::operator::LinearOperator;
use crate::set::MatrixSet;

/// Materialization and operator-size limits for lift construction.
#[derive(Debug, Clone, Copy)]
pub struct Capacity {
    /// Largest vector length a matrix-free operator may act on.
    pub max_operator_dim: usize,
    /// Largest side for dense materialization (lifted matrices, Kronecker
    /// powers, recursive lift levels).
    pub max_dense_side: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Self {
            max_operator_dim: 1 << 20,
            max_dense_side: 4096,
        }
    }
}

/// The lifted-operator families.
///
/// Parameters follow the accuracy ladders: `KronSum` gives relative accuracy
/// `m^{-1/k}` (needs an invariant cone), `SdpLiftSum` gives `m^{-1/2}`,
/// `LiftThenKron`/`KronThenLift` give `m^{-1/(2l)}`, and `Recursive` gives
/// `m^{-1/2^depth}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    /// `v -> sum_i A_i^{x k} v`, dimension `n^k`.
    KronSum { k: u32 },
    /// `svec(X) -> svec(sum_i A_i X A_i^T)`, dimension `n(n+1)/2`.
    SdpLiftSum,
    /// `sum_i M_{A_i}^{x l}`, dimension `(n(n+1)/2)^l`. The cheaper of the
    /// two mixed modes: the lifts are taken of the small matrices.
    LiftThenKron { l: u32 },
    /// `sum_i M_{A_i^{x l}}`, dimension `n^l (n^l + 1)/2`.
    KronThenLift { l: u32 },
    /// Semidefinite lift applied `depth` times, then summed. Dimension
    /// follows `n_{j+1} = n_j (n_j + 1)/2`.
    Recursive { depth: u32 },
}

/// Exact operator dimension for a lift kind on `n x n` inputs.
pub fn lifted_dimension(n: usize, kind: LiftKind) -> Result<u64> {
    let overflow = |what: String| Error::Capacity {
        what,
        limit: "u64 arithmetic".to_string(),
    };
    let nn = n as u64;
    match kind {
        LiftKind::KronSum { k } => {
            require_positive(k)?;
            checked_pow(n, k).ok_or_else(|| overflow(format!("{n}^{k}")))
        }
        LiftKind::SdpLiftSum => Ok(sym_len(n) as u64),
        LiftKind::LiftThenKron { l } => {
            require_positive(l)?;
            checked_pow(sym_len(n), l)
                .ok_or_else(|| overflow(format!("({}({}+1)/2)^{l}", n, n)))
        }
        LiftKind::KronThenLift { l } => {
            require_positive(l)?;
            let p = checked_pow(n, l).ok_or_else(|| overflow(format!("{n}^{l}")))?;
            p.checked_mul(p + 1)
                .map(|x| x / 2)
                .ok_or_else(|| overflow(format!("{n}^{l}({n}^{l}+1)/2")))
        }
        LiftKind::Recursive { depth } => {
            require_positive(depth)?;
            let mut side = nn;
            for level in 1..=depth {
                side = side
                    .checked_mul(side + 1)
                    .map(|x| x / 2)
                    .ok_or_else(|| overflow(format!("recursion n_{{l+1}}=n_l(n_l+1)/2 at level {level} from n={n}")))?;
            }
            Ok(side)
        }
    }
}

fn require_positive(param: u32) -> Result<()> {
    if param == 0 {
        Err(Error::InvalidData { expected: 1, got: 0 })
    } else {
        Ok(())
    }
}

/// Dense matrix of the operator `X -> A X A^T` on symmetric matrices,
/// side `n(n+1)/2`.
///
/// Column `(i, j)` is `svec(A B A^T)` for the basis element `B = E_ii` or
/// `E_ij + E_ji`; since `(A E_ij A^T)[r, c] = A[r, i] A[c, j]` the columns
/// are sums of outer products of columns of `A`. For a 2x2 input this gives
/// exactly
///
/// ```text
/// [ a11^2     2 a11 a12          a12^2   ]
/// [ a11 a21   a11 a22 + a12 a21  a12 a22 ]
/// [ a21^2     2 a21 a22          a22^2   ]
/// ```
pub fn sdp_lift(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let big_n = sym_len(n);
    let mut m = Matrix::zeros(big_n, big_n);
    for i in 0..n {
        for j in i..n {
            let col = sym_index(n, i, j);
            // svec of outer(A[:,i], A[:,j]) + outer(A[:,j], A[:,i]),
            // halved on the diagonal basis element.
            for r in 0..n {
                for c in r..n {
                    let row = sym_index(n, r, c);
                    let value = if i == j {
                        a.get(r, i) * a.get(c, i)
                    } else {
                        a.get(r, i) * a.get(c, j) + a.get(r, j) * a.get(c, i)
                    };
                    m.set(row, col, value);
                }
            }
        }
    }
    Ok(m)
}

/// `sum_i M_{A_i}` materialized densely.
pub fn lift_sum_dense(set: &MatrixSet, max_side: usize) -> Result<Matrix> {
    let n = set.dim();
    let big_n = sym_len(n);
    if big_n > max_side {
        return Err(Error::Capacity {
            what: format!("lifted side {n}({n}+1)/2 = {big_n}"),
            limit: format!("{max_side} (build a matrix-free operator instead)"),
        });
    }
    let mut acc = Matrix::zeros(big_n, big_n);
    for a in set.matrices() {
        acc = acc.add(&sdp_lift(a)?);
    }
    Ok(acc)
}

/// Applies `A^{x k}` to `v` without materializing the Kronecker power.
///
/// Each of the `k` rounds reshapes the length-`n^k` vector to an
/// `n x n^{k-1}` row-major matrix, left-multiplies by `A`, and rotates the
/// tensor axes so the next factor comes first. After `k` rounds every factor
/// has been hit once and the axis order is restored.
pub(crate) fn kron_power_apply(a: &Matrix, k: u32, v: &[f64]) -> Vec<f64> {
    let n = a.rows();
    debug_assert_eq!(v.len() as u64, checked_pow(n, k).unwrap());
    if n == 1 {
        let c = a.get(0, 0).powi(k as i32);
        return v.iter().map(|x| c * x).collect();
    }
    let cols = v.len() / n;
    let mut cur = v.to_vec();
    let mut tmp = vec![0.0; v.len()];
    let mut out = vec![0.0; v.len()];
    for _ in 0..k {
        tmp.iter_mut().for_each(|x| *x = 0.0);
        for r in 0..n {
            for j in 0..n {
                let arj = a.get(r, j);
                if arj == 0.0 {
                    continue;
                }
                let dst = &mut tmp[r * cols..(r + 1) * cols];
                let src = &cur[j * cols..(j + 1) * cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += arj * s;
                }
            }
        }
        for r in 0..n {
            for c in 0..cols {
                out[c * n + r] = tmp[r * cols + c];
            }
        }
        std::mem::swap(&mut cur, &mut out);
    }
    cur
}

/// `svec(X) -> svec(sum_i A_i X A_i^T)` evaluated through dense `n x n`
/// products, never forming the lifted matrices.
fn sdp_lift_sum_apply(matrices: &[Matrix], n: usize, v: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n * n];
    unsvec_slice(n, v, &mut x);
    let xm = Matrix::from_raw(n, n, x);
    let mut acc = Matrix::zeros(n, n);
    for a in matrices {
        acc = acc.add(&a.mul(&xm).mul(&a.transpose()));
    }
    // A X A^T of symmetric X is symmetric up to rounding.
    let acc = acc.symmetrized();
    let mut out = vec![0.0; sym_len(n)];
    svec_slice(n, acc.data(), &mut out);
    out
}

/// svec of the identity: the canonical interior point of the PSD cone.
fn svec_identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; sym_len(n)];
    for i in 0..n {
        v[sym_index(n, i, i)] = 1.0;
    }
    v
}

fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_operator_dim(dim: u64, cap: &Capacity, what: &str) -> Result<usize> {
    if dim > cap.max_operator_dim as u64 {
        return Err(Error::Capacity {
            what: format!("{what} dimension {dim}"),
            limit: format!("{}", cap.max_operator_dim),
        });
    }
    Ok(dim as usize)
}

/// Builds the matrix-free operator for a lift kind over a matrix set.
///
/// The returned operator carries `cone_invariant = true` together with the
/// interior start vector of the relevant cone: the all-ones vector for the
/// orthant (Kronecker sums over a cone-hypothesis set), `svec(I)` and its
/// Kronecker powers for the PSD cone. Dense materialization of the result
/// agrees with the explicit constructions on small instances.
pub fn make_operator(set: &MatrixSet, kind: LiftKind, cap: &Capacity) -> Result<LinearOperator> {
    let n = set.dim();
    let dim_u64 = lifted_dimension(n, kind)?;
    match kind {
        LiftKind::KronSum { k } => {
            let dim = check_operator_dim(dim_u64, cap, "Kronecker sum")?;
            let matrices: Vec<Matrix> = set.matrices().to_vec();
            let cone = set.is_nonnegative() || set.is_cone_asserted();
            Ok(LinearOperator::new(dim, cone, vec![1.0; dim], move |v| {
                let mut acc = vec![0.0; v.len()];
                for a in &matrices {
                    let w = kron_power_apply(a, k, v);
                    for (x, y) in acc.iter_mut().zip(&w) {
                        *x += y;
                    }
                }
                acc
            }))
        }
        LiftKind::SdpLiftSum => {
            let dim = check_operator_dim(dim_u64, cap, "semidefinite lift sum")?;
            let matrices: Vec<Matrix> = set.matrices().to_vec();
            Ok(LinearOperator::new(dim, true, svec_identity(n), move |v| {
                sdp_lift_sum_apply(&matrices, n, v)
            }))
        }
        LiftKind::LiftThenKron { l } => {
            let dim = check_operator_dim(dim_u64, cap, "lift-then-Kronecker")?;
            let big_n = sym_len(n);
            if big_n > cap.max_dense_side {
                return Err(Error::Capacity {
                    what: format!("lifted side {big_n}"),
                    limit: format!("{}", cap.max_dense_side),
                });
            }
            let lifts: Vec<Matrix> = set
                .matrices()
                .iter()
                .map(sdp_lift)
                .collect::<Result<_>>()?;
            let mut start = svec_identity(n);
            let base = start.clone();
            for _ in 1..l {
                start = kron_vec(&start, &base);
            }
            Ok(LinearOperator::new(dim, true, start, move |v| {
                let mut acc = vec![0.0; v.len()];
                for m in &lifts {
                    let w = kron_power_apply(m, l, v);
                    for (x, y) in acc.iter_mut().zip(&w) {
                        *x += y;
                    }
                }
                acc
            }))
        }
        LiftKind::KronThenLift { l } => {
            let dim = check_operator_dim(dim_u64, cap, "Kronecker-then-lift")?;
            let p = checked_pow(n, l).unwrap() as usize;
            let matrices: Vec<Matrix> = set.matrices().to_vec();
            // Apply X -> B X B^T with B = A^{x l} by streaming B over the
            // columns of X and of (B X)^T; X is about two vectors of memory.
            Ok(LinearOperator::new(dim, true, svec_identity(p), move |v| {
                let mut x = vec![0.0; p * p];
                unsvec_slice(p, v, &mut x);
                let mut acc = vec![0.0; p * p];
                for a in &matrices {
                    let w = apply_kron_congruence(a, l, p, &x);
                    for (s, y) in acc.iter_mut().zip(&w) {
                        *s += y;
                    }
                }
                // symmetrize before packing
                for i in 0..p {
                    for j in (i + 1)..p {
                        let m = 0.5 * (acc[i * p + j] + acc[j * p + i]);
                        acc[i * p + j] = m;
                        acc[j * p + i] = m;
                    }
                }
                let mut out = vec![0.0; sym_len(p)];
                svec_slice(p, &acc, &mut out);
                out
            }))
        }
        LiftKind::Recursive { depth } => {
            let dim = check_operator_dim(dim_u64, cap, "recursive lift")?;
            let levels = recursive_lift_matrices(set, depth, cap)?;
            let side = levels[0].rows();
            debug_assert_eq!(side, dim);
            // Interior start: svec(I) of the previous level's side.
            let prev = if depth == 1 {
                n
            } else {
                lifted_dimension(n, LiftKind::Recursive { depth: depth - 1 })? as usize
            };
            Ok(LinearOperator::new(dim, true, svec_identity(prev), move |v| {
                let mut acc = vec![0.0; v.len()];
                for m in &levels {
                    let w = m.apply(v);
                    for (x, y) in acc.iter_mut().zip(&w) {
                        *x += y;
                    }
                }
                acc
            }))
        }
    }
}

/// Computes `B X B^T` with `B = A^{x l}` matrix-free, for `X` of side
/// `p = n^l` given row-major.
fn apply_kron_congruence(a: &Matrix, l: u32, p: usize, x: &[f64]) -> Vec<f64> {
    // W = B X, column by column. X's column j is x[.., j] with stride p.
    let mut w = vec![0.0; p * p];
    let mut col = vec![0.0; p];
    for j in 0..p {
        for i in 0..p {
            col[i] = x[i * p + j];
        }
        let bj = kron_power_apply(a, l, &col);
        for i in 0..p {
            w[i * p + j] = bj[i];
        }
    }
    // Y = W B^T = (B W^T)^T.
    let mut y = vec![0.0; p * p];
    for i in 0..p {
        // row i of W is column i of W^T
        let row = &w[i * p..(i + 1) * p];
        let bi = kron_power_apply(a, l, row);
        for j in 0..p {
            y[i * p + j] = bi[j];
        }
    }
    y
}

/// Materializes `depth` successive semidefinite lifts of every matrix in the
/// set. Each intermediate side must stay within dense capacity; the refusal
/// names the offending side.
pub(crate) fn recursive_lift_matrices(
    set: &MatrixSet,
    depth: u32,
    cap: &Capacity,
) -> Result<Vec<Matrix>> {
    require_positive(depth)?;
    let mut current: Vec<Matrix> = set.matrices().to_vec();
    let mut side = set.dim();
    for level in 1..=depth {
        let next_side = sym_len(side);
        if next_side > cap.max_dense_side {
            return Err(Error::Capacity {
                what: format!("recursive lift level {level} side n_{level} = {next_side}"),
                limit: format!("{}", cap.max_dense_side),
            });
        }
        current = current.iter().map(sdp_lift).collect::<Result<_>>()?;
        side = next_side;
    }
    Ok(current)
}

/// A lift request bound to its source set; `dim` is derived from the kind.
#[derive(Debug, Clone)]
pub struct LiftedOperatorSpec {
    pub source: MatrixSet,
    pub kind: LiftKind,
}

impl LiftedOperatorSpec {
    pub fn new(source: MatrixSet, kind: LiftKind) -> Self {
        Self { source, kind }
    }

    pub fn dim(&self) -> Result<u64> {
        lifted_dimension(self.source.dim(), self.kind)
    }

    pub fn build(&self, cap: &Capacity) -> Result<LinearOperator> {
        make_operator(&self.source, self.kind, cap)
    }
}

/// Convenience: svec of the identity as a [`SymVec`].
pub fn psd_interior_start(n: usize) -> SymVec {
    SymVec::from_raw(n, svec_identity(n))
}
