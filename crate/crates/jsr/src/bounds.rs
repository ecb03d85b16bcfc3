//! Certified intervals for the joint spectral radius.
//!
//! Every bound family shares one shape: an upper bound `U` from a lifted
//! spectral radius plus a guaranteed relative accuracy `mu` with
//! `mu * U <= rho <= U`. The families differ in the lift and in the
//! hypothesis they need:
//!
//! | method      | accuracy        | needs invariant cone |
//! |-------------|-----------------|----------------------|
//! | `sum`       | `1/m`           | yes                  |
//! | `kron(k)`   | `m^{-1/k}`      | yes                  |
//! | `lift(l)`   | `m^{-1/(2l)}`   | no                   |
//! | `recursive` | `m^{-1/2^d}`    | no                   |
//!
//! Brute-force product bounds and the ellipsoid approximation carry no
//! a-priori accuracy and contribute to [`best_bounds`] with accuracy
//! "unknown".

use crate::bruteforce::{brute_force_bounds, DEFAULT_WORD_BUDGET};
use crate::ellipsoid::{ellipsoid_approx_with_budget, EllipsoidCertificate};
use crate::error::{Error, Result};
use crate::lift::{lifted_dimension, make_operator, Capacity, LiftKind};
use crate::matrix::Matrix;
use crate::operator::{default_max_iter, power_iteration};
use crate::set::MatrixSet;
use serde::{Deserialize, Serialize};

/// Bound-producing method identifier, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Method {
    Sum,
    #[serde(rename = "kron")]
    Kronecker { k: u32 },
    Lift { l: u32 },
    #[serde(rename = "recursive")]
    RecursiveLift { depth: u32 },
    #[serde(rename = "bruteforce")]
    BruteForce { k: u32 },
    Ellipsoid,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Sum => write!(f, "sum"),
            Method::Kronecker { k } => write!(f, "kron(k={k})"),
            Method::Lift { l } => write!(f, "lift(l={l})"),
            Method::RecursiveLift { depth } => write!(f, "recursive(depth={depth})"),
            Method::BruteForce { k } => write!(f, "bruteforce(k={k})"),
            Method::Ellipsoid => write!(f, "ellipsoid"),
        }
    }
}

/// Lower/upper bounds on the joint spectral radius with provenance.
///
/// For the single-method families above, `lower` is exactly
/// `guaranteed_accuracy * upper`; methods without an a-priori rate carry
/// `guaranteed_accuracy = None`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifiedInterval {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub guaranteed_accuracy: Option<f64>,
}

impl CertifiedInterval {
    fn certified(method: Method, upper: f64, accuracy: f64) -> Self {
        Self {
            lower: accuracy * upper,
            upper,
            method,
            guaranteed_accuracy: Some(accuracy),
        }
    }

    fn witnessed(method: Method, lower: f64, upper: f64) -> Self {
        Self {
            lower: lower.min(upper),
            upper,
            method,
            guaranteed_accuracy: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Capacity limits and solver tolerances shared by the bound methods.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Largest vector length for matrix-free operators.
    pub max_operator_dim: usize,
    /// Largest side for dense materializations.
    pub max_dense_side: usize,
    /// Side at or below which the dense eigenvalue solver is used instead of
    /// power iteration.
    pub dense_eig_side: usize,
    /// Enumeration cap for brute-force products.
    pub max_words: u64,
    /// Relative tolerance on successive power-iteration estimates.
    pub power_tol: f64,
    /// Refinement tolerance passed to the ellipsoid approximation.
    pub ellipsoid_tol: f64,
    /// Scheduling caps used by [`best_bounds`] when picking parameters.
    pub auto_max_dim: usize,
    pub auto_kron_k: u32,
    pub auto_lift_l: u32,
    pub auto_recursive_depth: u32,
    pub auto_bruteforce_k: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_operator_dim: 1 << 20,
            max_dense_side: 4096,
            dense_eig_side: 64,
            max_words: DEFAULT_WORD_BUDGET,
            power_tol: 1e-10,
            ellipsoid_tol: 1e-9,
            auto_max_dim: 1 << 16,
            auto_kron_k: 8,
            auto_lift_l: 2,
            auto_recursive_depth: 3,
            auto_bruteforce_k: 10,
        }
    }
}

impl Budget {
    pub fn capacity(&self) -> Capacity {
        Capacity {
            max_operator_dim: self.max_operator_dim,
            max_dense_side: self.max_dense_side,
        }
    }

    /// Caps both the operator dimension and dense side at `dim`.
    pub fn with_dim_cap(mut self, dim: usize) -> Self {
        self.max_operator_dim = dim;
        self.max_dense_side = self.max_dense_side.min(dim);
        self.auto_max_dim = self.auto_max_dim.min(dim);
        self
    }
}

/// Spectral radius of a lifted operator: dense solve for small dimensions,
/// cone-started power iteration above that. Non-convergence is propagated,
/// never silently replaced by a guess.
fn operator_rho(set: &MatrixSet, kind: LiftKind, budget: &Budget) -> Result<f64> {
    let dim = lifted_dimension(set.dim(), kind)?;
    let op = make_operator(set, kind, &budget.capacity())?;
    if dim <= budget.dense_eig_side as u64 {
        op.to_dense().spectral_radius()
    } else {
        let pi = power_iteration(&op, budget.power_tol, default_max_iter(op.dim()));
        if pi.converged {
            Ok(pi.value)
        } else {
            Err(Error::NotConverged {
                iterations: pi.iterations,
            })
        }
    }
}

fn check_hypothesis(set: &MatrixSet) -> Result<()> {
    if set.has_cone_hypothesis() {
        Ok(())
    } else {
        Err(Error::HypothesisUnmet)
    }
}

fn require_param(p: u32) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidData { expected: 1, got: 0 })
    } else {
        Ok(())
    }
}

/// `rho(sum_i alpha_i A_i)`: a lower bound on the joint spectral radius for
/// any matrix set, no cone hypothesis needed.
pub fn lower_bound_average(set: &MatrixSet, weights: &[f64]) -> Result<f64> {
    if weights.len() != set.len() {
        return Err(Error::BadWeights(format!(
            "expected {} weights, got {}",
            set.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::BadWeights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(format!("weights sum to {total}, expected 1")));
    }
    let n = set.dim();
    let mut acc = Matrix::zeros(n, n);
    for (a, &w) in set.matrices().iter().zip(weights) {
        acc = acc.add(&a.scale(w));
    }
    acc.spectral_radius()
}

/// The interval `[rho(sum A_i)/m, rho(sum A_i)]`, accuracy `1/m`.
///
/// The upper bound needs the invariant-cone hypothesis; the lower bound
/// holds unconditionally but is only reported as part of the certified
/// interval here.
pub fn sum_bounds(set: &MatrixSet) -> Result<CertifiedInterval> {
    sum_bounds_with(set, &Budget::default())
}

pub fn sum_bounds_with(set: &MatrixSet, _budget: &Budget) -> Result<CertifiedInterval> {
    let m = set.len();
    if m == 1 {
        let r = set.get(0).spectral_radius()?;
        return Ok(CertifiedInterval::certified(Method::Sum, r, 1.0));
    }
    check_hypothesis(set)?;
    let rho = set.sum().spectral_radius()?;
    Ok(CertifiedInterval::certified(Method::Sum, rho, 1.0 / m as f64))
}

/// `upper = rho^{1/k}(sum_i A_i^{x k})`, accuracy `m^{-1/k}`. Same cone
/// hypothesis as [`sum_bounds`]; the Kronecker sum is evaluated matrix-free
/// above the dense cutover.
pub fn kronecker_bounds(set: &MatrixSet, k: u32) -> Result<CertifiedInterval> {
    kronecker_bounds_with(set, k, &Budget::default())
}

pub fn kronecker_bounds_with(set: &MatrixSet, k: u32, budget: &Budget) -> Result<CertifiedInterval> {
    require_param(k)?;
    let m = set.len();
    let method = Method::Kronecker { k };
    if m == 1 {
        let r = set.get(0).spectral_radius()?;
        return Ok(CertifiedInterval::certified(method, r, 1.0));
    }
    check_hypothesis(set)?;
    let accuracy = (m as f64).powf(-1.0 / k as f64);
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        return Ok(CertifiedInterval::certified(method, 0.0, accuracy));
    }
    let scaled = set.scaled(1.0 / scale);
    let rho = operator_rho(&scaled, LiftKind::KronSum { k }, budget)?;
    let upper = scale * rho.max(0.0).powf(1.0 / k as f64);
    Ok(CertifiedInterval::certified(method, upper, accuracy))
}

/// `upper = rho^{1/(2l)}(sum_i M_{A_i}^{x l})`, accuracy `m^{-1/(2l)}`.
///
/// Works for arbitrary real matrices: the semidefinite lift supplies the
/// invariant cone that the raw set may lack.
pub fn lift_bounds(set: &MatrixSet, l: u32) -> Result<CertifiedInterval> {
    lift_bounds_with(set, l, &Budget::default())
}

pub fn lift_bounds_with(set: &MatrixSet, l: u32, budget: &Budget) -> Result<CertifiedInterval> {
    require_param(l)?;
    let m = set.len();
    let method = Method::Lift { l };
    if m == 1 {
        let r = set.get(0).spectral_radius()?;
        return Ok(CertifiedInterval::certified(method, r, 1.0));
    }
    let accuracy = (m as f64).powf(-1.0 / (2.0 * l as f64));
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        return Ok(CertifiedInterval::certified(method, 0.0, accuracy));
    }
    let scaled = set.scaled(1.0 / scale);
    let kind = if l == 1 { LiftKind::SdpLiftSum } else { LiftKind::LiftThenKron { l } };
    let rho = operator_rho(&scaled, kind, budget)?;
    let upper = scale * rho.max(0.0).powf(1.0 / (2.0 * l as f64));
    Ok(CertifiedInterval::certified(method, upper, accuracy))
}

/// `depth` successive semidefinite lifts: accuracy `(1/m)^{1/2^depth}`.
/// Every intermediate lift is materialized, so deep recursions hit the dense
/// capacity and are refused rather than approximated.
pub fn recursive_lift_bounds(set: &MatrixSet, depth: u32) -> Result<CertifiedInterval> {
    recursive_lift_bounds_with(set, depth, &Budget::default())
}

pub fn recursive_lift_bounds_with(
    set: &MatrixSet,
    depth: u32,
    budget: &Budget,
) -> Result<CertifiedInterval> {
    require_param(depth)?;
    let m = set.len();
    let method = Method::RecursiveLift { depth };
    if m == 1 {
        let r = set.get(0).spectral_radius()?;
        return Ok(CertifiedInterval::certified(method, r, 1.0));
    }
    let exponent = 1.0 / 2f64.powi(depth as i32);
    let accuracy = (1.0 / m as f64).powf(exponent);
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        return Ok(CertifiedInterval::certified(method, 0.0, accuracy));
    }
    let scaled = set.scaled(1.0 / scale);
    let rho = operator_rho(&scaled, LiftKind::Recursive { depth }, budget)?;
    let upper = scale * rho.max(0.0).powf(exponent);
    Ok(CertifiedInterval::certified(method, upper, accuracy))
}

/// Method and parameters chosen for a requested accuracy `1 - epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct ApproximationPlan {
    pub epsilon: f64,
    pub cone_available: bool,
    /// `None` only when every candidate overflows dimension arithmetic.
    pub method: Option<Method>,
    pub guaranteed_accuracy: Option<f64>,
    pub predicted_dim: Option<u64>,
    /// Whether the predicted dimension fits the operator budget.
    pub feasible: bool,
}

/// Picks the cheapest method (by lifted dimension) whose guaranteed accuracy
/// reaches `1 - epsilon`, with the smallest qualifying parameter.
///
/// Kronecker sums compete only when the caller can supply the invariant-cone
/// hypothesis. Ties prefer fewer lift stages: Kronecker, then mixed lift,
/// then recursive. Infeasible plans are returned, not errors.
pub fn plan_accuracy(m: usize, n: usize, epsilon: f64, cone_available: bool) -> Result<ApproximationPlan> {
    plan_accuracy_with(m, n, epsilon, cone_available, &Budget::default())
}

pub fn plan_accuracy_with(
    m: usize,
    n: usize,
    epsilon: f64,
    cone_available: bool,
    budget: &Budget,
) -> Result<ApproximationPlan> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidData { expected: 1, got: 0 });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadWeights(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let target = 1.0 - epsilon;
    if m == 1 {
        // A single matrix is exact at k = 1.
        let dim = n as u64;
        return Ok(ApproximationPlan {
            epsilon,
            cone_available,
            method: Some(Method::Kronecker { k: 1 }),
            guaranteed_accuracy: Some(1.0),
            predicted_dim: Some(dim),
            feasible: dim <= budget.max_operator_dim as u64,
        });
    }

    // Smallest real x with m^{-1/x} = target; each family rounds it up in
    // its own parameter.
    let x = (m as f64).ln() / -target.ln();
    if !x.is_finite() || x > 1e9 {
        return Ok(ApproximationPlan {
            epsilon,
            cone_available,
            method: None,
            guaranteed_accuracy: None,
            predicted_dim: None,
            feasible: false,
        });
    }

    let kron_acc = |k: u32| (m as f64).powf(-1.0 / k as f64);
    let lift_acc = |l: u32| (m as f64).powf(-1.0 / (2.0 * l as f64));
    let rec_acc = |d: u32| (1.0 / m as f64).powf(1.0 / 2f64.powi(d as i32));

    let mut k = (x.ceil() as u32).max(1);
    while kron_acc(k) < target {
        k += 1;
    }
    let mut l = ((x / 2.0).ceil() as u32).max(1);
    while lift_acc(l) < target {
        l += 1;
    }
    let mut d = (x.log2().ceil() as u32).max(1);
    while rec_acc(d) < target {
        d += 1;
    }

    // Priority order implements the tie-break: fewer lift stages first.
    let mut candidates: Vec<(Method, f64)> = Vec::new();
    if cone_available {
        candidates.push((Method::Kronecker { k }, kron_acc(k)));
    }
    candidates.push((Method::Lift { l }, lift_acc(l)));
    candidates.push((Method::RecursiveLift { depth: d }, rec_acc(d)));

    let mut best: Option<(Method, f64, u64)> = None;
    for (method, acc) in candidates {
        let kind = match method {
            Method::Kronecker { k } => LiftKind::KronSum { k },
            Method::Lift { l } => LiftKind::LiftThenKron { l },
            Method::RecursiveLift { depth } => LiftKind::Recursive { depth },
            _ => unreachable!(),
        };
        let Ok(dim) = lifted_dimension(n, kind) else {
            continue;
        };
        match &best {
            Some((_, _, best_dim)) if dim >= *best_dim => {}
            _ => best = Some((method, acc, dim)),
        }
    }

    Ok(match best {
        Some((method, acc, dim)) => ApproximationPlan {
            epsilon,
            cone_available,
            method: Some(method),
            guaranteed_accuracy: Some(acc),
            predicted_dim: Some(dim),
            feasible: dim <= budget.max_operator_dim as u64,
        },
        None => ApproximationPlan {
            epsilon,
            cone_available,
            method: None,
            guaranteed_accuracy: None,
            predicted_dim: None,
            feasible: false,
        },
    })
}

/// Machine-readable reason a method was skipped by [`best_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    HypothesisUnmet,
    Capacity,
    NotConverged,
}

impl From<&Error> for SkipReason {
    fn from(e: &Error) -> Self {
        match e {
            Error::HypothesisUnmet => SkipReason::HypothesisUnmet,
            Error::Capacity { .. } => SkipReason::Capacity,
            _ => SkipReason::NotConverged,
        }
    }
}

/// One method attempt inside [`BestBounds`].
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub outcome: std::result::Result<CertifiedInterval, SkipReason>,
    /// Populated for the ellipsoid method when a certificate was produced.
    pub certificate: Option<EllipsoidCertificate>,
}

/// Intersection of every applicable method's interval, with provenance.
#[derive(Debug, Clone)]
pub struct BestBounds {
    pub runs: Vec<MethodRun>,
    pub lower: f64,
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
}

/// Runs every method that fits the budget and intersects the certified
/// intervals: the combined lower bound is the max of lowers, the combined
/// upper the min of uppers. Methods that error are recorded as skipped with
/// a reason and never invalidate the combination. Evaluation order and
/// parameters are deterministic for a fixed budget.
pub fn best_bounds(set: &MatrixSet, budget: &Budget) -> BestBounds {
    let m = set.len();
    let n = set.dim();

    let mut schedule: Vec<Method> = Vec::new();
    let bf_k = {
        let mut k = 1u32;
        for cand in 2..=budget.auto_bruteforce_k {
            match crate::matrix::checked_pow(m, cand) {
                Some(words) if words <= budget.max_words => k = cand,
                _ => break,
            }
        }
        k
    };
    schedule.push(Method::BruteForce { k: bf_k });
    schedule.push(Method::Sum);
    if let Some(k) = largest_param(budget.auto_kron_k, |k| {
        lifted_dimension(n, LiftKind::KronSum { k })
            .map(|d| d <= budget.auto_max_dim as u64)
            .unwrap_or(false)
    }) {
        schedule.push(Method::Kronecker { k });
    }
    if let Some(l) = largest_param(budget.auto_lift_l, |l| {
        let kind = if l == 1 { LiftKind::SdpLiftSum } else { LiftKind::LiftThenKron { l } };
        lifted_dimension(n, kind)
            .map(|d| d <= budget.auto_max_dim as u64)
            .unwrap_or(false)
    }) {
        schedule.push(Method::Lift { l });
    }
    if let Some(depth) = largest_param(budget.auto_recursive_depth, |depth| {
        lifted_dimension(n, LiftKind::Recursive { depth })
            .map(|d| d <= budget.auto_max_dim.min(budget.max_dense_side) as u64)
            .unwrap_or(false)
    }) {
        schedule.push(Method::RecursiveLift { depth });
    }
    schedule.push(Method::Ellipsoid);

    let mut runs: Vec<MethodRun> = Vec::new();
    for method in schedule {
        let mut certificate = None;
        let outcome = match method {
            Method::BruteForce { k } => brute_force_bounds(set, k, budget.max_words.max(m as u64))
                .map(|(lo, hi)| CertifiedInterval::witnessed(method, lo, hi)),
            Method::Sum => sum_bounds_with(set, budget),
            Method::Kronecker { k } => kronecker_bounds_with(set, k, budget),
            Method::Lift { l } => lift_bounds_with(set, l, budget),
            Method::RecursiveLift { depth } => recursive_lift_bounds_with(set, depth, budget),
            Method::Ellipsoid => {
                ellipsoid_approx_with_budget(set, budget.ellipsoid_tol, &budget.capacity()).map(
                    |(rho_hat, cert)| {
                        certificate = Some(cert);
                        // Theorem-backed lower companion of the certified
                        // upper bound: rho >= rho_hat / sqrt(m) because
                        // rho_hat never exceeds the lifted-sum radius.
                        let lower = rho_hat / (m as f64).sqrt();
                        CertifiedInterval::witnessed(method, lower, rho_hat)
                    },
                )
            }
        };
        runs.push(MethodRun {
            method,
            outcome: outcome.map_err(|e| SkipReason::from(&e)),
            certificate,
        });
    }

    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut lower_method = Method::BruteForce { k: bf_k };
    let mut upper_method = lower_method;
    for run in &runs {
        if let Ok(interval) = &run.outcome {
            if interval.lower > lower {
                lower = interval.lower;
                lower_method = run.method;
            }
            if interval.upper < upper {
                upper = interval.upper;
                upper_method = run.method;
            }
        }
    }
    if !lower.is_finite() || !upper.is_finite() {
        // Every scheduled method failed; fall back to the k = 1 product
        // bounds, which only need per-matrix radii and norms.
        let lo = set
            .matrices()
            .iter()
            .map(|a| a.spectral_radius().unwrap_or(0.0))
            .fold(0.0, f64::max);
        let hi = set.max_spectral_norm();
        lower = lo;
        upper = hi;
        lower_method = Method::BruteForce { k: 1 };
        upper_method = Method::BruteForce { k: 1 };
        runs.push(MethodRun {
            method: Method::BruteForce { k: 1 },
            outcome: Ok(CertifiedInterval::witnessed(Method::BruteForce { k: 1 }, lo, hi)),
            certificate: None,
        });
    }
    lower = lower.min(upper);

    BestBounds {
        runs,
        lower,
        upper,
        lower_method,
        upper_method,
    }
}

fn largest_param(cap: u32, fits: impl Fn(u32) -> bool) -> Option<u32> {
    (1..=cap).rev().find(|&p| fits(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn set_of(rows: &[&[&[f64]]]) -> MatrixSet {
        MatrixSet::new(rows.iter().map(|r| Matrix::from_rows(r).unwrap()).collect()).unwrap()
    }

    fn fib_pair() -> MatrixSet {
        set_of(&[&[&[1.0, 1.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[1.0, 1.0]]])
    }

    #[test]
    fn average_single_matrix_is_its_radius() {
        let a = Matrix::from_rows(&[&[0.0, 2.0], &[0.5, 0.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        assert_relative_eq!(
            lower_bound_average(&set, &[1.0]).unwrap(),
            a.spectral_radius().unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn average_of_opposite_pair_vanishes() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, -1.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone(), a.scale(-1.0)]).unwrap();
        let r = lower_bound_average(&set, &[0.5, 0.5]).unwrap();
        assert!(r.abs() < 1e-12, "got {r}");
    }

    #[test]
    fn average_fibonacci_pair() {
        // rho([[1, .5], [.5, 1]]) = 1.5, frozen from the 2x2 eigenvalues.
        let r = lower_bound_average(&fib_pair(), &[0.5, 0.5]).unwrap();
        assert_relative_eq!(r, 1.5, max_relative = 1e-12);
    }

    #[test]
    fn average_rejects_bad_weights() {
        let set = fib_pair();
        assert!(matches!(lower_bound_average(&set, &[1.0]), Err(Error::BadWeights(_))));
        assert!(matches!(
            lower_bound_average(&set, &[0.7, 0.7]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            lower_bound_average(&set, &[-0.5, 1.5]),
            Err(Error::BadWeights(_))
        ));
    }

    #[test]
    fn sum_bounds_identity_pair() {
        let set = set_of(&[&[&[1.0, 0.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[0.0, 1.0]]]);
        let interval = sum_bounds(&set).unwrap();
        assert_relative_eq!(interval.lower, 1.0, max_relative = 1e-12);
        assert_relative_eq!(interval.upper, 2.0, max_relative = 1e-12);
        assert_eq!(interval.guaranteed_accuracy, Some(0.5));
    }

    #[test]
    fn sum_bounds_single_matrix_is_exact_without_hypothesis() {
        let a = Matrix::from_rows(&[&[0.0, -2.0], &[1.0, 0.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        let interval = sum_bounds(&set).unwrap();
        let r = a.spectral_radius().unwrap();
        assert_relative_eq!(interval.lower, r, max_relative = 1e-10);
        assert_relative_eq!(interval.upper, r, max_relative = 1e-10);
    }

    #[test]
    fn sum_bounds_requires_hypothesis() {
        let a = Matrix::from_rows(&[&[1.0, -1.0], &[0.0, 1.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone(), a]).unwrap();
        assert!(matches!(sum_bounds(&set), Err(Error::HypothesisUnmet)));
        let asserted = MatrixSet::new(vec![
            Matrix::from_rows(&[&[1.0, -1.0], &[0.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[&[1.0, -1.0], &[0.0, 1.0]]).unwrap(),
        ])
        .unwrap()
        .with_cone_asserted(true);
        assert!(sum_bounds(&asserted).is_ok());
    }

    #[test]
    fn kronecker_accuracy_ladder() {
        let set = fib_pair();
        for (k, expected) in [(2u32, 0.707), (4, 0.840), (8, 0.917), (16, 0.957)] {
            let acc = (2f64).powf(-1.0 / k as f64);
            assert!((acc - expected).abs() < 1e-3, "k={k}: {acc} vs {expected}");
            if k <= 8 {
                let interval = kronecker_bounds(&set, k).unwrap();
                assert_relative_eq!(
                    interval.guaranteed_accuracy.unwrap(),
                    acc,
                    max_relative = 1e-15
                );
                assert_relative_eq!(interval.lower, acc * interval.upper, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn kronecker_diagonal_pair_brackets_three() {
        let set = set_of(&[&[&[2.0, 0.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[0.0, 3.0]]]);
        let interval = kronecker_bounds(&set, 6).unwrap();
        assert!(interval.upper >= 3.0 - 1e-9, "upper {}", interval.upper);
        assert!(
            interval.upper <= 3.0 * 2f64.powf(1.0 / 6.0) + 1e-9,
            "upper {}",
            interval.upper
        );
    }

    #[test]
    fn lift_bounds_on_sign_flipped_pair_is_tight_below() {
        let a = Matrix::from_rows(&[&[0.6, -1.1], &[0.4, 0.2]]).unwrap();
        let set = MatrixSet::new(vec![a.clone(), a.scale(-1.0)]).unwrap();
        let interval = lift_bounds(&set, 1).unwrap();
        let rho_a = a.spectral_radius().unwrap();
        // M_{-A} = M_A, so the lifted sum is 2 M_A and the lower bound hits
        // rho(A) exactly while the upper is sqrt(2) rho(A).
        assert_relative_eq!(interval.lower, rho_a, max_relative = 1e-8);
        assert_relative_eq!(interval.upper, 2f64.sqrt() * rho_a, max_relative = 1e-8);
    }

    #[test]
    fn recursive_depth_one_equals_lift_one() {
        let set = fib_pair();
        let lift = lift_bounds(&set, 1).unwrap();
        let rec = recursive_lift_bounds(&set, 1).unwrap();
        assert_relative_eq!(lift.upper, rec.upper, max_relative = 1e-10);
        assert_relative_eq!(lift.lower, rec.lower, max_relative = 1e-10);
    }

    #[test]
    fn recursive_accuracy_ladder() {
        let set = fib_pair();
        let expected = [0.707, 0.840, 0.917, 0.957, 0.978];
        for (depth, &target) in (1u32..=5).zip(&expected) {
            let acc = (0.5f64).powf(1.0 / 2f64.powi(depth as i32));
            assert!((acc - target).abs() < 1e-3, "depth={depth}");
            if depth <= 3 {
                let interval = recursive_lift_bounds(&set, depth).unwrap();
                assert_relative_eq!(interval.guaranteed_accuracy.unwrap(), acc, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn plan_single_matrix_is_exact() {
        let plan = plan_accuracy(1, 7, 0.5, false).unwrap();
        assert_eq!(plan.method, Some(Method::Kronecker { k: 1 }));
        assert_eq!(plan.guaranteed_accuracy, Some(1.0));
        assert_eq!(plan.predicted_dim, Some(7));
        assert!(plan.feasible);
    }

    #[test]
    fn plan_two_matrices_seventy_percent() {
        // One semidefinite lift already reaches 1/sqrt(2) ~ 0.707 at the
        // smallest dimension n(n+1)/2, beating the n^2 Kronecker square.
        let plan = plan_accuracy(2, 5, 0.3, true).unwrap();
        assert_eq!(plan.method, Some(Method::Lift { l: 1 }));
        assert_eq!(plan.predicted_dim, Some(15));
        assert!(plan.guaranteed_accuracy.unwrap() >= 0.7);
        assert!(plan.feasible);
    }

    #[test]
    fn plan_three_matrices_ninety_five_percent() {
        let plan = plan_accuracy(3, 5, 0.05, true).unwrap();
        let acc = plan.guaranteed_accuracy.unwrap();
        assert!(acc >= 0.95, "accuracy {acc}");
        // Mixed lift with l = 11: dimension 15^11, far beyond the default
        // budget, hence reported infeasible rather than thrown.
        assert_eq!(plan.method, Some(Method::Lift { l: 11 }));
        assert_eq!(plan.predicted_dim, Some(8_649_755_859_375));
        assert!(!plan.feasible);
    }

    #[test]
    fn plan_rejects_bad_epsilon() {
        assert!(plan_accuracy(2, 3, 0.0, true).is_err());
        assert!(plan_accuracy(2, 3, 1.0, true).is_err());
    }

    #[test]
    fn best_bounds_single_matrix_collapses() {
        let a = Matrix::from_rows(&[&[0.3, 0.8], &[0.2, 0.5]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        let best = best_bounds(&set, &Budget::default());
        let r = a.spectral_radius().unwrap();
        assert_relative_eq!(best.lower, r, max_relative = 1e-8);
        assert_relative_eq!(best.upper, r, max_relative = 1e-8);
        assert!(best.lower <= best.upper);
    }

    #[test]
    fn best_bounds_skips_sum_without_hypothesis() {
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone(), a.transpose()]).unwrap();
        let best = best_bounds(&set, &Budget::default());
        let sum_run = best.runs.iter().find(|r| r.method == Method::Sum).unwrap();
        assert_eq!(sum_run.outcome.as_ref().err(), Some(&SkipReason::HypothesisUnmet));
        assert!(best.lower <= best.upper);
    }
}
