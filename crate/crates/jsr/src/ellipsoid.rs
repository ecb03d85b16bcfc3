//! Ellipsoid-norm approximation with verifiable certificates.
//!
//! A pair `(X, tau)` with `X` positive definite and
//! `tau X - A_i X A_i^T` positive semidefinite for every `i` proves
//! `rho(A_1, ..., A_m) <= sqrt(tau)`: the quadratic form `v^T X^{-1} v` is a
//! common Lyapunov function scaled by `tau` per step. Everything this module
//! reports is backed by such a certificate and re-checked a posteriori by
//! [`verify_certificate`]; the search heuristics can only lose tightness,
//! never soundness.
//!
//! No external SDP solver is involved. The starting certificate comes from
//! the Perron eigenvector of the lifted sum `sum_i M_{A_i}` (started at
//! `svec(I)`, hence inside the PSD cone), and refinement runs bisection on
//! `tau` with a projected subgradient search for a feasible `X` at each
//! level. A different feasibility search (for example an interior-point SDP
//! backend) can be plugged in through [`FeasibilityBackend`].

use crate::error::{Error, Result};
use crate::lift::{lifted_dimension, make_operator, Capacity, LiftKind};
use crate::matrix::{unsvec, Matrix, SymVec};
use crate::operator::{default_max_iter, power_iteration};
use crate::set::MatrixSet;
use nalgebra::SymmetricEigen;

/// Positive-definiteness floor: `lambda_min(X) >= PD_FLOOR * trace(X)/n`.
pub const PD_FLOOR: f64 = 1e-9;
/// Constraint tolerance: `lambda_min(tau X - A_i X A_i^T) >= -PSD_TOL * tau * ||X||`.
pub const PSD_TOL: f64 = 1e-9;

const BISECTION_LEVELS: usize = 20;
const SUBGRADIENT_STEPS: usize = 500;

/// A witness for `rho <= sqrt(tau)`.
#[derive(Debug, Clone)]
pub struct EllipsoidCertificate {
    /// Positive definite shape matrix of the ellipsoid norm.
    pub x: Matrix,
    pub tau: f64,
    /// Minimum eigenvalue margin over all constraints, scaled by
    /// `tau * ||X||`.
    pub slack: f64,
}

/// Outcome of an a-posteriori certificate check.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub valid: bool,
    /// `lambda_min(X) - PD_FLOOR * trace(X)/n`.
    pub pd_margin: f64,
    /// Raw `lambda_min(tau X - A_i X A_i^T)` per matrix.
    pub constraint_margins: Vec<f64>,
    /// Minimum constraint margin scaled by `tau * ||X||`.
    pub scaled_slack: f64,
}

fn sym_eigen(x: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(x.symmetrized().to_na());
    let values = eig.eigenvalues.iter().copied().collect();
    (values, Matrix::from_na(&eig.eigenvectors))
}

fn lambda_min_max(x: &Matrix) -> (f64, f64) {
    let (values, _) = sym_eigen(x);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Checks the certificate invariants at the configured tolerances and
/// reports the eigenvalue margin of every constraint.
pub fn verify_certificate(set: &MatrixSet, cert: &EllipsoidCertificate) -> Result<CertificateReport> {
    let n = set.dim();
    if cert.x.rows() != n || cert.x.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", cert.x.rows(), cert.x.cols()),
        });
    }
    let x = cert.x.symmetrized();
    let (xmin, xmax) = lambda_min_max(&x);
    let trace = x.trace();
    let pd_margin = xmin - PD_FLOOR * trace / n as f64;

    let mut constraint_margins = Vec::with_capacity(set.len());
    let mut worst = f64::INFINITY;
    for a in set.matrices() {
        let axa = a.mul(&x).mul(&a.transpose());
        let s = x.scale(cert.tau).add(&axa.scale(-1.0));
        let (smin, _) = lambda_min_max(&s);
        worst = worst.min(smin);
        constraint_margins.push(smin);
    }
    let scale = (cert.tau * xmax).abs().max(f64::MIN_POSITIVE);
    let scaled_slack = worst / scale;
    let valid = pd_margin >= 0.0 && worst >= -PSD_TOL * scale;
    Ok(CertificateReport {
        valid,
        pd_margin,
        constraint_margins,
        scaled_slack,
    })
}

/// `rho^{1/2}(sum_i M_{A_i})`: the l = 1 lifted upper bound on the joint
/// spectral radius, valid for arbitrary real matrices.
pub fn lifted_sum_radius(set: &MatrixSet) -> Result<f64> {
    lifted_sum_radius_with(set, &Capacity::default())
}

pub fn lifted_sum_radius_with(set: &MatrixSet, cap: &Capacity) -> Result<f64> {
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let scaled = set.scaled(1.0 / scale);
    let rho = lifted_rho(&scaled, cap)?;
    Ok(scale * rho.max(0.0).sqrt())
}

/// Spectral radius of the lifted sum of an (already scaled) set.
fn lifted_rho(scaled: &MatrixSet, cap: &Capacity) -> Result<f64> {
    let n = scaled.dim();
    let dim = lifted_dimension(n, LiftKind::SdpLiftSum)?;
    let op = make_operator(scaled, LiftKind::SdpLiftSum, cap)?;
    if dim <= 64 {
        op.to_dense().spectral_radius()
    } else {
        let pi = power_iteration(&op, 1e-12, default_max_iter(op.dim()));
        if pi.converged {
            Ok(pi.value)
        } else {
            Err(Error::NotConverged { iterations: pi.iterations })
        }
    }
}

/// Minimal feasible `tau` for a fixed positive definite `X`, computed
/// through the Cholesky change of basis: with `X = L L^T`,
/// `tau(X) = max_i ||L^{-1} A_i L||^2`.
fn minimal_tau(set: &MatrixSet, x: &Matrix) -> Option<f64> {
    let chol = nalgebra::Cholesky::new(x.symmetrized().to_na())?;
    let l = chol.l();
    let mut tau = 0.0f64;
    for a in set.matrices() {
        let al = a.to_na() * &l;
        let g = l.solve_lower_triangular(&al)?;
        let norm = Matrix::from_na(&g).spectral_norm();
        tau = tau.max(norm * norm);
    }
    Some(tau)
}

/// Projects a symmetric matrix onto trace `n` with eigenvalues clamped away
/// from zero.
fn project_pd(x: &Matrix) -> Matrix {
    let n = x.rows();
    let (values, vectors) = sym_eigen(x);
    let floor = 2.0 * PD_FLOOR;
    let clamped: Vec<f64> = values.iter().map(|&v| v.max(floor)).collect();
    let mut out = Matrix::zeros(n, n);
    for (idx, &lam) in clamped.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, out.get(i, j) + lam * vectors.get(i, idx) * vectors.get(j, idx));
            }
        }
    }
    let trace = out.trace();
    out = out.scale(n as f64 / trace.max(f64::MIN_POSITIVE));
    out.symmetrized()
}

/// Perron-eigenvector certificate of the (already scaled) set, together
/// with the lifted-sum spectral radius estimate it came from.
fn perron_certificate(scaled: &MatrixSet, cap: &Capacity) -> Result<(Matrix, f64)> {
    let n = scaled.dim();
    let op = make_operator(scaled, LiftKind::SdpLiftSum, cap)?;
    let pi = power_iteration(&op, 1e-12, default_max_iter(op.dim()));
    let rho_b = if pi.converged {
        pi.value
    } else if op.dim() <= 64 {
        op.to_dense().spectral_radius()?
    } else {
        0.0 // tau falls back to the Cholesky bound below
    };

    // The iterate stays in the PSD cone: it is svec of sums of congruences
    // of PSD matrices, renormalized by positive scalars.
    let xv = SymVec::new(n, pi.vector.clone())?;
    let mut x = unsvec(&xv).symmetrized();
    let trace = x.trace();
    if !(trace > 0.0) {
        x = Matrix::identity(n);
    } else {
        x = x.scale(n as f64 / trace);
    }
    let (xmin, _) = lambda_min_max(&x);
    if xmin < PD_FLOOR {
        let shift = 2.0 * PD_FLOOR - xmin.min(0.0);
        x = x.add(&Matrix::identity(n).scale(shift));
        let t = x.trace();
        x = x.scale(n as f64 / t);
    }

    let tau_floor = minimal_tau(scaled, &x).ok_or_else(|| {
        Error::CertificateFailure("Cholesky factorization of the regularized Perron matrix failed".into())
    })?;
    Ok((x, rho_b.max(tau_floor)))
}

/// Certificate built constructively from the Perron eigenvector of the
/// lifted sum: each `A_i X* A_i^T` is positive semidefinite and they add up
/// to `rho(B) X*`, so every single one is dominated by `rho(B) X*`. The
/// returned pair therefore verifies with `tau` close to `rho(B)` and proves
/// `rho_hat <= rho^{1/2}(B)` constructively.
pub fn initial_certificate(set: &MatrixSet) -> Result<EllipsoidCertificate> {
    initial_certificate_with(set, &Capacity::default())
}

pub fn initial_certificate_with(set: &MatrixSet, cap: &Capacity) -> Result<EllipsoidCertificate> {
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        let cert = EllipsoidCertificate {
            x: Matrix::identity(set.dim()),
            tau: 0.0,
            slack: 0.0,
        };
        let report = verify_certificate(set, &cert)?;
        return Ok(EllipsoidCertificate { slack: report.scaled_slack, ..cert });
    }
    let scaled = set.scaled(1.0 / scale);
    let (mut x, tau_scaled) = perron_certificate(&scaled, cap)?;
    let mut cert = EllipsoidCertificate {
        x: x.clone(),
        tau: tau_scaled * scale * scale,
        slack: 0.0,
    };
    let mut report = verify_certificate(set, &cert)?;
    if !report.valid {
        // One regularization retry, then give up honestly.
        x = project_pd(&x.add(&Matrix::identity(set.dim()).scale(PD_FLOOR.sqrt())));
        let tau_retry = minimal_tau(&scaled, &x)
            .ok_or_else(|| Error::CertificateFailure("regularized matrix is not positive definite".into()))?
            .max(tau_scaled);
        cert = EllipsoidCertificate {
            x,
            tau: tau_retry * scale * scale,
            slack: 0.0,
        };
        report = verify_certificate(set, &cert)?;
        if !report.valid {
            return Err(Error::CertificateFailure(
                "Perron-based certificate failed verification after regularization".into(),
            ));
        }
    }
    cert.slack = report.scaled_slack;
    Ok(cert)
}

/// Searches for an `X` certifying feasibility of a fixed `tau` on an
/// already prescaled set. Implementations must only return matrices that
/// pass [`verify_certificate`] with strictly positive slack.
pub trait FeasibilityBackend {
    fn find_feasible(&self, set: &MatrixSet, tau: f64, warm: Option<&Matrix>) -> Option<Matrix>;
}

/// Projected subgradient descent on
/// `f(X) = max_i lambda_max(A_i X A_i^T - tau X)` over trace-normalized
/// `X` bounded away from singularity. Deterministic: fixed start, fixed
/// Polyak step schedule, no randomness.
#[derive(Debug, Clone)]
pub struct SubgradientBackend {
    pub max_steps: usize,
}

impl Default for SubgradientBackend {
    fn default() -> Self {
        Self {
            max_steps: SUBGRADIENT_STEPS,
        }
    }
}

impl FeasibilityBackend for SubgradientBackend {
    fn find_feasible(&self, set: &MatrixSet, tau: f64, warm: Option<&Matrix>) -> Option<Matrix> {
        let n = set.dim();
        let mut x = match warm {
            Some(w) => project_pd(w),
            None => Matrix::identity(n),
        };
        let margin = 1e-9 * tau.max(f64::MIN_POSITIVE);
        for _ in 0..self.max_steps {
            // Active constraint: the most violated lambda_max, with its
            // eigenvector as the subgradient direction.
            let mut f = f64::NEG_INFINITY;
            let mut active = 0usize;
            let mut direction: Option<Vec<f64>> = None;
            for (i, a) in set.matrices().iter().enumerate() {
                let axa = a.mul(&x).mul(&a.transpose());
                let s = axa.add(&x.scale(-tau));
                let (values, vectors) = sym_eigen(&s);
                let (idx, lam) = values
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bi, bv), (j, &v)| {
                        if v > bv {
                            (j, v)
                        } else {
                            (bi, bv)
                        }
                    });
                if lam > f {
                    f = lam;
                    active = i;
                    direction = Some((0..n).map(|r| vectors.get(r, idx)).collect());
                }
            }
            if f <= -margin {
                let cert = EllipsoidCertificate {
                    x: x.clone(),
                    tau,
                    slack: 0.0,
                };
                if let Ok(report) = verify_certificate(set, &cert) {
                    if report.valid && report.scaled_slack > 0.0 && report.pd_margin > 0.0 {
                        return Some(x);
                    }
                }
            }
            let u = direction?;
            // d f / d X at the top eigenvector u: A^T u u^T A - tau u u^T.
            let w = set.get(active).transpose().apply(&u);
            let mut g = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, w[i] * w[j] - tau * u[i] * u[j]);
                }
            }
            let gn2 = g.frobenius_norm().powi(2);
            if gn2 < 1e-30 {
                break;
            }
            let step = (f + margin) / gn2;
            x = project_pd(&x.add(&g.scale(-step)));
        }
        None
    }
}

/// Best certified ellipsoid value found by bisection on `tau`.
///
/// Returns `sqrt(tau*)` for the smallest `tau` whose feasibility the backend
/// could certify, together with the verified certificate. The value never
/// exceeds the starting point [`lifted_sum_radius`] by more than roundoff,
/// and `rho >= rho_hat / sqrt(m)` holds because the starting point already
/// satisfies that relation.
pub fn ellipsoid_approx(set: &MatrixSet, tol: f64) -> Result<(f64, EllipsoidCertificate)> {
    ellipsoid_approx_with_budget(set, tol, &Capacity::default())
}

pub fn ellipsoid_approx_with_budget(
    set: &MatrixSet,
    tol: f64,
    cap: &Capacity,
) -> Result<(f64, EllipsoidCertificate)> {
    ellipsoid_approx_with(set, tol, cap, &SubgradientBackend::default())
}

pub fn ellipsoid_approx_with(
    set: &MatrixSet,
    tol: f64,
    cap: &Capacity,
    backend: &dyn FeasibilityBackend,
) -> Result<(f64, EllipsoidCertificate)> {
    let scale = set.max_spectral_norm();
    if scale == 0.0 {
        let cert = initial_certificate_with(set, cap)?;
        return Ok((0.0, cert));
    }
    let scaled = set.scaled(1.0 / scale);
    let (x0, tau0) = perron_certificate(&scaled, cap)?;

    let mut hi = tau0;
    let mut best_x = x0;
    // Safe lower end: tau* >= max_i rho(A_i)^2 and tau* >= rho(B)/m.
    let mut lo = 0.0f64;
    for a in scaled.matrices() {
        let r = a.spectral_radius()?;
        lo = lo.max(r * r);
    }
    if let Ok(rho_b) = lifted_rho(&scaled, cap) {
        lo = lo.max(rho_b / set.len() as f64);
    }
    lo = lo.min(hi);

    for _ in 0..BISECTION_LEVELS {
        if hi - lo <= tol * hi.max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match backend.find_feasible(&scaled, mid, Some(&best_x)) {
            Some(x) => {
                hi = mid;
                best_x = x;
            }
            None => lo = mid,
        }
    }

    let mut cert = EllipsoidCertificate {
        x: best_x,
        tau: hi * scale * scale,
        slack: 0.0,
    };
    let report = verify_certificate(set, &cert)?;
    if !report.valid {
        return Err(Error::CertificateFailure(
            "refined certificate failed final verification".into(),
        ));
    }
    cert.slack = report.scaled_slack;
    Ok((scale * hi.sqrt(), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(a: Matrix, b: Matrix) -> MatrixSet {
        MatrixSet::new(vec![a, b]).unwrap()
    }

    #[test]
    fn lifted_sum_radius_single_matrix() {
        let a = Matrix::from_rows(&[&[0.4, -1.2], &[0.9, 0.3]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        assert_relative_eq!(
            lifted_sum_radius(&set).unwrap(),
            a.spectral_radius().unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn lifted_sum_radius_identity_pair_is_sqrt_two() {
        let set = pair(Matrix::identity(3), Matrix::identity(3));
        assert_relative_eq!(lifted_sum_radius(&set).unwrap(), 2f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn verify_accepts_and_rejects_identity_certificates() {
        let set = MatrixSet::new(vec![Matrix::identity(2)]).unwrap();
        let good = EllipsoidCertificate {
            x: Matrix::identity(2),
            tau: 1.0,
            slack: 0.0,
        };
        assert!(verify_certificate(&set, &good).unwrap().valid);

        let bad = EllipsoidCertificate {
            x: Matrix::identity(2),
            tau: 0.5,
            slack: 0.0,
        };
        assert!(!verify_certificate(&set, &bad).unwrap().valid);
    }

    #[test]
    fn verify_rejects_dimension_mismatch() {
        let set = MatrixSet::new(vec![Matrix::identity(3)]).unwrap();
        let cert = EllipsoidCertificate {
            x: Matrix::identity(2),
            tau: 1.0,
            slack: 0.0,
        };
        assert!(matches!(
            verify_certificate(&set, &cert),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn initial_certificate_identity_pair() {
        let set = pair(Matrix::identity(2), Matrix::identity(2));
        let cert = initial_certificate(&set).unwrap();
        assert_relative_eq!(cert.tau, 2.0, max_relative = 1e-9);
        let report = verify_certificate(&set, &cert).unwrap();
        assert!(report.valid);
        assert!(report.scaled_slack >= 0.0);
    }

    #[test]
    fn initial_certificate_single_symmetric_matrix() {
        let a = Matrix::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        let cert = initial_certificate(&set).unwrap();
        let rho2 = a.spectral_radius().unwrap().powi(2);
        assert_relative_eq!(cert.tau, rho2, max_relative = 1e-7);
        assert!(verify_certificate(&set, &cert).unwrap().valid);
    }

    #[test]
    fn ellipsoid_beats_lifted_sum_on_identity_pair() {
        // Per-matrix constraints do not add up: X = I, tau = 1 is feasible
        // while the lifted sum only gives sqrt(2).
        let set = pair(Matrix::identity(2), Matrix::identity(2));
        let (rho_hat, cert) = ellipsoid_approx(&set, 1e-9).unwrap();
        assert!(rho_hat < 1.0 + 1e-6, "rho_hat = {rho_hat}");
        assert!(rho_hat >= 1.0 - 1e-6, "rho_hat = {rho_hat}");
        assert!(verify_certificate(&set, &cert).unwrap().valid);
    }

    #[test]
    fn ellipsoid_single_symmetric_matrix_is_tight() {
        let a = Matrix::from_rows(&[&[1.5, 0.2], &[0.2, 0.7]]).unwrap();
        let set = MatrixSet::new(vec![a.clone()]).unwrap();
        let (rho_hat, cert) = ellipsoid_approx(&set, 1e-10).unwrap();
        assert_relative_eq!(rho_hat, a.spectral_radius().unwrap(), max_relative = 1e-6);
        assert!(verify_certificate(&set, &cert).unwrap().valid);
    }

    #[test]
    fn ellipsoid_never_exceeds_lifted_sum() {
        let a = Matrix::from_rows(&[&[0.3, -0.9], &[0.8, 0.1]]).unwrap();
        let b = Matrix::from_rows(&[&[-0.5, 0.4], &[0.2, 0.6]]).unwrap();
        let set = pair(a, b);
        let (rho_hat, cert) = ellipsoid_approx(&set, 1e-9).unwrap();
        let lsr = lifted_sum_radius(&set).unwrap();
        assert!(rho_hat <= lsr + 1e-6, "{rho_hat} vs {lsr}");
        let report = verify_certificate(&set, &cert).unwrap();
        assert!(report.valid);
        assert!(report.scaled_slack > 0.0);
    }
}
