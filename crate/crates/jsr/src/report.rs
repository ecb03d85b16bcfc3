//! JSON input loading and report assembly for the command-line front end.
//!
//! Input format: `{"name": optional string, "matrices": [[[row], [row]], ...]}`
//! with plain decimal numbers. Reports are a single JSON document on
//! standard output; identical input and flags produce byte-identical
//! reports except for the `timings` block. Schemas for both documents ship
//! in `docs/`.

use crate::bounds::{
    best_bounds, kronecker_bounds_with, lift_bounds_with, plan_accuracy_with,
    recursive_lift_bounds_with, sum_bounds_with, ApproximationPlan, Budget, CertifiedInterval,
    Method, SkipReason,
};
use crate::bruteforce::brute_force_bounds;
use crate::ellipsoid::{ellipsoid_approx_with_budget, EllipsoidCertificate};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::set::MatrixSet;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Exit code for input validation problems (unreadable file, malformed
/// JSON, inconsistent dimensions, bad flags).
pub const EXIT_INVALID_INPUT: i32 = 2;
/// Exit code for numerical failures; a partial report is still printed.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Deserialize)]
struct InputFile {
    name: Option<String>,
    matrices: Vec<Vec<Vec<f64>>>,
}

/// Parses the JSON input document into a validated matrix set.
pub fn parse_set(text: &str) -> Result<(Option<String>, MatrixSet)> {
    let input: InputFile = serde_json::from_str(text).map_err(|e| Error::DimensionMismatch {
        expected: "a JSON document {\"name\"?, \"matrices\": [[[...]]]}".into(),
        got: e.to_string(),
    })?;
    let mut matrices = Vec::with_capacity(input.matrices.len());
    for rows in &input.matrices {
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        matrices.push(Matrix::from_rows(&refs)?);
    }
    Ok((input.name, MatrixSet::new(matrices)?))
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "jsr",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub m: usize,
    pub n: usize,
    pub nonnegative: bool,
    pub cone_asserted: bool,
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub tau: f64,
    pub x: Vec<Vec<f64>>,
    pub slack: f64,
}

impl From<&EllipsoidCertificate> for CertificateJson {
    fn from(cert: &EllipsoidCertificate) -> Self {
        let n = cert.x.rows();
        let x = (0..n)
            .map(|i| (0..n).map(|j| cert.x.get(i, j)).collect())
            .collect();
        Self {
            tau: cert.tau,
            x,
            slack: cert.slack,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MethodReport {
    pub method: Method,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guaranteed_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<SkipReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

impl MethodReport {
    fn ok(interval: &CertifiedInterval, certificate: Option<CertificateJson>) -> Self {
        Self {
            method: interval.method,
            status: "ok",
            lower: Some(interval.lower),
            upper: Some(interval.upper),
            guaranteed_accuracy: interval.guaranteed_accuracy,
            reason: None,
            certificate,
        }
    }

    fn skipped(method: Method, reason: SkipReason) -> Self {
        Self {
            method,
            status: "skipped",
            lower: None,
            upper: None,
            guaranteed_accuracy: None,
            reason: Some(reason),
            certificate: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CombinedJson {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub methods_ms: Vec<(String, f64)>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub input: InputDigest,
    pub methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined: Option<CombinedJson>,
    pub timings: Timings,
}

/// Method selection from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSelection {
    All,
    Sum,
    Kron { k: u32 },
    Lift { l: u32 },
    Recursive { depth: u32 },
    BruteForce { k: u32 },
    Ellipsoid,
}

/// Runs the selected method(s) and assembles the report plus exit code.
pub fn bound_report(
    name: Option<String>,
    set: &MatrixSet,
    selection: MethodSelection,
    budget: &Budget,
) -> (Report, i32) {
    let start = Instant::now();
    let digest = InputDigest {
        name,
        m: set.len(),
        n: set.dim(),
        nonnegative: set.is_nonnegative(),
        cone_asserted: set.is_cone_asserted(),
    };

    let mut methods = Vec::new();
    let mut methods_ms = Vec::new();
    let mut combined = None;
    let mut exit = 0;

    match selection {
        MethodSelection::All => {
            let best = best_bounds(set, budget);
            for run in &best.runs {
                let t = Instant::now();
                let report = match &run.outcome {
                    Ok(interval) => {
                        MethodReport::ok(interval, run.certificate.as_ref().map(CertificateJson::from))
                    }
                    Err(reason) => MethodReport::skipped(run.method, *reason),
                };
                methods_ms.push((run.method.to_string(), t.elapsed().as_secs_f64() * 1e3));
                methods.push(report);
            }
            combined = Some(CombinedJson {
                lower: best.lower,
                upper: best.upper,
                lower_method: best.lower_method,
                upper_method: best.upper_method,
            });
        }
        single => {
            let t = Instant::now();
            let (method, outcome) = run_single(set, single, budget);
            methods_ms.push((method.to_string(), t.elapsed().as_secs_f64() * 1e3));
            match outcome {
                Ok((interval, certificate)) => {
                    combined = Some(CombinedJson {
                        lower: interval.lower,
                        upper: interval.upper,
                        lower_method: interval.method,
                        upper_method: interval.method,
                    });
                    methods.push(MethodReport::ok(&interval, certificate));
                }
                Err(err) => {
                    methods.push(MethodReport::skipped(method, SkipReason::from(&err)));
                    exit = EXIT_NUMERICAL;
                }
            }
        }
    }

    let report = Report {
        tool: ToolInfo::default(),
        input: digest,
        methods,
        combined,
        timings: Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
            methods_ms,
        },
    };
    (report, exit)
}

type SingleOutcome = Result<(CertifiedInterval, Option<CertificateJson>)>;

fn run_single(set: &MatrixSet, selection: MethodSelection, budget: &Budget) -> (Method, SingleOutcome) {
    match selection {
        MethodSelection::Sum => (Method::Sum, sum_bounds_with(set, budget).map(|i| (i, None))),
        MethodSelection::Kron { k } => (
            Method::Kronecker { k },
            kronecker_bounds_with(set, k, budget).map(|i| (i, None)),
        ),
        MethodSelection::Lift { l } => (
            Method::Lift { l },
            lift_bounds_with(set, l, budget).map(|i| (i, None)),
        ),
        MethodSelection::Recursive { depth } => (
            Method::RecursiveLift { depth },
            recursive_lift_bounds_with(set, depth, budget).map(|i| (i, None)),
        ),
        MethodSelection::BruteForce { k } => (
            Method::BruteForce { k },
            brute_force_bounds(set, k, budget.max_words).map(|(lo, hi)| {
                (
                    CertifiedInterval {
                        lower: lo.min(hi),
                        upper: hi,
                        method: Method::BruteForce { k },
                        guaranteed_accuracy: None,
                    },
                    None,
                )
            }),
        ),
        MethodSelection::Ellipsoid => (
            Method::Ellipsoid,
            ellipsoid_approx_with_budget(set, budget.ellipsoid_tol, &budget.capacity()).map(
                |(rho_hat, cert)| {
                    let lower = rho_hat / (set.len() as f64).sqrt();
                    (
                        CertifiedInterval {
                            lower: lower.min(rho_hat),
                            upper: rho_hat,
                            method: Method::Ellipsoid,
                            guaranteed_accuracy: None,
                        },
                        Some(CertificateJson::from(&cert)),
                    )
                },
            ),
        ),
        MethodSelection::All => unreachable!("handled by bound_report"),
    }
}

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub tool: ToolInfo,
    pub m: usize,
    pub n: usize,
    pub plan: ApproximationPlan,
}

pub fn plan_report(
    m: usize,
    n: usize,
    epsilon: f64,
    cone_available: bool,
    budget: &Budget,
) -> Result<PlanReport> {
    let plan = plan_accuracy_with(m, n, epsilon, cone_available, budget)?;
    Ok(PlanReport {
        tool: ToolInfo::default(),
        m,
        n,
        plan,
    })
}
