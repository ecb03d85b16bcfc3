//! Certified bounds on the joint spectral radius (JSR) of a finite set of
//! real square matrices.
//!
//! The JSR measures the fastest asymptotic growth rate achievable by long
//! products drawn from the set; it governs, among other things, worst-case
//! stability of switched linear systems. It is hard to compute exactly, but
//! it can be bracketed with guaranteed relative accuracy:
//!
//! - [`bounds::sum_bounds`]: accuracy `1/m` from the plain sum, for sets
//!   leaving a proper cone invariant (entrywise nonnegative sets qualify
//!   automatically);
//! - [`bounds::kronecker_bounds`]: accuracy `m^{-1/k}` from Kronecker
//!   powers, same hypothesis, evaluated matrix-free;
//! - [`bounds::lift_bounds`] and [`bounds::recursive_lift_bounds`]: accuracy
//!   `m^{-1/(2l)}` and `m^{-1/2^d}` from semidefinite lifting, valid for
//!   arbitrary real matrices;
//! - [`bruteforce::brute_force_bounds`]: the classical product sandwich,
//!   also used as the reference oracle in this crate's tests;
//! - [`ellipsoid::ellipsoid_approx`]: the best ellipsoid norm found by a
//!   certificate-checked search, with `rho >= rho_hat / sqrt(m)`.
//!
//! [`bounds::best_bounds`] intersects everything applicable, and
//! [`bounds::plan_accuracy`] picks the cheapest method for a requested
//! accuracy. Each major capability has a runnable demo under `examples/`;
//! the thin `jsr` binary exposes the same functionality over JSON files.

pub mod bounds;
pub mod bruteforce;
pub mod ellipsoid;
pub mod error;
pub mod lift;
pub mod matrix;
pub mod operator;
pub mod report;
pub mod set;

pub use bounds::{
    best_bounds, kronecker_bounds, lift_bounds, lower_bound_average, plan_accuracy,
    recursive_lift_bounds, sum_bounds, ApproximationPlan, BestBounds, Budget, CertifiedInterval,
    Method, SkipReason,
};
pub use bruteforce::{brute_force_bounds, enumerate_words, necklace_count, ProductWord};
pub use ellipsoid::{
    ellipsoid_approx, initial_certificate, lifted_sum_radius, verify_certificate,
    EllipsoidCertificate, FeasibilityBackend,
};
pub use error::{Error, Result};
pub use lift::{lift_sum_dense, lifted_dimension, make_operator, sdp_lift, Capacity, LiftKind};
pub use matrix::{svec, sym_len, unsvec, Matrix, SymVec};
pub use operator::{power_iteration, LinearOperator, PowerIteration};
pub use set::MatrixSet;
