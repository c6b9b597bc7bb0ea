//! Numerical verification lab for scalar-curvature variational functionals
//! on symmetric 3-metrics.
//!
//! The crate computes pointwise curvature of warped-product 3-metrics,
//! evaluates the scale-invariant functionals Z^2, S_-^2 and the perturbed
//! functional I_eps^- together with their Euler-Lagrange residual
//! operators, builds the constant-curvature model caps and extracts their
//! scaling laws, verifies the Schwarzschild metric as the spherically
//! symmetric solution of the constrained system (potential, trace
//! equation, mass identities, asymptotics), and refutes the Kasner family
//! numerically.
//!
//! Everything is immutable after construction and safe to evaluate in
//! parallel; the `cli` module drives batch scans and writes CSV/JSON
//! reports (see the `symvar-lab` binary).

pub mod canonical;
pub mod cli;
pub mod error;
pub mod fit;
pub mod functionals;
pub mod geometry;
pub mod jet;
pub mod models;
pub mod ode;
pub mod profile;
pub mod quad;

pub use error::{Error, Result};
pub use geometry::{CurvaturePoint, SymmetricMetric};
pub use profile::{ProfileSource, RadialProfile};
