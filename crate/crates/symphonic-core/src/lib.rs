//! Reduction profiles for symphonic joins and Hopf constructions between
//! ellipsoids.
//!
//! Equivariant maps built by joining two eigenmaps (or by the Hopf
//! construction on one) reduce to a single scalar profile φ: [0, π/2] →
//! [0, π/2] with φ(0) = 0, φ(π/2) = π/2. This crate computes that profile
//! two independent ways and cross-checks them:
//!
//! * [`solver::minimize`] — projected gradient descent on a midpoint-rule
//!   discretization of the weighted quartic functional J(φ)
//!   ([`functional::evaluate_j`]), which never evaluates the singular
//!   potential at the endpoints;
//! * [`shooting::shoot`] — forward RK4 integration of the equivalent
//!   first-order system in (φ, ψ) with ψ = k²(φ)·(φ′)³, bisecting on the
//!   initial slope.
//!
//! [`euler_lagrange::residual`] evaluates the strong-form optimality
//! equation on any profile by finite differences; it is the shared referee
//! between the two paths, and [`shooting::compare`] measures their
//! sup-distance directly.
//!
//! All floating-point work is deterministic: fixed evaluation order, no
//! threading inside any solve, and seeded initialization, so identical
//! inputs reproduce identical bits.

pub mod error;
pub mod euler_lagrange;
pub mod functional;
pub mod geometry;
pub mod grid;
pub mod shooting;
pub mod solver;

pub use error::{Error, Result};
pub use euler_lagrange::{FirstOrderState, ODECoefficients, StrongFormTerms};
pub use functional::{resample, CoefficientSet, Profile};
pub use geometry::{EigenmapSpec, Mode, ProblemConfig};
pub use grid::{make_grid, Grading, Grid, HALF_PI};
pub use shooting::{ShootOutcome, ShootingOptions, Trajectory};
pub use solver::{Init, SolveReport, SolverOptions};
