//! Error type shared across the solver library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An angle argument left `[0, pi/2]` by more than the clamp tolerance.
    #[error("angle {value} outside [0, pi/2] beyond tolerance {tol}")]
    Domain { value: f64, tol: f64 },

    /// Evaluation requested at a point where the expression is singular.
    #[error("singular evaluation at t = {t}: {what}")]
    Singular { t: f64, what: &'static str },

    /// A configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An initial profile violates the feasibility invariants.
    #[error("invalid initial profile: {0}")]
    InvalidInit(String),

    /// The shooting bracket never enclosed the boundary target.
    #[error(
        "no bracket for the initial slope after {widenings} widenings: \
         hit({lo:.3e}) = {hit_lo:.6}, hit({hi:.3e}) = {hit_hi:.6}, target {target:.6}"
    )]
    BracketFailure {
        lo: f64,
        hi: f64,
        hit_lo: f64,
        hit_hi: f64,
        target: f64,
        widenings: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
