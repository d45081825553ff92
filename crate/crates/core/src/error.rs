use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The bracket is only justified when the monotone sandwich holds (alpha >= 1/6).
    #[error(
        "alpha = {alpha} is below 1/6; the c.d.f. iterates are not monotone there and the bracket is not certified"
    )]
    Certification { alpha: f64 },

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// Power iteration ran out of iterations. Carries the last estimate.
    #[error("no convergence after {iterations} iterations (last estimate {last})")]
    Convergence { iterations: usize, last: f64 },

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    /// The Galton-Watson fixed-point iteration is drifting to the Heaviside solution.
    #[error("iteration collapsed toward the Heaviside solution (median {median})")]
    DegenerateAttractor { median: f64 },

    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
