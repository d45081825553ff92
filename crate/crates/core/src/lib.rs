//! Random continued fractions `[1, X_1, 1, X_2, ...]` with `X_i` fair on `{0, alpha}`.
//!
//! * [`ifs`]: the maps `T_x`, generator matrices, words, cylinders, sampling.
//! * [`cdf`]: iterates of the transfer operator and exact log integrals against them.
//! * [`lyapunov`]: certified exponent brackets, Monte Carlo, dimension bound, and
//!   certification of the parameter where the exponent crosses `1/2 log 2`.
//! * [`lp`]: expected tensor powers of the generator and the `L^p` exclusion thresholds.
//! * [`gw`]: the Galton-Watson conductance functional equation and its samplers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cdf;
pub mod error;
pub mod gw;
pub mod ifs;
pub mod lp;
pub mod lyapunov;
pub mod rng;

pub use cdf::{
    cdf_eval, monotone_start_check, stieltjes_log_integral, stieltjes_log_integrals, IteratedCdf, LogIntegrand,
};
pub use error::{Error, Result};
pub use gw::{Boundary, GridCdf, GwSample, OffspringDistribution};
pub use ifs::{
    apply_map, cylinder_interval, evaluate_cf, fixed_point_m, sample_mu, support_type, word_matrix, IfsParams, Mat2,
    SupportGeometry, SupportKind, Symbol, Word,
};
pub use lp::{char_poly_r2, deterministic_top_eigen, lp_threshold, spectral_radius, LpThreshold, TensorOp};
pub use lyapunov::{
    certify_alpha_c, dimension_bound, lyapunov_bracket, lyapunov_eps, lyapunov_lower, lyapunov_mc, lyapunov_upper,
    AlphaCCertificate, CertifyOptions, Classification, LyapunovBracket, McEstimate,
};
