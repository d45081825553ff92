//! Lyapunov exponent of the random product of `(1, X; 1, 1 + X)`, `X` fair on `{0, alpha}`.
//!
//! For `alpha >= 1/6` the iterates `F_n` decrease to the stationary c.d.f., so
//! integrating the increasing integrand `1/2 log[(1+s)(1+s+alpha)]` against
//! `dF_n` bounds the exponent from below, and the decreasing
//! `1/2 log(1 + alpha/s)` bounds it from above, at every depth `n`.
//!
//! Comparisons against `1/2 log 2` carry an explicit safety margin in nats.
//! This is an engineering guard against rounding, not directed-rounding
//! interval arithmetic.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdf::{monotone_start_check, stieltjes_log_integrals, IteratedCdf, LogIntegrand, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::ifs::{fixed_point_m, Symbol};
use crate::rng;

/// Default safety margin on certified comparisons, in nats.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// The exponent at which the dimension bound `log 2 / (2 lambda)` equals 1.
pub fn critical_exponent() -> f64 {
    0.5 * std::f64::consts::LN_2
}

/// Certified `[lower, upper]` enclosure of the exponent at one depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovBracket {
    pub alpha: f64,
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
    pub margin: f64,
}

impl LyapunovBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// `true` if `value` is certainly below the exponent.
    pub fn exceeds(&self, value: f64) -> bool {
        self.lower - self.margin > value
    }

    /// `true` if `value` is certainly above the exponent.
    pub fn below(&self, value: f64) -> bool {
        self.upper + self.margin < value
    }
}

fn require_certified(alpha: f64) -> Result<()> {
    if !monotone_start_check(alpha)? {
        return Err(Error::Certification { alpha });
    }
    Ok(())
}

pub fn lyapunov_lower(alpha: f64, depth: usize) -> Result<f64> {
    require_certified(alpha)?;
    Ok(stieltjes_log_integrals(&IteratedCdf::new(alpha, depth)?, [LogIntegrand::Lower])?[0])
}

pub fn lyapunov_upper(alpha: f64, depth: usize) -> Result<f64> {
    require_certified(alpha)?;
    Ok(stieltjes_log_integrals(&IteratedCdf::new(alpha, depth)?, [LogIntegrand::Upper])?[0])
}

/// Both bounds in a single pass over the `2^depth` words.
pub fn lyapunov_bracket(alpha: f64, depth: usize, margin: f64) -> Result<LyapunovBracket> {
    require_certified(alpha)?;
    if !(margin >= 0.0) {
        return Err(Error::Domain(format!("margin must be non-negative, got {margin}")));
    }
    let f = IteratedCdf::new(alpha, depth)?;
    let [lower, upper] = stieltjes_log_integrals(&f, [LogIntegrand::Lower, LogIntegrand::Upper])?;
    Ok(LyapunovBracket {
        alpha,
        depth,
        lower,
        upper,
        margin,
    })
}

/// Integral of the `eps`-norm log change against `dF_n`. Diagnostic only: for
/// `eps` strictly inside `(0, 1)` the value carries no one-sided guarantee.
pub fn lyapunov_eps(alpha: f64, eps: f64, depth: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps must lie in [0, 1], got {eps}")));
    }
    Ok(stieltjes_log_integrals(&IteratedCdf::new(alpha, depth)?, [LogIntegrand::Eps(eps)])?[0])
}

/// `(1/(2n)) log(D_n (C_n M + D_n) / M)` for the product over `symbols`.
///
/// Only the bottom row `(C, D)` of the product is carried. After every step it
/// is rescaled so that `D = 1` and the log of the scale is accumulated.
pub fn word_growth_rate<I>(alpha: f64, symbols: I) -> Result<f64>
where
    I: IntoIterator<Item = Symbol>,
{
    let m_alpha = fixed_point_m(alpha)?;
    let mut c = 0.0;
    let mut log_d = 0.0;
    let mut n = 0usize;
    for sym in symbols {
        let x = sym.value(alpha);
        // (c, 1) * (1, x; 1, 1 + x) = (c + 1, c x + 1 + x)
        let nc = c + 1.0;
        let nd = c * x + 1.0 + x;
        c = nc / nd;
        log_d += nd.ln();
        n += 1;
    }
    if n == 0 {
        return Err(Error::Domain("at least one step is required".into()));
    }
    Ok((2.0 * log_d + (c * m_alpha).ln_1p() - m_alpha.ln()) / (2.0 * n as f64))
}

/// Monte Carlo estimate of the exponent with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub steps: usize,
    pub trials: usize,
}

fn mc_trial<R: Rng>(alpha: f64, steps: usize, rng: &mut R) -> Result<f64> {
    word_growth_rate(
        alpha,
        (0..steps).map(|_| {
            if rng.random::<bool>() {
                Symbol::Alpha
            } else {
                Symbol::Zero
            }
        }),
    )
}

/// Trial `i` draws from `rng::stream(seed, i)`, so the estimate does not depend
/// on the thread count.
pub fn lyapunov_mc(alpha: f64, steps: usize, trials: usize, seed: u64) -> Result<McEstimate> {
    if steps == 0 || trials == 0 {
        return Err(Error::Domain("steps and trials must be at least 1".into()));
    }
    fixed_point_m(alpha)?;
    let values = (0..trials as u64)
        .into_par_iter()
        .map(|i| mc_trial(alpha, steps, &mut rng::stream(seed, i)))
        .collect::<Result<Vec<f64>>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        f64::NAN
    };
    Ok(McEstimate {
        estimate: mean,
        stderr,
        steps,
        trials,
    })
}

/// `log 2 / (2 lambda)`. Fed a certified lower bound on the exponent, this is an
/// upper bound on the dimension of a set carrying the stationary measure.
pub fn dimension_bound(lambda_lower: f64) -> Result<f64> {
    if !(lambda_lower > 0.0) {
        return Err(Error::Domain(format!(
            "the exponent bound must be positive, got {lambda_lower}"
        )));
    }
    Ok(std::f64::consts::LN_2 / (2.0 * lambda_lower))
}

/// Where a probe sits relative to the critical parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Exponent certainly below `1/2 log 2`: the probe is below the critical parameter.
    Below,
    /// Exponent certainly above `1/2 log 2`.
    Above,
    /// Bracket still contains `1/2 log 2` at the maximum depth.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub alpha: f64,
    pub class: Classification,
    /// The bracket at the depth where the probe was resolved (or at the maximum depth).
    pub bracket: LyapunovBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub start_depth: usize,
    pub depth_step: usize,
    pub max_depth: usize,
    pub margin: f64,
    /// Bisection stops once the certified interval is this narrow.
    pub resolution: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            start_depth: 10,
            depth_step: 2,
            max_depth: DEFAULT_MAX_DEPTH,
            margin: DEFAULT_MARGIN,
            resolution: 1e-6,
        }
    }
}

/// Runs the depth schedule at one `alpha` until the bracket excludes `1/2 log 2`.
pub fn classify(alpha: f64, opts: &CertifyOptions) -> Result<Probe> {
    let target = critical_exponent();
    let mut depth = opts.start_depth.min(opts.max_depth);
    loop {
        let bracket = lyapunov_bracket(alpha, depth, opts.margin)?;
        let class = if bracket.exceeds(target) {
            Classification::Above
        } else if bracket.below(target) {
            Classification::Below
        } else {
            Classification::Undetermined
        };
        log::debug!(
            "alpha={alpha} depth={depth} lower={:.12} upper={:.12} -> {class:?}",
            bracket.lower,
            bracket.upper
        );
        if class != Classification::Undetermined || depth >= opts.max_depth {
            return Ok(Probe { alpha, class, bracket });
        }
        depth = (depth + opts.depth_step.max(1)).min(opts.max_depth);
    }
}

/// Certified enclosure of the parameter where the exponent crosses `1/2 log 2`.
///
/// A complete certificate has `lo_probe` classified `Below` and `hi_probe`
/// classified `Above`. If probes near the crossing cannot be resolved at the
/// maximum depth, the enclosure stops at the last resolved probes and the
/// unresolved span is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCCertificate {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub lo_probe: Probe,
    pub hi_probe: Probe,
    /// Smallest and largest unresolved probe, if any.
    pub undetermined: Option<(f64, f64)>,
    pub depth_used: usize,
    pub probes: Vec<Probe>,
}

impl AlphaCCertificate {
    pub fn is_complete(&self) -> bool {
        self.lo_probe.class == Classification::Below && self.hi_probe.class == Classification::Above
    }

    pub fn width(&self) -> f64 {
        self.alpha_hi - self.alpha_lo
    }
}

struct Search<'a> {
    opts: &'a CertifyOptions,
    probes: Vec<Probe>,
}

impl Search<'_> {
    fn probe(&mut self, alpha: f64) -> Result<Probe> {
        let p = classify(alpha, self.opts)?;
        self.probes.push(p);
        Ok(p)
    }
}

/// Bisection on `alpha`, valid because the exponent is increasing in `alpha`.
///
/// Unresolved midpoints are not guessed: the search then narrows toward the
/// unresolved zone from each side separately, so the reported interval is
/// exactly the span between the closest resolved probes.
pub fn certify_alpha_c(lo: f64, hi: f64, opts: &CertifyOptions) -> Result<AlphaCCertificate> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(lo > 1.0 / 6.0) {
        return Err(Error::Certification { alpha: lo });
    }
    if !(opts.margin > 0.0) {
        return Err(Error::Domain("margin must be positive".into()));
    }
    if !(opts.resolution > 0.0) {
        return Err(Error::Domain("resolution must be positive".into()));
    }
    let mut search = Search {
        opts,
        probes: Vec::new(),
    };
    let mut lo_p = search.probe(lo)?;
    let mut hi_p = search.probe(hi)?;
    if lo_p.class == Classification::Above || hi_p.class == Classification::Below {
        return Err(Error::NotBracketed { lo, hi });
    }

    if lo_p.class == Classification::Below && hi_p.class == Classification::Above {
        // Undetermined probes strictly inside (lo_p, hi_p), kept sorted.
        let mut unresolved: Vec<f64> = Vec::new();
        while hi_p.alpha - lo_p.alpha > opts.resolution {
            let (a, b) = match (unresolved.first(), unresolved.last()) {
                (None, _) => (lo_p.alpha, hi_p.alpha),
                (Some(&u_lo), Some(&u_hi)) => {
                    // Work on whichever side gap is wider.
                    if u_lo - lo_p.alpha >= hi_p.alpha - u_hi {
                        (lo_p.alpha, u_lo)
                    } else {
                        (u_hi, hi_p.alpha)
                    }
                }
                _ => unreachable!(),
            };
            if b - a <= opts.resolution / 2.0 {
                break;
            }
            let mid = 0.5 * (a + b);
            let p = search.probe(mid)?;
            match p.class {
                Classification::Below => {
                    lo_p = p;
                    unresolved.retain(|&u| u > mid);
                }
                Classification::Above => {
                    hi_p = p;
                    unresolved.retain(|&u| u < mid);
                }
                Classification::Undetermined => {
                    let pos = unresolved.partition_point(|&u| u < mid);
                    unresolved.insert(pos, mid);
                }
            }
        }
    }

    let undetermined = {
        let mut u = search
            .probes
            .iter()
            .filter(|p| p.class == Classification::Undetermined && p.alpha >= lo_p.alpha && p.alpha <= hi_p.alpha)
            .map(|p| p.alpha);
        u.next()
            .map(|first| u.fold((first, first), |(a, b), x| (a.min(x), b.max(x))))
    };
    let depth_used = search.probes.iter().map(|p| p.bracket.depth).max().unwrap_or(0);
    Ok(AlphaCCertificate {
        alpha_lo: lo_p.alpha,
        alpha_hi: hi_p.alpha,
        lo_probe: lo_p,
        hi_probe: hi_p,
        undetermined,
        depth_used,
        probes: search.probes,
    })
}
