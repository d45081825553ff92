//! Iterates `F_n = K^n F_0` of the transfer operator on c.d.f.s and exact
//! Stieltjes integrals of logarithmic integrands against `dF_n`.
//!
//! `F_n` is the law of `T_w(U)` where `w` is a fair random word of length `n`
//! and `U` is uniform on `[0, M_alpha]`. Nothing piecewise is ever stored:
//! both evaluation and integration are sums over the `2^n` words, traversed
//! depth first with a stack of running matrix products.
//!
//! Word sums are reduced pairwise along the binary word tree (each internal
//! node averages its two children). The reduction order is fixed by the tree,
//! so results are bit-for-bit identical for any number of threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{apply_map, cylinder_of, IfsParams, Mat2};

/// Largest depth accepted by the word-sum routines (`2^30` words).
pub const MAX_DEPTH: usize = 30;

/// Default depth cap for certification runs (about 6.7e7 words).
pub const DEFAULT_MAX_DEPTH: usize = 26;

/// Top levels of the word tree that are split across rayon tasks.
const PARALLEL_LEVELS: usize = 8;

/// `F_n = K_alpha^n F_0` with `F_0(s) = s / M_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratedCdf {
    pub params: IfsParams,
    pub depth: usize,
}

impl IteratedCdf {
    pub fn new(alpha: f64, depth: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::Resource(format!(
                "depth {depth} needs 2^{depth} words; the limit is {MAX_DEPTH}"
            )));
        }
        Ok(Self {
            params: IfsParams::new(alpha)?,
            depth,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        cdf_eval(self, s)
    }
}

/// `F_n(s)`. Values outside `[0, M_alpha]` clamp to 0 below and 1 above.
///
/// Each word contributes `P(T_w(U) <= s)`, which is 0 left of the word's
/// cylinder, 1 right of it, and `T_w^{-1}(s) / M` inside. Cylinders nest, so a
/// whole subtree is settled as soon as `s` leaves its prefix cylinder.
pub fn cdf_eval(f: &IteratedCdf, s: f64) -> f64 {
    let IfsParams { alpha, m_alpha } = f.params;
    if s <= 0.0 {
        return 0.0;
    }
    if s >= m_alpha {
        return 1.0;
    }
    fn rec(m: Mat2, remaining: usize, alpha: f64, m_alpha: f64, s: f64) -> f64 {
        let (lo, hi) = cylinder_of(&m, m_alpha);
        if s <= lo {
            return 0.0;
        }
        if s >= hi {
            return 1.0;
        }
        if remaining == 0 {
            return (m.apply_inverse(s) / m_alpha).clamp(0.0, 1.0);
        }
        let left = rec(m.mul_generator(0.0), remaining - 1, alpha, m_alpha, s);
        let right = rec(m.mul_generator(alpha), remaining - 1, alpha, m_alpha, s);
        0.5 * (left + right)
    }
    rec(Mat2::IDENTITY, f.depth, alpha, m_alpha, s)
}

/// One application of the transfer operator to an arbitrary c.d.f. on `[0, M]`:
/// `(K F)(s) = F(T_0^{-1} s) / 2 + F(T_0^{-1} s - alpha) / 2`.
pub fn transfer<F: Fn(f64) -> f64>(params: &IfsParams, f: F, s: f64) -> f64 {
    let clamped = |x: f64| {
        if x <= 0.0 {
            0.0
        } else if x >= params.m_alpha {
            1.0
        } else {
            f(x)
        }
    };
    let pre = s / (1.0 - s);
    0.5 * clamped(pre) + 0.5 * clamped(pre - params.alpha)
}

/// Checks `F_1 <= F_0`, which reduces to `F_1(T_0 M) <= F_0(T_0 M)`, i.e.
/// `1 - alpha / (2M) <= 1 / (1 + M)`. Holds exactly when `alpha >= 1/6`.
pub fn monotone_start_check(alpha: f64) -> Result<bool> {
    let m = IfsParams::new(alpha)?.m_alpha;
    let f1 = 1.0 - alpha / (2.0 * m);
    let f0 = apply_map(0.0, m) / m;
    Ok(f1 <= f0 + 1e-12)
}

/// `w * log(slope * s + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogTerm {
    weight: f64,
    slope: f64,
    intercept: f64,
}

/// Logarithmic integrands against which `F_n` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogIntegrand {
    /// `1/2 log[(1 + s)(1 + s + alpha)]`, increasing in `s`.
    Lower,
    /// `1/2 log(1 + alpha / s)`, decreasing in `s`.
    Upper,
    /// Expected log-norm change for `||(x, y)||_eps = eps x + (1 - eps) y`.
    Eps(f64),
}

impl LogIntegrand {
    fn validate(&self) -> Result<()> {
        match *self {
            LogIntegrand::Eps(eps) if !(0.0..=1.0).contains(&eps) => {
                Err(Error::Domain(format!("eps must lie in [0, 1], got {eps}")))
            }
            _ => Ok(()),
        }
    }

    /// Point evaluation at `s > 0`.
    pub fn eval(&self, alpha: f64, s: f64) -> f64 {
        self.terms(alpha)
            .iter()
            .map(|t| t.weight * (t.slope * s + t.intercept).ln())
            .sum()
    }

    // Weights sum to zero, so the common denominator (c t + d) of every
    // T_w(t)-affine form cancels.
    fn terms(&self, alpha: f64) -> Vec<LogTerm> {
        let term = |weight, slope, intercept| LogTerm {
            weight,
            slope,
            intercept,
        };
        match *self {
            LogIntegrand::Lower => vec![term(0.5, 1.0, 1.0), term(0.5, 1.0, 1.0 + alpha), term(-1.0, 0.0, 1.0)],
            LogIntegrand::Upper => vec![term(0.5, 1.0, alpha), term(-0.5, 1.0, 0.0)],
            LogIntegrand::Eps(eps) => vec![
                term(0.5, 1.0, 1.0 - eps),
                term(0.5, 1.0, 1.0 + alpha - eps),
                term(-1.0, eps, 1.0 - eps),
            ],
        }
    }
}

/// `((1 + z) ln(1 + z) - z) / z`, the mean of `ln(1 + z u)` for `u` uniform on `[0, 1]`.
#[inline]
fn mean_log1p_scaled(z: f64) -> f64 {
    if z < 1e-3 {
        // sum_{k>=1} (-1)^{k+1} z^k / (k (k + 1))
        z * (1.0 / 2.0 - z * (1.0 / 6.0 - z * (1.0 / 12.0 - z * (1.0 / 20.0 - z * (1.0 / 30.0)))))
    } else {
        ((1.0 + z) * z.ln_1p() - z) / z
    }
}

/// Mean of `ln(p t + q)` over `t` uniform on `[0, width]`, for `p, q >= 0`.
#[inline]
fn mean_log_affine(p: f64, q: f64, width: f64) -> f64 {
    if q > 0.0 {
        q.ln() + mean_log1p_scaled(p * width / q)
    } else {
        // q = 0: the limit t ln t -> 0 at the left end.
        (p * width).ln() - 1.0
    }
}

#[inline]
fn word_mean(terms: &[LogTerm], m: &Mat2, m_alpha: f64) -> f64 {
    terms
        .iter()
        .map(|t| {
            let p = t.slope * m.a + t.intercept * m.c;
            let q = t.slope * m.b + t.intercept * m.d;
            t.weight * mean_log_affine(p, q, m_alpha)
        })
        .sum()
}

/// Average of `leaf(M_w)` over all `2^depth` words, reduced pairwise along the word tree.
pub(crate) fn word_average<const K: usize, F>(alpha: f64, depth: usize, leaf: &F) -> [f64; K]
where
    F: Fn(&Mat2) -> [f64; K] + Sync,
{
    fn rec<const K: usize, F>(m: Mat2, remaining: usize, par: usize, alpha: f64, leaf: &F) -> [f64; K]
    where
        F: Fn(&Mat2) -> [f64; K] + Sync,
    {
        if remaining == 0 {
            return leaf(&m);
        }
        let m0 = m.mul_generator(0.0);
        let m1 = m.mul_generator(alpha);
        let (x, y) = if par > 0 {
            rayon::join(
                || rec(m0, remaining - 1, par - 1, alpha, leaf),
                || rec(m1, remaining - 1, par - 1, alpha, leaf),
            )
        } else {
            (
                rec(m0, remaining - 1, 0, alpha, leaf),
                rec(m1, remaining - 1, 0, alpha, leaf),
            )
        };
        let mut out = [0.0; K];
        for k in 0..K {
            out[k] = 0.5 * (x[k] + y[k]);
        }
        out
    }
    let par = if rayon::current_num_threads() > 1 {
        PARALLEL_LEVELS
    } else {
        0
    };
    rec(Mat2::IDENTITY, depth, par, alpha, leaf)
}

/// `∫ g dF_n` for several integrands in one pass over the words.
///
/// Each word contributes `(1/M) ∫_0^M g(T_w(t)) dt`. With `T_w(t) = (a t + b)/(c t + d)`
/// every term of `g ∘ T_w` is `log(p t + q)` up to the cancelling denominator, and
/// its mean over `[0, M]` has a closed form.
pub fn stieltjes_log_integrals<const K: usize>(f: &IteratedCdf, integrands: [LogIntegrand; K]) -> Result<[f64; K]> {
    for g in &integrands {
        g.validate()?;
    }
    let IfsParams { alpha, m_alpha } = f.params;
    let terms: Vec<Vec<LogTerm>> = integrands.iter().map(|g| g.terms(alpha)).collect();
    let leaf = |m: &Mat2| {
        let mut out = [0.0; K];
        for (o, t) in out.iter_mut().zip(&terms) {
            *o = word_mean(t, m, m_alpha);
        }
        out
    };
    Ok(word_average(alpha, f.depth, &leaf))
}

pub fn stieltjes_log_integral(f: &IteratedCdf, g: LogIntegrand) -> Result<f64> {
    Ok(stieltjes_log_integrals(f, [g])?[0])
}
