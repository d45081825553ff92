//! Conductance of a Galton-Watson tree with an adjoined parent.
//!
//! If the root has `k` children with probability `p_k` and each child subtree
//! (with its edge) has conductance distributed as `gamma`, then
//! `gamma = S / (1 + S)` with `S` the sum of `k` independent copies. Its c.d.f.
//! therefore solves
//!
//! ```text
//! F(s) = sum_k p_k F^{*k}(s / (1 - s))   for 0 <= s < 1,
//! F(s) = 1                               for s >= 1,
//! F(s) = 0                               for s < 0.
//! ```
//!
//! The Heaviside function also solves it. This module iterates the equation on
//! a grid starting from the uniform c.d.f. and checks the result against
//! truncated-tree Monte Carlo and against the continued-fraction form
//! `gamma = [1, gamma_1, 1, gamma_2, ...]`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::apply_map;
use crate::rng;

/// Offspring law `p_1, ..., p_K` (no extinction: `p_0 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffspringDistribution {
    probs: Vec<f64>,
}

impl OffspringDistribution {
    /// Requires every `p_k` in `[0, 1)` and `sum p_k = 1` within `1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let d = Self::new_allowing_degenerate(probs)?;
        if d.is_degenerate() {
            return Err(Error::Domain("a single offspring number carries all the mass".into()));
        }
        Ok(d)
    }

    /// Like [`OffspringDistribution::new`] but accepts a point mass, with a warning.
    pub fn new_allowing_degenerate(mut probs: Vec<f64>) -> Result<Self> {
        while probs.last() == Some(&0.0) {
            probs.pop();
        }
        if probs.is_empty() {
            return Err(Error::Domain("offspring distribution is empty".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain(format!("probabilities must lie in [0, 1]: {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        let d = Self { probs };
        if d.is_degenerate() {
            log::warn!("degenerate offspring distribution {:?}", d.probs);
        }
        Ok(d)
    }

    /// From `(k, p_k)` pairs; `k = 0` must carry no mass.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let k_max = pairs.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut probs = vec![0.0; k_max];
        for &(k, p) in pairs {
            if k == 0 {
                if p != 0.0 {
                    return Err(Error::Domain("p_0 > 0 (extinction) is not supported".into()));
                }
                continue;
            }
            probs[k - 1] += p;
        }
        Self::new_allowing_degenerate(probs)
    }

    /// `p_1 = p_2 = 1/2`.
    pub fn binary() -> Self {
        Self { probs: vec![0.5, 0.5] }
    }

    pub fn is_degenerate(&self) -> bool {
        self.probs.contains(&1.0)
    }

    pub fn max_children(&self) -> usize {
        self.probs.len()
    }

    /// `p_k`; zero outside `1..=K`.
    pub fn prob(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.probs.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i + 1;
            }
        }
        self.probs.len()
    }
}

/// A c.d.f. sampled on `N + 1` equally spaced points of `[0, 1]`, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCdf {
    values: Vec<f64>,
}

impl GridCdf {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("a grid c.d.f. needs at least two points".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) || values[0] < 0.0 || *values.last().unwrap() != 1.0 {
            return Err(Error::Domain("values must be nondecreasing from >= 0 up to 1".into()));
        }
        Ok(Self { values })
    }

    /// `F(s) = s`.
    pub fn uniform(intervals: usize) -> Self {
        Self {
            values: (0..=intervals).map(|i| i as f64 / intervals as f64).collect(),
        }
    }

    /// Point mass at 0.
    pub fn heaviside(intervals: usize) -> Self {
        Self {
            values: vec![1.0; intervals + 1],
        }
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.intervals() as f64
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        interp(&self.values, s * self.intervals() as f64)
    }

    /// Smallest `s` with `F(s) >= u` under linear interpolation.
    pub fn quantile(&self, u: f64) -> f64 {
        let v = &self.values;
        if u <= v[0] {
            return 0.0;
        }
        let i = v.partition_point(|&x| x < u);
        if i >= v.len() {
            return 1.0;
        }
        let (a, b) = (v[i - 1], v[i]);
        let frac = if b > a { (u - a) / (b - a) } else { 0.0 };
        (i as f64 - 1.0 + frac) / self.intervals() as f64
    }

    pub fn sup_distance(&self, other: &GridCdf) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Linear interpolation of `values` at fractional index `x >= 0`; saturates past the end.
#[inline]
fn interp(values: &[f64], x: f64) -> f64 {
    let i = x.floor() as usize;
    if i + 1 >= values.len() {
        return *values.last().unwrap();
    }
    let t = x - i as f64;
    values[i] + t * (values[i + 1] - values[i])
}

/// One application of the conductance operator.
///
/// Convolution powers `F^{*k}` live on `[0, K]` with the same spacing. For a
/// piecewise-linear `F` the convolution at a grid point is exact: the mass of
/// `F` on cell `j` is spread uniformly, and the mean of the piecewise-linear
/// `G` over a cell is the average of its two end values.
pub fn gw_operator_apply(f: &GridCdf, off: &OffspringDistribution) -> GridCdf {
    let n = f.intervals();
    let k_max = off.max_children();
    let ext_len = k_max * n + 1;
    let fv = f.values();
    let atom = fv[0];
    let masses: Vec<f64> = fv.windows(2).map(|w| w[1] - w[0]).collect();

    let base: Vec<f64> = (0..ext_len).map(|i| fv[i.min(n)]).collect();
    let mut powers: Vec<Vec<f64>> = vec![base.clone()];
    for _ in 1..k_max {
        let prev = powers.last().unwrap();
        let mut next = vec![0.0; ext_len];
        for (i, out) in next.iter_mut().enumerate() {
            let mut acc = atom * prev[i];
            for j in 1..=i.min(n) {
                acc += masses[j - 1] * 0.5 * (prev[i - j] + prev[i - j + 1]);
            }
            *out = acc;
        }
        powers.push(next);
    }

    let mut values = vec![0.0; n + 1];
    for (i, out) in values.iter_mut().enumerate() {
        if i == n {
            *out = 1.0;
            continue;
        }
        let s = i as f64 / n as f64;
        let x = s / (1.0 - s);
        *out = if x >= k_max as f64 {
            1.0
        } else {
            let pos = x * n as f64;
            powers
                .iter()
                .enumerate()
                .map(|(k, g)| off.prob(k + 1) * interp(g, pos))
                .sum::<f64>()
                .min(1.0)
        };
    }
    // Rounding can break monotonicity by an ulp.
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    GridCdf { values }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwSolution {
    pub cdf: GridCdf,
    /// `sup |Phi(F) - F|` for the returned `F`.
    pub residual: f64,
    pub iterations: usize,
}

/// Fixed-point iteration from `F(s) = s`.
///
/// Stops when the residual drops below `tol` or after `max_iter` steps; in the
/// latter case the last iterate is returned with its (larger) residual. If the
/// median of the final iterate sits within two grid cells of 0, the iteration
/// is collapsing onto the Heaviside solution and [`Error::DegenerateAttractor`]
/// is returned. (`F(1/2) = 1` alone is not degenerate: with at most two
/// children `gamma <= 1/2`.)
pub fn solve_gw_cdf(off: &OffspringDistribution, grid_n: usize, tol: f64, max_iter: usize) -> Result<GwSolution> {
    if grid_n < 64 {
        return Err(Error::Domain(format!(
            "grid must have at least 64 intervals, got {grid_n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let mut f = GridCdf::uniform(grid_n);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let g = gw_operator_apply(&f, off);
        residual = g.sup_distance(&f);
        iterations += 1;
        log::debug!("gw iteration {iterations}: residual {residual:.3e}");
        if residual < tol {
            break;
        }
        f = g;
    }
    if f.quantile(0.5) <= 2.0 / grid_n as f64 {
        return Err(Error::DegenerateAttractor {
            median: f.quantile(0.5),
        });
    }
    Ok(GwSolution {
        cdf: f,
        residual,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Vertices at the cut are dead ends: a lower bound on the conductance.
    Free,
    /// Vertices at the cut are joined to infinity: an upper bound.
    Wired,
}

fn conductance_pair<R: Rng + ?Sized>(
    off: &OffspringDistribution,
    level: usize,
    depth: usize,
    rng: &mut R,
) -> (f64, f64) {
    if level == depth {
        return (0.0, 1.0);
    }
    let k = off.sample(rng);
    let (mut free, mut wired) = (0.0, 0.0);
    for _ in 0..k {
        let (f, w) = conductance_pair(off, level + 1, depth, rng);
        free += f;
        wired += w;
    }
    (free / (1.0 + free), wired / (1.0 + wired))
}

/// Conductance from the adjoined parent of one random tree truncated at `depth`,
/// under both boundary conditions. Both values come from the same tree.
pub fn tree_conductance_pair<R: Rng + ?Sized>(off: &OffspringDistribution, depth: usize, rng: &mut R) -> (f64, f64) {
    conductance_pair(off, 0, depth.max(1), rng)
}

pub fn tree_conductance_mc<R: Rng + ?Sized>(
    off: &OffspringDistribution,
    depth: usize,
    boundary: Boundary,
    rng: &mut R,
) -> f64 {
    let (free, wired) = tree_conductance_pair(off, depth, rng);
    match boundary {
        Boundary::Free => free,
        Boundary::Wired => wired,
    }
}

/// `[1, x_1, 1, x_2, ..., 1, x_n] = T_{x_1} ∘ ... ∘ T_{x_n}(0)`.
pub fn truncated_cf(xs: &[f64]) -> f64 {
    xs.iter().rev().fold(0.0, |s, &x| apply_map(x, s))
}

/// Kolmogorov-Smirnov distance between the empirical c.d.f. of `samples` and `f`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], f: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fx = f(x);
            ((i + 1) as f64 / n - fx).max(fx - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Draws `gamma = [1, g_1, 1, g_2, ..., 1, g_depth]` where each `g_i` is the sum of
/// `k - 1` independent draws from `f_gamma`, `k` being an offspring draw.
/// For `p_1 = p_2 = 1/2` the law of `g_i` is `(1 + F_gamma) / 2`.
pub fn haggstrom_sample<R: Rng + ?Sized>(
    f_gamma: &GridCdf,
    off: &OffspringDistribution,
    depth: usize,
    rng: &mut R,
) -> f64 {
    let mut s = 0.0;
    for _ in 0..depth {
        let k = off.sample(rng);
        let x: f64 = (1..k).map(|_| f_gamma.quantile(rng.random())).sum();
        s = apply_map(x, s);
    }
    s
}

/// KS distance between `f_gamma` and the law of the truncated continued fraction
/// built from draws of `f_gamma` itself. Sample `i` uses `rng::stream(seed, i)`.
pub fn haggstrom_check(
    f_gamma: &GridCdf,
    off: &OffspringDistribution,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 || depth == 0 {
        return Err(Error::Domain("samples and depth must be positive".into()));
    }
    use rayon::prelude::*;
    let mut xs: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| haggstrom_sample(f_gamma, off, depth, &mut rng::stream(seed, i)))
        .collect();
    Ok(ks_distance(&mut xs, |x| f_gamma.eval(x)))
}

/// Generation sizes of one Galton-Watson run and the partial resistance of the
/// shorted tree, `sum_{k <= depth} 1 / Z_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwSample {
    pub generation_sizes: Vec<u64>,
    pub resistance: f64,
}

/// Simulates `Z_1..Z_depth` from `Z_0 = 1`. The number of parents having `k`
/// children is drawn by sequential conditional binomials, so the cost per
/// generation is `O(K)` however large `Z` gets.
pub fn shorted_resistance_sample<R: Rng + ?Sized>(
    off: &OffspringDistribution,
    depth: usize,
    rng: &mut R,
) -> Result<GwSample> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let mut z: u64 = 1;
    let mut sizes = Vec::with_capacity(depth);
    let mut resistance = 0.0;
    for _ in 0..depth {
        let mut remaining = z;
        let mut mass_left = 1.0;
        let mut next: u64 = 0;
        for (i, &p) in off.probs().iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let q = if mass_left > 0.0 {
                (p / mass_left).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let count = if q >= 1.0 {
                remaining
            } else if q <= 0.0 {
                0
            } else {
                Binomial::new(remaining, q)
                    .map_err(|e| Error::Domain(e.to_string()))?
                    .sample(rng)
            };
            next = next
                .checked_add(count.checked_mul(i as u64 + 1).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            remaining -= count;
            mass_left -= p;
        }
        // Leftover rounding mass goes to the largest family size.
        next = next
            .checked_add(remaining * off.max_children() as u64)
            .ok_or_else(overflow)?;
        z = next;
        sizes.push(z);
        resistance += 1.0 / z as f64;
    }
    Ok(GwSample {
        generation_sizes: sizes,
        resistance,
    })
}

fn overflow() -> Error {
    Error::Resource("generation size overflows u64".into())
}
