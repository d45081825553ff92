//! Expected tensor powers `R = E[G^{⊗r}]` of the random generator
//! `G = (1, X; 1, 1 + X)` and the parameters `alpha_p` beyond which the
//! stationary measure has no `L^p` density, `r = 2(p - 1)`.
//!
//! The threshold solved for is `rho(R) = 2^(p-1) = 2^(r/2)`. At `r = 2` this is
//! the comparison of the Perron root with 2; at `r = 1` it gives `3√2 - 4`; and
//! as `r -> ∞` it forces the top eigenvalue of `(1, alpha; 1, 1 + alpha)` to
//! `√2`, i.e. `alpha -> (3√2 - 4)/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order for which the full `2^r` vector is materialized.
pub const MAX_FULL_ORDER: usize = 24;

/// Largest order accepted by the symmetric reduction.
pub const MAX_SYMMETRIC_ORDER: usize = 256;

/// A linear operator on `R^dim`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, v: &[f64], out: &mut [f64]);

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out);
        Ok(out)
    }
}

/// `R = (G_0^{⊗r} + G_alpha^{⊗r}) / 2` acting on `R^(2^r)`, applied matrix free.
///
/// Index bits are read most significant first, so tensor factor 1 is the
/// slowest-varying coordinate, as in the Kronecker product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorOp {
    pub alpha: f64,
    pub order: usize,
}

impl TensorOp {
    pub fn new(alpha: f64, order: usize) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
        }
        if order > MAX_FULL_ORDER {
            return Err(Error::Resource(format!(
                "order {order} needs vectors of length 2^{order}; the full tensor path allows at most 2^{MAX_FULL_ORDER}"
            )));
        }
        Ok(Self { alpha, order })
    }

    /// Applies `G_x^{⊗r}` in place by `r` successive 2x2 mode contractions.
    fn kron_power_in_place(&self, x: f64, v: &mut [f64]) {
        let (g00, g01, g10, g11) = (1.0, x, 1.0, 1.0 + x);
        for mode in 0..self.order {
            let stride = 1usize << mode;
            for block in (0..v.len()).step_by(2 * stride) {
                for i in block..block + stride {
                    let (v0, v1) = (v[i], v[i + stride]);
                    v[i] = g00 * v0 + g01 * v1;
                    v[i + stride] = g10 * v0 + g11 * v1;
                }
            }
        }
    }
}

impl LinearOperator for TensorOp {
    fn dim(&self) -> usize {
        1 << self.order
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let mut zero = v.to_vec();
        self.kron_power_in_place(0.0, &mut zero);
        out.copy_from_slice(v);
        self.kron_power_in_place(self.alpha, out);
        for (o, z) in out.iter_mut().zip(&zero) {
            *o = 0.5 * (*o + z);
        }
    }
}

/// `R` restricted to tensors symmetric under permutation of the factors.
///
/// A symmetric vector is determined by its value on each weight class
/// (number of `1` bits), so the restriction is an `(r + 1) x (r + 1)` matrix.
/// The Perron vector of `R` is symmetric, so the Perron root is unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensorOp {
    pub alpha: f64,
    pub order: usize,
    matrix: Vec<f64>,
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    row
}

impl SymmetricTensorOp {
    pub fn new(alpha: f64, order: usize) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
        }
        if order > MAX_SYMMETRIC_ORDER {
            return Err(Error::Resource(format!(
                "order {order} exceeds the symmetric-path limit {MAX_SYMMETRIC_ORDER}"
            )));
        }
        let r = order;
        let binom: Vec<Vec<f64>> = (0..=r).map(binomial_row).collect();
        let mut matrix = vec![0.0; (r + 1) * (r + 1)];
        for x in [0.0, alpha] {
            let pow_hi: Vec<f64> = (0..=r).map(|u| (1.0 + x).powi(u as i32)).collect();
            let pow_x: Vec<f64> = (0..=r).map(|u| x.powi(u as i32)).collect();
            for k in 0..=r {
                for m in 0..=r {
                    // u of the k output ones read an input one (entry 1 + x), the
                    // other k - u read a zero (entry 1); m - u of the r - k output
                    // zeros read an input one (entry x).
                    let u_min = m.saturating_sub(r - k);
                    let u_max = k.min(m);
                    let mut acc = 0.0;
                    for u in u_min..=u_max {
                        acc += binom[k][u] * pow_hi[u] * binom[r - k][m - u] * pow_x[m - u];
                    }
                    matrix[k * (r + 1) + m] += 0.5 * acc;
                }
            }
        }
        Ok(Self { alpha, order, matrix })
    }

    pub fn entry(&self, k: usize, m: usize) -> f64 {
        self.matrix[k * (self.order + 1) + m]
    }

    /// Expands a weight-class vector to the full `2^r` symmetric tensor.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        (0..1u64 << self.order)
            .map(|i| reduced[i.count_ones() as usize])
            .collect()
    }
}

impl LinearOperator for SymmetricTensorOp {
    fn dim(&self) -> usize {
        self.order + 1
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.order + 1;
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.matrix[k * n..(k + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronEstimate {
    pub value: f64,
    /// Unit-norm iterate at termination.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration from the all-ones vector.
///
/// Stops once the Rayleigh quotient changes by less than `tol` (relative) on
/// three consecutive steps. A nonnegative operator and a positive start give
/// convergence to the Perron root.
pub fn spectral_radius<O: LinearOperator + ?Sized>(op: &O, tol: f64, max_iter: usize) -> Result<PerronEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let n = op.dim();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut calm = 0;
    for it in 1..=max_iter {
        op.apply_into(&v, &mut w);
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Convergence {
                iterations: it,
                last: rq,
            });
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if ((rq - prev) / rq).abs() < tol {
            calm += 1;
            if calm >= 3 {
                return Ok(PerronEstimate {
                    value: rq,
                    vector: v,
                    iterations: it,
                });
            }
        } else {
            calm = 0;
        }
        prev = rq;
    }
    Err(Error::Convergence {
        iterations: max_iter,
        last: prev,
    })
}

/// Coefficients `(c4, c3, c2, c1, c0)` of the characteristic polynomial of `R` at `r = 2`.
pub fn char_poly_r2(alpha: f64) -> [f64; 5] {
    let a2 = alpha * alpha / 2.0;
    [
        1.0,
        -(4.0 + 2.0 * alpha + a2),
        6.0 + 4.0 * alpha + a2,
        -(4.0 + 2.0 * alpha),
        1.0,
    ]
}

/// Horner evaluation of `(c4, ..., c0)` at `t`.
pub fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * t + c)
}

/// Largest eigenvalue of `(1, alpha; 1, 1 + alpha)`, the root of `t^2 - (2 + alpha) t + 1`.
pub fn deterministic_top_eigen(alpha: f64) -> f64 {
    0.5 * ((2.0 + alpha) + (alpha * (4.0 + alpha)).sqrt())
}

/// `(3√2 - 4)/2`, the limit of `alpha_p` as `p -> ∞`.
pub fn lp_limit() -> f64 {
    (3.0 * std::f64::consts::SQRT_2 - 4.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpThreshold {
    pub r: usize,
    /// `p = r/2 + 1`.
    pub p: f64,
    pub alpha_p: f64,
    /// Perron root of `R` at `alpha_p`.
    pub gamma_at_threshold: f64,
    /// `2^(p-1)`.
    pub threshold: f64,
}

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITER: usize = 1_000_000;

/// Perron root of `R` at order `r`, via the symmetric reduction.
pub fn perron_root(alpha: f64, r: usize) -> Result<f64> {
    Ok(spectral_radius(&SymmetricTensorOp::new(alpha, r)?, POWER_TOL, POWER_MAX_ITER)?.value)
}

/// Solves `rho(R(alpha)) = 2^(r/2)` for `alpha` in `(0, 1/2)` by bisection to width `tol`.
///
/// `R(0)` is unipotent (Perron root exactly 1), which serves as the left end of
/// the bracket without running power iteration on a Jordan block.
pub fn lp_threshold(r: usize, tol: f64) -> Result<LpThreshold> {
    if r == 0 {
        return Err(Error::Domain("order r must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let threshold = 2f64.powf(r as f64 / 2.0);
    let (mut lo, mut hi) = (0.0, 0.5);
    if perron_root(hi, r)? <= threshold {
        return Err(Error::NotBracketed { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if perron_root(mid, r)? > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let alpha_p = 0.5 * (lo + hi);
    Ok(LpThreshold {
        r,
        p: r as f64 / 2.0 + 1.0,
        alpha_p,
        gamma_at_threshold: perron_root(alpha_p, r)?,
        threshold,
    })
}

/// `2^{-(p-1) n} (R^n)_{last, last}` for `n = 1..=n_max`, where `last` is the all-ones index.
///
/// This is the normalized second-moment sequence whose divergence rules out an
/// `L^p` density.
pub fn corner_moment_ratios(alpha: f64, r: usize, n_max: usize) -> Result<Vec<f64>> {
    let op = SymmetricTensorOp::new(alpha, r)?;
    let scale = 2f64.powf(r as f64 / 2.0);
    let mut v = vec![0.0; r + 1];
    v[r] = 1.0;
    let mut out = Vec::with_capacity(n_max);
    let mut w = vec![0.0; r + 1];
    let mut log_scale = 0.0f64;
    for _ in 0..n_max {
        op.apply_into(&v, &mut w);
        let norm = w.iter().cloned().fold(0.0, f64::max);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        log_scale += norm.ln() - scale.ln();
        out.push(v[r] * log_scale.exp());
    }
    Ok(out)
}
