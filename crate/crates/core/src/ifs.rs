//! The two-map system `{T_0, T_alpha}` with `T_x(s) = (s + x) / (1 + s + x)`.
//!
//! Each map is the projective action of the generator matrix `(1, x; 1, 1 + x)`
//! on vectors `(s, 1)`. A word `x_1 x_2 ... x_n` corresponds to the composition
//! `T_{x_1} ∘ ... ∘ T_{x_n}` and to the left-to-right product of generators;
//! symbol `i` multiplies on the right. With that convention the image of
//! `[0, M_alpha]` under a word is `[b/d, (a M + b)/(c M + d)]`.

use std::fmt;
use std::ops::Mul;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A parameter `alpha` together with the right end `M_alpha` of the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfsParams {
    pub alpha: f64,
    pub m_alpha: f64,
}

impl IfsParams {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            m_alpha: fixed_point_m(alpha)?,
        })
    }
}

/// Positive root of `m^2 + alpha m - alpha = 0`, the fixed point of `T_alpha`.
pub fn fixed_point_m(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    // 2 alpha / (alpha + sqrt(alpha^2 + 4 alpha)) avoids cancellation for small alpha.
    Ok(2.0 * alpha / (alpha + (alpha * alpha + 4.0 * alpha).sqrt()))
}

#[inline]
pub fn apply_map(x: f64, s: f64) -> f64 {
    (s + x) / (1.0 + s + x)
}

/// A 2x2 real matrix `(a, b; c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// The generator `(1, x; 1, 1 + x)`.
    pub const fn generator(x: f64) -> Self {
        Self {
            a: 1.0,
            b: x,
            c: 1.0,
            d: 1.0 + x,
        }
    }

    /// `self * generator(x)`, without forming the generator.
    #[inline]
    pub fn mul_generator(&self, x: f64) -> Self {
        Self {
            a: self.a + self.b,
            b: self.a * x + self.b * (1.0 + x),
            c: self.c + self.d,
            d: self.c * x + self.d * (1.0 + x),
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// The linear fractional action `s -> (a s + b) / (c s + d)`.
    #[inline]
    pub fn apply(&self, s: f64) -> f64 {
        (self.a * s + self.b) / (self.c * s + self.d)
    }

    /// Inverse of [`Mat2::apply`] for a unimodular matrix: `s -> (d s - b) / (a - c s)`.
    #[inline]
    pub fn apply_inverse(&self, s: f64) -> f64 {
        (self.d * s - self.b) / (self.a - self.c * s)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    Alpha,
}

impl Symbol {
    #[inline]
    pub fn value(self, alpha: f64) -> f64 {
        match self {
            Symbol::Zero => 0.0,
            Symbol::Alpha => alpha,
        }
    }
}

/// A finite word over `{0, alpha}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    /// The word whose binary expansion (most significant symbol first) is `index`,
    /// with `1` standing for `alpha`.
    pub fn from_index(index: u64, len: usize) -> Self {
        Word(
            (0..len)
                .rev()
                .map(|bit| {
                    if (index >> bit) & 1 == 1 {
                        Symbol::Alpha
                    } else {
                        Symbol::Zero
                    }
                })
                .collect(),
        )
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Symbol::Zero => "0",
                Symbol::Alpha => "a",
            })?;
        }
        Ok(())
    }
}

/// Left-to-right product of the generators of `word`; the empty word gives the identity.
pub fn word_matrix(word: &Word, alpha: f64) -> Mat2 {
    word.symbols()
        .iter()
        .fold(Mat2::IDENTITY, |m, s| m.mul_generator(s.value(alpha)))
}

/// `[1, x_1, 1, x_2, ..., 1, x_n + s]`, i.e. `T_{x_1} ∘ ... ∘ T_{x_n}(s)`.
pub fn evaluate_cf(word: &Word, alpha: f64, s: f64) -> f64 {
    word_matrix(word, alpha).apply(s)
}

/// Image of `[0, M_alpha]` under the word's map.
pub fn cylinder_interval(word: &Word, params: &IfsParams) -> (f64, f64) {
    cylinder_of(&word_matrix(word, params.alpha), params.m_alpha)
}

#[inline]
pub(crate) fn cylinder_of(m: &Mat2, m_alpha: f64) -> (f64, f64) {
    (m.b / m.d, m.apply(m_alpha))
}

/// Closed form of the cylinder length, `M / (d (c M + d))`, valid since `det = 1`.
pub fn cylinder_length(m: &Mat2, m_alpha: f64) -> f64 {
    m_alpha / (m.d * (m.c * m_alpha + m.d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportKind {
    Cantor,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportGeometry {
    pub kind: SupportKind,
    /// `T_alpha(0) - T_0(M_alpha)`; positive means the first-level images are disjoint.
    pub gap: f64,
}

pub fn support_type(alpha: f64) -> Result<SupportGeometry> {
    let m = fixed_point_m(alpha)?;
    let gap = apply_map(alpha, 0.0) - apply_map(0.0, m);
    let kind = if gap > 0.0 {
        SupportKind::Cantor
    } else {
        SupportKind::Interval
    };
    Ok(SupportGeometry { kind, gap })
}

/// Draws a fair random word of length `depth` from `rng`.
pub fn random_word<R: Rng + ?Sized>(depth: usize, rng: &mut R) -> Word {
    Word(
        (0..depth)
            .map(|_| {
                if rng.random::<bool>() {
                    Symbol::Alpha
                } else {
                    Symbol::Zero
                }
            })
            .collect(),
    )
}

/// Approximate draw from the stationary measure: `[1, X_1, ..., 1, X_depth]` with
/// fair `X_i ∈ {0, alpha}`. The exact draw lies in the same depth-`depth` cylinder,
/// so the truncation error is at most that cylinder's length (and at most `1/depth`).
pub fn sample_mu<R: Rng + ?Sized>(alpha: f64, depth: usize, rng: &mut R) -> f64 {
    let mut m = Mat2::IDENTITY;
    for _ in 0..depth {
        let x = if rng.random::<bool>() { alpha } else { 0.0 };
        m = m.mul_generator(x);
    }
    m.apply(0.0)
}
