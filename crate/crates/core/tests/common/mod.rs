//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls into the code path it is used to check: quadrature
//! instead of closed-form word sums, explicit Kronecker products instead of
//! mode contractions, Faddeev-LeVerrier instead of the printed polynomial.

#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

pub fn fixed_point(alpha: f64) -> f64 {
    (-alpha + (alpha * alpha + 4.0 * alpha).sqrt()) / 2.0
}

/// `F_n(s)` by the two-term operator recursion, `2^n` leaves, no pruning.
pub fn operator_recursion_cdf(alpha: f64, n: usize, s: f64) -> f64 {
    let m = fixed_point(alpha);
    if s <= 0.0 {
        return 0.0;
    }
    if s >= m {
        return 1.0;
    }
    if n == 0 {
        return s / m;
    }
    let pre = s / (1.0 - s);
    0.5 * operator_recursion_cdf(alpha, n - 1, pre) + 0.5 * operator_recursion_cdf(alpha, n - 1, pre - alpha)
}

/// `x ln x - x`, an antiderivative of `ln x`.
fn ln_antiderivative(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln() - x
    }
}

/// `(1/(2M)) ∫_0^M ln[(1+s)(1+s+alpha)] ds` in closed form.
pub fn lower_integral_depth0(alpha: f64) -> f64 {
    let m = fixed_point(alpha);
    let a = ln_antiderivative;
    (a(1.0 + m) - a(1.0) + a(1.0 + alpha + m) - a(1.0 + alpha)) / (2.0 * m)
}

/// `(1/(2M)) ∫_0^M ln(1 + alpha/s) ds` in closed form.
pub fn upper_integral_depth0(alpha: f64) -> f64 {
    let m = fixed_point(alpha);
    let a = ln_antiderivative;
    (a(m + alpha) - a(alpha) - a(m)) / (2.0 * m)
}

/// The two bracketing integrands and their derivatives, written out by hand.
#[derive(Clone, Copy, Debug)]
pub enum Integrand {
    Lower,
    Upper,
}

impl Integrand {
    pub fn g(self, alpha: f64, s: f64) -> f64 {
        match self {
            Integrand::Lower => 0.5 * ((1.0 + s) * (1.0 + s + alpha)).ln(),
            Integrand::Upper => 0.5 * (1.0 + alpha / s).ln(),
        }
    }

    pub fn dg(self, alpha: f64, s: f64) -> f64 {
        match self {
            Integrand::Lower => 0.5 / (1.0 + s) + 0.5 / (1.0 + s + alpha),
            Integrand::Upper => -0.5 * alpha / (s * (s + alpha)),
        }
    }
}

/// `∫ g dF = g(M) - ∫_0^M F(s) g'(s) ds` with `F` given pointwise, by quadrature.
pub fn stieltjes_by_quadrature<F: Fn(f64) -> f64>(alpha: f64, cdf: F, g: Integrand, tol: f64) -> f64 {
    let m = fixed_point(alpha);
    // F(s) g'(s) has a finite limit at 0 for the upper integrand; sample just inside.
    let h = |s: f64| {
        let s = s.max(1e-13);
        cdf(s) * g.dg(alpha, s)
    };
    g.g(alpha, m) - adaptive_simpson(&h, 0.0, m, tol)
}

pub type Dense = Vec<Vec<f64>>;

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `(G_0^{⊗r} + G_alpha^{⊗r}) / 2` built densely from explicit Kronecker products.
pub fn dense_tensor_r(alpha: f64, r: usize) -> Dense {
    let power = |x: f64| {
        let g = vec![vec![1.0, x], vec![1.0, 1.0 + x]];
        (0..r).fold(vec![vec![1.0]], |acc, _| kron(&acc, &g))
    };
    let (p0, pa) = (power(0.0), power(alpha));
    p0.iter()
        .zip(&pa)
        .map(|(r0, ra)| r0.iter().zip(ra).map(|(x, y)| 0.5 * (x + y)).collect())
        .collect()
}

pub fn matvec(a: &Dense, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Characteristic polynomial `det(tI - A)` by Faddeev-LeVerrier, leading coefficient first.
pub fn char_poly(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = if k == 1 { vec![vec![0.0; n]; n] } else { matmul(a, &m) };
        let c_prev = *coeffs.last().unwrap();
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        m = next;
        let am = matmul(a, &m);
        let trace: f64 = (0..n).map(|i| am[i][i]).sum();
        coeffs.push(-trace / k as f64);
    }
    coeffs
}

pub fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * t + c)
}

/// Largest real root of a polynomial with positive leading coefficient, by a
/// downward scan from `hi` followed by bisection.
pub fn largest_root(coeffs: &[f64], hi: f64) -> f64 {
    let mut b = hi;
    assert!(horner(coeffs, b) > 0.0);
    let step = 1e-3;
    let mut a = b - step;
    while horner(coeffs, a) > 0.0 {
        b = a;
        a -= step;
        assert!(a > -hi, "no real root found");
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if horner(coeffs, mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Empirical c.d.f. of sorted `xs` at `s`.
pub fn ecdf(sorted: &[f64], s: f64) -> f64 {
    sorted.partition_point(|&x| x <= s) as f64 / sorted.len() as f64
}

/// Largest fraction of `sorted` inside any closed window of width `w`.
pub fn max_window_mass(sorted: &[f64], w: f64) -> f64 {
    let mut best = 0;
    let mut j = 0;
    for i in 0..sorted.len() {
        while sorted[i] - sorted[j] > w {
            j += 1;
        }
        best = best.max(i + 1 - j);
    }
    best as f64 / sorted.len() as f64
}
