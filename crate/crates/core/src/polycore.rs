//! Complex polynomial utilities: trimming, evaluation and root finding.
//!
//! Roots come from the eigenvalues of the companion matrix and are then
//! polished by Newton iteration on the original coefficients. Multiple roots
//! are returned as tight numerical clusters.

use faer::Mat;
use num_complex::ComplexFloat;

use crate::{Complex, Error, Result};

/// Relative size below which a trailing coefficient counts as zero.
pub const TRIM_REL: f64 = 1e-14;

/// Relative residual accepted for a polished root.
pub const POLISH_REL: f64 = 1e-12;

const NEWTON_MAX_ITERS: usize = 30;

/// Polynomial with complex coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    /// Builds a polynomial and trims trailing coefficients that are
    /// negligible against the largest one.
    pub fn new(coeffs: Vec<Complex>) -> Self {
        let mut p = Self::from_raw(coeffs);
        p.trim();
        p
    }

    /// Builds a polynomial without trimming. Useful when the nominal degree
    /// carries meaning (e.g. self-reciprocal polynomials).
    pub fn from_raw(mut coeffs: Vec<Complex>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// `(x - r_1)(x - r_2)...` scaled by `lead`.
    pub fn from_roots(roots: &[Complex], lead: Complex) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::from_raw(coeffs)
    }

    fn trim(&mut self) {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            self.coeffs.truncate(1);
            return;
        }
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() < TRIM_REL * scale {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Nominal degree (`len - 1`).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, i: usize) -> Complex {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs_coeff() == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, x: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::from_raw(vec![Complex::new(0.0, 0.0)]);
        }
        Self::from_raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::from_raw(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Reciprocal conjugate `x^n conj(p(1/conj(x)))` at the nominal degree.
    pub fn reciprocal_conjugate(&self) -> Self {
        Self::from_raw(self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }

    /// Divides by `(x - r)` with synthetic division, dropping the remainder.
    pub fn deflate(&self, r: Complex) -> (Self, Complex) {
        let n = self.degree();
        if n == 0 {
            return (Self::from_raw(vec![Complex::new(0.0, 0.0)]), self.coeffs[0]);
        }
        let mut q = vec![Complex::new(0.0, 0.0); n];
        let mut carry = self.coeffs[n];
        for i in (0..n).rev() {
            q[i] = carry;
            carry = self.coeffs[i] + carry * r;
        }
        (Self::from_raw(q), carry)
    }

    /// Residual bound used by the root polisher at `x`.
    pub fn polish_bound(&self, x: Complex) -> f64 {
        POLISH_REL * self.max_abs_coeff() * x.abs().max(1.0).powi(self.degree() as i32)
    }

    pub fn roots(&self) -> Result<Vec<Complex>> {
        roots(self)
    }
}

/// All `degree` roots of `p`, with multiplicity.
pub fn roots(p: &Polynomial) -> Result<Vec<Complex>> {
    if !p.is_finite() {
        return Err(Error::NonFinite("polynomial coefficients"));
    }
    let mut p = p.clone();
    p.trim();
    if p.is_zero() {
        return Err(Error::DegeneratePolynomial("all coefficients vanish"));
    }
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegeneratePolynomial("degree 0 has no roots"));
    }
    let lead = p.leading();
    let raw = if n == 1 {
        vec![-p.coeffs[0] / lead]
    } else {
        let mut companion = Mat::<Complex>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = Complex::new(1.0, 0.0);
        }
        for i in 0..n {
            companion[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        companion
            .eigenvalues()
            .map_err(|_| Error::NoConvergence { size: n })?
    };
    Ok(raw.into_iter().map(|z| polish(&p, z)).collect())
}

/// Newton refinement that never accepts a step increasing the residual.
pub fn polish(p: &Polynomial, mut x: Complex) -> Complex {
    let (mut fx, _) = p.eval_with_derivative(x);
    for _ in 0..NEWTON_MAX_ITERS {
        let (_, dfx) = p.eval_with_derivative(x);
        if dfx == Complex::new(0.0, 0.0) || fx == Complex::new(0.0, 0.0) {
            break;
        }
        let candidate = x - fx / dfx;
        let fc = p.eval(candidate);
        // also stops on NaN
        if fc.abs().partial_cmp(&fx.abs()) != Some(std::cmp::Ordering::Less) {
            break;
        }
        let step = (candidate - x).abs();
        x = candidate;
        fx = fc;
        if step <= f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Principal complex arccosine. The real part lies in `[0, pi]`; the sign
/// of the imaginary part follows `num_complex`'s branch cuts on the real axis
/// outside `[-1, 1]`. Callers that only use `|Im|` are branch independent.
pub fn arccos_c(z: Complex) -> Result<Complex> {
    if !z.is_finite() {
        return Err(Error::NonFinite("arccos argument"));
    }
    Ok(z.acos())
}

/// Both square roots `(w, -w)` with `w` on the principal branch.
pub fn sqrt_pair(z: Complex) -> (Complex, Complex) {
    let w = z.sqrt();
    (w, -w)
}

/// Greedy multiset matching: the largest distance between paired elements
/// when each element of `a` is matched to the nearest unused element of `b`.
/// Returns `None` if the lengths differ.
pub fn multiset_distance(a: &[Complex], b: &[Complex]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (x - y).abs()))
            .min_by(|l, r| l.1.total_cmp(&r.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
