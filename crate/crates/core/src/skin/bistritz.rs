//! Bistritz unit-circle zero location.
//!
//! With `P(1) = 1` and `P#(z) = z^n conj(P(1/conj z))`:
//!
//! ```text
//! T_n     = P + P#
//! T_{n-1} = (P - P#) / (z - 1)
//! T_{k-1} = ((d_k + conj(d_k) z) T_k - T_{k+1}) / z,   d_k = T_{k+1}(0) / T_k(0)
//! ```
//!
//! Every `T_k` is self-reciprocal, so `T_k(1)` is real. Sign changes of the
//! sequence `T_n(1) .. T_0(1)` count zeros outside the circle. If some
//! `T_{s-1}` vanishes identically, `S = T_s` carries the unit-circle zeros and
//! the recursion restarts from
//!
//! ```text
//! T'_{s-1} = ((s + 2i Im(S'(1)) / S(1)) S(z) - 2 z S'(z)) / (z - 1)
//! ```
//!
//! A vanishing `T_k(0)` with `T_k` nonzero is not essential; it is avoided by
//! testing `P(e^{i theta} z)` instead, which has the same counts.

use num_complex::ComplexFloat;
use serde::Serialize;

use crate::polycore::Polynomial;
use crate::{Complex, Error, Result};

/// Coefficients below this fraction of the previous polynomial's scale make
/// a `T_k` identically zero.
pub const ZERO_POLY_REL: f64 = 1e-10;

/// `|T_k(1)|` below this fraction of `sum |coeffs|` is a marginal sign.
pub const SIGN_REL: f64 = 1e-12;

/// `P(1)` below this fraction of `sum |coeffs|` means `x = 1` is a root.
pub const UNIT_ROOT_REL: f64 = 1e-12;

// arbitrary angles, none a simple fraction of pi
const ROTATIONS: [f64; 8] = [0.0, 0.3137, 0.7173, 1.1892, 1.6531, 2.2361, 2.6913, 0.1234];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BistritzOutcome {
    /// Degree of the input polynomial.
    pub n: usize,
    /// Sign changes in the full sequence `A`.
    pub nu_n: usize,
    /// Sign changes in the tail `B` starting at `T_s` (singular case only).
    pub nu_s: Option<usize>,
    pub singular_level: Option<usize>,
    pub alpha_n: usize,
    pub beta_n: usize,
    pub gamma_n: usize,
    /// Some `T_k(1)` was too close to zero for its sign to be trusted.
    pub ambiguous: bool,
    /// Roots at `x = 1` removed before the recursion (included in `beta_n`).
    pub unit_roots_factored: usize,
    /// Rotation angle used to sidestep a nonessential singularity.
    pub rotation: Option<f64>,
    /// `T_m .. T_0` of the tested polynomial (primed after the singular
    /// level), where `m` is the degree after factoring out `x = 1`.
    #[serde(skip)]
    pub sequence: Vec<Polynomial>,
}

impl BistritzOutcome {
    pub fn inside(&self) -> usize {
        self.alpha_n
    }

    pub fn on(&self) -> usize {
        self.beta_n
    }

    pub fn outside(&self) -> usize {
        self.gamma_n
    }

    /// `T_k` (index by degree), if the recursion reached it.
    pub fn t(&self, k: usize) -> Option<&Polynomial> {
        let m = self.sequence.len().checked_sub(1)?;
        self.sequence.get(m.checked_sub(k)?)
    }
}

fn max_abs(c: &[Complex]) -> f64 {
    c.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

fn sum_abs(c: &[Complex]) -> f64 {
    c.iter().map(|z| z.abs()).sum()
}

fn eval(c: &[Complex], x: Complex) -> Complex {
    c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Exact division by `(z - 1)`; the remainder is discarded.
fn div_z_minus_one(c: &[Complex]) -> Vec<Complex> {
    let n = c.len() - 1;
    let mut q = vec![Complex::new(0.0, 0.0); n];
    let mut carry = c[n];
    for i in (0..n).rev() {
        q[i] = carry;
        carry = c[i] + carry;
    }
    q
}

fn reflect(c: &[Complex]) -> Vec<Complex> {
    c.iter().rev().map(|z| z.conj()).collect()
}

enum Step {
    Done(BistritzOutcome),
    /// `T_k(0) = 0` with `T_k` nonzero; try another rotation.
    Nonessential(usize),
}

pub fn bistritz(p: &Polynomial) -> Result<BistritzOutcome> {
    if !p.is_finite() {
        return Err(Error::NonFinite("Bistritz input"));
    }
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Err(Error::DegeneratePolynomial("Bistritz test needs degree >= 1"));
    }

    let mut coeffs = p.coeffs().to_vec();
    let mut factored = 0;
    while coeffs.len() > 1 && eval(&coeffs, Complex::new(1.0, 0.0)).abs() <= UNIT_ROOT_REL * sum_abs(&coeffs) {
        coeffs = div_z_minus_one(&coeffs);
        factored += 1;
    }
    let m = coeffs.len() - 1;
    if m == 0 {
        return Ok(BistritzOutcome {
            n,
            nu_n: 0,
            nu_s: None,
            singular_level: None,
            alpha_n: 0,
            beta_n: factored,
            gamma_n: 0,
            ambiguous: false,
            unit_roots_factored: factored,
            rotation: None,
            sequence: vec![Polynomial::from_raw(coeffs)],
        });
    }

    let mut last = None;
    for &theta in &ROTATIONS {
        let rotated: Vec<Complex> = if theta == 0.0 {
            coeffs.clone()
        } else {
            let w = Complex::from_polar(1.0, theta);
            let mut pw = Complex::new(1.0, 0.0);
            coeffs
                .iter()
                .map(|&a| {
                    let r = a * pw;
                    pw *= w;
                    r
                })
                .collect()
        };
        let at_one = eval(&rotated, Complex::new(1.0, 0.0));
        if at_one.abs() <= UNIT_ROOT_REL * sum_abs(&rotated) {
            continue; // the rotation put a root on x = 1
        }
        let normalised: Vec<Complex> = rotated.iter().map(|&a| a / at_one).collect();
        match run(&normalised)? {
            Step::Done(mut out) => {
                out.n = n;
                out.beta_n += factored;
                out.unit_roots_factored = factored;
                out.rotation = (theta != 0.0).then_some(theta);
                return Ok(out);
            }
            Step::Nonessential(k) => last = Some(k),
        }
    }
    Err(Error::UnsupportedBistritz {
        level: last.unwrap_or(0),
        detail: "nonessential singularity persists under every trial rotation".into(),
    })
}

fn run(pc: &[Complex]) -> Result<Step> {
    let n = pc.len() - 1;
    let sharp = reflect(pc);
    let tn: Vec<Complex> = pc.iter().zip(&sharp).map(|(a, b)| a + b).collect();
    let diff: Vec<Complex> = pc.iter().zip(&sharp).map(|(a, b)| a - b).collect();
    let tn1 = div_z_minus_one(&diff);

    // seq holds T_n, T_{n-1}, ... in order
    let mut seq: Vec<Vec<Complex>> = vec![tn, tn1];
    let mut singular: Option<usize> = None;
    loop {
        let k = n + 1 - seq.len(); // degree of the newest entry
        let upper_scale = max_abs(&seq[seq.len() - 2]);
        if max_abs(&seq[seq.len() - 1]) <= ZERO_POLY_REL * upper_scale {
            // T_k identically zero: singular at level s = k + 1
            let s = k + 1;
            if singular.is_some() {
                return Err(Error::UnsupportedBistritz {
                    level: s,
                    detail: "second essential singularity in the primed sequence".into(),
                });
            }
            let big = &seq[seq.len() - 2];
            if big[0].abs() <= ZERO_POLY_REL * max_abs(big) {
                return Err(Error::UnsupportedBistritz {
                    level: s,
                    detail: format!("T_{s}(0) = 0 together with T_{} = 0", s - 1),
                });
            }
            let primed = primed_start(big)?;
            seq.pop();
            seq.push(primed);
            singular = Some(s);
            if k == 0 {
                break;
            }
            continue;
        }
        if k == 0 {
            break;
        }
        let tk = &seq[seq.len() - 1];
        let tk1 = &seq[seq.len() - 2];
        if tk[0].abs() <= ZERO_POLY_REL * max_abs(tk) {
            return Ok(Step::Nonessential(k));
        }
        let delta = tk1[0] / tk[0];
        // ((delta + conj(delta) z) T_k - T_{k+1}) / z, dropping the constant
        // and the (cancelling) top coefficient
        let mut next = vec![Complex::new(0.0, 0.0); k];
        for (i, slot) in next.iter_mut().enumerate() {
            let j = i + 1;
            let mut v = delta * tk[j] - tk1[j];
            v += delta.conj() * tk[j - 1];
            *slot = v;
        }
        seq.push(next);
    }

    let values: Vec<(f64, f64)> = seq
        .iter()
        .map(|c| (eval(c, Complex::new(1.0, 0.0)).re, sum_abs(c)))
        .collect();
    let mut ambiguous = false;
    let count = |vals: &[(f64, f64)], ambiguous: &mut bool| -> usize {
        let mut changes = 0;
        let mut prev: Option<bool> = None;
        for &(v, scale) in vals {
            if v.abs() <= SIGN_REL * scale {
                *ambiguous = true;
                continue;
            }
            let pos = v > 0.0;
            if prev.is_some_and(|p| p != pos) {
                changes += 1;
            }
            prev = Some(pos);
        }
        changes
    };
    let nu_n = count(&values, &mut ambiguous);
    let (nu_s, beta) = match singular {
        None => (None, 0),
        Some(s) => {
            let tail = &values[n - s..];
            let nu_s = count(tail, &mut ambiguous);
            let beta = (2 * nu_s).checked_sub(s).ok_or_else(|| Error::UnsupportedBistritz {
                level: s,
                detail: format!("negative on-circle count (nu_s = {nu_s})"),
            })?;
            (Some(nu_s), beta)
        }
    };
    let alpha = n.checked_sub(nu_n).ok_or_else(|| Error::UnsupportedBistritz {
        level: 0,
        detail: "more sign changes than the degree".into(),
    })?;
    let gamma = (n - alpha).checked_sub(beta).ok_or_else(|| Error::UnsupportedBistritz {
        level: singular.unwrap_or(0),
        detail: "inconsistent counts".into(),
    })?;
    Ok(Step::Done(BistritzOutcome {
        n,
        nu_n,
        nu_s,
        singular_level: singular,
        alpha_n: alpha,
        beta_n: beta,
        gamma_n: gamma,
        ambiguous,
        unit_roots_factored: 0,
        rotation: None,
        sequence: seq.into_iter().map(Polynomial::from_raw).collect(),
    }))
}

/// `T'_{s-1}` built from `S = T_s`.
fn primed_start(big: &[Complex]) -> Result<Vec<Complex>> {
    let s = big.len() - 1;
    let one = Complex::new(1.0, 0.0);
    let s1 = eval(big, one);
    let ds: Vec<Complex> = big.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect();
    let ds1 = eval(&ds, one);
    if s1.abs() <= SIGN_REL * sum_abs(big) {
        return Err(Error::UnsupportedBistritz {
            level: s,
            detail: "T_s(1) = 0 at the singular level".into(),
        });
    }
    let factor = Complex::new(s as f64, 0.0) + Complex::new(0.0, 2.0 * (ds1 / s1).im);
    // factor S(z) - 2 z S'(z), same nominal degree s
    let mut num: Vec<Complex> = big.iter().map(|&a| factor * a).collect();
    for (i, &d) in ds.iter().enumerate() {
        num[i + 1] -= 2.0 * d;
    }
    Ok(div_z_minus_one(&num))
}
