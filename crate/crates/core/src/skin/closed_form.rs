//! Closed forms of `T_4 .. T_1` for the normalised bulk quartic.
//!
//! These are an independent check on the recursion in [`super::bistritz`];
//! classification itself never depends on them.

use num_complex::ComplexFloat;

use super::bistritz::ZERO_POLY_REL;
use super::SkinContext;
use crate::model::{derived, ModelParams};
use crate::polycore::Polynomial;
use crate::{Complex, Error, Result};

/// Why the closed-form sequence stopped before `T_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormStop {
    /// `T_{level-1}` vanishes identically.
    Singular { level: usize },
    /// `T_level(0) = 0`, so the next polynomial is undefined.
    Nonessential { level: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForms {
    /// `T_4, T_3, ...` as far as they are defined.
    pub t: Vec<Polynomial>,
    pub stop: Option<ClosedFormStop>,
}

fn i() -> Complex {
    Complex::new(0.0, 1.0)
}

fn re(z: Complex) -> Complex {
    Complex::new(z.re, 0.0)
}

fn im(z: Complex) -> Complex {
    Complex::new(z.im, 0.0)
}

fn max_abs(p: &[Complex]) -> f64 {
    p.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

/// Sequence terminator shared by both closed forms: stops at an identically
/// vanishing polynomial or a vanishing constant term.
fn push(out: &mut ClosedForms, coeffs: Vec<Complex>, degree: usize) -> bool {
    let prev_scale = out.t.last().map(|p| p.max_abs_coeff()).unwrap_or(0.0);
    let scale = max_abs(&coeffs);
    let zero = !out.t.is_empty() && scale <= ZERO_POLY_REL * prev_scale;
    let constant_zero = coeffs[0].abs() <= ZERO_POLY_REL * scale;
    out.t.push(Polynomial::from_raw(coeffs));
    if zero {
        out.stop = Some(ClosedFormStop::Singular { level: degree + 1 });
        return false;
    }
    if constant_zero && degree > 1 {
        out.stop = Some(ClosedFormStop::Nonessential { level: degree });
        return false;
    }
    true
}

/// `T_4 .. T_1` for arbitrary complex parameters.
pub fn t_polynomials_complex(ctx: &SkinContext, p: &ModelParams) -> Result<ClosedForms> {
    let dq = derived(p);
    let (n2, lambda) = (ctx.n2, ctx.lambda);
    let d = dq.quartic_lead;
    let nn = n2.norm_sqr();
    if nn == 0.0 {
        return Err(Error::Precondition("N2 = 0".into()));
    }
    let mts = p.m * dq.t_s;
    let ltd = lambda * dq.t_d;

    let r_d = re(d * n2.conj());
    let i_d = im(d * n2.conj());
    let r_m = re(mts * n2.conj());
    let i_m = im(mts * n2.conj());
    let r_l = re(ltd * n2.conj());
    let i_l = im(ltd * n2.conj());

    let mut out = ClosedForms { t: Vec::new(), stop: None };

    let t4 = vec![
        2.0 * r_d / nn,
        2.0 * (i() * i_l - r_m) / nn,
        2.0 * (-2.0 * r_d + 2.0 * r_m) / nn + 2.0,
        2.0 * (-i() * i_l - r_m) / nn,
        2.0 * r_d / nn,
    ];
    if !push(&mut out, t4, 4) {
        return Ok(out);
    }

    let t3 = vec![
        -2.0 * i() * i_d / nn,
        2.0 * (-i() * i_d + i() * i_m - r_l) / nn,
        2.0 * (i() * i_d - i() * i_m - r_l) / nn,
        2.0 * i() * i_d / nn,
    ];
    if !push(&mut out, t3, 3) {
        return Ok(out);
    }

    let rl_d = re(ltd * d.conj());
    let im_d = im(mts * d.conj());
    let den = i() * i_d;
    let t2 = vec![
        2.0 * (rl_d - i() * im_d) / den,
        2.0 * (2.0 * i() * im_d) / den - 2.0,
        2.0 * (-rl_d - i() * im_d) / den,
    ];
    if !push(&mut out, t2, 2) {
        return Ok(out);
    }

    let ip = im(n2 * d.conj());
    let q = rl_d * rl_d + im_d * im_d;
    let x = r_l - ip * ip * rl_d / q;
    let y = i_m + 4.0 * ip + ip * ip * im_d / q - 4.0 * ip * rl_d * rl_d / q;
    let t1 = vec![(2.0 * x - 2.0 * i() * y) / nn, (2.0 * x + 2.0 * i() * y) / nn];
    push(&mut out, t1, 1);
    Ok(out)
}

/// `T_4 .. T_1` in the form specialised to real couplings (`lambda` complex).
pub fn t_polynomials_real(ctx: &SkinContext, p: &ModelParams) -> Result<ClosedForms> {
    if !p.is_real(1e-12) {
        return Err(Error::Precondition("real-parameter forms need real couplings".into()));
    }
    let dq = derived(p);
    let (n2, lambda) = (ctx.n2, ctx.lambda);
    let d = dq.quartic_lead.re;
    let mts = (p.m * dq.t_s).re;
    let td = dq.t_d.re;
    let nn = n2.norm_sqr();
    if nn == 0.0 {
        return Err(Error::Precondition("N2 = 0".into()));
    }
    let mut out = ClosedForms { t: Vec::new(), stop: None };

    let rn = n2.re;
    let imn = n2.im;
    let il = (lambda * n2.conj()).im;
    let rl = (lambda * n2.conj()).re;
    let c = |x: f64| Complex::new(x, 0.0);

    let t4 = vec![
        c(2.0 * d * rn / nn),
        (2.0 * i() * td * il - c(2.0 * mts * rn)) / nn,
        c((-4.0 * d * rn + 4.0 * mts * rn) / nn + 2.0),
        (-2.0 * i() * td * il - c(2.0 * mts * rn)) / nn,
        c(2.0 * d * rn / nn),
    ];
    if !push(&mut out, t4, 4) {
        return Ok(out);
    }

    let t3 = vec![
        2.0 * i() * d * imn / nn,
        (2.0 * i() * d * imn - 2.0 * i() * mts * imn - c(2.0 * td * rl)) / nn,
        (-2.0 * i() * d * imn + 2.0 * i() * mts * imn - c(2.0 * td * rl)) / nn,
        -2.0 * i() * d * imn / nn,
    ];
    if !push(&mut out, t3, 3) {
        return Ok(out);
    }

    let g = c(-2.0 * td * lambda.re) / (i() * imn);
    let t2 = vec![g, c(-2.0), -g];
    if !push(&mut out, t2, 2) {
        return Ok(out);
    }

    let x = -d * imn * imn / (td * lambda.re) + td * rl;
    let y = 2.0 * i() * mts * imn;
    let t1 = vec![(c(2.0 * x) + y) / nn, (c(2.0 * x) - y) / nn];
    push(&mut out, t1, 1);
    Ok(out)
}

/// `T_0 = 2 Re(T_2(0) / T_1(0)) T_1(1) - T_2(1)`.
pub fn t0_constant(t2: &Polynomial, t1: &Polynomial) -> Result<f64> {
    let t10 = t1.coeff(0);
    if t10.abs() <= ZERO_POLY_REL * t1.max_abs_coeff() || t10 == Complex::new(0.0, 0.0) {
        return Err(Error::UnsupportedBistritz {
            level: 1,
            detail: "T_1(0) = 0: the sequence is singular below level 2".into(),
        });
    }
    let one = Complex::new(1.0, 0.0);
    Ok(2.0 * (t2.coeff(0) / t10).re * t1.eval(one).re - t2.eval(one).re)
}
