//! Skin-effect classification of the periodic-curve eigenvalues.
//!
//! An eigenvalue `lambda_{+-}(k)` of the periodic chain is also an eigenvalue
//! of the long open chain without skin effect exactly when at least two
//! roots of the bulk quartic lie on the unit circle. The count comes from the
//! Bistritz test and is cross-checked against the polished roots.

pub mod bistritz;
pub mod closed_form;
pub mod conditions;

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub use bistritz::{bistritz, BistritzOutcome};
pub use closed_form::{t0_constant, t_polynomials_complex, t_polynomials_real, ClosedFormStop, ClosedForms};
pub use conditions::{k_intervals, no_skin_conditions, KRange, MatchedCondition, NoSkinCondition};

use crate::model::{bulk_quartic, derived, periodic_lambda, ModelParams};
use crate::par::{self, Execution};
use crate::polycore::Polynomial;
use crate::{Complex, Error, Result};

/// `|N2|` below this multiple of the coupling scale squared is a special point.
const SPECIAL_REL: f64 = 1e-9;

/// Root moduli within this distance of 1 count as on the circle in the
/// direct cross-check.
pub const ON_CIRCLE_TOL: f64 = 1e-7;

/// The bulk quartic at `lambda`, rescaled so that `P(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinContext {
    /// `lambda^2 - (m + t_s)^2`
    pub n2: Complex,
    pub poly: Polynomial,
    pub lambda: Complex,
    pub k: f64,
}

impl SkinContext {
    pub fn new(p: &ModelParams, lambda: Complex, k: f64) -> Result<Self> {
        let dq = derived(p);
        let n2 = lambda * lambda - (p.m + dq.t_s).powi(2);
        let scale = p.scale().max(lambda.abs()).max(f64::MIN_POSITIVE);
        if n2.abs() <= SPECIAL_REL * scale * scale {
            return Err(Error::Precondition("N2 = 0: lambda = +-(m + t_s) is a special point".into()));
        }
        let q = bulk_quartic(p, lambda);
        if q.degenerate {
            return Err(Error::SingularQuartic);
        }
        let poly = Polynomial::from_raw(q.coeffs.iter().map(|&c| c / n2).collect());
        Ok(Self { n2, poly, lambda, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub fn pick(self, pair: (Complex, Complex)) -> Complex {
        match self {
            BranchSign::Plus => pair.0,
            BranchSign::Minus => pair.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkinVerdict {
    pub k: f64,
    pub lambda: Complex,
    pub branch_sign: BranchSign,
    /// Zeros of the bulk quartic on the unit circle.
    pub on_circle_count: usize,
    /// `on_circle_count < 2`.
    pub skin: bool,
    pub matched_condition: Option<NoSkinCondition>,
    /// `lambda` is one of the excluded special values; the count then comes
    /// from the polished roots only and the Bistritz test was not run.
    pub special_point: bool,
    /// On-circle count from the polished roots.
    pub root_check_count: usize,
    /// Some Bistritz sign was marginal.
    pub ambiguous: bool,
}

/// Roots with `||x| - 1| < tol`.
pub fn count_on_circle(p: &ModelParams, lambda: Complex, tol: f64) -> Result<usize> {
    let roots = bulk_quartic(p, lambda).polynomial().roots()?;
    Ok(roots.iter().filter(|x| (x.abs() - 1.0).abs() < tol).count())
}

/// `lambda` is one of `+-(m + t_s)` or `-m +- t_s`.
pub fn is_special_point(p: &ModelParams, lambda: Complex) -> bool {
    let dq = derived(p);
    let scale = p.scale().max(lambda.abs()).max(f64::MIN_POSITIVE);
    let specials = [p.m + dq.t_s, -(p.m + dq.t_s), -p.m + dq.t_s, -p.m - dq.t_s];
    specials.iter().any(|&s| (lambda - s).abs() <= SPECIAL_REL * scale)
}

pub fn classify_skin(p: &ModelParams, k: f64, sign: BranchSign) -> Result<SkinVerdict> {
    let conds = no_skin_conditions(p);
    classify_with_conditions(p, k, sign, &conds)
}

fn classify_with_conditions(
    p: &ModelParams,
    k: f64,
    sign: BranchSign,
    conds: &[MatchedCondition],
) -> Result<SkinVerdict> {
    p.validate()?;
    let lambda = sign.pick(periodic_lambda(p, k));
    let root_check_count = count_on_circle(p, lambda, ON_CIRCLE_TOL)?;
    let matched_condition = conditions::matched_at(conds, k);
    if is_special_point(p, lambda) {
        return Ok(SkinVerdict {
            k,
            lambda,
            branch_sign: sign,
            on_circle_count: root_check_count,
            skin: root_check_count < 2,
            matched_condition,
            special_point: true,
            root_check_count,
            ambiguous: false,
        });
    }
    let ctx = SkinContext::new(p, lambda, k)?;
    let out = bistritz(&ctx.poly)?;
    Ok(SkinVerdict {
        k,
        lambda,
        branch_sign: sign,
        on_circle_count: out.beta_n,
        skin: out.beta_n < 2,
        matched_condition,
        special_point: false,
        root_check_count,
        ambiguous: out.ambiguous,
    })
}

/// Both branches on the grid `k_j = 2 pi j / n_k`, ordered by `k`, plus first.
pub fn skin_sweep(p: &ModelParams, n_k: usize, exec: Execution) -> Vec<Result<SkinVerdict>> {
    let conds = no_skin_conditions(p);
    par::map_range(2 * n_k, exec, |j| {
        let k = TAU * (j / 2) as f64 / n_k as f64;
        let sign = if j % 2 == 0 { BranchSign::Plus } else { BranchSign::Minus };
        classify_with_conditions(p, k, sign, &conds)
    })
}

/// Spot check for isolated no-skin eigenvalues (e.g. self-intersections of
/// the periodic curve): at least two roots on the circle and a Bistritz
/// sequence that is singular at an even level, so that the on-circle count
/// is even.
pub fn spot_check_isolated(p: &ModelParams, lambda: Complex) -> bool {
    let Ok(on) = count_on_circle(p, lambda, 1e-8) else {
        return false;
    };
    if on < 2 {
        return false;
    }
    let Ok(ctx) = SkinContext::new(p, lambda, f64::NAN) else {
        return false;
    };
    match bistritz(&ctx.poly) {
        Ok(out) => out.rotation.is_none() && matches!(out.singular_level, Some(s) if s % 2 == 0),
        Err(_) => false,
    }
}
