//! Zero modes: the closed-form `lambda = 0` bulk solutions, the decaying
//! edge state built from them, and the existence criterion.
//!
//! Branch labels of the closed forms can swap with the square-root
//! convention, so every decision here is taken from the root moduli.

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

use crate::model::{derived, ModelParams};
use crate::polycore::arccos_c;
use crate::{Complex, Error, Result};

/// Half-width of the band around `lhs = rhs` reported as the gapless boundary.
pub const BOUNDARY_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeSolution {
    pub x_mm: Complex,
    pub x_pm: Complex,
    pub x_mp: Complex,
    pub x_pp: Complex,
    pub a_m: Complex,
    pub a_p: Complex,
    /// `-m / sqrt(-4 D2)`
    pub y1: Complex,
    /// `t_s / sqrt(-4 D2)`
    pub y2: Complex,
}

impl ZeroModeSolution {
    /// `(x_{-,s}, x_{+,s}, a_s)` for one branch.
    pub fn branch(&self, side: Side) -> Option<(Complex, Complex, Complex)> {
        match side {
            Side::MinusBranch => Some((self.x_mm, self.x_pm, self.a_m)),
            Side::PlusBranch => Some((self.x_mp, self.x_pp, self.a_p)),
            Side::None => None,
        }
    }

    pub fn xs(&self) -> [Complex; 4] {
        [self.x_mm, self.x_pm, self.x_mp, self.x_pp]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    MinusBranch,
    PlusBranch,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeVerdict {
    pub exists: bool,
    pub side: Side,
    /// `|lhs - rhs|` fell inside [`BOUNDARY_BAND`]; `exists` is then false.
    pub boundary: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// `x` roots of both branches, `[[x_{-,-}, x_{+,-}], [x_{-,+}, x_{+,+}]]`.
/// A branch whose leading coefficient vanishes has a root at infinity.
fn branch_roots(p: &ModelParams) -> [[Complex; 2]; 2] {
    let dq = derived(p);
    let disc = (4.0 * p.d1 * p.d2 + p.m * p.m - 4.0 * p.t1 * p.t2).sqrt();
    let r = (4.0 * p.d1 * p.d2 + dq.t_d * dq.t_d).sqrt();
    let inf = Complex::new(f64::INFINITY, 0.0);
    let mut out = [[inf; 2]; 2];
    for (b, sigma) in [-1.0, 1.0].into_iter().enumerate() {
        let den = dq.t_s + sigma * r;
        if den.abs() > 1e-300 {
            out[b] = [(-p.m - disc) / den, (-p.m + disc) / den];
        }
    }
    out
}

pub fn zero_mode_roots(p: &ModelParams) -> Result<ZeroModeSolution> {
    p.validate()?;
    if p.d1 == Complex::new(0.0, 0.0) {
        return Err(Error::Precondition(
            "d1 = 0: no amplitude a at lambda = 0; use the d1 d2 = 0 closed form".into(),
        ));
    }
    let dq = derived(p);
    let [[x_mm, x_pm], [x_mp, x_pp]] = branch_roots(p);
    if ![x_mm, x_pm, x_mp, x_pp].iter().all(|z| z.is_finite()) {
        return Err(Error::NonFinite("zero-mode root at infinity"));
    }
    let r = (4.0 * p.d1 * p.d2 + dq.t_d * dq.t_d).sqrt();
    let a_m = (-dq.t_d - r) / (2.0 * p.d1);
    let a_p = (-dq.t_d + r) / (2.0 * p.d1);
    let norm = (-4.0 * (p.d1 * p.d2 - p.t1 * p.t2)).sqrt();
    let (y1, y2) = if norm == Complex::new(0.0, 0.0) {
        (Complex::new(f64::NAN, 0.0), Complex::new(f64::NAN, 0.0))
    } else {
        (-p.m / norm, dq.t_s / norm)
    };
    Ok(ZeroModeSolution { x_mm, x_pm, x_mp, x_pp, a_m, a_p, y1, y2 })
}

/// The branch whose two roots both lie strictly inside the unit circle.
fn decaying_branch(p: &ModelParams) -> (Side, f64) {
    let roots = branch_roots(p);
    let worst = |b: usize| roots[b][0].abs().max(roots[b][1].abs());
    let (minus, plus) = (worst(0), worst(1));
    if minus <= plus {
        (if minus < 1.0 { Side::MinusBranch } else { Side::None }, minus)
    } else {
        (if plus < 1.0 { Side::PlusBranch } else { Side::None }, plus)
    }
}

/// Direct modulus test: does one branch have both `|x| < 1`?
pub fn modulus_test(p: &ModelParams) -> Side {
    decaying_branch(p).0
}

pub fn has_zero_mode(p: &ModelParams) -> Result<ZeroModeVerdict> {
    p.validate()?;
    let dq = derived(p);
    let gap = p.t1 * p.t2 - p.d1 * p.d2;
    let scale = p.scale().max(f64::MIN_POSITIVE);
    if gap.abs() <= 1e-14 * scale * scale {
        return Err(Error::Precondition("t1 t2 - d1 d2 = 0: zero-mode criterion is singular".into()));
    }
    let root = 2.0 * gap.sqrt();
    let lhs = arccos_c(-p.m / root)?.im.abs();
    let rhs = arccos_c(dq.t_s / root)?.im.abs();
    let boundary = (lhs - rhs).abs() < BOUNDARY_BAND;
    let exists = !boundary && lhs < rhs;
    let side = if exists {
        match decaying_branch(p) {
            (Side::None, _) => {
                // inside the criterion but the moduli disagree in the last
                // digits; pick the branch closer to decaying
                let roots = branch_roots(p);
                let w = |b: usize| roots[b][0].abs().max(roots[b][1].abs());
                if w(0) <= w(1) {
                    Side::MinusBranch
                } else {
                    Side::PlusBranch
                }
            }
            (s, _) => s,
        }
    } else {
        Side::None
    };
    Ok(ZeroModeVerdict { exists, side, boundary, lhs, rhs })
}

/// Hermitian parametrisation `t1 = t e^{i phi_t}`, `t2 = t e^{-i phi_t}`,
/// `d1 = d e^{i phi_d}`, `d2 = d e^{-i phi_d}`. The pairing phase drops out.
pub fn hermitian_zero_mode_condition(m: f64, t: f64, phi_t: f64, d: f64, _phi_d: f64) -> bool {
    m * m < 4.0 * t * t * phi_t.cos().powi(2) && d * d > t * t * phi_t.sin().powi(2)
}

/// Unit-norm edge state `phi(x_-, a) - phi(x_+, a)` on the decaying branch,
/// with `phi(x, a) = (x, a x, x^2, a x^2, ..., x^L, a x^L)`.
pub fn zero_mode_state(p: &ModelParams, sites: usize) -> Result<Vec<Complex>> {
    if sites == 0 {
        return Err(Error::Precondition("chain length must be at least 1".into()));
    }
    let verdict = has_zero_mode(p)?;
    if !verdict.exists {
        return Err(Error::NoZeroMode);
    }
    let sol = zero_mode_roots(p)?;
    let (x1, x2, a) = sol.branch(verdict.side).ok_or(Error::NoZeroMode)?;
    let mut out = Vec::with_capacity(2 * sites);
    let (mut p1, mut p2) = (x1, x2);
    for _ in 0..sites {
        let diff = p1 - p2;
        out.push(diff);
        out.push(a * diff);
        p1 *= x1;
        p2 *= x2;
    }
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::RootStructure("zero-mode roots coincide; the state vanishes".into()));
    }
    out.iter_mut().for_each(|z| *z /= norm);
    Ok(out)
}

/// Residual of the left boundary equations (the two site-1 rows of `H psi`)
/// for the normalised state, relative to the coupling scale. The ansatz
/// vanishes at site 0, so this is zero up to round-off.
pub fn left_boundary_residual(p: &ModelParams, sites: usize) -> Result<f64> {
    let psi = zero_mode_state(p, sites.max(2))?;
    let r1 = p.m * psi[0] + p.t1 * psi[2] + p.d1 * psi[3];
    let r2 = -p.m * psi[1] - p.d2 * psi[2] - p.t2 * psi[3];
    Ok(r1.norm().max(r2.norm()) / p.scale())
}
