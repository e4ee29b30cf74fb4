//! Sufficient conditions for the absence of the skin effect, with the
//! momentum ranges on which they hold.

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::model::{derived, ModelParams};
use crate::Complex;

/// Relative size under which a coupling counts as zero.
const ZERO_REL: f64 = 1e-12;

/// Tolerance on phase locks, in radians.
pub const PHASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoSkinCondition {
    MZero,
    T1EqT2,
    T1EqMinusT2,
    /// Real couplings, `d1 d2 < 0`, purely imaginary `lambda`.
    RealD1d2Negative,
    /// Phase-locked couplings with `d1 d2` aligned to `t_s^2`.
    PhaseLockedPositivePairing,
    /// Phase-locked, `d1 d2` anti-aligned, `t_d` at right angles to `t_s`.
    PhaseLockedNegativePairingAligned,
    /// Phase-locked, `d1 d2` anti-aligned, `t_d` parallel to `t_s`.
    PhaseLockedNegativePairingRotated,
}

impl NoSkinCondition {
    pub fn label(self) -> &'static str {
        match self {
            Self::MZero => "m_zero",
            Self::T1EqT2 => "t1_eq_t2",
            Self::T1EqMinusT2 => "t1_eq_minus_t2",
            Self::RealD1d2Negative => "real_d1d2_negative",
            Self::PhaseLockedPositivePairing => "phase_locked_positive_pairing",
            Self::PhaseLockedNegativePairingAligned => "phase_locked_negative_pairing_aligned",
            Self::PhaseLockedNegativePairingRotated => "phase_locked_negative_pairing_rotated",
        }
    }
}

impl std::fmt::Display for NoSkinCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Momenta in `[0, 2 pi)` on which a condition applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRange {
    All,
    /// Open intervals `(lo, hi)`, sorted and disjoint.
    Intervals(Vec<(f64, f64)>),
}

impl KRange {
    pub fn contains(&self, k: f64) -> bool {
        let k = k.rem_euclid(TAU);
        match self {
            KRange::All => true,
            KRange::Intervals(iv) => iv.iter().any(|&(lo, hi)| k > lo && k < hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, KRange::Intervals(iv) if iv.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedCondition {
    pub condition: NoSkinCondition,
    pub k_range: KRange,
}

/// Momenta where `sign * (4 q sin^2 k + (m + t cos k)^2) > 0` for real `q, m, t`.
///
/// In `c = cos k` the expression is `(t^2 - 4q) c^2 + 2 m t c + (m^2 + 4q)`,
/// so its sign only changes at `arccos` of the real roots in `[-1, 1]`.
pub fn k_intervals(q: f64, m: f64, t: f64, sign: f64) -> KRange {
    let f = |k: f64| {
        let (s, c) = k.sin_cos();
        sign * (4.0 * q * s * s + (m + t * c).powi(2))
    };
    let a = t * t - 4.0 * q;
    let b = 2.0 * m * t;
    let c0 = m * m + 4.0 * q;
    let mut cuts = vec![0.0, PI, TAU];
    let mut add_root = |r: f64| {
        if (-1.0..=1.0).contains(&r) {
            let k = r.acos();
            cuts.push(k);
            cuts.push(TAU - k);
        }
    };
    if a.abs() > 1e-300 {
        let disc = b * b - 4.0 * a * c0;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // stable pair of roots
            let qq = -0.5 * (b + b.signum() * sq);
            if qq != 0.0 {
                add_root(qq / a);
                add_root(c0 / qq);
            } else {
                add_root(0.0);
            }
        }
    } else if b.abs() > 1e-300 {
        add_root(-c0 / b);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);

    let mut iv: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-15 || f(0.5 * (lo + hi)) <= 0.0 {
            continue;
        }
        match iv.last_mut() {
            Some(last) if (last.1 - lo).abs() < 1e-15 && f(lo) > 0.0 => last.1 = hi,
            _ => iv.push((lo, hi)),
        }
    }
    if iv.len() == 1 && iv[0] == (0.0, TAU) && f(0.0) > 0.0 && f(PI) > 0.0 {
        return KRange::All;
    }
    KRange::Intervals(iv)
}

fn is_zero(z: Complex, scale: f64) -> bool {
    z.abs() <= ZERO_REL * scale
}

/// `z` is real (or zero) up to the phase tolerance.
fn is_real(z: Complex) -> bool {
    z.im.abs() <= PHASE_TOL * z.abs()
}

fn is_imaginary(z: Complex) -> bool {
    z.re.abs() <= PHASE_TOL * z.abs()
}

pub fn no_skin_conditions(p: &ModelParams) -> Vec<MatchedCondition> {
    let dq = derived(p);
    let scale = p.scale().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut push = |condition, k_range: KRange| {
        if !k_range.is_empty() {
            out.push(MatchedCondition { condition, k_range });
        }
    };
    if is_zero(p.m, scale) {
        push(NoSkinCondition::MZero, KRange::All);
    }
    if is_zero(dq.t_d, scale) {
        push(NoSkinCondition::T1EqT2, KRange::All);
    }
    if is_zero(dq.t_s, scale) {
        push(NoSkinCondition::T1EqMinusT2, KRange::All);
    }

    let q = p.d1 * p.d2;
    if p.is_real(ZERO_REL) {
        if q.re < 0.0 {
            push(NoSkinCondition::RealD1d2Negative, k_intervals(q.re, p.m.re, dq.t_s.re, -1.0));
        }
        return out;
    }

    if is_zero(dq.t_s, scale) || is_zero(q, scale * scale) {
        return out;
    }
    // rotate t_s onto the positive real axis
    let u = Complex::from_polar(1.0, -dq.t_s.arg());
    let m = p.m * u;
    let td = dq.t_d * u;
    let qr = q * u * u;
    let ts = dq.t_s.abs();
    if !is_real(m) {
        return out;
    }
    if is_imaginary(td) && is_real(qr) {
        if qr.re > 0.0 {
            push(NoSkinCondition::PhaseLockedPositivePairing, KRange::All);
        } else {
            push(NoSkinCondition::PhaseLockedNegativePairingAligned, k_intervals(qr.re, m.re, ts, 1.0));
        }
    }
    if is_real(td) && is_real(qr) && qr.re < 0.0 {
        push(NoSkinCondition::PhaseLockedNegativePairingRotated, k_intervals(qr.re, m.re, ts, -1.0));
    }
    out
}

/// First condition whose range contains `k`.
pub fn matched_at(conds: &[MatchedCondition], k: f64) -> Option<NoSkinCondition> {
    conds.iter().find(|c| c.k_range.contains(k)).map(|c| c.condition)
}
