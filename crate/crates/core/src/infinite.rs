//! Infinite-size eigenvalue curves.
//!
//! At fixed `alpha` the bulk roots are parametrised as the quartet
//! `{s/k, k e^{ia}, k e^{-ia}, 1/(s k)}`. With `u = k + 1/k`, `v = s + 1/s`
//! and `c = cos a` the Vieta relations become
//!
//! ```text
//! u v + 2 c u        = 2 m t_s / D2
//! (1/k - k)(v - 2c)  = 2 lambda t_d / D2
//! D2 (u^2 + 2 c v)   = lambda^2 - m^2 - t_s^2
//! ```
//!
//! Eliminating `v` and `lambda` leaves a quartic in `u`. The elimination may
//! produce spurious candidates, so every candidate is accepted only after its
//! quartet reproduces the roots of the bulk quartic.

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::model::{bulk_quartic, derived, BulkSolution, ModelParams};
use crate::par::{self, Execution};
use crate::polycore::{multiset_distance, Polynomial};
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `|x1| >= |x2| = |x3| >= |x4|`: a genuine open-chain eigenvalue.
    Physical,
    PairDominant,
    PairSubdominant,
    /// Three or more equal moduli, e.g. where branches meet.
    Ambiguous,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::Physical, Branch::PairDominant, Branch::PairSubdominant, Branch::Ambiguous];

    pub fn label(self) -> &'static str {
        match self {
            Branch::Physical => "physical",
            Branch::PairDominant => "pair_dominant",
            Branch::PairSubdominant => "pair_subdominant",
            Branch::Ambiguous => "ambiguous",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub alpha: f64,
    pub lambda: Complex,
    pub kappa: Complex,
    /// Normalised so that `|s| >= 1`.
    pub s: Complex,
    pub branch: Branch,
}

impl SpectrumPoint {
    pub fn quartet(&self) -> [Complex; 4] {
        quartet(self.kappa, self.s, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteOptions {
    /// Relative tolerance for equal root moduli.
    pub modulus_tol: f64,
    /// Relative tolerance for matching the quartet against the bulk roots.
    pub reconstruction_tol: f64,
    pub execution: Execution,
}

impl Default for InfiniteOptions {
    fn default() -> Self {
        Self { modulus_tol: 1e-6, reconstruction_tol: 1e-8, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFailure {
    pub alpha: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    /// Ordered by `alpha`, then by the order solutions were found.
    pub points: Vec<SpectrumPoint>,
    pub alpha_grid_size: usize,
    /// Grid points where no solution set could be produced.
    pub gaps: Vec<GridFailure>,
}

impl SpectrumCurve {
    pub fn branch(&self, b: Branch) -> impl Iterator<Item = &SpectrumPoint> + '_ {
        self.points.iter().filter(move |pt| pt.branch == b)
    }

    pub fn physical_lambdas(&self) -> Vec<Complex> {
        self.branch(Branch::Physical).map(|pt| pt.lambda).collect()
    }

    /// Distance from `lambda` to the nearest point of branch `b`.
    pub fn distance_to(&self, b: Branch, lambda: Complex) -> Option<f64> {
        self.branch(b).map(|pt| (pt.lambda - lambda).abs()).min_by(f64::total_cmp)
    }
}

fn quartet(kappa: Complex, s: Complex, alpha: f64) -> [Complex; 4] {
    let e = Complex::from_polar(1.0, alpha);
    [s / kappa, kappa * e, kappa / e, 1.0 / (s * kappa)]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Branch from the four root moduli sorted in descending order.
pub fn classify_moduli(sorted: [f64; 4], tol: f64) -> Result<Branch> {
    let [x1, x2, x3, x4] = sorted;
    let mid = close(x2, x3, tol);
    let top = close(x1, x2, tol);
    let bottom = close(x3, x4, tol);
    match (top, mid, bottom) {
        (false, false, false) => Err(Error::NotOnCurve),
        (false, true, false) => Ok(Branch::Physical),
        (true, false, false) => Ok(Branch::PairDominant),
        (false, false, true) => Ok(Branch::PairSubdominant),
        _ => Ok(Branch::Ambiguous),
    }
}

pub fn classify_branch(roots: &BulkSolution) -> Result<Branch> {
    classify_branch_with(roots, InfiniteOptions::default().modulus_tol)
}

pub fn classify_branch_with(roots: &BulkSolution, tol: f64) -> Result<Branch> {
    let mut m = roots.moduli();
    m.sort_by(|a, b| b.total_cmp(a));
    classify_moduli(m, tol)
}

/// Branch of a quartet from `|kappa|` and `|s| >= 1`.
fn quartet_branch(kappa: Complex, s: Complex, tol: f64) -> Branch {
    let k2 = kappa.norm_sqr();
    let sa = s.abs();
    let at_top = close(k2, sa, tol);
    let at_bottom = close(k2, 1.0 / sa, tol);
    if at_top || at_bottom {
        // |k| meets the outer pair: three equal moduli (or four if |s| = 1)
        if close(sa, 1.0, tol) {
            return Branch::Physical;
        }
        return Branch::Ambiguous;
    }
    if k2 > sa {
        Branch::PairDominant
    } else if k2 < 1.0 / sa {
        Branch::PairSubdominant
    } else {
        Branch::Physical
    }
}

fn with_s_normalised(s: Complex) -> Complex {
    if s.abs() < 1.0 {
        1.0 / s
    } else {
        s
    }
}

fn quadratic_roots(sum: Complex) -> (Complex, Complex) {
    // z^2 - sum z + 1 = 0
    let disc = (sum * sum - 4.0).sqrt();
    let (r1, r2) = ((sum + disc) / 2.0, (sum - disc) / 2.0);
    // the larger root is accurate; take the other from the product
    if r1.abs() >= r2.abs() {
        (r1, 1.0 / r1)
    } else {
        (r2, 1.0 / r2)
    }
}

struct Candidate {
    lambda: Complex,
    kappa: Complex,
    s: Complex,
}

fn candidates_from_u(u: Complex, v: Complex, ell: Complex, out: &mut Vec<Candidate>) {
    let (k0, k1) = quadratic_roots(u);
    let (s0, _) = quadratic_roots(v);
    let s = with_s_normalised(s0);
    let lam = ell.sqrt();
    for kappa in [k0, k1] {
        for lambda in [lam, -lam] {
            out.push(Candidate { lambda, kappa, s });
        }
    }
}

fn nearest(roots: &[Complex; 4], target: Complex, skip: &[usize]) -> Option<usize> {
    (0..4)
        .filter(|i| !skip.contains(i))
        .min_by(|&i, &j| (roots[i] - target).abs().total_cmp(&(roots[j] - target).abs()))
}

/// Accept a candidate if its quartet matches the bulk roots at its `lambda`.
///
/// `kappa` and `s` come out of `z + 1/z = u` quadratics, which lose half
/// the digits when `u` is near `+-2` (`t1 = t2` puts the whole physical branch
/// there). `lambda` does not suffer, so both are re-read from the bulk roots:
/// `kappa^2` is the product of the `kappa e^{+-i alpha}` pair and `s` follows
/// from `s / kappa`. The remaining checks, the pair ratio `e^{2 i alpha}` and
/// the outer product `1 / kappa^2`, are what validate the candidate.
fn validate(p: &ModelParams, cand: &mut Candidate, alpha: f64, tol: f64) -> Option<f64> {
    let q = bulk_quartic(p, cand.lambda);
    if q.degenerate {
        return None;
    }
    let found = q.polynomial().roots().ok()?;
    let roots: [Complex; 4] = found.try_into().ok()?;
    let e = Complex::from_polar(1.0, alpha);
    if !(cand.kappa.is_finite() && cand.s.is_finite()) || cand.kappa.norm() == 0.0 {
        return None;
    }
    let i = nearest(&roots, cand.kappa * e, &[])?;
    let j = nearest(&roots, cand.kappa / e, &[i])?;
    let mut kappa = (roots[i] * roots[j]).sqrt();
    if (kappa + cand.kappa).norm() < (kappa - cand.kappa).norm() {
        kappa = -kappa;
    }
    let k = nearest(&roots, cand.s / cand.kappa, &[i, j])?;
    cand.kappa = kappa;
    cand.s = with_s_normalised(roots[k] * kappa);

    let quartet = quartet(cand.kappa, cand.s, alpha);
    if !quartet.iter().all(|z| z.is_finite()) {
        return None;
    }
    let scale = roots.iter().map(|z| z.abs()).fold(1.0, f64::max);
    let d = multiset_distance(&roots, &quartet)? / scale;
    (d <= tol).then_some(d)
}

pub fn vieta_solutions(p: &ModelParams, alpha: f64) -> Result<Vec<SpectrumPoint>> {
    vieta_solutions_with(p, alpha, &InfiniteOptions::default())
}

pub fn vieta_solutions_with(p: &ModelParams, alpha: f64, opts: &InfiniteOptions) -> Result<Vec<SpectrumPoint>> {
    p.validate()?;
    let dq = derived(p);
    let d = dq.quartic_lead;
    let scale = p.scale().max(f64::MIN_POSITIVE);
    if d.abs() <= 1e-14 * scale * scale {
        return Err(Error::Precondition("d1 d2 - t1 t2 = 0: the bulk quartic is degenerate".into()));
    }
    let c = alpha.cos();
    let a = 2.0 * p.m * dq.t_s / d;
    let cc = 2.0 * dq.t_d / d;
    let base = p.m * p.m + dq.t_s * dq.t_s;

    let mut cands = Vec::new();

    // F(u) = (u^2 - 4)(A - 4cu)^2 - C^2 (D u^4 + (m^2 + t_s^2 - 4c^2 D) u^2 + 2cAD u)
    let sq = [a * a, -8.0 * c * a, Complex::from(16.0 * c * c)]; // (A - 4cu)^2
    let mut f = [Complex::new(0.0, 0.0); 5];
    for (i, &coef) in sq.iter().enumerate() {
        f[i + 2] += coef;
        f[i] -= 4.0 * coef;
    }
    let c2 = cc * cc;
    f[4] -= c2 * d;
    f[2] -= c2 * (base - 4.0 * c * c * d);
    f[1] -= c2 * 2.0 * c * a * d;
    let poly = Polynomial::new(f.to_vec());
    let a_small = a.abs() <= 1e-12 * (1.0 + base.abs() / d.abs());
    if poly.degree() >= 1 {
        for u in poly.roots()? {
            if u.abs() <= 1e-9 {
                continue; // the kappa = +-i family, handled below
            }
            let v = a / u - 2.0 * c;
            let ell = d * (u * u + 2.0 * c * v) + base;
            candidates_from_u(u, v, ell, &mut cands);
        }
    }
    // t_d = 0 and cos a = 0: the v = 2c family has u = A/(4c) at infinity
    // unless A = 0 as well; nothing is lost otherwise.

    if a_small {
        // u = 0 (kappa = +-i) leaves v free; with w = 1/k - k = -+2i:
        // lambda^2 - (2 c C D / w) lambda - (m^2 + t_s^2 + 4 c^2 D) = 0
        for kappa in [Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)] {
            let w = 1.0 / kappa - kappa;
            let b = -2.0 * c * cc * d / w;
            let c0 = -(base + 4.0 * c * c * d);
            let disc = (b * b - 4.0 * c0).sqrt();
            for lambda in [(-b + disc) / 2.0, (-b - disc) / 2.0] {
                let v = 2.0 * c + cc * lambda / w;
                let (s0, _) = quadratic_roots(v);
                cands.push(Candidate { lambda, kappa, s: with_s_normalised(s0) });
            }
        }
    }

    let mut points: Vec<SpectrumPoint> = Vec::new();
    for mut cand in cands {
        if !cand.lambda.is_finite() {
            continue;
        }
        if validate(p, &mut cand, alpha, opts.reconstruction_tol).is_none() {
            continue;
        }
        let lscale = cand.lambda.abs().max(scale);
        if points.iter().any(|pt| (pt.lambda - cand.lambda).abs() <= 1e-9 * lscale) {
            continue;
        }
        points.push(SpectrumPoint {
            alpha,
            lambda: cand.lambda,
            kappa: cand.kappa,
            s: cand.s,
            branch: quartet_branch(cand.kappa, cand.s, opts.modulus_tol),
        });
    }
    Ok(points)
}

pub fn spectrum_curve(p: &ModelParams, n_alpha: usize) -> Result<SpectrumCurve> {
    spectrum_curve_with(p, n_alpha, &InfiniteOptions::default())
}

pub fn spectrum_curve_with(p: &ModelParams, n_alpha: usize, opts: &InfiniteOptions) -> Result<SpectrumCurve> {
    if n_alpha < 8 {
        return Err(Error::Precondition(format!("n_alpha must be at least 8, got {n_alpha}")));
    }
    p.validate()?;
    let per_alpha = par::map_range(n_alpha, opts.execution, |j| {
        let alpha = 2.0 * PI * j as f64 / n_alpha as f64;
        (alpha, vieta_solutions_with(p, alpha, opts))
    });
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for (alpha, res) in per_alpha {
        match res {
            Ok(pts) => points.extend(pts),
            Err(Error::Precondition(msg)) => return Err(Error::Precondition(msg)),
            Err(e) => gaps.push(GridFailure { alpha, reason: e.to_string() }),
        }
    }
    Ok(SpectrumCurve { points, alpha_grid_size: n_alpha, gaps })
}
