//! Finite open chains: BdG assembly, dense diagonalisation with a
//! particle-hole pairing diagnostic, the `t1 = t2` determinant equation, the
//! `d1 d2 = 0` closed-form spectrum and eigenstate localisation profiles.

use faer::Mat;
use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

use crate::model::{bulk_quartic, derived, ModelParams};
use crate::polycore::Polynomial;
use crate::{Complex, Error, Result};

/// Dense `2L x 2L` BdG matrix in the `(c1+, c1, c2+, c2, ...)` ordering.
#[derive(Debug, Clone)]
pub struct BdGMatrix {
    sites: usize,
    params: ModelParams,
    mat: Mat<Complex>,
}

impl BdGMatrix {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        2 * self.sites
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.mat[(row, col)]
    }

    pub fn as_mat(&self) -> &Mat<Complex> {
        &self.mat
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        let n = self.size();
        assert_eq!(v.len(), n, "vector length must be 2L");
        (0..n)
            .map(|i| {
                // at most six nonzeros per row: two blocks either side
                let lo = (i / 2).saturating_sub(1) * 2;
                let hi = ((i / 2 + 2) * 2).min(n);
                (lo..hi).map(|j| self.mat[(i, j)] * v[j]).sum()
            })
            .collect()
    }
}

pub fn assemble_bdg(p: &ModelParams, sites: usize) -> Result<BdGMatrix> {
    if sites == 0 {
        return Err(Error::Precondition("chain length must be at least 1".into()));
    }
    let n = 2 * sites;
    let mut mat = Mat::<Complex>::zeros(n, n);
    for j in 0..sites {
        let r = 2 * j;
        mat[(r, r)] = p.m;
        mat[(r + 1, r + 1)] = -p.m;
        if j + 1 < sites {
            let c = r + 2;
            mat[(r, c)] = p.t1;
            mat[(r, c + 1)] = p.d1;
            mat[(r + 1, c)] = -p.d2;
            mat[(r + 1, c + 1)] = -p.t2;
            mat[(c, r)] = p.t2;
            mat[(c, r + 1)] = -p.d1;
            mat[(c + 1, r)] = p.d2;
            mat[(c + 1, r + 1)] = -p.t1;
        }
    }
    Ok(BdGMatrix { sites, params: *p, mat })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionFlag {
    Trusted,
    Suspect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Pairing residual, relative to `max |lambda|`, above which the
    /// spectrum is flagged suspect.
    pub pairing_tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { pairing_tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues sorted by real then imaginary part.
    pub values: Vec<Complex>,
    /// Unit-norm right eigenvectors aligned with `values`.
    pub vectors: Option<Vec<Vec<Complex>>>,
    /// Largest distance between `lambda` and its matched partner `-lambda'`.
    pub pairing_residual: f64,
    pub precision_flag: PrecisionFlag,
}

impl EigenDecomposition {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    /// Index of the eigenvalue nearest to `target`.
    pub fn nearest(&self, target: Complex) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .map(|(i, _)| i)
    }
}

pub fn eigensolve(mat: &BdGMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    eigensolve_with(mat, want_vectors, EigenOptions::default())
}

pub fn eigensolve_with(mat: &BdGMatrix, want_vectors: bool, opts: EigenOptions) -> Result<EigenDecomposition> {
    let n = mat.size();
    let no_conv = |_| Error::NoConvergence { size: n };
    let (values, vectors) = if want_vectors {
        let evd = mat.mat.eigen().map_err(no_conv)?;
        let values: Vec<Complex> = evd.S().column_vector().iter().copied().collect();
        let u = evd.U();
        let vectors: Vec<Vec<Complex>> = (0..n)
            .map(|j| {
                let col: Vec<Complex> = (0..n).map(|i| u[(i, j)]).collect();
                normalize(col)
            })
            .collect();
        (values, Some(vectors))
    } else {
        let values = match pairing_free_block_eigenvalues(&mat.params, mat.sites) {
            Some(values) => values.map_err(no_conv)?,
            None => mat.mat.eigenvalues().map_err(no_conv)?,
        };
        (values, None)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let values: Vec<Complex> = order.iter().map(|&i| values[i]).collect();
    let vectors = vectors.map(|vs| order.iter().map(|&i| vs[i].clone()).collect());

    let pairing_residual = pairing_residual(&values);
    let max_abs = values.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let precision_flag = if pairing_residual > opts.pairing_tolerance * max_abs {
        PrecisionFlag::Suspect
    } else {
        PrecisionFlag::Trusted
    };
    Ok(EigenDecomposition { values, vectors, pairing_residual, precision_flag })
}

/// Eigenvalues for `d1 d2 = 0`, where only one pairing direction survives.
///
/// Grouping particles before holes then makes the matrix block triangular,
/// so its spectrum is that of the two tridiagonal hopping blocks. Each block
/// is non-normal when `|t1| != |t2|`, and a dense solver on the full matrix
/// loses roughly `|t1 / t2|^L` of its accuracy. The diagonal similarity
/// `diag(g^j)` with `g^2 = |sub / super|` (an imaginary gauge transformation)
/// gives both off-diagonals the modulus `sqrt|t1 t2|`, which makes each
/// constant-diagonal block normal.
fn pairing_free_block_eigenvalues(
    p: &ModelParams,
    sites: usize,
) -> Option<std::result::Result<Vec<Complex>, faer::linalg::evd::EvdError>> {
    if p.d1 != Complex::new(0.0, 0.0) && p.d2 != Complex::new(0.0, 0.0) {
        return None;
    }
    let mut values = Vec::with_capacity(2 * sites);
    // particle block: super t1, sub t2; hole block: super -t2, sub -t1
    for (diag, sup, sub) in [(p.m, p.t1, p.t2), (-p.m, -p.t2, -p.t1)] {
        if sup.abs() == 0.0 || sub.abs() == 0.0 {
            // triangular with a constant diagonal
            values.extend(std::iter::repeat_n(diag, sites));
            continue;
        }
        let g = (sub.abs() / sup.abs()).sqrt();
        let mut block = Mat::<Complex>::zeros(sites, sites);
        for j in 0..sites {
            block[(j, j)] = diag;
            if j + 1 < sites {
                block[(j, j + 1)] = sup * g;
                block[(j + 1, j)] = sub / g;
            }
        }
        match block.eigenvalues() {
            Ok(v) => values.extend(v),
            Err(e) => return Some(Err(e)),
        }
    }
    Some(Ok(values))
}

fn normalize(mut v: Vec<Complex>) -> Vec<Complex> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    v
}

/// Greedy particle-hole matching. Values are visited in order of modulus and
/// each is paired with the unused value closest to its negative; the search
/// only scans entries whose modulus can still beat the best distance found.
pub fn pairing_residual(values: &[Complex]) -> f64 {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    let mods: Vec<f64> = order.iter().map(|&i| values[i].abs()).collect();
    let mut used = vec![false; n];
    let mut worst: f64 = 0.0;
    for pos in 0..n {
        if used[pos] {
            continue;
        }
        used[pos] = true;
        let v = values[order[pos]];
        let mut best: Option<(usize, f64)> = None;
        let scan = |q: usize, best: &mut Option<(usize, f64)>| {
            if !used[q] {
                let d = (values[order[q]] + v).abs();
                if best.is_none_or(|(_, bd)| d < bd) {
                    *best = Some((q, d));
                }
            }
        };
        // moduli are sorted; |a + b| >= ||a| - |b|| bounds the scan
        let mut q = pos + 1;
        while q < n && best.is_none_or(|(_, bd)| mods[q] - mods[pos] < bd) {
            scan(q, &mut best);
            q += 1;
        }
        let mut q = pos;
        while q > 0 && best.is_none_or(|(_, bd)| mods[pos] - mods[q - 1] < bd) {
            scan(q - 1, &mut best);
            q -= 1;
        }
        if let Some((q, d)) = best {
            used[q] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Closed-form spectrum when `d1 d2 = 0`:
/// `+/- m + 2 sqrt(t1) sqrt(t2) cos(j pi / (L + 1))`, `j = 1..L`.
pub fn spectrum_closed_form_d1d2_zero(p: &ModelParams, sites: usize) -> Result<Vec<Complex>> {
    if sites == 0 {
        return Err(Error::Precondition("chain length must be at least 1".into()));
    }
    let scale = p.scale().max(1e-300);
    if (p.d1 * p.d2).abs() > 1e-14 * scale * scale {
        return Err(Error::Precondition("closed form requires d1 * d2 = 0".into()));
    }
    let hop = 2.0 * p.t1.sqrt() * p.t2.sqrt();
    let mut out = Vec::with_capacity(2 * sites);
    for sign in [1.0, -1.0] {
        for j in 1..=sites {
            let cos = (j as f64 * std::f64::consts::PI / (sites as f64 + 1.0)).cos();
            out.push(sign * p.m + hop * cos);
        }
    }
    Ok(out)
}

/// `x^{-L+1} + x^{-L+3} + ... + x^{L-1}`, which equals `sin(L a)/sin(a)`
/// for `x = e^{i a}`.
pub fn sine_ratio(sites: usize, x: Complex) -> Result<Complex> {
    if x == Complex::new(0.0, 0.0) {
        return Err(Error::Precondition("sine ratio needs x != 0".into()));
    }
    if sites == 0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let x2 = x * x;
    let mut term = x.powi(-(sites as i32 - 1));
    let mut sum = Complex::new(0.0, 0.0);
    for _ in 0..sites {
        sum += term;
        term *= x2;
    }
    Ok(sum)
}

/// Residuals of the `t1 = t2` eigenvalue conditions at a trial `lambda`.
///
/// Both residuals are scale free: the raw left-hand side divided by the sum
/// of the magnitudes of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetEqnResidual {
    pub x: Complex,
    pub y: Complex,
    pub alpha: Complex,
    pub beta: Complex,
    /// `2 cos a + 2 cos b - 2 m t / (d1 d2 - t^2)`
    pub cos_relation: Complex,
    /// Determinant equation
    /// `(d1 d2 - t^2) sr(L+1,a) sr(L+1,b) + 4 d1 d2 sum_j (L+1-j) sr(j,a) sr(j,b)`.
    pub determinant: Complex,
}

fn require_equal_hopping(p: &ModelParams) -> Result<()> {
    if (p.t1 - p.t2).abs() > 1e-12 * p.scale().max(1.0) {
        return Err(Error::Precondition("determinant equation requires t1 = t2".into()));
    }
    Ok(())
}

/// Raw determinant-equation left-hand side and the sum of term magnitudes.
pub fn determinant_lhs(p: &ModelParams, sites: usize, x: Complex, y: Complex) -> Result<(Complex, f64)> {
    let lead = p.d1 * p.d2 - p.t1 * p.t1;
    let first = lead * sine_ratio(sites + 1, x)? * sine_ratio(sites + 1, y)?;
    let mut total = first;
    let mut weight = first.abs();
    for j in 1..=sites {
        let term = 4.0 * p.d1 * p.d2 * (sites + 1 - j) as f64 * sine_ratio(j, x)? * sine_ratio(j, y)?;
        total += term;
        weight += term.abs();
    }
    Ok((total, weight))
}

fn reciprocal_pairs(roots: &[Complex]) -> Result<(Complex, Complex)> {
    let partner = (1..4)
        .min_by(|&a, &b| (roots[0] * roots[a] - 1.0).abs().total_cmp(&(roots[0] * roots[b] - 1.0).abs()))
        .unwrap();
    let rest: Vec<usize> = (1..4).filter(|&i| i != partner).collect();
    let e1 = (roots[0] * roots[partner] - 1.0).abs();
    let e2 = (roots[rest[0]] * roots[rest[1]] - 1.0).abs();
    if e1 > 1e-6 || e2 > 1e-6 {
        return Err(Error::RootStructure(format!(
            "bulk roots are not reciprocal pairs (product errors {e1:.3e}, {e2:.3e})"
        )));
    }
    Ok((roots[0], roots[rest[0]]))
}

/// Recovers `x = e^{i a}`, `y = e^{i b}` from the bulk quartic at `lambda`
/// and evaluates both `t1 = t2` conditions.
pub fn deteqn_residual(p: &ModelParams, sites: usize, lambda: Complex) -> Result<DetEqnResidual> {
    require_equal_hopping(p)?;
    let q = bulk_quartic(p, lambda);
    if q.degenerate {
        return Err(Error::SingularQuartic);
    }
    let roots = Polynomial::from_raw(q.coeffs.to_vec()).roots()?;
    let (x, y) = reciprocal_pairs(&roots)?;
    let i = Complex::new(0.0, 1.0);
    let alpha = -i * x.ln();
    let beta = -i * y.ln();

    let rhs = 2.0 * p.m * p.t1 / (p.d1 * p.d2 - p.t1 * p.t1);
    let cx = x + 1.0 / x;
    let cy = y + 1.0 / y;
    let cos_relation = (cx + cy - rhs) / (cx.abs() + cy.abs() + rhs.abs()).max(f64::MIN_POSITIVE);

    let (lhs, weight) = determinant_lhs(p, sites, x, y)?;
    let determinant = lhs / weight.max(f64::MIN_POSITIVE);
    Ok(DetEqnResidual { x, y, alpha, beta, cos_relation, determinant })
}

/// Closed form of the determinant-equation sum, valid for `cos a != cos b`.
pub fn deteqn_summed_form(p: &ModelParams, sites: usize, alpha: Complex, beta: Complex) -> Result<Complex> {
    let i = Complex::new(0.0, 1.0);
    let (x, y) = ((i * alpha).exp(), (i * beta).exp());
    let gap = alpha.cos() - beta.cos();
    if gap.abs() < 1e-8 {
        return Err(Error::RemovableSingularity);
    }
    let sr = |n: usize, z: Complex| sine_ratio(n, z);
    let l = sites;
    let dd = p.d1 * p.d2;
    let lead = dd - p.t1 * p.t1;
    let both = sr(l + 1, x)? * sr(l + 1, y)?;
    let bracket = 2.0 - 2.0 * both + sr(l + 2, x)? * sr(l, y)? + sr(l, x)? * sr(l + 2, y)?;
    Ok(lead * both + dd / (gap * gap) * bracket)
}

/// Secant refinement of a `t1 = t2` eigenvalue on the determinant equation.
pub fn refine_eigenvalue(p: &ModelParams, sites: usize, lambda0: Complex) -> Result<Complex> {
    require_equal_hopping(p)?;
    let f = |lambda: Complex| -> Result<Complex> {
        let q = bulk_quartic(p, lambda);
        let roots = Polynomial::from_raw(q.coeffs.to_vec()).roots()?;
        let (x, y) = reciprocal_pairs(&roots)?;
        Ok(determinant_lhs(p, sites, x, y)?.0)
    };
    let scale = p.scale().max(lambda0.abs()).max(1e-12);
    let mut a = lambda0;
    let mut b = lambda0 + Complex::new(1e-7 * scale, 1e-7 * scale);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..60 {
        let den = fb - fa;
        if den == Complex::new(0.0, 0.0) {
            break;
        }
        let c = b - fb * (b - a) / den;
        a = b;
        fa = fb;
        b = c;
        fb = f(b)?;
        if (b - a).abs() <= 1e-14 * scale {
            break;
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizationVerdict {
    SkinLeft,
    SkinRight,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationThresholds {
    /// Minimum coefficient of determination of the log-linear fit.
    pub fit_quality: f64,
    /// Minimum `|d ln|psi| / d site|`.
    pub min_rate: f64,
    /// Fraction of sites counted as the boundary on each side.
    pub boundary_fraction: f64,
}

impl Default for LocalizationThresholds {
    fn default() -> Self {
        Self { fit_quality: 0.9, min_rate: 1.05f64.ln(), boundary_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    /// Slope of `ln |psi_site|` per site; negative means decay to the right.
    pub decay_fit_rate: f64,
    /// Coefficient of determination of the fit.
    pub fit_quality: f64,
    pub boundary_mass_left: f64,
    pub boundary_mass_right: f64,
    pub verdict: LocalizationVerdict,
}

/// Per-site amplitude: the larger of the particle and hole components.
pub fn site_amplitudes(vec: &[Complex]) -> Vec<f64> {
    vec.chunks(2).map(|c| c.iter().map(|z| z.abs()).fold(0.0, f64::max)).collect()
}

pub fn localization(vec: &[Complex], sites: usize) -> Result<LocalizationReport> {
    localization_with(vec, sites, LocalizationThresholds::default())
}

pub fn localization_with(vec: &[Complex], sites: usize, th: LocalizationThresholds) -> Result<LocalizationReport> {
    if vec.len() != 2 * sites || sites == 0 {
        return Err(Error::Precondition(format!("vector length {} is not 2L = {}", vec.len(), 2 * sites)));
    }
    let total: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::Precondition("zero vector has no profile".into()));
    }

    let edge = ((sites as f64 * th.boundary_fraction).ceil() as usize).clamp(1, sites / 2 + sites % 2);
    let mass = |range: std::ops::Range<usize>| -> f64 {
        vec[2 * range.start..2 * range.end].iter().map(|z| z.norm_sqr()).sum::<f64>() / total
    };
    let mut left = mass(0..edge);
    let mut right = mass(sites - edge..sites);
    if 2 * edge > sites {
        // odd tiny chains: the middle site would be counted twice
        let scale = left + right;
        left /= scale.max(1.0);
        right /= scale.max(1.0);
    }

    let points: Vec<(f64, f64)> = site_amplitudes(vec)
        .into_iter()
        .enumerate()
        .filter(|(_, a)| *a > 0.0)
        .map(|(j, a)| (j as f64, a.ln()))
        .collect();
    let (slope, r2) = linear_fit(&points);

    let verdict = if r2 > th.fit_quality && slope.abs() > th.min_rate {
        if slope < 0.0 {
            LocalizationVerdict::SkinLeft
        } else {
            LocalizationVerdict::SkinRight
        }
    } else {
        LocalizationVerdict::Extended
    };
    Ok(LocalizationReport {
        decay_fit_rate: slope,
        fit_quality: r2,
        boundary_mass_left: left,
        boundary_mass_right: right,
        verdict,
    })
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, 1.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    // a flat profile is fitted exactly
    let r2 = if syy <= 1e-28 * n { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, r2)
}

/// `dd = derived` shorthand used by callers that want `t_d` checks.
pub fn has_equal_hopping(p: &ModelParams) -> bool {
    derived(p).t_d.abs() <= 1e-12 * p.scale().max(1.0)
}
