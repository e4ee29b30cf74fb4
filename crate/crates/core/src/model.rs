//! Chain parameters, the bulk quartic and the periodic dispersion.

use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};

use crate::polycore::Polynomial;
use crate::{Complex, Error, Result};

/// The five complex couplings of the chain: onsite term `m`, right/left
/// hopping `t1`/`t2` and pairing amplitudes `d1`/`d2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: Complex,
    pub t1: Complex,
    pub t2: Complex,
    pub d1: Complex,
    pub d2: Complex,
}

impl ModelParams {
    pub fn new(m: Complex, t1: Complex, t2: Complex, d1: Complex, d2: Complex) -> Result<Self> {
        let p = Self { m, t1, t2, d1, d2 };
        p.validate()?;
        Ok(p)
    }

    /// Real-valued couplings. Panics on non-finite input.
    pub fn real(m: f64, t1: f64, t2: f64, d1: f64, d2: f64) -> Self {
        let r = |x: f64| Complex::new(x, 0.0);
        Self::new(r(m), r(t1), r(t2), r(d1), r(d2)).expect("finite real parameters")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("t1", self.t1), ("t2", self.t2), ("d1", self.d1), ("d2", self.d2)] {
            if !v.is_finite() {
                return Err(Error::Precondition(format!("parameter {name} is not finite")));
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedQuantities {
        derived(self)
    }

    /// Largest coupling magnitude; the natural energy scale of the chain.
    pub fn scale(&self) -> f64 {
        [self.m, self.t1, self.t2, self.d1, self.d2]
            .iter()
            .map(|z| z.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        [self.m, self.t1, self.t2, self.d1, self.d2]
            .iter()
            .all(|z| z.im.abs() <= tol * self.scale().max(1.0))
    }
}

/// Combinations of the hoppings that enter every spectral equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// `t1 + t2`
    pub t_s: Complex,
    /// `t1 - t2`
    pub t_d: Complex,
    /// `d1 d2 - t1 t2`, the leading (and constant) coefficient of the bulk quartic.
    pub quartic_lead: Complex,
}

pub fn derived(p: &ModelParams) -> DerivedQuantities {
    DerivedQuantities {
        t_s: p.t1 + p.t2,
        t_d: p.t1 - p.t2,
        quartic_lead: p.d1 * p.d2 - p.t1 * p.t2,
    }
}

/// `d1 d2 - t1 t2` is treated as zero below this multiple of the coupling scale squared.
pub const QUARTIC_LEAD_REL: f64 = 1e-14;

/// Bulk quartic in `x` at a given `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkQuartic {
    /// Ascending coefficients `c0..c4` exactly as assembled.
    pub coeffs: [Complex; 5],
    /// Set when `d1 d2 - t1 t2` vanishes; the polynomial then has degree < 4
    /// and callers should use the `d1 d2 = 0` closed forms instead.
    pub degenerate: bool,
}

impl BulkQuartic {
    /// Trimmed polynomial form.
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.to_vec())
    }
}

/// Coefficients of the quartic obtained by eliminating `a` from the two bulk
/// equations:
///
/// `D x^4 - (l t_d + m t_s) x^3 + (l^2 - m^2 - 2 d1 d2 - t1^2 - t2^2) x^2 + (l t_d - m t_s) x + D`
/// with `D = d1 d2 - t1 t2`.
pub fn bulk_quartic(p: &ModelParams, lambda: Complex) -> BulkQuartic {
    let dq = derived(p);
    let lead = dq.quartic_lead;
    let c3 = -(lambda * dq.t_d + p.m * dq.t_s);
    let c2 = lambda * lambda - p.m * p.m - 2.0 * p.d1 * p.d2 - p.t1 * p.t1 - p.t2 * p.t2;
    let c1 = lambda * dq.t_d - p.m * dq.t_s;
    let scale = p.scale().max(lambda.abs());
    BulkQuartic {
        coeffs: [lead, c1, c2, c3, lead],
        degenerate: lead.abs() <= QUARTIC_LEAD_REL * scale * scale,
    }
}

/// One root `x` of the bulk quartic together with the amplitude ratio `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkPair {
    pub x: Complex,
    /// `None` when neither bulk equation determines `a` (both denominators vanish).
    pub a: Option<Complex>,
}

/// The four bulk solutions at `lambda`, sorted by `|x|` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkSolution {
    pub lambda: Complex,
    pub pairs: [BulkPair; 4],
}

impl BulkSolution {
    pub fn xs(&self) -> [Complex; 4] {
        self.pairs.map(|p| p.x)
    }

    pub fn moduli(&self) -> [f64; 4] {
        self.pairs.map(|p| p.x.abs())
    }
}

/// Residuals of the two bulk equations for a pair `(x, a)`.
pub fn bulk_residuals(p: &ModelParams, lambda: Complex, x: Complex, a: Complex) -> (Complex, Complex) {
    let x2 = x * x;
    let first = p.t2 - a * p.d1 + (p.m - lambda) * x + (p.t1 + a * p.d1) * x2;
    let second = p.d2 - a * p.t1 + (-p.m - lambda) * a * x + (-p.d2 - a * p.t2) * x2;
    (first, second)
}

/// Recovers `a` from a root `x` using whichever bulk equation is better
/// conditioned.
pub fn amplitude_for_root(p: &ModelParams, lambda: Complex, x: Complex) -> Option<Complex> {
    let x2 = x * x;
    // first equation: a d1 (x^2 - 1) = -(t2 + (m - l) x + t1 x^2)
    let den1 = p.d1 * (x2 - 1.0);
    let num1 = -(p.t2 + (p.m - lambda) * x + p.t1 * x2);
    // second equation: a (t1 + (m + l) x + t2 x^2) = d2 (1 - x^2)
    let den2 = p.t1 + (p.m + lambda) * x + p.t2 * x2;
    let num2 = p.d2 * (1.0 - x2);
    let scale = p.scale().max(lambda.abs()).max(1e-300) * x.abs().max(1.0).powi(2);
    let floor = 1e-13 * scale;
    let (num, den) = if den1.abs() >= den2.abs() { (num1, den1) } else { (num2, den2) };
    if den.abs() <= floor {
        None
    } else {
        Some(num / den)
    }
}

/// Solves the bulk equations at `lambda`.
pub fn bulk_solve(p: &ModelParams, lambda: Complex) -> Result<BulkSolution> {
    let q = bulk_quartic(p, lambda);
    if q.degenerate {
        return Err(Error::SingularQuartic);
    }
    let mut xs = Polynomial::from_raw(q.coeffs.to_vec()).roots()?;
    if xs.len() != 4 {
        return Err(Error::RootStructure(format!("expected 4 roots, found {}", xs.len())));
    }
    xs.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let pairs = [0, 1, 2, 3].map(|i| BulkPair {
        x: xs[i],
        a: amplitude_for_root(p, lambda, xs[i]),
    });
    Ok(BulkSolution { lambda, pairs })
}

/// Eigenvalues of the translation-invariant chain at momentum `k`:
/// `i t_d sin k +/- sqrt(4 d1 d2 sin^2 k + (m + t_s cos k)^2)`, principal root.
pub fn periodic_lambda(p: &ModelParams, k: f64) -> (Complex, Complex) {
    let dq = derived(p);
    let (s, c) = k.sin_cos();
    let shift = Complex::new(0.0, s) * dq.t_d;
    let disc = 4.0 * p.d1 * p.d2 * s * s + (p.m + dq.t_s * c).powi(2);
    let root = disc.sqrt();
    (shift + root, shift - root)
}

/// Rotates every coupling by `e^{i phi}`. Both pairing amplitudes pick up the
/// phase, so `d1 d2` rotates by `e^{2 i phi}` and the spectrum by `e^{i phi}`.
pub fn phase_rotate(p: &ModelParams, phi: f64) -> ModelParams {
    let u = Complex::from_polar(1.0, phi);
    ModelParams {
        m: p.m * u,
        t1: p.t1 * u,
        t2: p.t2 * u,
        d1: p.d1 * u,
        d2: p.d2 * u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::multiset_distance;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn real_skin() -> ModelParams {
        let s3 = 3f64.sqrt();
        ModelParams::real(0.4, 2.0, 1.0, s3, -s3)
    }

    #[test]
    fn derived_examples() {
        let d = derived(&ModelParams::real(0.0, 2.0, 1.0, 3f64.sqrt(), -3f64.sqrt()));
        assert_eq!(d.t_s, c(3.0, 0.0));
        assert_eq!(d.t_d, c(1.0, 0.0));
        assert!((d.quartic_lead - c(-5.0, 0.0)).abs() < 1e-15);
        assert_eq!(derived(&ModelParams::real(0.3, 1.5, 1.5, 1.0, 2.0)).t_d, c(0.0, 0.0));
        let q = derived(&ModelParams::real(0.3, 1.5, 0.5, 0.0, 0.0)).quartic_lead;
        assert_eq!(q, c(-0.75, 0.0));
    }

    #[test]
    fn derived_sum_and_difference_recover_hoppings() {
        let p = ModelParams::new(c(0.1, 0.2), c(2.0, 1.0), c(-0.3, 0.7), c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let d = derived(&p);
        assert!((d.t_s + d.t_d - 2.0 * p.t1).abs() < 1e-15);
        assert!((d.t_s - d.t_d - 2.0 * p.t2).abs() < 1e-15);
    }

    #[test]
    fn quartic_coefficients() {
        let q = bulk_quartic(&ModelParams::real(0.0, 0.0, 0.0, 1.0, 1.0), c(0.0, 0.0));
        assert_eq!(q.coeffs.map(|z| z.re), [1.0, 0.0, -2.0, 0.0, 1.0]);

        let q = bulk_quartic(&real_skin(), c(1.0, 0.0));
        let want = [-5.0, -0.2, 1.84, -2.2, -5.0];
        for (got, w) in q.coeffs.iter().zip(want) {
            assert!((got - c(w, 0.0)).abs() < 1e-14, "{got} vs {w}");
        }
        assert!(!q.degenerate);
    }

    #[test]
    fn degenerate_quartic_flagged() {
        let p = ModelParams::real(0.5, 1.0, 1.0, 1.0, 1.0);
        assert!(bulk_quartic(&p, c(0.3, 0.0)).degenerate);
        assert_eq!(bulk_solve(&p, c(0.3, 0.0)), Err(Error::SingularQuartic));
    }

    #[test]
    fn real_skin_quartic_root_product_is_one() {
        let r = bulk_solve(&real_skin(), c(1.0, 0.0)).unwrap();
        let prod: Complex = r.xs().iter().product();
        assert!((prod - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hermitian_zero_energy_moduli() {
        let p = ModelParams::real(0.0, 1.0, 1.0, 0.5, 0.5);
        let r = bulk_solve(&p, c(0.0, 0.0)).unwrap();
        let s3 = 3f64.sqrt();
        let want = [s3, s3, 1.0 / s3, 1.0 / s3];
        for (got, w) in r.moduli().iter().zip(want) {
            assert!((got - w).abs() < 1e-9);
        }
        let expected = [c(0.0, s3), c(0.0, -s3), c(0.0, 1.0 / s3), c(0.0, -1.0 / s3)];
        assert!(multiset_distance(&r.xs(), &expected).unwrap() < 1e-9);
    }

    #[test]
    fn periodic_values() {
        let (lp, lm) = periodic_lambda(&real_skin(), FRAC_PI_2);
        let root = (12.0f64 - 0.16).sqrt();
        assert!((lp - c(0.0, 1.0 + root)).abs() < 1e-12);
        assert!((lm - c(0.0, 1.0 - root)).abs() < 1e-12);
        let p = real_skin();
        let (lp, lm) = periodic_lambda(&p, 0.0);
        assert!((lp - c(3.4, 0.0)).abs() < 1e-14 && (lm + c(3.4, 0.0)).abs() < 1e-14);
        for k in [0.1, 1.0, 2.5, 4.0] {
            let (a, b) = periodic_lambda(&p, k);
            assert!((a + b - 2.0 * c(0.0, 1.0) * derived(&p).t_d * k.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn periodic_root_on_unit_circle() {
        let p = real_skin();
        for j in 0..50 {
            let k = 2.0 * PI * j as f64 / 50.0;
            let (lp, lm) = periodic_lambda(&p, k);
            let qp = bulk_quartic(&p, lp).polynomial();
            let qm = bulk_quartic(&p, lm).polynomial();
            assert!(qp.eval(Complex::from_polar(1.0, k)).abs() < 1e-9);
            assert!(qm.eval(Complex::from_polar(1.0, k)).abs() < 1e-9);
        }
    }

    #[test]
    fn bulk_pairs_satisfy_both_equations() {
        let p = ModelParams::new(c(0.4, 0.1), c(2.0, 1.0), c(1.0, 0.0), c(1.7, 0.0), c(-1.7, 0.2)).unwrap();
        let lambda = c(0.7, -1.3);
        let sol = bulk_solve(&p, lambda).unwrap();
        for pair in sol.pairs {
            let (e1, e2) = bulk_residuals(&p, lambda, pair.x, pair.a.unwrap());
            assert!(e1.abs() < 1e-9 && e2.abs() < 1e-9);
        }
        let m = sol.moduli();
        assert!(m.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn phase_rotation_maps() {
        let p = real_skin();
        assert_eq!(phase_rotate(&p, 0.0), p);
        let q = phase_rotate(&p, PI);
        assert!((q.m + p.m).abs() < 1e-15 && (q.d1 * q.d2 - p.d1 * p.d2).abs() < 1e-14);
    }
}
