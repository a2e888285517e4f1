//! Rational inner functions `phi = p~/p` on the bidisk.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly2::{inv_series, is_stable, Axis, BiPoly, SeriesGrid, StabilityConfig, StabilityReport, UniPoly, C64, TIGHTEN_REL};

/// Relative size of `|p(z)|` below which evaluation is refused.
pub const VANISH_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl RationalFn {
    pub fn eval(&self, z1: C64, z2: C64) -> Result<C64> {
        let d = self.den.eval(z1, z2);
        let scale = self.den.eval_scale(z1, z2);
        if d.norm() <= VANISH_REL * scale {
            return Err(Error::DenominatorVanishes(d.norm()));
        }
        Ok(self.num.eval(z1, z2) / d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rif {
    p: BiPoly,
    ptilde: BiPoly,
    degree: (usize, usize),
    deriv_num: [BiPoly; 2],
    stability: StabilityReport,
}

impl Rif {
    /// Builds `p~/p` with the reflection taken at the tight bidegree of `p`.
    pub fn new(p: BiPoly) -> Result<Rif> {
        let d = p.bidegree();
        Rif::with_bidegree(p, d)
    }

    /// Reflection at a declared bidegree; a larger declaration multiplies the
    /// numerator by a monomial, e.g. `p = 1` at `(1, 1)` gives `z1 z2`.
    pub fn with_bidegree(p: BiPoly, degree: (usize, usize)) -> Result<Rif> {
        Rif::with_config(p, degree, &StabilityConfig::default())
    }

    pub fn with_config(p: BiPoly, degree: (usize, usize), cfg: &StabilityConfig) -> Result<Rif> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (tm, tn) = p.bidegree();
        if degree.0 < tm || degree.1 < tn {
            return Err(Error::InvalidInput(format!(
                "declared bidegree ({}, {}) is below the polynomial's bidegree ({tm}, {tn})",
                degree.0, degree.1
            )));
        }
        let c00 = p.get(0, 0).norm();
        if c00 <= TIGHTEN_REL * p.max_coeff() {
            return Err(Error::ZeroConstantTerm(c00));
        }
        let stability = is_stable(&p, cfg)?;
        if !stability.stable {
            return Err(Error::UnstableDenominator {
                min_root_modulus: stability.min_root_modulus,
            });
        }
        let ptilde = p.reflect_at(degree.0, degree.1);
        let deriv_num = [numerator(&p, &ptilde, Axis::One), numerator(&p, &ptilde, Axis::Two)];
        Ok(Rif {
            p,
            ptilde,
            degree,
            deriv_num,
            stability,
        })
    }

    pub fn p(&self) -> &BiPoly {
        &self.p
    }

    pub fn ptilde(&self) -> &BiPoly {
        &self.ptilde
    }

    pub fn bidegree(&self) -> (usize, usize) {
        self.degree
    }

    /// Degree in the variable named by `axis`.
    pub fn degree_in(&self, axis: Axis) -> usize {
        match axis {
            Axis::One => self.degree.0,
            Axis::Two => self.degree.1,
        }
    }

    pub fn stability(&self) -> &StabilityReport {
        &self.stability
    }

    /// `p dp~/dz_j - p~ dp/dz_j`.
    pub fn deriv_num(&self, axis: Axis) -> &BiPoly {
        match axis {
            Axis::One => &self.deriv_num[0],
            Axis::Two => &self.deriv_num[1],
        }
    }

    pub fn eval_phi(&self, z1: C64, z2: C64) -> Result<C64> {
        let d = self.p.eval(z1, z2);
        if d.norm() <= VANISH_REL * self.p.eval_scale(z1, z2) {
            return Err(Error::DenominatorVanishes(d.norm()));
        }
        Ok(self.ptilde.eval(z1, z2) / d)
    }

    pub fn partial_derivative(&self, axis: Axis) -> RationalFn {
        RationalFn {
            num: self.deriv_num(axis).clone(),
            den: &self.p * &self.p,
        }
    }

    /// `d phi / d z_axis` without forming `p^2`.
    pub fn eval_partial(&self, axis: Axis, z1: C64, z2: C64) -> Result<C64> {
        let d = self.p.eval(z1, z2);
        if d.norm() <= VANISH_REL * self.p.eval_scale(z1, z2) {
            return Err(Error::DenominatorVanishes(d.norm()));
        }
        Ok(self.deriv_num(axis).eval(z1, z2) / (d * d))
    }

    /// Taylor coefficients `a[k][l]`, `k, l <= order`.
    pub fn taylor(&self, order: usize) -> Result<SeriesGrid> {
        Ok(inv_series(&self.p, order)?.mul_poly(&self.ptilde))
    }

    /// Numerator and denominator of the one-variable Blaschke product in the
    /// free variable `z_axis`, the other coordinate fixed at `zeta`.
    pub fn slice_blaschke(&self, axis: Axis, zeta: C64) -> (UniPoly, UniPoly) {
        let fixed = axis.other();
        (self.ptilde.slice(fixed, zeta), self.p.slice(fixed, zeta))
    }

    /// The same function with the variables swapped.
    pub fn transpose(&self) -> Rif {
        Rif {
            p: self.p.transpose(),
            ptilde: self.ptilde.transpose(),
            degree: (self.degree.1, self.degree.0),
            deriv_num: [self.deriv_num[1].transpose(), self.deriv_num[0].transpose()],
            stability: self.stability.clone(),
        }
    }

    /// Returns the function oriented so that `axis` becomes the first variable.
    pub fn oriented(&self, axis: Axis) -> Rif {
        match axis {
            Axis::One => self.clone(),
            Axis::Two => self.transpose(),
        }
    }
}

fn numerator(p: &BiPoly, pt: &BiPoly, axis: Axis) -> BiPoly {
    &(p * &pt.partial(axis)) - &(pt * &p.partial(axis))
}

#[derive(Debug, Clone, Serialize)]
pub struct RifJson {
    pub p: BiPoly,
    pub ptilde: BiPoly,
    pub bidegree: (usize, usize),
}

impl From<&Rif> for RifJson {
    fn from(r: &Rif) -> Self {
        RifJson {
            p: r.p.clone(),
            ptilde: r.ptilde.clone(),
            bidegree: r.degree,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn favorite_numerator() {
        let phi = registry::favorite();
        let want = BiPoly::from_real_terms(&[(1, 1, 2.0), (1, 0, -1.0), (0, 1, -1.0)]);
        assert_eq!(phi.ptilde(), &want);
    }

    #[test]
    fn amy_numerator() {
        let phi = registry::amy();
        let want = BiPoly::from_real_terms(&[(1, 2, 4.0), (0, 2, -1.0), (1, 1, -3.0), (0, 1, -1.0), (1, 0, 1.0)]);
        assert_eq!(phi.ptilde(), &want);
    }

    #[test]
    fn unstable_denominator_is_rejected() {
        let p = BiPoly::from_real_terms(&[(0, 0, 1.0), (1, 0, -2.0)]);
        assert!(matches!(Rif::new(p), Err(Error::UnstableDenominator { .. })));
    }

    #[test]
    fn evaluation_examples() {
        let phi = registry::favorite();
        assert_eq!(phi.eval_phi(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let v = phi.eval_phi(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((v - c(0.0, -1.0)).norm() < 1e-15);
        let cont = registry::continuous();
        assert!((cont.eval_phi(c(1.0, 0.0), c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(matches!(
            phi.eval_phi(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::DenominatorVanishes(_))
        ));
    }

    #[test]
    fn monomial_derivative() {
        let phi = registry::monomial();
        let d = phi.partial_derivative(Axis::One);
        assert_eq!(d.num, BiPoly::monomial(0, 1, c(1.0, 0.0)));
        assert_eq!(d.den, BiPoly::constant(c(1.0, 0.0)));
    }

    #[test]
    fn psi_second_partial_matches_closed_form() {
        let phi = registry::psi();
        // d psi / d z2 = -z1 (z1 - 1)^2 / p^2
        let want = BiPoly::from_real_terms(&[(1, 0, -1.0), (2, 0, 2.0), (3, 0, -1.0)]);
        assert_eq!(phi.deriv_num(Axis::Two), &want);
    }

    #[test]
    fn taylor_examples() {
        let a = registry::favorite().taylor(4).unwrap();
        assert!(a.get(0, 0).norm() < 1e-16);
        assert!((a.get(1, 0) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((a.get(0, 1) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((a.get(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        let m = registry::monomial().taylor(3).unwrap();
        for k in 0..=3 {
            for l in 0..=3 {
                let want = if (k, l) == (1, 1) { 1.0 } else { 0.0 };
                assert!((m.get(k, l) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn slice_blaschke_examples() {
        let phi = registry::favorite();
        let (num, den) = phi.slice_blaschke(Axis::One, c(1.0, 0.0));
        assert_eq!(num, UniPoly::from_real(&[-1.0, 1.0]));
        assert_eq!(den, UniPoly::from_real(&[1.0, -1.0]));
        let (num, _) = phi.slice_blaschke(Axis::One, c(-1.0, 0.0));
        let rs = crate::roots1::roots(&num, &Default::default()).unwrap();
        assert_eq!(rs.roots.iter().filter(|r| r.norm() < 1.0).count(), 1);
        let cont = registry::continuous();
        for t in [0.0, 1.0, 2.0, 3.0] {
            let (num, _) = cont.slice_blaschke(Axis::One, C64::from_polar(1.0, t));
            assert_eq!(num.degree(), 1);
        }
    }

    #[test]
    fn transpose_swaps_axes() {
        let phi = registry::amy();
        let t = phi.transpose();
        assert_eq!(t.bidegree(), (2, 1));
        let z = (c(0.3, -0.2), c(-0.1, 0.5));
        let a = phi.eval_partial(Axis::Two, z.0, z.1).unwrap();
        let b = t.eval_partial(Axis::One, z.1, z.0).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
}
