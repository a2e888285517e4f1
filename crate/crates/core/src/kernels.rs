//! Agler decompositions, local Dirichlet integrals and the Doug functional.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly2::{BiPoly, SeriesGrid, C64};
use crate::quad::{classify, LadderConfig, LevelSums, QuadratureResult};
use crate::rif::Rif;

/// Vectors of polynomials in `|p|^2 - |p~|^2 = (1-|z1|^2) |E1|^2 + (1-|z2|^2) |F2|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AglerVectors {
    #[serde(rename = "E1")]
    pub e1: Vec<BiPoly>,
    #[serde(rename = "F2")]
    pub f2: Vec<BiPoly>,
}

impl AglerVectors {
    pub fn scale(&self, s: C64) -> AglerVectors {
        AglerVectors {
            e1: self.e1.iter().map(|q| q.scale(s)).collect(),
            f2: self.f2.iter().map(|q| q.scale(s)).collect(),
        }
    }

    /// Checks the degree caps `(m-1, n)` for `E1` and `(m, n-1)` for `F2`.
    pub fn fits_bidegree(&self, m: usize, n: usize) -> bool {
        let ok = |v: &[BiPoly], cap: usize, dm: usize, dn: usize| {
            v.len() <= cap
                && v.iter().all(|q| {
                    let (a, b) = q.bidegree();
                    q.is_zero() || (a <= dm && b <= dn)
                })
        };
        ok(&self.e1, m, m.saturating_sub(1), n) && ok(&self.f2, n, m, n.saturating_sub(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub sample_count: usize,
}

/// Uniform point of the bidisk.
pub fn random_bidisk_point<R: Rng>(rng: &mut R) -> (C64, C64) {
    let mut one = || {
        let r: f64 = rng.gen::<f64>().sqrt();
        let t: f64 = rng.gen_range(0.0..TAU);
        C64::from_polar(r, t)
    };
    (one(), one())
}

/// Agler identity residuals with `p~` taken at the tight bidegree of `p`.
pub fn verify_agler(p: &BiPoly, v: &AglerVectors, samples: usize, seed: u64) -> ResidualStats {
    agler_residuals(p, &p.reflect(), v, samples, seed)
}

pub fn verify_agler_rif(phi: &Rif, v: &AglerVectors, samples: usize, seed: u64) -> ResidualStats {
    agler_residuals(phi.p(), phi.ptilde(), v, samples, seed)
}

fn agler_residuals(p: &BiPoly, pt: &BiPoly, v: &AglerVectors, samples: usize, seed: u64) -> ResidualStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs: f64 = 0.0;
    let mut sum = 0.0;
    for _ in 0..samples {
        let (z1, z2) = random_bidisk_point(&mut rng);
        let lhs = p.eval(z1, z2).norm_sqr() - pt.eval(z1, z2).norm_sqr();
        let e: f64 = v.e1.iter().map(|q| q.eval(z1, z2).norm_sqr()).sum();
        let f: f64 = v.f2.iter().map(|q| q.eval(z1, z2).norm_sqr()).sum();
        let r = (lhs - (1.0 - z1.norm_sqr()) * e - (1.0 - z2.norm_sqr()) * f).abs();
        max_abs = max_abs.max(r);
        sum += r;
    }
    ResidualStats {
        max_abs,
        mean_abs: if samples == 0 { 0.0 } else { sum / samples as f64 },
        sample_count: samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalConfig {
    /// Nodes per circle at the first level; doubled until successive levels agree.
    pub start: usize,
    pub max_grid: usize,
    pub rel_tol: f64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            start: 64,
            max_grid: 1 << 17,
            rel_tol: 1e-10,
        }
    }
}

/// Doubles the grid until two successive estimates agree, then classifies.
fn refine<F: FnMut(usize) -> f64>(cfg: &LocalConfig, mut f: F) -> QuadratureResult {
    let mut levels: Vec<LevelSums> = Vec::new();
    let mut n = cfg.start.max(4);
    loop {
        let v = f(n);
        let agreed = levels
            .last()
            .is_some_and(|l| (v - l.regular).abs() <= cfg.rel_tol * v.abs().max(f64::MIN_POSITIVE));
        levels.push(LevelSums {
            grid: n,
            regular: v,
            windows: vec![],
        });
        if (agreed && levels.len() >= 3) || n >= cfg.max_grid {
            break;
        }
        n *= 2;
    }
    classify(
        &levels,
        &LadderConfig {
            rel_tol: cfg.rel_tol.max(1e-8),
            ..LadderConfig::default()
        },
    )
}

/// Nodes `center + (j + 1/2) 2 pi / n` on the circle.
fn offset_nodes(center: f64, n: usize) -> impl Iterator<Item = C64> {
    let h = TAU / n as f64;
    (0..n).map(move |j| C64::from_polar(1.0, center + (j as f64 + 0.5) * h))
}

fn phi_at(phi: &Rif, z1: C64, z2: C64) -> Result<C64> {
    phi.eval_phi(z1, z2)
}

/// `D_z(phi)` from the boundary values of `phi` on the two slices through `z`.
///
/// The integrand numerator is a sum of a function of `eta1` and a function of
/// `eta2`, so the tensor trapezoid rule factors into one-variable sums.
pub fn local_dirichlet_boundary(phi: &Rif, z: (C64, C64), cfg: &LocalConfig) -> Result<QuadratureResult> {
    let (z1, z2) = z;
    let radius = z1.norm().max(z2.norm());
    if radius > 1.0 - 1e-3 {
        return Err(Error::PointTooCloseToBoundary(radius));
    }
    let center = phi_at(phi, z1, z2)?.norm_sqr();
    let mut failure = None;
    let r = refine(cfg, |n| {
        let (mut a, mut w1) = (0.0, 0.0);
        for eta in offset_nodes(z1.arg(), n) {
            let k = 1.0 / (eta - z1).norm_sqr();
            match phi_at(phi, eta, z2) {
                Ok(v) => a += (1.0 - v.norm_sqr()) * k,
                Err(e) => failure = Some(e),
            }
            w1 += k;
        }
        let (mut b, mut w2) = (0.0, 0.0);
        for eta in offset_nodes(z2.arg(), n) {
            let k = 1.0 / (eta - z2).norm_sqr();
            match phi_at(phi, z1, eta) {
                Ok(v) => b += (center - v.norm_sqr()) * k,
                Err(e) => failure = Some(e),
            }
            w2 += k;
        }
        let nn = (n * n) as f64;
        (a * w2 + w1 * b) / nn
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `D_z(phi)` as one-variable local integrals of the Agler kernel functions
/// `F2_j / p` along `eta1` and `E1_k / p` along `eta2`.  Valid on the closed
/// bidisk away from singular points.
pub fn local_dirichlet_kernel(phi: &Rif, v: &AglerVectors, z: (C64, C64), cfg: &LocalConfig) -> Result<QuadratureResult> {
    let (z1, z2) = z;
    if z1.norm() > 1.0 + 1e-12 || z2.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(format!("point ({z1}, {z2}) lies outside the closed bidisk")));
    }
    let p = phi.p();
    let pz = p.eval(z1, z2);
    if pz.norm() <= 1e-10 * p.eval_scale(z1, z2) {
        return Err(Error::SingularEvaluationPoint);
    }
    let f_at: Vec<C64> = v.f2.iter().map(|q| q.eval(z1, z2) / pz).collect();
    let e_at: Vec<C64> = v.e1.iter().map(|q| q.eval(z1, z2) / pz).collect();
    let mut failure = None;
    let r = refine(cfg, |n| {
        let mut total = 0.0;
        for eta in offset_nodes(z1.arg(), n) {
            let d = p.eval(eta, z2);
            if d.norm() == 0.0 {
                failure = Some(Error::SingularEvaluationPoint);
                continue;
            }
            let k = 1.0 / (eta - z1).norm_sqr();
            for (q, c) in v.f2.iter().zip(&f_at) {
                total += (q.eval(eta, z2) / d - c).norm_sqr() * k;
            }
        }
        for eta in offset_nodes(z2.arg(), n) {
            let d = p.eval(z1, eta);
            if d.norm() == 0.0 {
                failure = Some(Error::SingularEvaluationPoint);
                continue;
            }
            let k = 1.0 / (eta - z2).norm_sqr();
            for (q, c) in v.e1.iter().zip(&e_at) {
                total += (q.eval(z1, eta) / d - c).norm_sqr() * k;
            }
        }
        total / n as f64
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Function whose Doug functional is computed from its boundary values.
#[derive(Debug, Clone, Copy)]
pub enum DougTarget<'a> {
    Rif(&'a Rif),
    Poly(&'a BiPoly),
}

impl DougTarget<'_> {
    fn eval(&self, z1: C64, z2: C64) -> C64 {
        match self {
            DougTarget::Poly(p) => p.eval(z1, z2),
            DougTarget::Rif(phi) => {
                // Torus zeros of p are isolated; step off them along the circle.
                let mut t = 0.0;
                loop {
                    let w1 = z1 * C64::from_polar(1.0, t);
                    if let Ok(v) = phi.eval_phi(w1, z2) {
                        return v;
                    }
                    t = if t == 0.0 { 1e-9 } else { 2.0 * t };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DougConfig {
    /// Nodes per circle at each level.
    pub ladder: Vec<usize>,
    pub rel_tol: f64,
    pub growth_margin: f64,
    /// Rotation of the evaluation grid, in units of its spacing.
    pub grid_offset: f64,
}

impl Default for DougConfig {
    fn default() -> Self {
        DougConfig {
            ladder: vec![32, 64, 128],
            rel_tol: 1e-6,
            growth_margin: 0.05,
            grid_offset: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DougReport {
    /// `|f(0,0)|^2`, the two one-variable Douglas integrals and the torus term, at the finest level.
    pub terms: [f64; 4],
    pub result: QuadratureResult,
}

/// One-variable Douglas integral from `2n` samples at spacing `pi/n`: the
/// base points use even indices and the shifts odd ones, so no shift is zero.
fn douglas_1d(g: &[C64]) -> f64 {
    let two_n = g.len();
    let n = two_n / 2;
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let s = TAU * (2 * j + 1) as f64 / two_n as f64;
            1.0 / (C64::from_polar(1.0, s) - 1.0).norm_sqr()
        })
        .collect();
    let mut total = 0.0;
    for t in 0..n {
        for (j, w) in weights.iter().enumerate() {
            let u = (2 * t + 2 * j + 1) % two_n;
            total += (g[u] - g[2 * t]).norm_sqr() * w;
        }
    }
    total / (n * n) as f64
}

/// Torus term of the Doug functional with the same even/odd splitting in both variables.
fn douglas_torus(g: &[C64], two_n: usize) -> f64 {
    let n = two_n / 2;
    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let s = TAU * (2 * j + 1) as f64 / two_n as f64;
            1.0 / (C64::from_polar(1.0, s) - 1.0).norm_sqr()
        })
        .collect();
    let at = |a: usize, b: usize| g[a * two_n + b];
    let mut total = 0.0;
    for t1 in 0..n {
        let a0 = 2 * t1;
        for t2 in 0..n {
            let b0 = 2 * t2;
            let base = at(a0, b0);
            for (j1, w1) in weights.iter().enumerate() {
                let a1 = (a0 + 2 * j1 + 1) % two_n;
                let row_shift = at(a1, b0);
                let row = &g[a1 * two_n..(a1 + 1) * two_n];
                let row0 = &g[a0 * two_n..(a0 + 1) * two_n];
                let mut inner = 0.0;
                for (j2, w2) in weights.iter().enumerate() {
                    let b1 = (b0 + 2 * j2 + 1) % two_n;
                    let d = row[b1] - row_shift - row0[b1] + base;
                    inner += d.norm_sqr() * w2;
                }
                total += inner * w1;
            }
        }
    }
    total / (n as f64).powi(4)
}

fn doug_terms(f: &DougTarget, n: usize, offset: f64) -> [f64; 4] {
    let two_n = 2 * n;
    let h = TAU / two_n as f64;
    let nodes: Vec<C64> = (0..two_n)
        .map(|k| C64::from_polar(1.0, (k as f64 + offset) * h))
        .collect();
    let zero = C64::new(0.0, 0.0);
    let g1: Vec<C64> = nodes.iter().map(|&z| f.eval(z, zero)).collect();
    let g2: Vec<C64> = nodes.iter().map(|&z| f.eval(zero, z)).collect();
    let mut g = Vec::with_capacity(two_n * two_n);
    for &a in &nodes {
        for &b in &nodes {
            g.push(f.eval(a, b));
        }
    }
    [
        f.eval(zero, zero).norm_sqr(),
        douglas_1d(&g1),
        douglas_1d(&g2),
        douglas_torus(&g, two_n),
    ]
}

/// Doug functional from boundary values on a refinement ladder.
pub fn doug_quadrature(f: DougTarget, cfg: &DougConfig) -> DougReport {
    let mut levels = Vec::new();
    let mut terms = [0.0; 4];
    for &n in &cfg.ladder {
        terms = doug_terms(&f, n, cfg.grid_offset);
        levels.push(LevelSums {
            grid: n,
            regular: terms.iter().sum(),
            windows: vec![],
        });
    }
    let result = classify(
        &levels,
        &LadderConfig {
            rel_tol: cfg.rel_tol,
            growth_margin: cfg.growth_margin,
            ..LadderConfig::default()
        },
    );
    DougReport { terms, result }
}

/// `|a00|^2 + sum k |a_k0|^2 + sum l |a_0l|^2 + sum k l |a_kl|^2`.
pub fn doug_coefficients(a: &SeriesGrid) -> f64 {
    let n = a.order();
    let mut total = 0.0;
    for k in 0..=n {
        for l in 0..=n {
            let w = match (k, l) {
                (0, 0) => 1.0,
                (k, 0) => k as f64,
                (0, l) => l as f64,
                (k, l) => (k * l) as f64,
            };
            total += w * a.get(k, l).norm_sqr();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn favorite_vectors_satisfy_the_identity() {
        let phi = registry::favorite();
        let s = verify_agler_rif(&phi, &registry::favorite_agler(), 1000, 42);
        assert!(s.max_abs < 1e-12, "{s:?}");
        assert!(s.max_abs >= s.mean_abs);
    }

    #[test]
    fn scaled_vectors_fail() {
        let v = registry::favorite_agler();
        let bad = AglerVectors {
            e1: v.e1.iter().map(|q| q.scale(c(2.0, 0.0))).collect(),
            f2: v.f2.clone(),
        };
        assert!(verify_agler(registry::favorite().p(), &bad, 1000, 42).max_abs > 0.1);
    }

    #[test]
    fn registry_vectors_respect_degree_caps() {
        assert!(registry::favorite_agler().fits_bidegree(1, 1));
        assert!(registry::psi_agler().fits_bidegree(2, 1));
    }

    #[test]
    fn monomial_local_integral_at_origin_is_one() {
        let r = local_dirichlet_boundary(&registry::monomial(), (c(0.0, 0.0), c(0.0, 0.0)), &LocalConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_kernel_forms_agree() {
        let phi = registry::favorite();
        let v = registry::favorite_agler();
        for z in [(c(0.0, 0.0), c(0.0, 0.0)), (c(0.5, 0.0), c(0.0, -0.3))] {
            let a = local_dirichlet_boundary(&phi, z, &LocalConfig::default()).unwrap();
            let b = local_dirichlet_kernel(&phi, &v, z, &LocalConfig::default()).unwrap();
            assert!((a.value - b.value).abs() < 1e-8 * (1.0 + a.value), "{} {}", a.value, b.value);
        }
    }

    #[test]
    fn kernel_form_is_finite_at_regular_torus_point() {
        let phi = registry::favorite();
        let r = local_dirichlet_kernel(&phi, &registry::favorite_agler(), (c(-1.0, 0.0), c(-1.0, 0.0)), &LocalConfig::default()).unwrap();
        assert!(r.converged() && r.value.is_finite() && r.value > 0.0);
        assert_eq!(
            local_dirichlet_kernel(&phi, &registry::favorite_agler(), (c(1.0, 0.0), c(1.0, 0.0)), &LocalConfig::default()),
            Err(Error::SingularEvaluationPoint)
        );
    }

    #[test]
    fn boundary_form_rejects_points_near_the_torus() {
        assert_eq!(
            local_dirichlet_boundary(&registry::favorite(), (c(0.9995, 0.0), c(0.0, 0.0)), &LocalConfig::default()),
            Err(Error::PointTooCloseToBoundary(0.9995))
        );
    }

    #[test]
    fn doug_of_monomial_is_one() {
        let p = BiPoly::from_real_terms(&[(1, 1, 1.0)]);
        let r = doug_quadrature(DougTarget::Poly(&p), &DougConfig::default());
        assert!(r.result.converged());
        assert!((r.result.value - 1.0).abs() < 1e-12);
        assert!((doug_coefficients(&SeriesGrid::from(&p)) - 1.0).abs() < 1e-15);
    }
}
