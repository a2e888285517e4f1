//! Strategies and property bodies shared by the property and acceptance targets.
#![allow(dead_code)]

use std::f64::consts::TAU;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use riflab::boundary::{find_singularities, ScanConfig, SingularPoint};
use riflab::halfplane::{cayley, CayleyMap};
use riflab::poly2::inv_series;
use riflab::roots1::{roots, RootConfig};
use riflab::{Axis, BiPoly, Rif, UniPoly, C64};

pub const SEED: u64 = 42;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Runs `test` on `cases` seeded draws from `strategy`.
pub fn run_seeded<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(config(cases))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn unit(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

pub fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(a, b)| C64::new(a, b))
}

pub fn in_disk(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(move |(u, t)| C64::from_polar(radius * u.sqrt(), t))
}

pub fn angle() -> impl Strategy<Value = f64> {
    0.0..TAU
}

pub fn upper_half_plane() -> impl Strategy<Value = C64> {
    (-10.0..10.0f64, 1e-3..10.0f64).prop_map(|(x, y)| C64::new(x, y))
}

/// Dense polynomial with coefficients in the unit square, bidegree at most `(m, n)`.
pub fn any_poly(m: usize, n: usize) -> impl Strategy<Value = BiPoly> {
    proptest::collection::vec(complex(1.0), (m + 1) * (n + 1)).prop_map(move |c| {
        let grid = c.chunks(n + 1).map(|r| r.to_vec()).collect();
        BiPoly::from_grid(grid).expect("nonempty grid")
    })
}

/// `1 - a z1 - b z2` with `|a| + |b| = r`, or `1 - c z1 z2` with `|c| = r`.
fn stable_factor(touch: bool) -> impl Strategy<Value = BiPoly> {
    let radius = if touch { 1.0..=1.0 } else { 0.1..=0.9 };
    (radius, 0.05..0.95f64, angle(), angle(), prop::bool::weighted(0.25)).prop_map(|(r, split, s, t, cross)| {
        let one = C64::new(1.0, 0.0);
        if cross {
            BiPoly::from_terms(&[(0, 0, one), (1, 1, -unit(s) * r)])
        } else {
            BiPoly::from_terms(&[(0, 0, one), (1, 0, -unit(s) * r * split), (0, 1, -unit(t) * r * (1.0 - split))])
        }
    })
}

fn product(factors: Vec<BiPoly>) -> BiPoly {
    factors
        .into_iter()
        .fold(BiPoly::constant(C64::new(1.0, 0.0)), |acc, f| &acc * &f)
}

/// Products of one to three stable factors, none touching the torus.
pub fn strictly_stable() -> impl Strategy<Value = BiPoly> {
    proptest::collection::vec(stable_factor(false), 1..=3).prop_map(product)
}

/// Products of stable factors where one may touch the torus at a single point.
pub fn stable() -> impl Strategy<Value = BiPoly> {
    (
        proptest::collection::vec(stable_factor(false), 0..=2),
        prop::option::of(stable_factor(true)),
    )
        .prop_map(|(mut fs, t)| {
            fs.extend(t);
            if fs.is_empty() {
                fs.push(BiPoly::from_real_terms(&[(0, 0, 2.0), (1, 0, -1.0)]));
            }
            product(fs)
        })
}

pub fn rif_of(p: &BiPoly) -> Rif {
    Rif::new(p.clone()).expect("generated polynomial is stable")
}

fn rel_close(a: C64, b: C64, tol: f64, scale: f64) -> bool {
    (a - b).norm() <= tol * scale.max(1.0)
}

pub fn reflection_involution(p: BiPoly, extra: (usize, usize)) -> Result<(), TestCaseError> {
    let (m, n) = p.bidegree();
    let (m, n) = (m + extra.0, n + extra.1);
    let twice = p.reflect_at(m, n).reflect_at(m, n);
    for k in 0..=m {
        for l in 0..=n {
            prop_assert_eq!(twice.get(k, l), p.get(k, l));
        }
    }
    Ok(())
}

pub fn reflection_modulus(p: BiPoly, t: (f64, f64)) -> Result<(), TestCaseError> {
    let z = (unit(t.0), unit(t.1));
    let pt = p.reflect();
    let a = p.eval(z.0, z.1).norm();
    let b = pt.eval(z.0, z.1).norm();
    prop_assert!((a - b).abs() <= 1e-12 * p.eval_scale(z.0, z.1).max(1.0), "{} vs {}", a, b);
    Ok(())
}

pub fn eval_distributes(p: BiPoly, q: BiPoly, z: (C64, C64)) -> Result<(), TestCaseError> {
    let prod = &p * &q;
    let (a, b) = (p.eval(z.0, z.1), q.eval(z.0, z.1));
    let scale = p.eval_scale(z.0, z.1) * q.eval_scale(z.0, z.1);
    prop_assert!(rel_close(prod.eval(z.0, z.1), a * b, 1e-12, scale));
    let sum = &p + &q;
    let scale = p.eval_scale(z.0, z.1) + q.eval_scale(z.0, z.1);
    prop_assert!(rel_close(sum.eval(z.0, z.1), a + b, 1e-12, scale));
    Ok(())
}

pub fn inv_series_identity(p: BiPoly, order: usize) -> Result<(), TestCaseError> {
    let inv = inv_series(&p, order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let prod = inv.mul_poly(&p);
    let mut scale = 1.0f64;
    for k in 0..=order {
        for l in 0..=order {
            scale = scale.max(inv.get(k, l).norm() * p.max_coeff());
        }
    }
    for k in 0..=order {
        for l in 0..=order - k {
            let want = if k == 0 && l == 0 { 1.0 } else { 0.0 };
            let got = prod.get(k, l);
            prop_assert!((got - want).norm() <= 1e-12 * scale, "({}, {}): {}", k, l, got);
        }
    }
    Ok(())
}

pub fn slice_commutes(p: BiPoly, w: (C64, C64)) -> Result<(), TestCaseError> {
    let direct = p.eval(w.0, w.1);
    let scale = p.eval_scale(w.0, w.1);
    let via2 = p.slice(Axis::Two, w.1).eval(w.0);
    let via1 = p.slice(Axis::One, w.0).eval(w.1);
    prop_assert!(rel_close(via2, direct, 1e-13, scale));
    prop_assert!(rel_close(via1, direct, 1e-13, scale));
    Ok(())
}

pub fn root_reconstruction(coeffs: Vec<C64>) -> Result<(), TestCaseError> {
    let q = UniPoly::new(coeffs);
    prop_assume!(q.degree() >= 1 && q.leading().norm() > 1e-3);
    let rs = roots(&q, &RootConfig::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(rs.roots.len(), q.degree());
    let mut expanded = vec![C64::new(1.0, 0.0)];
    for r in &rs.roots {
        let mut next = vec![C64::new(0.0, 0.0); expanded.len() + 1];
        for (i, c) in expanded.iter().enumerate() {
            next[i + 1] += *c;
            next[i] -= *c * r;
        }
        expanded = next;
    }
    let lead = q.leading();
    let monic: Vec<C64> = q.coeffs().iter().map(|c| c / lead).collect();
    let scale = monic.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for (a, b) in expanded.iter().zip(&monic) {
        prop_assert!((a - b).norm() <= 1e-8 * scale, "{} vs {}", a, b);
    }
    Ok(())
}

pub fn real_roots_conjugate_closed(coeffs: Vec<f64>) -> Result<(), TestCaseError> {
    let q = UniPoly::from_real(&coeffs);
    prop_assume!(q.degree() >= 1 && q.leading().norm() > 1e-3);
    let rs = roots(&q, &RootConfig::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for r in &rs.roots {
        let partner = rs
            .roots
            .iter()
            .map(|s| (s - r.conj()).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(partner <= 1e-10 * r.norm().max(1.0), "{} has no conjugate", r);
    }
    Ok(())
}

fn near_singularity(sings: &[SingularPoint], z: (C64, C64)) -> bool {
    sings
        .iter()
        .any(|s| (s.tau[0] - z.0).norm().max((s.tau[1] - z.1).norm()) <= 1e-3)
}

pub fn unimodular_on_torus(p: BiPoly, ts: Vec<(f64, f64)>) -> Result<(), TestCaseError> {
    let phi = rif_of(&p);
    let sings = find_singularities(&phi, &ScanConfig::default());
    for (s, t) in ts {
        let z = (unit(s), unit(t));
        if near_singularity(&sings, z) {
            continue;
        }
        let v = phi.eval_phi(z.0, z.1).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((v.norm() - 1.0).abs() <= 1e-10, "|phi| = {}", v.norm());
    }
    Ok(())
}

/// `|b'(zeta)| = sum (1 - |a|^2) / |zeta - a|^2` over the zeros of the slice.
pub fn blaschke_derivative(p: BiPoly, fixed: f64, ts: Vec<f64>) -> Result<(), TestCaseError> {
    let phi = rif_of(&p);
    let zeta2 = unit(fixed);
    prop_assume!(phi.degree_in(Axis::One) >= 1);
    let (num, _) = phi.slice_blaschke(Axis::One, zeta2);
    let zeros = roots(&num, &RootConfig::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assume!(zeros.roots.iter().all(|a| a.norm() < 1.0 - 1e-6));
    let sings = find_singularities(&phi, &ScanConfig::default());
    for t in ts {
        let z1 = unit(t);
        if near_singularity(&sings, (z1, zeta2)) {
            continue;
        }
        let d = phi.eval_partial(Axis::One, z1, zeta2).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let sum: f64 = zeros
            .roots
            .iter()
            .map(|a| (1.0 - a.norm_sqr()) / (z1 - a).norm_sqr())
            .sum();
        prop_assert!((d.norm() - sum).abs() <= 1e-8 * sum.max(1.0), "{} vs {}", d.norm(), sum);
    }
    Ok(())
}

pub fn taylor_consistent(p: BiPoly, z: (C64, C64)) -> Result<(), TestCaseError> {
    let phi = rif_of(&p);
    let order = 40;
    let series = phi.taylor(order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let want = phi.eval_phi(z.0, z.1).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let err = (series.eval(z.0, z.1) - want).norm();
    prop_assert!(err < 100.0 * order as f64 * 0.5f64.powi(order as i32), "error {}", err);
    Ok(())
}

pub fn cayley_disk_round_trip(z: C64) -> Result<(), TestCaseError> {
    for map in [CayleyMap::Alpha, CayleyMap::AlphaTilde] {
        let w = cayley(map, z).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(w.im > 0.0);
        let back = cayley(map.inverse(), w).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((back - z).norm() <= 1e-12, "{:?}: {} -> {}", map, z, back);
    }
    Ok(())
}

pub fn cayley_plane_round_trip(w: C64) -> Result<(), TestCaseError> {
    for map in [CayleyMap::Beta, CayleyMap::BetaTilde] {
        let z = cayley(map, w).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(z.norm() < 1.0);
        let back = cayley(map.inverse(), z).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((back - w).norm() <= 1e-12 * w.norm().max(1.0) / (1.0 - z.norm()), "{:?}: {} -> {}", map, w, back);
    }
    Ok(())
}

pub fn pick_positive(phi: &Rif, w: (C64, C64)) -> Result<(), TestCaseError> {
    let f = riflab::halfplane::pick_transform(phi);
    let v = f.eval(w.0, w.1);
    prop_assert!(v.im >= -1e-10 * v.norm().max(1.0), "Im f = {} at {:?}", v.im, w);
    Ok(())
}

/// Relative gap between the Doug quadrature and the coefficient formula.
pub fn doug_gap(p: &BiPoly) -> Result<f64, TestCaseError> {
    use riflab::kernels::{doug_coefficients, doug_quadrature, DougConfig, DougTarget};
    let report = doug_quadrature(DougTarget::Poly(p), &DougConfig::default());
    let coeff = doug_coefficients(&riflab::SeriesGrid::from(p));
    prop_assert!(report.result.converged(), "{:?}", report.result.classification);
    Ok((report.result.value - coeff).abs() / coeff)
}

pub fn doug_identity(p: BiPoly) -> Result<(), TestCaseError> {
    let gap = doug_gap(&p)?;
    prop_assert!(gap <= 1e-6, "relative gap {}", gap);
    Ok(())
}
