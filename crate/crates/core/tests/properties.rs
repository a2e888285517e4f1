//! Seeded property suites; each block runs standalone with `cargo test --test properties`.

mod common;

use common::*;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use riflab::boundary::{contact_report, ContactConfig};
use riflab::halfplane::{pick_transform_rotated, trace_level_curve, TraceConfig};
use riflab::kernels::{local_dirichlet_boundary, verify_agler_rif, LocalConfig};
use riflab::norms::{hp_norm_derivative, QuadConfig};
use riflab::{registry, Axis, BiPoly, Rif, C64};

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn reflection_is_an_involution(p in any_poly(3, 3), extra in (0usize..3, 0usize..3)) {
        reflection_involution(p, extra)?;
    }

    #[test]
    fn reflection_preserves_modulus_on_torus(p in any_poly(3, 4), t in (angle(), angle())) {
        reflection_modulus(p, t)?;
    }

    #[test]
    fn eval_distributes_over_ring_ops(p in any_poly(2, 3), q in any_poly(3, 2), z in (complex(1.5), complex(1.5))) {
        eval_distributes(p, q, z)?;
    }

    #[test]
    fn slice_then_eval_commutes(p in any_poly(4, 3), w in (complex(1.2), complex(1.2))) {
        slice_commutes(p, w)?;
    }

    #[test]
    fn cayley_round_trips_from_disk(z in in_disk(0.999)) {
        cayley_disk_round_trip(z)?;
    }

    #[test]
    fn cayley_round_trips_from_half_plane(w in upper_half_plane()) {
        cayley_plane_round_trip(w)?;
    }

    #[test]
    fn roots_reconstruct_polynomial(c in proptest::collection::vec(complex(1.0), 2..=11)) {
        root_reconstruction(c)?;
    }

    #[test]
    fn real_polynomial_roots_come_in_conjugate_pairs(c in proptest::collection::vec(-1.0..1.0f64, 2..=11)) {
        real_roots_conjugate_closed(c)?;
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn inverse_series_times_polynomial_is_one(p in stable(), order in 4usize..24) {
        inv_series_identity(p, order)?;
    }

    #[test]
    fn taylor_partial_sums_match_phi(p in stable(), z in (in_disk(0.5), in_disk(0.5))) {
        taylor_consistent(p, z)?;
    }

    #[test]
    fn pick_function_maps_into_upper_half_plane(p in stable(), w in (upper_half_plane(), upper_half_plane())) {
        pick_positive(&rif_of(&p), w)?;
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn phi_is_unimodular_on_torus(p in stable(), ts in proptest::collection::vec((angle(), angle()), 40)) {
        unimodular_on_torus(p, ts)?;
    }

    #[test]
    fn blaschke_derivative_is_poisson_sum(p in stable(), fixed in angle(), ts in proptest::collection::vec(angle(), 100)) {
        blaschke_derivative(p, fixed, ts)?;
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn doug_quadrature_matches_coefficients(p in any_poly(3, 3)) {
        doug_identity(p)?;
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn agler_residual_ignores_unimodular_scaling(t in angle(), seed in 0u64..1000) {
        for (phi, v) in [(registry::favorite(), registry::favorite_agler()), (registry::psi(), registry::psi_agler())] {
            let base = verify_agler_rif(&phi, &v, 200, seed);
            let scaled = verify_agler_rif(&phi, &v.scale(unit(t)), 200, seed);
            prop_assert!((base.max_abs - scaled.max_abs).abs() <= 1e-14);
            prop_assert!((base.mean_abs - scaled.mean_abs).abs() <= 1e-14);
        }
    }

    #[test]
    fn local_dirichlet_is_nonnegative(z in (in_disk(0.95), in_disk(0.95))) {
        for phi in [registry::favorite(), registry::psi(), registry::amy()] {
            let v = local_dirichlet_boundary(&phi, z, &LocalConfig::default()).unwrap().value;
            prop_assert!(v >= -1e-10, "{}", v);
        }
    }

    #[test]
    fn pick_function_registry_positive(w in (upper_half_plane(), upper_half_plane())) {
        for e in registry::all() {
            pick_positive(&e.rif(), w)?;
        }
    }
}

#[test]
fn hp_norm_nondecreasing_in_exponent() {
    let cfg = QuadConfig::default();
    for e in registry::all() {
        let phi = e.rif();
        for axis in Axis::BOTH {
            let values: Vec<f64> = [1.0, 1.1, 1.2]
                .iter()
                .map(|&p| hp_norm_derivative(&phi, axis, p, &cfg).unwrap())
                .filter(|q| q.converged())
                .map(|q| q.value)
                .collect();
            for w in values.windows(2) {
                assert!(w[1] >= w[0] * (1.0 - 1e-9), "{} {:?}: {:?}", e.name, axis, values);
            }
        }
    }
}

#[test]
fn contact_orders_obey_julia_bound() {
    for e in registry::all() {
        let r = contact_report(&e.rif(), &ContactConfig::default()).unwrap();
        if r.singularities.is_empty() {
            continue;
        }
        for fit in &r.per_singularity {
            assert!(fit.slope >= 1.9, "{} {:?}: {}", e.name, fit.axis, fit.slope);
        }
    }
}

#[test]
fn symmetric_function_has_equal_contact_orders() {
    let phi = registry::favorite();
    assert!(phi.p().is_symmetric(0.0));
    let r = contact_report(&phi, &ContactConfig::default()).unwrap();
    let f1 = r.per_singularity.iter().find(|f| f.axis == Axis::One).unwrap();
    let f2 = r.per_singularity.iter().find(|f| f.axis == Axis::Two).unwrap();
    assert!((f1.slope - f2.slope).abs() <= 2.0 * f1.slope_stderr.max(f2.slope_stderr).max(1e-12));
    assert_eq!(f1.k_rational, f2.k_rational);
}

#[test]
fn epsilon_bounded_below_by_contact_power() {
    for e in registry::all() {
        let r = contact_report(&e.rif(), &ContactConfig::default()).unwrap();
        for fit in &r.per_singularity {
            let exponent = fit.k() + 0.1;
            let ratios: Vec<f64> = fit.samples.iter().map(|s| s.epsilon / s.delta.powf(exponent)).collect();
            let largest_delta = fit
                .samples
                .iter()
                .zip(&ratios)
                .max_by(|a, b| a.0.delta.total_cmp(&b.0.delta))
                .map(|(_, r)| *r)
                .unwrap();
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(lo > 0.0 && lo >= 0.1 * largest_delta, "{} {:?}: {:?}", e.name, fit.axis, ratios);
        }
    }
}

#[test]
fn contact_order_survives_disk_automorphisms() {
    let base = registry::favorite();
    let (m, n) = base.bidegree();
    for (a, b) in [(0.1, -0.05), (-0.2, 0.15), (0.05, 0.3)] {
        let p = base.p().moebius_substitute(C64::new(a, 0.0), C64::new(b, 0.0), m, n);
        let moved = Rif::with_bidegree(p, (m, n)).unwrap();
        let r = contact_report(&moved, &ContactConfig::default()).unwrap();
        assert_eq!(r.singularities.len(), 1);
        assert_eq!(r.k1_rational, Some([2, 1]), "a = {a}, b = {b}");
        assert_eq!(r.k2_rational, Some([2, 1]), "a = {a}, b = {b}");
    }
}

#[test]
fn rotated_pick_function_vanishes_at_infinity() {
    let f = pick_transform_rotated(&registry::favorite(), C64::new(-1.0, 0.0));
    let i = C64::new(0.0, 1.0);
    let mut prev = f64::INFINITY;
    for s in [1e1, 1e2, 1e3, 1e4, 1e5] {
        let v = f.eval(i * s, i * s).norm();
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < 1e-4);
    let mut prev = f64::INFINITY;
    for s in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let w = -(i * s).inv();
        let v = f.eval(w, w).norm();
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < 1e-4);
}

#[test]
fn level_curve_vertices_meet_corrector_tolerance() {
    let f = riflab::halfplane::pick_transform(&registry::psi());
    let cfg = TraceConfig {
        bound: 100.0,
        heading: Some([-1.0, 1.0]),
        ..TraceConfig::default()
    };
    let start = [-10.0, (5.0 * -10.0 - 2.0 * 100.0 + 1.0) / (3.0 * -10.0 - 5.0)];
    let curve = trace_level_curve(&f, start, 5.0, &cfg).unwrap();
    assert!(curve.points.len() > 100);
    for (pt, r) in curve.points.iter().zip(&curve.residuals) {
        assert!(*r < cfg.corrector_tol);
        let (v, _) = f.real_jet(pt[0], pt[1]);
        assert!((v - 5.0).abs() < cfg.corrector_tol);
    }
}

#[test]
fn registry_function_derivative_matches_finite_difference() {
    let h = 1e-6;
    for e in registry::all() {
        let phi = e.rif();
        let z = (C64::new(0.3, -0.2), C64::new(-0.1, 0.4));
        for axis in Axis::BOTH {
            let d = phi.eval_partial(axis, z.0, z.1).unwrap();
            let step = |s: f64| match axis {
                Axis::One => phi.eval_phi(z.0 + s, z.1).unwrap(),
                Axis::Two => phi.eval_phi(z.0, z.1 + s).unwrap(),
            };
            let fd = (step(h) - step(-h)) / (2.0 * h);
            assert!((d - fd).norm() < 1e-7, "{} {:?}: {} vs {}", e.name, axis, d, fd);
        }
    }
}

#[test]
fn generated_polynomials_are_stable() {
    let mut runner = proptest::test_runner::TestRunner::new(config(64));
    for _ in 0..64 {
        let p: BiPoly = stable().new_tree(&mut runner).unwrap().current();
        assert!(Rif::new(p).is_ok());
    }
}
