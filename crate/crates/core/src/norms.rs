//! Hardy-space norms of partial derivatives and Dirichlet-type coefficient sums.
//!
//! On a fibre `z2 = zeta`, the derivative `d phi / d z1` is the derivative of a
//! Blaschke product, whose modulus on the circle is the sum of Poisson kernels
//! of its zeros.  The torus integral is therefore computed fibre by fibre from
//! the slice zeros, which stays accurate when a zero is within `1e-30` of the
//! circle.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::boundary::{self, find_singularities, unit, wrap, ContactReport, LocalChart, ScanConfig, SingularPoint};
use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::poly2::{inv_series, Axis, BiPoly, SeriesGrid};
use crate::quad::{classify, graded_edges, periodic_trapezoid, LadderConfig, LevelSums, Panel, QuadratureResult};
use crate::rif::Rif;
use crate::roots1::{self, RootConfig};
use crate::serde_util;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Nodes per circle at each refinement level.
    pub ladder: Vec<usize>,
    pub rel_tol: f64,
    /// Half-width of the graded window around a singular fibre.
    pub exclusion_angle: f64,
    /// Dyadic layers inside the window at the first level.
    pub grading_levels: usize,
    /// Extra layers per refinement level.
    pub grading_step: usize,
    pub growth_margin: f64,
    pub gl_order: usize,
    /// Fibres closer than this to a singular coordinate use the local chart.
    pub chart_range: f64,
    pub scan: ScanConfig,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            ladder: vec![256, 512, 1024, 2048],
            rel_tol: 1e-4,
            exclusion_angle: 1e-2,
            grading_levels: 12,
            grading_step: 4,
            growth_margin: 0.05,
            gl_order: 16,
            chart_range: 0.25,
            scan: ScanConfig::default(),
        }
    }
}

impl QuadConfig {
    pub fn ladder_config(&self) -> LadderConfig {
        LadderConfig {
            rel_tol: self.rel_tol,
            growth_margin: self.growth_margin,
            ..LadderConfig::default()
        }
    }
}

/// A slice zero `alpha` described by `w = 1 - |alpha|` and `arg alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberZero {
    pub w: f64,
    pub angle: f64,
}

/// Poisson kernel `(1 - r^2) / |e^{i t} - r e^{i s}|^2` with `w = 1 - r`, `d = t - s`.
#[inline]
pub fn poisson(w: f64, d: f64) -> f64 {
    let s = (0.5 * d).sin();
    w * (2.0 - w) / (w * w + 4.0 * (1.0 - w) * s * s)
}

/// `(1/2 pi) int |b'|^p` over the circle for the Blaschke product with the given zeros.
pub fn blaschke_power_mean(zeros: &[FiberZero], p: f64, panel: &Panel) -> f64 {
    if zeros.is_empty() {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&a, &b| zeros[a].angle.rem_euclid(TAU).total_cmp(&zeros[b].angle.rem_euclid(TAU)));
    let nz = order.len();
    let hmax = PI / 8.0;
    let mut total = 0.0;
    for (pos, &j) in order.iter().enumerate() {
        let here = zeros[j].angle.rem_euclid(TAU);
        let (left, right) = if nz == 1 {
            (PI, PI)
        } else {
            let prev = zeros[order[(pos + nz - 1) % nz]].angle.rem_euclid(TAU);
            let next = zeros[order[(pos + 1) % nz]].angle.rem_euclid(TAU);
            let l = (here - prev).rem_euclid(TAU);
            let r = (next - here).rem_euclid(TAU);
            (
                if l == 0.0 && pos > 0 { 0.0 } else if l == 0.0 { TAU / 2.0 } else { l / 2.0 },
                if r == 0.0 { TAU / 2.0 } else { r / 2.0 },
            )
        };
        let scale = zeros[j].w.max(1e-300);
        let f = |x: f64| -> f64 {
            let s: f64 = zeros
                .iter()
                .map(|z| poisson(z.w, zeros[j].angle - z.angle + x))
                .sum();
            s.powf(p)
        };
        for (len, sign) in [(right, 1.0), (left, -1.0)] {
            if len <= 0.0 {
                continue;
            }
            let e = graded_edges(scale, len, hmax);
            for k in 1..e.len() {
                total += panel.integrate(e[k - 1], e[k], |x| f(sign * x));
            }
        }
    }
    total / TAU
}

/// Slice zeros of `p~` over the fibre `z2 = e^{i(anchor + delta)}` of an
/// oriented function, polished in the given charts when the fibre is close.
fn fiber_zeros(o: &Rif, anchor: f64, delta: f64, charts: &[LocalChart], chart_range: f64) -> Vec<FiberZero> {
    let zeta = unit(anchor + delta);
    let s = o.ptilde().slice(Axis::Two, zeta);
    if s.degree() == 0 {
        return vec![];
    }
    let global = match roots1::roots(&s, &RootConfig::default()) {
        Ok(r) => r.roots,
        Err(_) => return vec![],
    };
    let mut zeros: Vec<FiberZero> = global
        .iter()
        .map(|a| FiberZero {
            w: 1.0 - a.norm(),
            angle: a.arg(),
        })
        .collect();
    if delta.abs() <= chart_range {
        for ch in charts {
            for (idx, r) in ch.polish(delta, &global) {
                zeros[idx] = FiberZero {
                    w: r.w,
                    angle: ch.angles[0] + r.offset,
                };
            }
        }
    }
    zeros
}

/// Integrates a fibre function over the circle for each ladder level.
///
/// Anchors are singular fibre angles; each one gets a dyadic window of depth
/// `grading_levels + level * grading_step` on both sides.  The function is
/// called with the index of the nearest anchor and the signed offset from it.
pub(crate) fn fiber_ladder<F>(anchors: &[f64], cfg: &QuadConfig, mut f: F) -> Vec<LevelSums>
where
    F: FnMut(Option<usize>, f64) -> f64,
{
    let panel = Panel::new(cfg.gl_order);
    let mut anchors: Vec<f64> = anchors.iter().map(|a| a.rem_euclid(TAU)).collect();
    anchors.sort_by(|a, b| a.total_cmp(b));
    anchors.dedup_by(|a, b| wrap(*a - *b).abs() < 1e-12);
    let na = anchors.len();
    let mut out = Vec::new();
    for (level, &n) in cfg.ladder.iter().enumerate() {
        if na == 0 {
            out.push(LevelSums {
                grid: n,
                regular: periodic_trapezoid(n, |t| f(None, t)),
                windows: vec![],
            });
            continue;
        }
        let depth = cfg.grading_levels + level * cfg.grading_step;
        let hmax = TAU * cfg.gl_order as f64 / n as f64;
        let mut regular = 0.0;
        let mut windows = vec![0.0; 2 * na];
        for a in 0..na {
            let next = (a + 1) % na;
            let arc = if na == 1 {
                TAU
            } else {
                (anchors[next] - anchors[a]).rem_euclid(TAU)
            };
            let half = arc / 2.0;
            let e = cfg.exclusion_angle.min(half / 2.0);
            // Left end of the arc belongs to anchor `a` (positive offsets),
            // right end to anchor `next` (negative offsets).
            for (anchor, sign, slot) in [(a, 1.0, 2 * a), (next, -1.0, 2 * next + 1)] {
                let mut hi = e;
                for _ in 0..depth {
                    let lo = hi / 2.0;
                    windows[slot] += panel.integrate(lo, hi, |x| f(Some(anchor), sign * x)) / TAU;
                    hi = lo;
                }
                let edges = graded_edges(e, half - e, hmax);
                for k in 1..edges.len() {
                    regular += panel.integrate(e + edges[k - 1], e + edges[k], |x| f(Some(anchor), sign * x)) / TAU;
                }
            }
        }
        out.push(LevelSums {
            grid: n,
            regular,
            windows,
        });
    }
    out
}

/// Groups singular points by their fibre coordinate in the oriented frame.
fn anchors_and_charts(o: &Rif, sings: &[SingularPoint], axis: Axis) -> (Vec<f64>, Vec<Vec<LocalChart>>) {
    let mut anchors: Vec<f64> = Vec::new();
    let mut charts: Vec<Vec<LocalChart>> = Vec::new();
    for sp in sings {
        let ang = sp.oriented_angles(axis);
        let chart = LocalChart::new(o.ptilde(), ang);
        match anchors.iter().position(|a| wrap(a - ang[1]).abs() < 1e-12) {
            Some(i) => charts[i].push(chart),
            None => {
                anchors.push(ang[1]);
                charts.push(vec![chart]);
            }
        }
    }
    // Keep charts aligned with the sorted order used by the ladder.
    let mut idx: Vec<usize> = (0..anchors.len()).collect();
    idx.sort_by(|&a, &b| anchors[a].rem_euclid(TAU).total_cmp(&anchors[b].rem_euclid(TAU)));
    (
        idx.iter().map(|&i| anchors[i].rem_euclid(TAU)).collect(),
        idx.iter().map(|&i| charts[i].clone()).collect(),
    )
}

/// `|| d phi / d z_axis ||_{H^p}` with singular fibres handled by graded windows.
pub fn hp_norm_derivative(phi: &Rif, axis: Axis, p: f64, cfg: &QuadConfig) -> Result<QuadratureResult> {
    let sings = find_singularities(phi, &cfg.scan);
    hp_norm_derivative_at(phi, axis, p, &sings, cfg)
}

pub fn hp_norm_derivative_at(
    phi: &Rif,
    axis: Axis,
    p: f64,
    sings: &[SingularPoint],
    cfg: &QuadConfig,
) -> Result<QuadratureResult> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    let o = phi.oriented(axis);
    let (anchors, charts) = anchors_and_charts(&o, sings, axis);
    let panel = Panel::new(cfg.gl_order);
    let levels = fiber_ladder(&anchors, cfg, |a, delta| {
        let (anchor, ch): (f64, &[LocalChart]) = match a {
            Some(i) => (anchors[i], &charts[i]),
            None => (0.0, &[]),
        };
        let zeros = fiber_zeros(&o, anchor, delta, ch, cfg.chart_range);
        blaschke_power_mean(&zeros, p, &panel)
    });
    let mut r = classify(&levels, &cfg.ladder_config());
    if r.converged() {
        r.value = r.value.powf(1.0 / p);
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Check {
    pub value1: f64,
    pub value2: f64,
    pub m: usize,
    pub n: usize,
}

/// Both `H^1` norms beside the bidegree; they agree for every RIF.
pub fn h1_degree_check(phi: &Rif, cfg: &QuadConfig) -> Result<H1Check> {
    let sings = find_singularities(phi, &cfg.scan);
    let v1 = hp_norm_derivative_at(phi, Axis::One, 1.0, &sings, cfg)?;
    let v2 = hp_norm_derivative_at(phi, Axis::Two, 1.0, &sings, cfg)?;
    let (m, n) = phi.bidegree();
    Ok(H1Check {
        value1: v1.value,
        value2: v2.value,
        m,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NotMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletTail {
    pub alpha: [f64; 2],
    /// `(M, S_M)` with `S_M` the weighted sum over `k, l <= M`.
    pub partial_sums: Vec<(usize, f64)>,
    /// `(n, T_n)` with `T_n` the weighted sum over `k + l = n`.
    #[serde(skip)]
    pub annular_sums: Vec<(usize, f64)>,
    pub verdict: Verdict,
    #[serde(with = "serde_util::f64_or_inf")]
    pub tail_exponent: f64,
}

pub const TAIL_MARGIN: f64 = 0.15;

/// Weighted coefficient sums `sum (k+1)^a1 (l+1)^a2 |a_kl|^2` and their tail decay.
pub fn dirichlet_partial(series: &SeriesGrid, alpha: [f64; 2], order: usize) -> DirichletTail {
    let n = order.min(series.order());
    let wk: Vec<f64> = (0..=n).map(|k| ((k + 1) as f64).powf(alpha[0])).collect();
    let wl: Vec<f64> = (0..=n).map(|l| ((l + 1) as f64).powf(alpha[1])).collect();
    let term = |k: usize, l: usize| wk[k] * wl[l] * series.get(k, l).norm_sqr();
    let mut annular = Vec::with_capacity(n + 1);
    for s in 0..=n {
        annular.push((s, (0..=s).map(|k| term(k, s - k)).sum::<f64>()));
    }
    let mut partial_sums = Vec::new();
    for m in [n / 4, n / 2, 3 * n / 4, n] {
        let mut acc = 0.0;
        for k in 0..=m {
            for l in 0..=m {
                acc += term(k, l);
            }
        }
        partial_sums.push((m, acc));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = annular
        .iter()
        .filter(|(s, t)| *s >= (n / 4).max(1) && *t > 0.0 && t.is_finite())
        .map(|&(s, t)| ((s as f64).ln(), t.ln()))
        .unzip();
    let tail_exponent = if xs.len() < 2 {
        f64::NEG_INFINITY
    } else {
        line_fit(&xs, &ys).map_or(f64::NEG_INFINITY, |f| f.slope)
    };
    let verdict = if tail_exponent < -1.0 - TAIL_MARGIN {
        Verdict::Member
    } else if tail_exponent > -1.0 + TAIL_MARGIN {
        Verdict::NotMember
    } else {
        Verdict::Inconclusive
    };
    DirichletTail {
        alpha,
        partial_sums,
        annular_sums: annular,
        verdict,
        tail_exponent,
    }
}

/// Tail diagnostics for the coefficients of `1/p` with isotropic weight.
pub fn inv_series_dirichlet(p: &BiPoly, alpha: f64, order: usize) -> Result<DirichletTail> {
    Ok(dirichlet_partial(&inv_series(p, order)?, [alpha, alpha], order))
}

/// Membership consequences of the contact orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub k: [f64; 2],
    /// Derivative along axis `i` lies in `H^p` exactly for `p` below this value.
    #[serde(with = "serde_util::f64_pair_or_inf")]
    pub hp_sup: [f64; 2],
    pub singular: bool,
    /// With torus singularities no derivative lies in `H^{3/2}`.
    pub excludes_three_halves: bool,
    /// `phi` lies in `D_(a,0)` for `a` below the first entry and in `D_(0,b)` for `b` below the second.
    #[serde(with = "serde_util::f64_pair_or_inf")]
    pub axis_dirichlet_sup: [f64; 2],
    /// `phi` lies in `D_(a,b)` for `a`, `b` below these values.
    #[serde(with = "serde_util::f64_pair_or_inf")]
    pub anisotropic_dirichlet_sup: [f64; 2],
    /// `phi` lies in the isotropic `D_alpha` for `alpha` below this value.
    #[serde(with = "serde_util::f64_or_inf")]
    pub isotropic_dirichlet_sup: f64,
}

pub fn membership_table(report: &ContactReport) -> MembershipReport {
    let singular = !report.singularities.is_empty();
    let t = [report.hp_threshold_1, report.hp_threshold_2];
    let half = [t[0] / 2.0, t[1] / 2.0];
    MembershipReport {
        k: [report.k(Axis::One), report.k(Axis::Two)],
        hp_sup: t,
        singular,
        excludes_three_halves: singular,
        axis_dirichlet_sup: t,
        anisotropic_dirichlet_sup: half,
        isotropic_dirichlet_sup: half[0].min(half[1]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictSource {
    Tail,
    Contact,
}

/// Settles an inconclusive tail verdict for the isotropic weight `alpha`
/// with the cutoff implied by the contact orders.
pub fn resolve_verdict(tail: &DirichletTail, membership: &MembershipReport) -> (Verdict, VerdictSource) {
    if tail.verdict != Verdict::Inconclusive || tail.alpha[0] != tail.alpha[1] {
        return (tail.verdict, VerdictSource::Tail);
    }
    let v = if tail.alpha[0] < membership.isotropic_dirichlet_sup {
        Verdict::Member
    } else {
        Verdict::NotMember
    };
    (v, VerdictSource::Contact)
}

/// Membership of the derivative in `H^p` as predicted by the contact order,
/// with the endpoint excluded.
pub fn predicted_hp_membership(k: f64, p: f64) -> bool {
    p < boundary::hp_threshold(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    #[test]
    fn poisson_kernel_integrates_to_one() {
        let panel = Panel::new(16);
        for w in [0.5, 1e-3, 1e-12, 1e-30] {
            let v = blaschke_power_mean(&[FiberZero { w, angle: 0.7 }], 1.0, &panel);
            assert!((v - 1.0).abs() < 1e-12, "{w}: {v}");
        }
    }

    #[test]
    fn single_zero_power_mean_matches_closed_form() {
        // (1/2pi) int P^2 = (1 + r^2)/(1 - r^2)
        let panel = Panel::new(16);
        for w in [0.3, 1e-4] {
            let r: f64 = 1.0 - w;
            let v = blaschke_power_mean(&[FiberZero { w, angle: -2.0 }], 2.0, &panel);
            let want = (1.0 + r * r) / (w * (2.0 - w));
            assert!((v - want).abs() < 1e-11 * want);
        }
    }

    #[test]
    fn monomial_derivative_has_unit_norm() {
        let phi = registry::monomial();
        for p in [1.0, 1.7, 3.0] {
            let r = hp_norm_derivative(&phi, Axis::One, p, &QuadConfig::default()).unwrap();
            assert!(r.converged());
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        assert_eq!(
            hp_norm_derivative(&registry::favorite(), Axis::One, 0.5, &QuadConfig::default()),
            Err(Error::InvalidExponent(0.5))
        );
    }

    #[test]
    fn constant_inverse_series_is_a_member() {
        let t = inv_series_dirichlet(&BiPoly::from_real_terms(&[(0, 0, 1.0)]), 0.7, 64).unwrap();
        assert_eq!(t.verdict, Verdict::Member);
        assert!((t.partial_sums.last().unwrap().1 - 1.0).abs() < 1e-15);
    }
}
