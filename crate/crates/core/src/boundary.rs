//! Singularities on the torus and contact orders.
//!
//! Near a singular point the slice zeros come within `delta^K` of the unit
//! circle, which for `K = 4` is far below what an f64 root can resolve.
//! Distances are therefore measured in a local chart centred at the singular
//! point and polished in double-double arithmetic.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::fit::{line_fit, snap};
use crate::poly2::{Axis, BiPoly, C64};
use crate::rif::Rif;
use crate::roots1::{self, RootConfig};
use crate::serde_util;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub angles: usize,
    pub refine_rounds: usize,
    pub coarse_tol: f64,
    pub tol_singular: f64,
    /// Candidates closer than this (in angle, per coordinate) are merged.
    pub cluster_radius: f64,
    /// Largest denominator `d` tried when snapping angles to `2 pi k / d`.
    pub snap_max_denom: u32,
    pub snap_angle_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            angles: 4096,
            refine_rounds: 3,
            coarse_tol: 1e-3,
            tol_singular: 1e-6,
            cluster_radius: 1e-3,
            snap_max_denom: 24,
            snap_angle_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    #[serde(with = "serde_util::complex_pair")]
    pub tau: [C64; 2],
    /// Arguments of `tau`, the exact description used by local charts.
    pub angles: [f64; 2],
    pub residual_p: f64,
    pub residual_ptilde: f64,
    pub cluster_size: usize,
    /// Whether the location was snapped to a rational multiple of `2 pi`.
    pub snapped: bool,
}

impl SingularPoint {
    /// Angles with `axis` first.
    pub fn oriented_angles(&self, axis: Axis) -> [f64; 2] {
        match axis {
            Axis::One => self.angles,
            Axis::Two => [self.angles[1], self.angles[0]],
        }
    }
}

/// `e^{i theta}` with exact values at multiples of `pi / 2`.
pub fn unit(theta: f64) -> C64 {
    let q = theta / (PI / 2.0);
    if q == q.round() {
        match (q.round() as i64).rem_euclid(4) {
            0 => return C64::new(1.0, 0.0),
            1 => return C64::new(0.0, 1.0),
            2 => return C64::new(-1.0, 0.0),
            _ => return C64::new(0.0, -1.0),
        }
    }
    C64::from_polar(1.0, theta)
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn unit_dd(theta: f64) -> Cdd {
    let q = theta / (PI / 2.0);
    if q == q.round() {
        return Cdd::from(unit(theta));
    }
    Cdd::new(Dd::ZERO, Dd::new(theta)).expm1() + Cdd::ONE
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn horner(coeffs: &[Cdd], u: Cdd) -> Cdd {
    coeffs.iter().rev().fold(Cdd::ZERO, |acc, &c| acc * u + c)
}

/// A zero of a slice of `p~` in chart coordinates `z1 = tau1 * e^{v}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRoot {
    /// `1 - |z1|`.
    pub w: f64,
    /// `arg z1 - arg tau1`.
    pub offset: f64,
}

/// `p~(tau1 (1 + u1), tau2 (1 + u2))` expanded around a torus point, with the
/// first variable free and fibres `z2 = tau2 e^{i delta}`.
#[derive(Debug, Clone)]
pub struct LocalChart {
    pub angles: [f64; 2],
    m: usize,
    n: usize,
    coeffs: Vec<Cdd>,
    ptilde: BiPoly,
    pub radius: f64,
}

const CHART_RADIUS: f64 = 0.25;

impl LocalChart {
    pub fn new(ptilde: &BiPoly, angles: [f64; 2]) -> LocalChart {
        let (m, n) = ptilde.bidegree();
        let t1 = unit_dd(angles[0]);
        let t2 = unit_dd(angles[1]);
        let mut pow1 = vec![Cdd::ONE; m + 1];
        for k in 1..=m {
            pow1[k] = pow1[k - 1] * t1;
        }
        let mut pow2 = vec![Cdd::ONE; n + 1];
        for l in 1..=n {
            pow2[l] = pow2[l - 1] * t2;
        }
        let mut coeffs = vec![Cdd::ZERO; (m + 1) * (n + 1)];
        for k in 0..=m {
            for l in 0..=n {
                let c = ptilde.get(k, l);
                if c.norm() == 0.0 {
                    continue;
                }
                let base = Cdd::from(c) * pow1[k] * pow2[l];
                for a in 0..=k {
                    for b in 0..=l {
                        let s = binomial(k, a) * binomial(l, b);
                        coeffs[a * (n + 1) + b] = coeffs[a * (n + 1) + b] + base.scale(s);
                    }
                }
            }
        }
        LocalChart {
            angles,
            m,
            n,
            coeffs,
            ptilde: ptilde.clone(),
            radius: CHART_RADIUS,
        }
    }

    fn fiber_coeffs(&self, delta: f64) -> Vec<Cdd> {
        let u2 = Cdd::new(Dd::ZERO, Dd::new(delta)).expm1();
        (0..=self.m)
            .map(|a| {
                let row = &self.coeffs[a * (self.n + 1)..(a + 1) * (self.n + 1)];
                horner(row, u2)
            })
            .collect()
    }

    /// f64 slice zeros of `p~` on the fibre at offset `delta`.
    pub fn global_roots(&self, delta: f64) -> Vec<C64> {
        let zeta = unit(self.angles[1] + delta);
        let s = self.ptilde.slice(Axis::Two, zeta);
        if s.degree() == 0 {
            return vec![];
        }
        roots1::roots(&s, &RootConfig::default())
            .map(|r| r.roots)
            .unwrap_or_default()
    }

    /// Polishes the zeros in `global` that lie inside the chart.  Returns the
    /// index of each polished zero together with its local description.
    pub fn polish(&self, delta: f64, global: &[C64]) -> Vec<(usize, LocalRoot)> {
        let a = self.fiber_coeffs(delta);
        let da: Vec<Cdd> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(k as f64))
            .collect();
        let rot = unit(-self.angles[0]);
        let mut out = Vec::new();
        for (idx, z) in global.iter().enumerate() {
            let u = z * rot - 1.0;
            if u.norm() >= self.radius {
                continue;
            }
            let mut v = Cdd::from((u + 1.0).ln());
            let mut last = f64::INFINITY;
            for _ in 0..60 {
                let uu = v.expm1();
                let f = horner(&a, uu);
                let fp = horner(&da, uu) * (uu + Cdd::ONE);
                if fp.abs_f64() == 0.0 {
                    break;
                }
                let dv = f / fp;
                let step = dv.abs_f64();
                v = v - dv;
                if step <= 1e-31 * v.abs_f64() || step == 0.0 || step >= last {
                    break;
                }
                last = step;
            }
            let re = v.re.to_f64();
            out.push((
                idx,
                LocalRoot {
                    w: -re.exp_m1(),
                    offset: v.im.to_f64(),
                },
            ));
        }
        out
    }

    /// Localized distance of the slice zeros to the circle at fibre offset `delta`.
    pub fn epsilon(&self, delta: f64) -> Option<f64> {
        let g = self.global_roots(delta);
        self.polish(delta, &g)
            .into_iter()
            .map(|(_, r)| r.w)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// The zero realising [`LocalChart::epsilon`].
    pub fn closest(&self, delta: f64) -> Option<LocalRoot> {
        let g = self.global_roots(delta);
        self.polish(delta, &g)
            .into_iter()
            .map(|(_, r)| r)
            .min_by(|a, b| a.w.total_cmp(&b.w))
    }
}

struct Candidate {
    angles: [f64; 2],
    gap: f64,
    hits: usize,
}

fn root_gap(p: &BiPoly, theta: f64) -> Option<(f64, C64)> {
    let s = p.slice(Axis::Two, unit(theta));
    if s.degree() == 0 {
        return None;
    }
    let rs = roots1::roots(&s, &RootConfig::default()).ok()?;
    rs.roots
        .iter()
        .map(|z| ((z.norm() - 1.0).abs(), *z))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

fn scan_axis(phi: &Rif, cfg: &ScanConfig) -> Vec<([f64; 2], f64)> {
    let p = phi.p();
    let n = cfg.angles.max(8);
    let h0 = TAU / n as f64;
    let gaps: Vec<Option<(f64, C64)>> = (0..n).map(|j| root_gap(p, h0 * j as f64)).collect();
    let g = |j: usize| gaps[j % n].map_or(f64::INFINITY, |x| x.0);
    let mut out = Vec::new();
    for j in 0..n {
        let gj = g(j);
        if gj >= cfg.coarse_tol || gj > g(j + n - 1) || gj > g(j + 1) {
            continue;
        }
        let mut t = h0 * j as f64;
        let mut h = h0;
        let mut best = gaps[j].unwrap();
        for _ in 0..cfg.refine_rounds {
            let mut bt = t;
            for k in 0..=16 {
                let s = t + h * (k as f64 - 8.0) / 8.0;
                if let Some(r) = root_gap(p, s) {
                    if r.0 < best.0 {
                        best = r;
                        bt = s;
                    }
                }
            }
            t = bt;
            h /= 8.0;
        }
        out.push(([best.1.arg(), t.rem_euclid(TAU)], best.0));
    }
    out
}

fn snap_angle(theta: f64, max_denom: u32, tol: f64) -> Option<f64> {
    for d in 1..=max_denom.max(1) {
        let k = (theta * d as f64 / TAU).round();
        let s = TAU * k / d as f64;
        if (theta - s).abs() < tol {
            return Some(s.rem_euclid(TAU));
        }
    }
    None
}

fn residuals(phi: &Rif, tau: [C64; 2]) -> (f64, f64) {
    let rel = |q: &BiPoly| q.eval(tau[0], tau[1]).norm() / q.eval_scale(tau[0], tau[1]).max(f64::MIN_POSITIVE);
    (rel(phi.p()), rel(phi.ptilde()))
}

/// Moves an unsnapped location to the fibre where the chart distance is smallest.
fn polish_location(phi: &Rif, angles: [f64; 2]) -> [f64; 2] {
    let chart = LocalChart::new(phi.ptilde(), angles);
    let f = |d: f64| chart.epsilon(d).map_or(f64::INFINITY, f64::abs);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-1e-3, 1e-3);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    let d = if f1 <= f2 { x1 } else { x2 };
    if f(d) > f(0.0) {
        return angles;
    }
    match chart.closest(d) {
        Some(r) => [(angles[0] + r.offset).rem_euclid(TAU), (angles[1] + d).rem_euclid(TAU)],
        None => angles,
    }
}

/// Common zeros of `p` and `p~` on the torus.
pub fn find_singularities(phi: &Rif, cfg: &ScanConfig) -> Vec<SingularPoint> {
    let mut cands: Vec<Candidate> = Vec::new();
    for axis in Axis::BOTH {
        let o = phi.oriented(axis);
        for (a, gap) in scan_axis(&o, cfg) {
            let angles = match axis {
                Axis::One => [a[0].rem_euclid(TAU), a[1]],
                Axis::Two => [a[1], a[0].rem_euclid(TAU)],
            };
            let close = |c: &Candidate| {
                (0..2).all(|i| wrap(c.angles[i] - angles[i]).abs() < cfg.cluster_radius)
            };
            match cands.iter_mut().find(|c| close(c)) {
                Some(c) => {
                    c.hits += 1;
                    if gap < c.gap {
                        c.gap = gap;
                        c.angles = angles;
                    }
                }
                None => cands.push(Candidate { angles, gap, hits: 1 }),
            }
        }
    }
    let mut out = Vec::new();
    for c in cands {
        let raw_tau = [unit(c.angles[0]), unit(c.angles[1])];
        let raw_res = residuals(phi, raw_tau);
        let snapped = match (
            snap_angle(c.angles[0], cfg.snap_max_denom, cfg.snap_angle_tol),
            snap_angle(c.angles[1], cfg.snap_max_denom, cfg.snap_angle_tol),
        ) {
            (Some(a), Some(b)) => {
                let tau = [unit(a), unit(b)];
                let res = residuals(phi, tau);
                (res.0.max(res.1) <= raw_res.0.max(raw_res.1).max(1e-13)).then_some(([a, b], tau, res))
            }
            _ => None,
        };
        let (angles, tau, res, is_snapped) = match snapped {
            Some((a, t, r)) => (a, t, r, true),
            None => {
                let a = polish_location(phi, c.angles);
                let t = [unit(a[0]), unit(a[1])];
                let r = residuals(phi, t);
                if r.0.max(r.1) <= raw_res.0.max(raw_res.1) {
                    (a, t, r, false)
                } else {
                    (c.angles, raw_tau, raw_res, false)
                }
            }
        };
        if res.0 <= cfg.tol_singular && res.1 <= cfg.tol_singular {
            out.push(SingularPoint {
                tau,
                angles,
                residual_p: res.0,
                residual_ptilde: res.1,
                cluster_size: c.hits,
                snapped: is_snapped,
            });
        }
    }
    out.sort_by(|a, b| {
        a.angles[0]
            .total_cmp(&b.angles[0])
            .then(a.angles[1].total_cmp(&b.angles[1]))
    });
    out
}

/// Smallest `1 - |z|` over zeros of the reflected slice in the free variable
/// `z_axis`, the other coordinate fixed at `zeta`.  With `near`, only zeros
/// within `radius` of the singular point's companion coordinate count and the
/// distance is computed in its local chart.
pub fn epsilon(phi: &Rif, axis: Axis, zeta: C64, near: Option<&SingularPoint>, radius: f64) -> Result<f64> {
    let o = phi.oriented(axis);
    match near {
        Some(sp) => {
            let angles = sp.oriented_angles(axis);
            let mut chart = LocalChart::new(o.ptilde(), angles);
            chart.radius = radius;
            let delta = wrap(zeta.arg() - angles[1]);
            chart.epsilon(delta).ok_or_else(|| {
                Error::InvalidInput(format!("no slice zero within {radius} of the singular point"))
            })
        }
        None => {
            let s = o.ptilde().slice(Axis::Two, zeta);
            if s.degree() == 0 {
                return Ok(f64::INFINITY);
            }
            let rs = roots1::roots(&s, &RootConfig::default())?;
            let eps = roots1::min_dist_to_circle(&rs);
            if eps.abs() < 1e-15 {
                return Err(Error::DegenerateSlice(format!(
                    "z{} = {:.6}{:+.6}i",
                    axis.other().number(),
                    zeta.re,
                    zeta.im
                )));
            }
            Ok(eps)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub delta_max: f64,
    pub delta_min: f64,
    pub samples_per_side: usize,
    pub min_samples: usize,
    pub max_denom: i64,
    pub snap_tol: f64,
    pub radius: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            delta_max: 1e-1,
            delta_min: 1e-4,
            samples_per_side: 25,
            min_samples: 8,
            max_denom: 8,
            snap_tol: 0.05,
            radius: CHART_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSample {
    /// Chord length `|tau - zeta|` on the fibre circle.
    pub delta: f64,
    /// `+1` for counter-clockwise offsets, `-1` otherwise.
    pub side: i8,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactFit {
    pub tau: SingularPoint,
    pub axis: Axis,
    pub samples: Vec<ContactSample>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub side_slopes: [Option<f64>; 2],
    pub k_rational: Option<[i64; 2]>,
}

impl ContactFit {
    /// Snapped exponent if available, raw slope otherwise.
    pub fn k(&self) -> f64 {
        match self.k_rational {
            Some([p, q]) => p as f64 / q as f64,
            None => self.slope,
        }
    }
}

pub fn fit_contact_order(phi: &Rif, axis: Axis, tau: &SingularPoint, cfg: &FitConfig) -> Result<ContactFit> {
    let o = phi.oriented(axis);
    let mut chart = LocalChart::new(o.ptilde(), tau.oriented_angles(axis));
    chart.radius = cfg.radius;
    let s = cfg.samples_per_side.max(2);
    let mut samples = Vec::new();
    let mut side_fits = [None, None];
    let mut best: Option<(f64, f64)> = None;
    let mut total = 0;
    for (si, side) in [1i8, -1i8].into_iter().enumerate() {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 0..s {
            let d = cfg.delta_max * (cfg.delta_min / cfg.delta_max).powf(k as f64 / (s - 1) as f64);
            let Some(eps) = chart.epsilon(side as f64 * d) else { continue };
            if !(eps > 0.0 && eps.is_finite()) {
                continue;
            }
            let chord = 2.0 * (d / 2.0).sin();
            samples.push(ContactSample {
                delta: chord,
                side,
                epsilon: eps,
            });
            xs.push(chord.ln());
            ys.push(eps.ln());
        }
        total += xs.len();
        if xs.len() < cfg.min_samples {
            continue;
        }
        if let Some(f) = line_fit(&xs, &ys) {
            side_fits[si] = Some(f.slope);
            if best.is_none_or(|b| f.slope > b.0) {
                best = Some((f.slope, f.slope_stderr));
            }
        }
    }
    let Some((slope, slope_stderr)) = best else {
        return Err(Error::InsufficientSamples {
            found: total,
            required: cfg.min_samples,
        });
    };
    Ok(ContactFit {
        tau: tau.clone(),
        axis,
        samples,
        slope,
        slope_stderr,
        side_slopes: side_fits,
        k_rational: snap(slope, cfg.max_denom, cfg.snap_tol).map(|(p, q)| [p, q]),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactConfig {
    pub scan: ScanConfig,
    pub fit: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub k1: f64,
    pub k2: f64,
    pub k1_rational: Option<[i64; 2]>,
    pub k2_rational: Option<[i64; 2]>,
    #[serde(with = "serde_util::f64_or_inf")]
    pub hp_threshold_1: f64,
    #[serde(with = "serde_util::f64_or_inf")]
    pub hp_threshold_2: f64,
    pub singularities: Vec<SingularPoint>,
    pub per_singularity: Vec<ContactFit>,
}

impl ContactReport {
    pub fn k(&self, axis: Axis) -> f64 {
        let (raw, rat) = match axis {
            Axis::One => (self.k1, self.k1_rational),
            Axis::Two => (self.k2, self.k2_rational),
        };
        match rat {
            Some([p, q]) => p as f64 / q as f64,
            None => raw,
        }
    }

    pub fn hp_threshold(&self, axis: Axis) -> f64 {
        match axis {
            Axis::One => self.hp_threshold_1,
            Axis::Two => self.hp_threshold_2,
        }
    }
}

/// `1 + 1/K`, or infinity when there is no contact.
pub fn hp_threshold(k: f64) -> f64 {
    if k > 0.0 {
        1.0 + 1.0 / k
    } else {
        f64::INFINITY
    }
}

pub fn contact_report(phi: &Rif, cfg: &ContactConfig) -> Result<ContactReport> {
    let singularities = find_singularities(phi, &cfg.scan);
    contact_report_at(phi, singularities, &cfg.fit)
}

pub fn contact_report_at(phi: &Rif, singularities: Vec<SingularPoint>, cfg: &FitConfig) -> Result<ContactReport> {
    let mut fits = Vec::new();
    for sp in &singularities {
        for axis in Axis::BOTH {
            fits.push(fit_contact_order(phi, axis, sp, cfg)?);
        }
    }
    let top = |axis: Axis| {
        fits.iter()
            .filter(|f| f.axis == axis)
            .max_by(|a, b| a.slope.total_cmp(&b.slope))
            .map(|f| (f.slope, f.k_rational, f.k()))
            .unwrap_or((0.0, None, 0.0))
    };
    let (k1, k1_rational, k1_used) = top(Axis::One);
    let (k2, k2_rational, k2_used) = top(Axis::Two);
    Ok(ContactReport {
        k1,
        k2,
        k1_rational,
        k2_rational,
        hp_threshold_1: hp_threshold(k1_used),
        hp_threshold_2: hp_threshold(k2_used),
        singularities,
        per_singularity: fits,
    })
}
