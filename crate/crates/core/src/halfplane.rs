//! Cayley maps between the disk and the upper half plane, Pick transforms of
//! RIFs, and continuation of real level curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly2::{Axis, BiPoly, C64};
use crate::rif::Rif;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CayleyMap {
    /// `i (1 + z) / (1 - z)`, disk to half plane.
    Alpha,
    /// `i (1 - z) / (1 + z)`, disk to half plane.
    AlphaTilde,
    /// `(w - i) / (w + i)`, inverse of `Alpha`.
    Beta,
    /// `(1 + i w) / (1 - i w)`, inverse of `AlphaTilde`.
    BetaTilde,
}

impl CayleyMap {
    pub fn inverse(self) -> CayleyMap {
        match self {
            CayleyMap::Alpha => CayleyMap::Beta,
            CayleyMap::Beta => CayleyMap::Alpha,
            CayleyMap::AlphaTilde => CayleyMap::BetaTilde,
            CayleyMap::BetaTilde => CayleyMap::AlphaTilde,
        }
    }
}

pub fn cayley(map: CayleyMap, z: C64) -> Result<C64> {
    let (num, den) = match map {
        CayleyMap::Alpha => (I * (ONE + z), ONE - z),
        CayleyMap::AlphaTilde => (I * (ONE - z), ONE + z),
        CayleyMap::Beta => (z - I, z + I),
        CayleyMap::BetaTilde => (ONE + I * z, ONE - I * z),
    };
    if den.norm() <= f64::EPSILON * num.norm().max(1.0) {
        return Err(Error::PoleInput);
    }
    Ok(num / den)
}

/// Pick function `f = i (1 - c phi(beta(w))) / (1 + c phi(beta(w)))` with
/// polynomial numerator and denominator in half-plane coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickFn {
    #[serde(skip)]
    pub source: Rif,
    /// Unimodular factor applied to `phi`.
    pub rotation: C64,
    pub num: BiPoly,
    pub den: BiPoly,
    #[serde(skip)]
    grads: [[BiPoly; 2]; 2],
}

/// `(w_axis + a)^e`.
fn linear_power(a: C64, e: usize, axis: Axis) -> BiPoly {
    let base = match axis {
        Axis::One => BiPoly::from_terms(&[(0, 0, a), (1, 0, ONE)]),
        Axis::Two => BiPoly::from_terms(&[(0, 0, a), (0, 1, ONE)]),
    };
    let mut out = BiPoly::constant(ONE);
    for _ in 0..e {
        out = &out * &base;
    }
    out
}

/// `(w1 + i)^m (w2 + i)^n q(beta(w1), beta(w2))` for `q` of bidegree at most `(m, n)`.
fn clear_cayley(q: &BiPoly, m: usize, n: usize) -> BiPoly {
    let (qm, qn) = q.bidegree();
    let mut out = BiPoly::zero();
    for k in 0..=qm.min(m) {
        for l in 0..=qn.min(n) {
            let c = q.get(k, l);
            if c.norm() == 0.0 {
                continue;
            }
            let t = &(&linear_power(-I, k, Axis::One) * &linear_power(I, m - k, Axis::One))
                * &(&linear_power(-I, l, Axis::Two) * &linear_power(I, n - l, Axis::Two));
            out = &out + &t.scale(c);
        }
    }
    out
}

/// Coefficient of the monomial with the largest total degree, ties broken by the `w1` degree.
fn leading(p: &BiPoly) -> C64 {
    let (m, n) = p.bidegree();
    let tol = 1e-13 * p.max_coeff();
    let mut best = (0, 0, C64::new(0.0, 0.0));
    for k in 0..=m {
        for l in 0..=n {
            let c = p.get(k, l);
            if c.norm() > tol && (k + l, k) >= (best.0, best.1) {
                best = (k + l, k, c);
            }
        }
    }
    best.2
}

fn clean(p: &BiPoly, scale: f64) -> BiPoly {
    let tol = 1e-13 * scale;
    let snap = |x: f64| if x.abs() < tol { 0.0 } else { x };
    let grid = p
        .grid()
        .into_iter()
        .map(|row| row.into_iter().map(|c| C64::new(snap(c.re), snap(c.im))).collect())
        .collect();
    BiPoly::from_grid(grid).expect("rectangular grid")
}

pub fn pick_transform(phi: &Rif) -> PickFn {
    pick_transform_rotated(phi, ONE)
}

pub fn pick_transform_rotated(phi: &Rif, rotation: C64) -> PickFn {
    let (m, n) = phi.bidegree();
    let p = clear_cayley(phi.p(), m, n);
    let pt = clear_cayley(&phi.ptilde().scale(rotation), m, n);
    let num = (&p - &pt).scale(I);
    let den = &p + &pt;
    let lead = leading(&den);
    let s = ONE / lead;
    let (num, den) = (num.scale(s), den.scale(s));
    let scale = num.max_coeff().max(den.max_coeff());
    let (num, den) = (clean(&num, scale), clean(&den, scale));
    let grads = [
        [num.partial(Axis::One), num.partial(Axis::Two)],
        [den.partial(Axis::One), den.partial(Axis::Two)],
    ];
    PickFn {
        source: phi.clone(),
        rotation,
        num,
        den,
        grads,
    }
}

impl PickFn {
    pub fn eval(&self, w1: C64, w2: C64) -> C64 {
        self.num.eval(w1, w2) / self.den.eval(w1, w2)
    }

    /// `alpha~(c phi(beta(w)))` evaluated directly.
    pub fn eval_composed(&self, w1: C64, w2: C64) -> Result<C64> {
        let z1 = cayley(CayleyMap::Beta, w1)?;
        let z2 = cayley(CayleyMap::Beta, w2)?;
        let v = self.source.eval_phi(z1, z2)? * self.rotation;
        cayley(CayleyMap::AlphaTilde, v)
    }

    /// Real value and gradient at a real point.
    pub fn real_jet(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let (w1, w2) = (C64::new(x, 0.0), C64::new(y, 0.0));
        let nv = self.num.eval(w1, w2);
        let dv = self.den.eval(w1, w2);
        let f = nv / dv;
        let g = |a: usize| {
            let dn = self.grads[0][a].eval(w1, w2);
            let dd = self.grads[1][a].eval(w1, w2);
            ((dn * dv - nv * dd) / (dv * dv)).re
        };
        (f.re, [g(0), g(1)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedBound,
    ClosedLoop,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<[f64; 2]>,
    /// `|f(point) - level|` per vertex.
    pub residuals: Vec<f64>,
    pub terminated_reason: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub step: f64,
    pub min_step: f64,
    /// Tracing stops once `|x|` or `|y|` exceeds this.
    pub bound: f64,
    pub corrector_tol: f64,
    pub corrector_iters: usize,
    pub max_steps: usize,
    /// Preferred initial direction; the tangent is oriented to have positive projection on it.
    pub heading: Option<[f64; 2]>,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            step: 1e-2,
            min_step: 1e-9,
            bound: 1e3,
            corrector_tol: 1e-10,
            corrector_iters: 30,
            max_steps: 2_000_000,
            heading: None,
        }
    }
}

/// Newton steps along the gradient; `None` if the tolerance is not reached.
fn correct(f: &PickFn, mut pt: [f64; 2], level: f64, cfg: &TraceConfig) -> Option<([f64; 2], f64)> {
    for _ in 0..=cfg.corrector_iters {
        let (v, g) = f.real_jet(pt[0], pt[1]);
        let r = v - level;
        if !r.is_finite() {
            return None;
        }
        if r.abs() < cfg.corrector_tol {
            return Some((pt, r.abs()));
        }
        let gg = g[0] * g[0] + g[1] * g[1];
        if gg == 0.0 || !gg.is_finite() {
            return None;
        }
        pt = [pt[0] - r * g[0] / gg, pt[1] - r * g[1] / gg];
    }
    None
}

/// Follows the real level set `{f = level}` from `start`.
pub fn trace_level_curve(f: &PickFn, start: [f64; 2], level: f64, cfg: &TraceConfig) -> Result<LevelCurve> {
    let (v0, g0) = f.real_jet(start[0], start[1]);
    if g0[0] == 0.0 && g0[1] == 0.0 {
        return Err(Error::FlatGradient);
    }
    let (p0, r0) = match correct(f, start, level, cfg) {
        Some(c) => c,
        None => return Err(Error::StartOffLevel((v0 - level).abs())),
    };
    let mut points = vec![p0];
    let mut residuals = vec![r0];
    let mut h = cfg.step;
    let tangent = |pt: [f64; 2]| -> Option<[f64; 2]> {
        let (_, g) = f.real_jet(pt[0], pt[1]);
        let norm = g[0].hypot(g[1]);
        if norm == 0.0 || !norm.is_finite() {
            None
        } else {
            Some([-g[1] / norm, g[0] / norm])
        }
    };
    let mut dir = match tangent(p0) {
        Some(t) => t,
        None => return Err(Error::FlatGradient),
    };
    if let Some(hd) = cfg.heading {
        if dir[0] * hd[0] + dir[1] * hd[1] < 0.0 {
            dir = [-dir[0], -dir[1]];
        }
    }
    let mut reason = Termination::StepFailure;
    for _ in 0..cfg.max_steps {
        let cur = *points.last().unwrap();
        let t = match tangent(cur) {
            Some(t) => t,
            None => break,
        };
        // Keep the orientation continuous along the curve.
        let t = if t[0] * dir[0] + t[1] * dir[1] < 0.0 { [-t[0], -t[1]] } else { t };
        let pred = [cur[0] + h * t[0], cur[1] + h * t[1]];
        match correct(f, pred, level, cfg) {
            Some((next, r)) if (next[0] - cur[0]).hypot(next[1] - cur[1]) < 2.0 * h => {
                dir = [next[0] - cur[0], next[1] - cur[1]];
                points.push(next);
                residuals.push(r);
                h = (2.0 * h).min(cfg.step);
                if next[0].abs() > cfg.bound || next[1].abs() > cfg.bound {
                    reason = Termination::ReachedBound;
                    break;
                }
                if points.len() > 10 && (next[0] - p0[0]).hypot(next[1] - p0[1]) < cfg.step {
                    reason = Termination::ClosedLoop;
                    break;
                }
            }
            _ => {
                h /= 2.0;
                if h < cfg.min_step {
                    break;
                }
            }
        }
    }
    Ok(LevelCurve {
        level,
        points,
        residuals,
        terminated_reason: reason,
    })
}

/// `(x, y) -> (-1/x, -1/y)`, the map taking spokes to horns.
pub fn horn_image(pt: [f64; 2]) -> [f64; 2] {
    [-1.0 / pt[0], -1.0 / pt[1]]
}
