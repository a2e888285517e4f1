//! Simultaneous root finding for univariate complex polynomials (Aberth–Ehrlich).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly2::{UniPoly, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub max_iter: usize,
    pub tol_residual: f64,
    pub polish_steps: usize,
    pub seed: u64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            max_iter: 200,
            tol_residual: 1e-13,
            polish_steps: 3,
            seed: 42,
        }
    }
}

/// Roots with multiplicity; `residuals[i]` is the backward error
/// `|q(r)| / sum |c_k| |r|^k` of `roots[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<C64>,
    pub residuals: Vec<f64>,
    pub condition: f64,
}

fn backward_error(q: &UniPoly, z: C64) -> f64 {
    let scale = q.eval_scale(z);
    if scale == 0.0 {
        0.0
    } else {
        q.eval(z).norm() / scale
    }
}

/// Accept at this backward error if the iteration stalls before `tol_residual`.
const STALL_ACCEPT: f64 = 1e-9;

pub fn roots(q: &UniPoly, cfg: &RootConfig) -> Result<RootSet> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = q.degree();
    if d == 0 {
        return Ok(RootSet {
            roots: vec![],
            residuals: vec![],
            condition: 0.0,
        });
    }
    let c = q.coeffs();
    // Zero roots are exact; strip them so the start circle is well scaled.
    let lead_zero = c.iter().take_while(|x| x.norm() == 0.0).count();
    let mut roots = vec![C64::new(0.0, 0.0); lead_zero];
    let reduced = UniPoly::new(c[lead_zero..].to_vec());
    roots.extend(match reduced.degree() {
        0 => vec![],
        1 => {
            let rc = reduced.coeffs();
            vec![-rc[0] / rc[1]]
        }
        _ => aberth(&reduced, cfg)?,
    });
    let dq = q.derivative();
    for z in roots.iter_mut() {
        for _ in 0..cfg.polish_steps {
            let f = q.eval(*z);
            let fp = dq.eval(*z);
            if fp.norm() == 0.0 {
                break;
            }
            let cand = *z - f / fp;
            if q.eval(cand).norm() < f.norm() {
                *z = cand;
            } else {
                break;
            }
        }
    }
    let residuals: Vec<f64> = roots.iter().map(|&z| backward_error(q, z)).collect();
    let condition = residuals.iter().copied().fold(0.0, f64::max);
    Ok(RootSet {
        roots,
        residuals,
        condition,
    })
}

fn aberth(q: &UniPoly, cfg: &RootConfig) -> Result<Vec<C64>> {
    let c = q.coeffs();
    let d = q.degree();
    let dq = q.derivative();
    let radius = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(1e-300);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let offset: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut z: Vec<C64> = (0..d)
        .map(|k| {
            let jitter: f64 = rng.gen_range(0.9..1.1);
            C64::from_polar(
                radius * jitter,
                offset + std::f64::consts::TAU * k as f64 / d as f64,
            )
        })
        .collect();
    let mut done = vec![false; d];
    for _ in 0..cfg.max_iter {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let f = q.eval(z[i]);
            if backward_error(q, z[i]) <= cfg.tol_residual * 1e-3 {
                done[i] = true;
                continue;
            }
            let ratio = f / dq.eval(z[i]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                // Collided iterates; nudge and retry.
                let kick = C64::from_polar(1e-8 * (1.0 + z[i].norm()), i as f64);
                z[i] += kick;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 1e-16 * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            break;
        }
    }
    let worst = z.iter().map(|&r| backward_error(q, r)).fold(0.0, f64::max);
    if worst > STALL_ACCEPT || z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NoConvergence {
            iterations: cfg.max_iter,
            residual: worst,
        });
    }
    Ok(z)
}

/// `min (1 - |r|)` over the roots; negative if a root lies outside the closed disk.
pub fn min_dist_to_circle(rs: &RootSet) -> f64 {
    rs.roots
        .iter()
        .map(|r| 1.0 - r.norm())
        .fold(f64::INFINITY, f64::min)
}
