//! Quadrature rules and the refinement-ladder classifier.

use serde::{Deserialize, Serialize};

use crate::fit::line_fit;
use crate::serde_util;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed-order Gauss–Legendre rule mapped onto arbitrary panels.
#[derive(Debug, Clone)]
pub struct Panel {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Panel {
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        Panel { x, w }
    }

    /// Nodes and weights on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.x.iter().zip(&self.w).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.nodes(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Edges `0 = e0 < e1 < ... = len` doubling from `first` and never longer than `hmax`.
pub fn graded_edges(first: f64, len: f64, hmax: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut x = first.min(len);
    let mut prev = 0.0;
    loop {
        let step = x - prev;
        if step > hmax {
            let k = (step / hmax).ceil() as usize;
            for j in 1..k {
                edges.push(prev + step * j as f64 / k as f64);
            }
        }
        edges.push(x);
        if x >= len {
            break;
        }
        prev = x;
        x = (x + x.min(hmax)).min(len);
    }
    edges
}

/// Mean of a `2 pi`-periodic function by the trapezoid rule on `n` nodes.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|j| f(h * j as f64)).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Converged,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    #[serde(with = "serde_util::f64_or_inf")]
    pub value: f64,
    /// `(grid size, raw estimate)` per refinement level.
    pub levels: Vec<(usize, f64)>,
    /// Estimates after extrapolating the resolved part of each singular window.
    pub extrapolated: Vec<f64>,
    pub classification: Classification,
    /// Slope of `log estimate` against `log grid size`.
    pub growth_exponent: f64,
    /// Slope of `log |increment|` against `log grid size`; decaying increments are negative.
    #[serde(with = "serde_util::f64_or_inf")]
    pub increment_exponent: f64,
    #[serde(with = "serde_util::f64_or_inf")]
    pub tolerance_achieved: f64,
}

impl QuadratureResult {
    pub fn converged(&self) -> bool {
        self.classification == Classification::Converged
    }
}

/// Per-level estimate split into a smoothly resolved part and the parts
/// gained by refining toward each singular end point.
#[derive(Debug, Clone, Default)]
pub struct LevelSums {
    pub grid: usize,
    pub regular: f64,
    pub windows: Vec<f64>,
}

impl LevelSums {
    pub fn total(&self) -> f64 {
        self.regular + self.windows.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub rel_tol: f64,
    pub growth_margin: f64,
    /// Increments below this fraction of the estimate count as converged.
    pub noise: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            rel_tol: 1e-4,
            growth_margin: 0.05,
            noise: 1e-12,
        }
    }
}

/// Classifies a refinement ladder.
///
/// Each window sequence gains one geometric block per level.  The ratio of
/// successive increments decides the class: ratio below one means the
/// truncated tail is summable and is added back by Aitken extrapolation;
/// ratio at or above one means the integral grows without bound.
pub fn classify(levels: &[LevelSums], cfg: &LadderConfig) -> QuadratureResult {
    let totals: Vec<f64> = levels.iter().map(|l| l.total()).collect();
    let grids: Vec<f64> = levels.iter().map(|l| l.grid as f64).collect();
    let nl = levels.len();
    let last = totals[nl - 1];
    let noise = cfg.noise * last.abs().max(f64::MIN_POSITIVE);

    let nwin = levels[0].windows.len();
    let mut inc_exp = f64::NEG_INFINITY;
    let mut extrapolated = totals.clone();
    let series: Vec<Vec<f64>> = if nwin == 0 {
        vec![totals.clone()]
    } else {
        (0..nwin)
            .map(|j| levels.iter().map(|l| l.windows[j]).collect())
            .collect()
    };
    for (li, ext) in extrapolated.iter_mut().enumerate() {
        if li < 2 {
            continue;
        }
        let mut gain = 0.0;
        for s in &series {
            let d1 = s[li - 1] - s[li - 2];
            let d2 = s[li] - s[li - 1];
            if d2.abs() <= noise || d1.abs() <= noise {
                continue;
            }
            let rho = d2 / d1;
            if rho > 0.0 && rho < 1.0 {
                gain += d2 * rho / (1.0 - rho);
            }
        }
        *ext += gain;
    }
    for s in &series {
        if nl < 2 {
            break;
        }
        let d2 = s[nl - 1] - s[nl - 2];
        if d2.abs() <= noise {
            continue;
        }
        let g = if nl >= 3 {
            let d1 = s[nl - 2] - s[nl - 3];
            let rho = d2 / d1;
            let step = (grids[nl - 1] / grids[nl - 2]).ln();
            if rho > 0.0 && d1.abs() > noise {
                rho.ln() / step
            } else if rho <= 0.0 && d2.abs() < d1.abs() {
                // Sign change with shrinking size: treat as decaying.
                (d2.abs() / d1.abs()).ln() / step
            } else {
                f64::INFINITY
            }
        } else {
            f64::INFINITY
        };
        inc_exp = inc_exp.max(g);
    }
    let e_last = extrapolated[nl - 1];
    let tolerance_achieved = if nl >= 2 {
        (e_last - extrapolated[nl - 2]).abs() / e_last.abs().max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    let classification = if inc_exp > -cfg.growth_margin || !(tolerance_achieved <= cfg.rel_tol) {
        Classification::Diverging
    } else {
        Classification::Converged
    };
    let growth_exponent = {
        let xs: Vec<f64> = grids.iter().map(|g| g.ln()).collect();
        let ys: Vec<f64> = totals.iter().map(|t| t.abs().max(f64::MIN_POSITIVE).ln()).collect();
        line_fit(&xs, &ys).map_or(0.0, |f| f.slope)
    };
    QuadratureResult {
        value: if classification == Classification::Converged {
            e_last
        } else {
            f64::INFINITY
        },
        levels: levels.iter().map(|l| (l.grid, l.total())).collect(),
        extrapolated,
        classification,
        growth_exponent,
        increment_exponent: inc_exp,
        tolerance_achieved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let p = Panel::new(16);
        let v = p.integrate(0.0, 2.0, |x| x.powi(31));
        assert!((v - 2f64.powi(32) / 32.0).abs() < 1e-12 * v);
        let (_, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_edges_cover_the_interval() {
        let e = graded_edges(1e-6, 1.0, 0.1);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 1.0);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15));
        assert!((e[1] - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn trapezoid_is_spectral_for_trigonometric_polynomials() {
        let v = periodic_trapezoid(16, |t| (3.0 * t).cos().powi(2));
        assert!((v - 0.5).abs() < 1e-15);
    }

    fn ladder(gamma: f64) -> Vec<LevelSums> {
        // Window mass of t^{-gamma} on [e 2^{-J}, e] with J = 12, 16, 20, 24.
        let e: f64 = 1e-2;
        [12, 16, 20, 24]
            .iter()
            .zip([256, 512, 1024, 2048])
            .map(|(&j, n)| {
                let lo = e * 2f64.powi(-j);
                let w = if (gamma - 1.0).abs() < 1e-12 {
                    (e / lo).ln()
                } else {
                    (e.powf(1.0 - gamma) - lo.powf(1.0 - gamma)) / (1.0 - gamma)
                };
                LevelSums {
                    grid: n,
                    regular: 1.0,
                    windows: vec![w],
                }
            })
            .collect()
    }

    #[test]
    fn classifier_separates_power_laws() {
        let cfg = LadderConfig::default();
        let r = classify(&ladder(0.8), &cfg);
        assert!(r.converged());
        let exact = 1.0 + 1e-2f64.powf(0.2) / 0.2;
        assert!((r.value - exact).abs() < 1e-10 * exact);
        assert!(!classify(&ladder(1.0), &cfg).converged());
        assert!(!classify(&ladder(1.2), &cfg).converged());
    }
}
