//! Least-squares lines and rational snapping.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Best rational approximation with denominator at most `max_denom`, from the
/// continued-fraction convergents and their last semiconvergent.
pub fn rationalize(x: f64, max_denom: i64) -> (i64, i64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    loop {
        let a = r.floor();
        let ai = a as i64;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_denom {
            // Largest admissible semiconvergent.
            let k = (max_denom - q0) / q1.max(1);
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let best = if q1 > 0 && (x - p1 as f64 / q1 as f64).abs() <= (x - ps as f64 / qs as f64).abs() {
                (p1, q1)
            } else {
                (ps, qs)
            };
            return best;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a;
        if frac.abs() < 1e-12 {
            return (p1, q1);
        }
        r = 1.0 / frac;
    }
}

/// `Some((num, den))` when `x` lies within `tol` of a fraction with small denominator.
pub fn snap(x: f64, max_denom: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (p, q) = rationalize(x, max_denom);
    if (x - p as f64 / q as f64).abs() < tol {
        Some((p, q))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = line_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-14);
    }

    #[test]
    fn rational_snapping() {
        assert_eq!(snap(2.003, 8, 0.05), Some((2, 1)));
        assert_eq!(snap(3.98, 8, 0.05), Some((4, 1)));
        assert_eq!(snap(1.335, 8, 0.05), Some((4, 3)));
        assert_eq!(snap(2.5, 8, 0.05), Some((5, 2)));
        assert_eq!(rationalize(std::f64::consts::PI, 8), (22, 7));
        assert_eq!(snap(std::f64::consts::PI, 8, 0.001), None);
    }
}
