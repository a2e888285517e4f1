//! Dense bivariate and univariate complex polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots1::{self, RootConfig};

pub type C64 = Complex64;

/// Coefficients below this fraction of the largest one are dropped when trimming.
pub const TIGHTEN_REL: f64 = 1e-14;

/// One of the two coordinates of the bidisk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Axis {
    One,
    Two,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::One => Axis::Two,
            Axis::Two => Axis::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Axis::One => 1,
            Axis::Two => 2,
        }
    }

    pub const BOTH: [Axis; 2] = [Axis::One, Axis::Two];
}

impl TryFrom<u8> for Axis {
    type Error = Error;
    fn try_from(v: u8) -> Result<Axis> {
        match v {
            1 => Ok(Axis::One),
            2 => Ok(Axis::Two),
            _ => Err(Error::InvalidInput(format!("axis must be 1 or 2, got {v}"))),
        }
    }
}

impl From<Axis> for u8 {
    fn from(a: Axis) -> u8 {
        a.number()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Dense polynomial in one variable, `c[0] + c[1] z + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<C64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = TIGHTEN_REL * max;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        if max == 0.0 {
            coeffs.truncate(1);
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural scale for residuals at `z`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() == 1 {
            return UniPoly::new(vec![C64::new(0.0, 0.0)]);
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Dense bivariate polynomial `sum c[k][l] z1^k z2^l`, `0 <= k <= m`, `0 <= l <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    m: usize,
    n: usize,
    c: Vec<C64>,
}

impl BiPoly {
    fn raw(m: usize, n: usize, c: Vec<C64>) -> Self {
        debug_assert_eq!(c.len(), (m + 1) * (n + 1));
        BiPoly { m, n, c }.tightened()
    }

    pub fn zero() -> Self {
        BiPoly {
            m: 0,
            n: 0,
            c: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: C64) -> Self {
        BiPoly { m: 0, n: 0, c: vec![c] }
    }

    pub fn monomial(k: usize, l: usize, coeff: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); (k + 1) * (l + 1)];
        c[k * (l + 1) + l] = coeff;
        BiPoly::raw(k, l, c)
    }

    /// Builds from a rectangular grid, row `k` holding the coefficients of `z1^k`.
    pub fn from_grid(grid: Vec<Vec<C64>>) -> Result<Self> {
        if grid.is_empty() || grid[0].is_empty() {
            return Err(Error::InvalidInput("empty coefficient grid".into()));
        }
        let cols = grid[0].len();
        if grid.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidInput("coefficient grid is not rectangular".into()));
        }
        if grid.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let m = grid.len() - 1;
        let n = cols - 1;
        Ok(BiPoly::raw(m, n, grid.into_iter().flatten().collect()))
    }

    /// Sum of `coeff * z1^k * z2^l` over the given terms.
    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let m = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let n = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut c = vec![C64::new(0.0, 0.0); (m + 1) * (n + 1)];
        for &(k, l, v) in terms {
            c[k * (n + 1) + l] += v;
        }
        BiPoly::raw(m, n, c)
    }

    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Self {
        let t: Vec<_> = terms
            .iter()
            .map(|&(k, l, v)| (k, l, C64::new(v, 0.0)))
            .collect();
        BiPoly::from_terms(&t)
    }

    fn tightened(mut self) -> Self {
        let max = self.max_coeff();
        if max == 0.0 {
            return BiPoly::zero();
        }
        let cut = TIGHTEN_REL * max;
        let mut m = self.m;
        while m > 0 && (0..=self.n).all(|l| self.get(m, l).norm() <= cut) {
            m -= 1;
        }
        let mut n = self.n;
        while n > 0 && (0..=m).all(|k| self.get(k, n).norm() <= cut) {
            n -= 1;
        }
        if m == self.m && n == self.n {
            return self;
        }
        let mut c = Vec::with_capacity((m + 1) * (n + 1));
        for k in 0..=m {
            for l in 0..=n {
                c.push(self.get(k, l));
            }
        }
        self.m = m;
        self.n = n;
        self.c = c;
        self
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Coefficient of `z1^k z2^l`; zero outside the grid.
    pub fn get(&self, k: usize, l: usize) -> C64 {
        if k > self.m || l > self.n {
            C64::new(0.0, 0.0)
        } else {
            self.c[k * (self.n + 1) + l]
        }
    }

    pub fn grid(&self) -> Vec<Vec<C64>> {
        (0..=self.m)
            .map(|k| (0..=self.n).map(|l| self.get(k, l)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.norm() == 0.0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..=self.m).rev() {
            let row = &self.c[k * (self.n + 1)..(k + 1) * (self.n + 1)];
            let r = row.iter().rev().fold(C64::new(0.0, 0.0), |a, &c| a * z2 + c);
            acc = acc * z1 + r;
        }
        acc
    }

    /// `sum |c| |z1|^k |z2|^l`; relative tolerances at `z` are measured against it.
    pub fn eval_scale(&self, z1: C64, z2: C64) -> f64 {
        let (r1, r2) = (z1.norm(), z2.norm());
        let mut acc = 0.0;
        for k in (0..=self.m).rev() {
            let row = &self.c[k * (self.n + 1)..(k + 1) * (self.n + 1)];
            acc = acc * r1 + row.iter().rev().fold(0.0, |a, c| a * r2 + c.norm());
        }
        acc
    }

    pub fn scale(&self, s: C64) -> BiPoly {
        BiPoly::raw(self.m, self.n, self.c.iter().map(|&c| c * s).collect())
    }

    pub fn conj_coeffs(&self) -> BiPoly {
        BiPoly::raw(self.m, self.n, self.c.iter().map(|c| c.conj()).collect())
    }

    /// Reflection at the polynomial's own bidegree.
    pub fn reflect(&self) -> BiPoly {
        self.reflect_at(self.m, self.n)
    }

    /// `z1^m z2^n conj(p(1/conj z1, 1/conj z2))` for a declared bidegree `(m, n)`
    /// that dominates the tight one.
    pub fn reflect_at(&self, m: usize, n: usize) -> BiPoly {
        assert!(
            m >= self.m && n >= self.n,
            "reflection bidegree must dominate the polynomial's bidegree"
        );
        let mut c = vec![C64::new(0.0, 0.0); (m + 1) * (n + 1)];
        for k in 0..=self.m {
            for l in 0..=self.n {
                c[(m - k) * (n + 1) + (n - l)] = self.get(k, l).conj();
            }
        }
        BiPoly::raw(m, n, c)
    }

    pub fn partial(&self, axis: Axis) -> BiPoly {
        match axis {
            Axis::One => {
                if self.m == 0 {
                    return BiPoly::zero();
                }
                let mut c = Vec::with_capacity(self.m * (self.n + 1));
                for k in 1..=self.m {
                    for l in 0..=self.n {
                        c.push(self.get(k, l) * k as f64);
                    }
                }
                BiPoly::raw(self.m - 1, self.n, c)
            }
            Axis::Two => {
                if self.n == 0 {
                    return BiPoly::zero();
                }
                let mut c = Vec::with_capacity((self.m + 1) * self.n);
                for k in 0..=self.m {
                    for l in 1..=self.n {
                        c.push(self.get(k, l) * l as f64);
                    }
                }
                BiPoly::raw(self.m, self.n - 1, c)
            }
        }
    }

    /// Substitutes `value` for the variable named by `axis`; the result is a
    /// polynomial in the remaining variable.
    pub fn slice(&self, axis: Axis, value: C64) -> UniPoly {
        match axis {
            Axis::Two => UniPoly::new(
                (0..=self.m)
                    .map(|k| {
                        (0..=self.n)
                            .rev()
                            .fold(C64::new(0.0, 0.0), |a, l| a * value + self.get(k, l))
                    })
                    .collect(),
            ),
            Axis::One => UniPoly::new(
                (0..=self.n)
                    .map(|l| {
                        (0..=self.m)
                            .rev()
                            .fold(C64::new(0.0, 0.0), |a, k| a * value + self.get(k, l))
                    })
                    .collect(),
            ),
        }
    }

    /// Swaps the roles of `z1` and `z2`.
    pub fn transpose(&self) -> BiPoly {
        let mut c = Vec::with_capacity(self.c.len());
        for l in 0..=self.n {
            for k in 0..=self.m {
                c.push(self.get(k, l));
            }
        }
        BiPoly::raw(self.n, self.m, c)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.m == self.n
            && (0..=self.m).all(|k| {
                (0..=self.n).all(|l| (self.get(k, l) - self.get(l, k)).norm() <= tol * self.max_coeff())
            })
    }

    /// Denominator of `phi(m_a(z1), m_b(z2))` for the disk automorphisms
    /// `m_a(z) = (z - a)/(1 - conj(a) z)`, at declared bidegree `(m, n)`.
    pub fn moebius_substitute(&self, a: C64, b: C64, m: usize, n: usize) -> BiPoly {
        assert!(m >= self.m && n >= self.n);
        let lin = |shift: C64, axis: Axis| -> (BiPoly, BiPoly) {
            let one = C64::new(1.0, 0.0);
            match axis {
                Axis::One => (
                    BiPoly::from_terms(&[(0, 0, -shift), (1, 0, one)]),
                    BiPoly::from_terms(&[(0, 0, one), (1, 0, -shift.conj())]),
                ),
                Axis::Two => (
                    BiPoly::from_terms(&[(0, 0, -shift), (0, 1, one)]),
                    BiPoly::from_terms(&[(0, 0, one), (0, 1, -shift.conj())]),
                ),
            }
        };
        let (num1, den1) = lin(a, Axis::One);
        let (num2, den2) = lin(b, Axis::Two);
        let pow = |p: &BiPoly, e: usize| (0..e).fold(BiPoly::constant(C64::new(1.0, 0.0)), |acc, _| &acc * p);
        let mut out = BiPoly::zero();
        for k in 0..=self.m {
            let f1 = &pow(&num1, k) * &pow(&den1, m - k);
            for l in 0..=self.n {
                let c = self.get(k, l);
                if c.norm() == 0.0 {
                    continue;
                }
                let f2 = &pow(&num2, l) * &pow(&den2, n - l);
                out = &out + &(&f1 * &f2).scale(c);
            }
        }
        out
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let m = self.m.max(rhs.m);
        let n = self.n.max(rhs.n);
        let mut c = Vec::with_capacity((m + 1) * (n + 1));
        for k in 0..=m {
            for l in 0..=n {
                c.push(self.get(k, l) + rhs.get(k, l));
            }
        }
        BiPoly::raw(m, n, c)
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            m: self.m,
            n: self.n,
            c: self.c.iter().map(|&c| -c).collect(),
        }
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let m = self.m + rhs.m;
        let n = self.n + rhs.n;
        let mut c = vec![C64::new(0.0, 0.0); (m + 1) * (n + 1)];
        for i in 0..=self.m {
            for j in 0..=self.n {
                let a = self.get(i, j);
                if a.norm() == 0.0 {
                    continue;
                }
                for k in 0..=rhs.m {
                    for l in 0..=rhs.n {
                        c[(i + k) * (n + 1) + (j + l)] += a * rhs.get(k, l);
                    }
                }
            }
        }
        BiPoly::raw(m, n, c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for BiPoly {
            type Output = BiPoly;
            fn $f(self, rhs: BiPoly) -> BiPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}

/// Wire format shared by every command: `{"m", "n", "coeffs": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub m: usize,
    pub n: usize,
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

impl PolyJson {
    /// Bidegree as written in the file, possibly larger than the tight one.
    pub fn declared_bidegree(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn to_poly(&self) -> Result<BiPoly> {
        if self.coeffs.len() != self.m + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficient rows, found {}",
                self.m + 1,
                self.coeffs.len()
            )));
        }
        if let Some(row) = self.coeffs.iter().find(|r| r.len() != self.n + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients per row, found {}",
                self.n + 1,
                row.len()
            )));
        }
        BiPoly::from_grid(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect(),
        )
    }
}

impl From<&BiPoly> for PolyJson {
    fn from(p: &BiPoly) -> Self {
        PolyJson {
            m: p.m,
            n: p.n,
            coeffs: p
                .grid()
                .into_iter()
                .map(|row| row.into_iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }
}

impl Serialize for BiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        j.to_poly().map_err(serde::de::Error::custom)
    }
}

/// Truncated double power series `a[k][l]`, `0 <= k, l <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesGrid {
    order: usize,
    a: Vec<C64>,
}

impl From<&BiPoly> for SeriesGrid {
    /// Coefficients of a polynomial on a square grid of order `max(m, n)`.
    fn from(p: &BiPoly) -> Self {
        let (m, n) = p.bidegree();
        let mut s = SeriesGrid::zeros(m.max(n));
        for k in 0..=m {
            for l in 0..=n {
                s.set(k, l, p.get(k, l));
            }
        }
        s
    }
}

impl SeriesGrid {
    pub fn zeros(order: usize) -> Self {
        SeriesGrid {
            order,
            a: vec![C64::new(0.0, 0.0); (order + 1) * (order + 1)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        if k > self.order || l > self.order {
            C64::new(0.0, 0.0)
        } else {
            self.a[k * (self.order + 1) + l]
        }
    }

    pub fn set(&mut self, k: usize, l: usize, v: C64) {
        self.a[k * (self.order + 1) + l] = v;
    }

    pub fn truncated(&self, order: usize) -> SeriesGrid {
        let order = order.min(self.order);
        let mut out = SeriesGrid::zeros(order);
        for k in 0..=order {
            for l in 0..=order {
                out.set(k, l, self.get(k, l));
            }
        }
        out
    }

    /// Square partial sum `sum_{k, l <= order}` at `z`.
    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        let n = self.order;
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            let row = &self.a[k * (n + 1)..(k + 1) * (n + 1)];
            acc = acc * z1 + row.iter().rev().fold(C64::new(0.0, 0.0), |a, &c| a * z2 + c);
        }
        acc
    }

    /// Product with a polynomial, truncated to the same square.
    pub fn mul_poly(&self, p: &BiPoly) -> SeriesGrid {
        let n = self.order;
        let (pm, pn) = p.bidegree();
        let mut out = SeriesGrid::zeros(n);
        for k in 0..=n {
            for l in 0..=n {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..=pm.min(k) {
                    for j in 0..=pn.min(l) {
                        s += p.get(i, j) * self.get(k - i, l - j);
                    }
                }
                out.set(k, l, s);
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..=self.order)
            .map(|k| (0..=self.order).map(|l| self.get(k, l)).collect())
            .collect()
    }
}

impl Serialize for SeriesGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            order: usize,
            coeffs: Vec<Vec<[f64; 2]>>,
        }
        Wire {
            order: self.order,
            coeffs: self
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
        .serialize(s)
    }
}

fn constant_term_check(p: &BiPoly) -> Result<C64> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let c00 = p.get(0, 0);
    if c00.norm() <= TIGHTEN_REL * p.max_coeff() {
        return Err(Error::ZeroConstantTerm(c00.norm()));
    }
    Ok(c00)
}

/// Coefficients of `1/p` on the full square `k, l <= order`.
pub fn inv_series(p: &BiPoly, order: usize) -> Result<SeriesGrid> {
    let c00 = constant_term_check(p)?;
    let inv = c00.inv();
    let (pm, pn) = p.bidegree();
    let mut b = SeriesGrid::zeros(order);
    // Each entry only needs entries that are componentwise smaller, so a
    // row-major sweep already respects increasing total order.
    for k in 0..=order {
        for l in 0..=order {
            let mut s = if k == 0 && l == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            for i in 0..=pm.min(k) {
                for j in 0..=pn.min(l) {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    s -= p.get(i, j) * b.get(k - i, l - j);
                }
            }
            b.set(k, l, s * inv);
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub radii: usize,
    pub angles: usize,
    pub margin: f64,
    pub tol_root: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            radii: 64,
            angles: 256,
            margin: 0.0,
            tol_root: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// Smallest modulus of a slice root over all samples (`inf` if no slice has roots).
    #[serde(with = "crate::serde_util::f64_or_inf")]
    pub min_root_modulus: f64,
    /// Smallest `| |root| - 1 |` over slices with a unimodular fixed coordinate.
    #[serde(with = "crate::serde_util::f64_or_inf")]
    pub boundary_gap: f64,
    pub boundary_zero: bool,
    pub boundary_zero_at: Option<[[f64; 2]; 2]>,
}

const BOUNDARY_ZERO_GAP: f64 = 1e-8;

/// Radial-angular sampling test for zeros in the open bidisk.
///
/// Slices are taken in both directions so that factors depending on a
/// single variable are seen as well.
pub fn is_stable(p: &BiPoly, cfg: &StabilityConfig) -> Result<StabilityReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let rcfg = RootConfig::default();
    let mut min_mod = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut gap_at: Option<(Axis, f64)> = None;
    let radii = cfg.radii.max(2);
    for axis in Axis::BOTH {
        for i in 0..radii {
            let t = i as f64 / (radii - 1) as f64;
            let r = if i == radii - 1 { 1.0 } else { t * (1.0 - cfg.margin) };
            let angles = if i == 0 { 1 } else { cfg.angles };
            for j in 0..angles {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / cfg.angles as f64;
                let w = C64::from_polar(r, theta);
                let s = p.slice(axis, w);
                if s.max_coeff() <= TIGHTEN_REL * p.eval_scale(w, w).max(p.max_coeff()) {
                    return Err(Error::DegenerateSlice(format!(
                        "z{} = {:.6}{:+.6}i",
                        axis.number(),
                        w.re,
                        w.im
                    )));
                }
                if s.degree() == 0 {
                    continue;
                }
                let rs = roots1::roots(&s, &rcfg)?;
                for z in &rs.roots {
                    min_mod = min_mod.min(z.norm());
                    if i == radii - 1 {
                        let g = (z.norm() - 1.0).abs();
                        if g < gap {
                            gap = g;
                            gap_at = Some((axis, theta));
                        }
                    }
                }
            }
        }
    }
    let stable = min_mod >= 1.0 - cfg.tol_root;
    let mut boundary_zero_at = None;
    if let Some((axis, theta)) = gap_at {
        let h = 2.0 * std::f64::consts::PI / cfg.angles as f64;
        let (best_theta, best_gap) = refine_boundary_gap(p, axis, theta, h, &rcfg);
        if best_gap < gap {
            gap = best_gap;
        }
        if gap < BOUNDARY_ZERO_GAP {
            let w = C64::from_polar(1.0, best_theta);
            let rs = roots1::roots(&p.slice(axis, w), &rcfg)?;
            let z = rs
                .roots
                .iter()
                .min_by(|a, b| (a.norm() - 1.0).abs().total_cmp(&(b.norm() - 1.0).abs()))
                .copied()
                .unwrap_or(w);
            let pt = match axis {
                Axis::Two => [z, w],
                Axis::One => [w, z],
            };
            boundary_zero_at = Some([[pt[0].re, pt[0].im], [pt[1].re, pt[1].im]]);
        }
    }
    Ok(StabilityReport {
        stable,
        min_root_modulus: min_mod,
        boundary_gap: gap,
        boundary_zero: boundary_zero_at.is_some(),
        boundary_zero_at,
    })
}

fn boundary_gap_at(p: &BiPoly, axis: Axis, theta: f64, rcfg: &RootConfig) -> f64 {
    let s = p.slice(axis, C64::from_polar(1.0, theta));
    if s.degree() == 0 {
        return f64::INFINITY;
    }
    match roots1::roots(&s, rcfg) {
        Ok(rs) => rs
            .roots
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(f64::INFINITY, f64::min),
        Err(_) => f64::INFINITY,
    }
}

/// Golden-section search for the smallest root gap in `[theta - h, theta + h]`.
fn refine_boundary_gap(p: &BiPoly, axis: Axis, theta: f64, h: f64, rcfg: &RootConfig) -> (f64, f64) {
    let g = |t: f64| boundary_gap_at(p, axis, t, rcfg);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (theta - h, theta + h);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = g(x2);
        }
    }
    let mut best = (theta, g(theta));
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}
