//! Double-double arithmetic (about 32 significant digits).
//!
//! Only the handful of operations needed to polish roots of local charts
//! near torus singularities, where the distance of a slice zero to the
//! circle is far below the f64 resolution of the root itself.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn scale(self, k: f64) -> Self {
        let (p, e) = two_prod(self.hi, k);
        let (hi, lo) = quick_two_sum(p, e + self.lo * k);
        Dd { hi, lo }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.scale(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.scale(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    /// Modulus in f64; enough for step-size decisions.
    pub fn abs_f64(self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(self, k: f64) -> Cdd {
        Cdd::new(self.re.scale(k), self.im.scale(k))
    }

    /// `exp(z) - 1` without cancellation for small `z`.
    pub fn expm1(self) -> Cdd {
        let mut halvings = 0;
        let mut z = self;
        while z.abs_f64() > 0.125 {
            z = z.scale(0.5);
            halvings += 1;
        }
        // Taylor series; |z| <= 1/8 needs ~22 terms for 1e-33.
        let mut term = z;
        let mut sum = z;
        for k in 2..=26 {
            term = term * z;
            term = Cdd::new(term.re / Dd::new(k as f64), term.im / Dd::new(k as f64));
            sum = sum + term;
            if term.abs_f64() < 1e-34 * sum.abs_f64() {
                break;
            }
        }
        // expm1(2z) = expm1(z) * (expm1(z) + 2)
        for _ in 0..halvings {
            sum = sum * (sum + Cdd::new(Dd::new(2.0), Dd::ZERO));
        }
        sum
    }
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd::new(Dd::new(z.re), Dd::new(z.im))
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd::new(-self.re, -self.im)
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, rhs: Cdd) -> Cdd {
        Cdd::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, rhs: Cdd) -> Cdd {
        Cdd::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, rhs: Cdd) -> Cdd {
        Cdd::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, rhs: Cdd) -> Cdd {
        let d = rhs.norm_sqr();
        let num = self
            * Cdd {
                re: rhs.re,
                im: -rhs.im,
            };
        Cdd::new(num.re / d, num.im / d)
    }
}
