//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`,
//! giving roughly 32 significant decimal digits. Only the operations the
//! hypergeometric series need are provided.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const DD_EPS: f64 = 4.93e-32;

pub const PI: Dd = Dd::from_parts(std::f64::consts::PI, 1.2246467991473532e-16);
pub const LN_2: Dd = Dd::from_parts(std::f64::consts::LN_2, 2.3190468138462996e-17);
pub const HALF_LN_2PI: Dd = Dd::from_parts(0.9189385332046728, -3.8782941580672414e-17);
pub const SQRT_PI: Dd = Dd::from_parts(1.772453850905516, -7.666586499825799e-17);

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

impl Dd {
    pub const ZERO: Dd = Dd::from_parts(0.0, 0.0);
    pub const ONE: Dd = Dd::from_parts(1.0, 0.0);

    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    /// Multiplication by a power of two, exact.
    pub fn ldexp(self, exp: i32) -> Dd {
        let scale = 2f64.powi(exp);
        Dd::from_parts(self.hi * scale, self.lo * scale)
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p, e) = two_prod(ax, ax);
        let residual = (self - Dd::from_parts(p, e)).hi;
        let (s, err) = two_sum(ax, residual * x * 0.5);
        Dd::from_parts(s, err)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.7 {
            return Dd::from_parts(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / LN_2.hi).round();
        let r = (self - LN_2 * k).ldexp(-SQUARINGS);
        // expm1(r) by Taylor series; |r| < 3.4e-4 so ~10 terms reach 1e-33
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / n;
            sum += term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..SQUARINGS {
            // (1 + s)^2 - 1 = 2s + s^2
            sum = sum.ldexp(1) + sum * sum;
        }
        (sum + 1.0).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let y = Dd::from_parts(self.hi.ln(), 0.0);
        // one Newton step on exp(y) = x doubles the precision
        y + self * (-y).exp() - 1.0
    }

    /// `(sin(pi r), cos(pi r))` for `|r| <= 1/2`.
    pub fn sin_cos_pi(r: Dd) -> (Dd, Dd) {
        debug_assert!(r.hi.abs() <= 0.5 + 1e-15);
        let theta = PI * r;
        let theta2 = theta * theta;
        let mut sin = theta;
        let mut cos = Dd::ONE;
        let mut sterm = theta;
        let mut cterm = Dd::ONE;
        let mut n = 0.0;
        loop {
            n += 2.0;
            cterm = -(cterm * theta2) / (n * (n - 1.0));
            sterm = -(sterm * theta2) / (n * (n + 1.0));
            cos += cterm;
            sin += sterm;
            if cterm.hi.abs() < 1e-34 && sterm.hi.abs() < 1e-34 {
                break;
            }
        }
        (sin, cos)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_parts(x, 0.0)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::from_parts(-self.hi, -self.lo)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd::from_parts(hi, lo)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd::from_parts(hi, lo)
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd::from_parts(hi, lo)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd::from_parts(hi, lo)
    }
}

impl MulAssign for Dd {
    #[inline]
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::from_parts(hi, lo) + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::from(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-5, 0.3, 1.0, 2.5, 17.25, 123.0, 600.0] {
            let v = Dd::from(x);
            assert!(rel(v.exp().ln(), v) < 1e-30, "x = {x}");
        }
    }

    #[test]
    fn exp_of_ln2_is_two() {
        assert!(rel(LN_2.exp(), Dd::from(2.0)) < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        let two = Dd::from(2.0);
        let s = two.sqrt();
        assert!(rel(s * s, two) < 1e-31);
        assert!(rel(Dd::from(std::f64::consts::PI).sqrt(), SQRT_PI) < 1e-16);
        assert!(rel(PI.sqrt(), SQRT_PI) < 1e-31);
    }

    #[test]
    fn sin_cos_identities() {
        for &r in &[-0.5, -0.31, -1e-9, 0.0, 0.125, 0.25, 0.4999] {
            let (s, c) = Dd::sin_cos_pi(Dd::from(r));
            let one = s * s + c * c;
            assert!((one - 1.0).to_f64().abs() < 1e-31, "r = {r}");
        }
        let (s, c) = Dd::sin_cos_pi(Dd::from(0.25));
        assert!((s - c).to_f64().abs() < 1e-31);
        let (s, _) = Dd::sin_cos_pi(Dd::from(1.0 / 6.0));
        // 1/6 is not exact in binary; compare against f64 only
        assert!((s.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn division_is_accurate() {
        let third = Dd::ONE / 3.0;
        assert!(((third * 3.0) - 1.0).to_f64().abs() < 1e-32);
    }
}
