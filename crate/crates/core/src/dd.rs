//! Double-double floating point (about 106 significant bits) for the
//! quadrature oracle.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num::{BigInt, FromPrimitive, ToPrimitive};

use crate::rational::{Cq, Rat};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

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

pub const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };
pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(n: i64) -> Dd {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_bigint(n: &BigInt) -> Dd {
        let hi = n.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return Dd::new(hi);
        }
        let rest = n - BigInt::from_f64(hi).expect("finite");
        let lo = rest.to_f64().unwrap_or(0.0);
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_rat(r: &Rat) -> Dd {
        match r {
            Rat::Small(n, d) => Dd::from_i64(*n) / Dd::from_i64(*d),
            Rat::Big(_) => Dd::from_bigint(&r.numer()) / Dd::from_bigint(&r.denom()),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: h, lo: l }
    }

    pub fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let xd = Dd::new(x);
        xd + (self - xd.sqr()) / xd.mul_f64(2.0)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // s = e^r - 1, then (1+s)² - 1 = 2s + s² keeps relative accuracy
        let mut term = r;
        let mut s = r;
        for i in 2..=16 {
            term = (term * r) / Dd::new(i as f64);
            s += term;
            if term.hi.abs() < 1e-40 {
                break;
            }
        }
        for _ in 0..10 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN);
        }
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// `(sin x, cos x)` by quadrant reduction and Taylor series on `|x| ≤ π/4`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let half_pi = PI.ldexp(-1);
        let k = (self.hi / half_pi.hi).round();
        let x = self - half_pi.mul_f64(k);
        let x2 = x.sqr();
        let mut s = x;
        let mut c = Dd::ONE;
        let mut ts = x;
        let mut tc = Dd::ONE;
        for i in 1..=16 {
            ts = -(ts * x2) / Dd::new(((2 * i) * (2 * i + 1)) as f64);
            tc = -(tc * x2) / Dd::new(((2 * i - 1) * (2 * i)) as f64);
            s += ts;
            c += tc;
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        Dd { hi: h, lo: l }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::new(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.to_f64())
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub const ZERO: DdC = DdC { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: DdC = DdC { re: Dd::ONE, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdC { re, im }
    }

    pub fn real(re: Dd) -> Self {
        DdC { re, im: Dd::ZERO }
    }

    pub fn from_cq(c: &Cq) -> Self {
        DdC { re: Dd::from_rat(&c.re), im: Dd::from_rat(&c.im) }
    }

    pub fn conj(self) -> Self {
        DdC { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: Dd) -> Self {
        DdC { re: self.re * s, im: self.im * s }
    }

    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = DdC::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Self {
        let d = self.norm_sqr();
        DdC { re: self.re / d, im: -self.im / d }
    }

    /// `e^{iθ}`.
    pub fn cis(theta: Dd) -> Self {
        let (s, c) = theta.sin_cos();
        DdC { re: c, im: s }
    }
}

impl Add for DdC {
    type Output = DdC;
    fn add(self, b: DdC) -> DdC {
        DdC { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for DdC {
    type Output = DdC;
    fn sub(self, b: DdC) -> DdC {
        DdC { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Neg for DdC {
    type Output = DdC;
    fn neg(self) -> DdC {
        DdC { re: -self.re, im: -self.im }
    }
}

impl Mul for DdC {
    type Output = DdC;
    fn mul(self, b: DdC) -> DdC {
        DdC { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}

impl Div for DdC {
    type Output = DdC;
    fn div(self, b: DdC) -> DdC {
        self * b.inv()
    }
}

impl AddAssign for DdC {
    fn add_assign(&mut self, b: DdC) {
        *self = *self + b;
    }
}

impl SubAssign for DdC {
    fn sub_assign(&mut self, b: DdC) {
        *self = *self - b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn arithmetic_beyond_f64() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third.mul_f64(3.0);
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
        let r = Dd::from_rat(&Rat::new(1, 7));
        assert!((r.mul_f64(7.0) - Dd::ONE).abs().to_f64() < 1e-31);
    }

    #[test]
    fn sqrt_exp_ln() {
        let two = Dd::new(2.0);
        assert!(close(two.sqrt().sqr(), two, 1e-31));
        let e = Dd::ONE.exp();
        let e_ref = Dd { hi: std::f64::consts::E, lo: 1.445_646_891_729_250_2e-16 };
        assert!(close(e, e_ref, 1e-30));
        for x in [-30.5, -1.25, 0.3, 12.0] {
            let v = Dd::new(x);
            assert!(close(v.exp().ln(), v, 1e-30));
        }
        assert!(close(Dd::new(2.0).ln(), LN2, 1e-31));
    }

    #[test]
    fn trig() {
        let (s, c) = (PI.ldexp(-1)).sin_cos();
        assert!(close(s, Dd::ONE, 1e-30));
        assert!(c.abs().to_f64() < 1e-30);
        let x = Dd::new(0.7);
        let (s, c) = x.sin_cos();
        assert!(close(s.sqr() + c.sqr(), Dd::ONE, 1e-30));
        assert!((s.to_f64() - 0.7f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn big_rational_conversion() {
        let r: Rat = "123456789012345678901234567891/7".parse().unwrap();
        let d = Dd::from_rat(&r);
        assert!(close(d.mul_f64(7.0), Dd::from_bigint(&r.numer()), 1e-30));
    }
}
