//! Exact rational and complex-rational scalars.
//!
//! [`Rat`] keeps numerator and denominator in machine words while they fit
//! and promotes to [`BigRational`] on overflow, so the common case of small
//! coefficients stays allocation free.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Rat {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rat {
    pub fn zero() -> Self {
        Rat::Small(0, 1)
    }

    pub fn one() -> Self {
        Rat::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rat::Small(n, 1)
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rat::Small(0, 1);
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(num), BigInt::from(den)))),
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if d > 0 && n != i64::MIN {
                return Rat::Small(n, d);
            }
        }
        Rat::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n == 0,
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rat::Small(n, d) => *n == 1 && *d == 1,
            Rat::Big(b) => b.is_one(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rat::Small(n, _) => n.signum() as i32,
            Rat::Big(b) => match b.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => BigInt::from(*n),
            Rat::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => BigInt::from(*d),
            Rat::Big(b) => b.denom().clone(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<Rat> {
        match self {
            Rat::Small(0, _) => None,
            Rat::Small(n, d) => Some(Self::from_i128(*d as i128, *n as i128)),
            Rat::Big(b) => {
                if b.is_zero() {
                    None
                } else {
                    Some(Self::from_big(b.recip()))
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root when both numerator and denominator are perfect squares.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.signum() < 0 {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let sn = n.sqrt();
        let sd = d.sqrt();
        if &sn * &sn == n && &sd * &sd == d {
            Some(Self::from_big(BigRational::new(sn, sd)))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(n, d) => *n as f64 / *d as f64,
            Rat::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn binary(
        &self,
        other: &Rat,
        small: impl FnOnce(i64, i64, i64, i64) -> Option<Rat>,
        big: impl FnOnce(BigRational, BigRational) -> BigRational,
    ) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, other) {
            if let Some(r) = small(*a, *b, *c, *d) {
                return r;
            }
        }
        Rat::from_big(big(self.to_big(), other.to_big()))
    }
}

fn small_add(a: i64, b: i64, c: i64, d: i64) -> Option<Rat> {
    if b == d {
        let num = a as i128 + c as i128;
        return Some(Rat::from_i128(num, b as i128));
    }
    let num = (a as i128).checked_mul(d as i128)?.checked_add((c as i128).checked_mul(b as i128)?)?;
    let den = (b as i128).checked_mul(d as i128)?;
    Some(Rat::from_i128(num, den))
}

fn small_mul(a: i64, b: i64, c: i64, d: i64) -> Option<Rat> {
    if a == 0 || c == 0 {
        return Some(Rat::zero());
    }
    // cross-reduce first so the products stay small
    let g1 = gcd_u64(a.unsigned_abs(), d as u64) as i64;
    let g2 = gcd_u64(c.unsigned_abs(), b as u64) as i64;
    let (a, d) = (a / g1, d / g1);
    let (c, b) = (c / g2, b / g2);
    let num = (a as i128) * (c as i128);
    let den = (b as i128) * (d as i128);
    match (i64::try_from(num), i64::try_from(den)) {
        (Ok(n), Ok(dd)) => Some(Rat::Small(n, dd)),
        _ => None,
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            _ => self.to_big() == other.to_big(),
        }
    }
}

impl Eq for Rat {}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::hash::Hash for Rat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.numer().hash(state);
        self.denom().hash(state);
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, other: &Rat) -> Rat {
        self.binary(other, small_add, |x, y| x + y)
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, other: &Rat) -> Rat {
        self + &(-other)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, other: &Rat) -> Rat {
        self.binary(other, small_mul, |x, y| x * y)
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, other: &Rat) -> Rat {
        self * &other.recip().expect("division by zero rational")
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(n, d) if *n != i64::MIN => Rat::Small(-n, *d),
            _ => Rat::from_big(-self.to_big()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, other: $t) -> $t {
                (&self).$m(&other)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, other: &'a $t) -> $t {
                (&self).$m(other)
            }
        }
    };
}

forward_owned!(Add, add, Rat);
forward_owned!(Sub, sub, Rat);
forward_owned!(Mul, mul, Rat);
forward_owned!(Div, div, Rat);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, other: &Rat) {
        *self = &*self + other;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, other: &Rat) {
        *self = &*self - other;
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl std::str::FromStr for Rat {
    type Err = String;

    /// Accepts `p`, `p/q`, and finite decimals such as `-0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            return Ok(Rat::from_big(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let n: BigInt = digits.parse().map_err(|_| format!("bad decimal {s:?}"))?;
            let d = num::pow(BigInt::from(10), frac.len());
            let r = BigRational::new(if neg { -n } else { n }, d);
            return Ok(Rat::from_big(r));
        }
        let n: BigInt = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
        Ok(Rat::from_bigint(n))
    }
}

/// Exact complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cq {
    pub re: Rat,
    pub im: Rat,
}

impl Cq {
    pub fn new(re: Rat, im: Rat) -> Self {
        Cq { re, im }
    }

    pub fn zero() -> Self {
        Cq::default()
    }

    pub fn one() -> Self {
        Cq::real(Rat::one())
    }

    pub fn i() -> Self {
        Cq::new(Rat::zero(), Rat::one())
    }

    pub fn real(re: Rat) -> Self {
        Cq { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Cq::real(Rat::from_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Cq::real(Rat::new(n, d))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Cq {
        Cq::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &Rat) -> Cq {
        if self.im.is_zero() {
            Cq::real(&self.re * k)
        } else {
            Cq::new(&self.re * k, &self.im * k)
        }
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> Rat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn recip(&self) -> Option<Cq> {
        if self.im.is_zero() {
            return self.re.recip().map(Cq::real);
        }
        let d = self.norm_sqr().recip()?;
        Some(Cq::new(&self.re * &d, -(&self.im * &d)))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Cq, b: &Cq) {
        if a.im.is_zero() && b.im.is_zero() {
            self.re += &(&a.re * &b.re);
            return;
        }
        let p = a * b;
        self.re += &p.re;
        self.im += &p.im;
    }

    pub fn pow(&self, e: u32) -> Cq {
        let mut acc = Cq::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl From<Rat> for Cq {
    fn from(r: Rat) -> Self {
        Cq::real(r)
    }
}

impl<'a> Add<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn add(self, o: &Cq) -> Cq {
        if self.im.is_zero() && o.im.is_zero() {
            return Cq::real(&self.re + &o.re);
        }
        Cq::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn sub(self, o: &Cq) -> Cq {
        if self.im.is_zero() && o.im.is_zero() {
            return Cq::real(&self.re - &o.re);
        }
        Cq::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn mul(self, o: &Cq) -> Cq {
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => Cq::real(&self.re * &o.re),
            (true, false) => Cq::new(&self.re * &o.re, &self.re * &o.im),
            (false, true) => Cq::new(&self.re * &o.re, &self.im * &o.re),
            (false, false) => Cq::new(
                &(&self.re * &o.re) - &(&self.im * &o.im),
                &(&self.re * &o.im) + &(&self.im * &o.re),
            ),
        }
    }
}

impl<'a> Div<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn div(self, o: &Cq) -> Cq {
        self * &o.recip().expect("division by zero complex rational")
    }
}

impl Neg for &Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq::new(-&self.re, -&self.im)
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        -&self
    }
}

forward_owned!(Add, add, Cq);
forward_owned!(Sub, sub, Cq);
forward_owned!(Mul, mul, Cq);
forward_owned!(Div, div, Cq);

impl AddAssign<&Cq> for Cq {
    fn add_assign(&mut self, o: &Cq) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&Cq> for Cq {
    fn sub_assign(&mut self, o: &Cq) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.signum() < 0 {
            write!(f, "{} - {}i", self.re, -&self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

/// n! as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient C(n, k) as an integer (0 when k > n).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Generalized binomial coefficient C(alpha, k) for rational alpha.
pub fn binomial_rational(alpha: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc = &acc * &(alpha - &Rat::from_int(i as i64));
        acc = &acc * &Rat::new(1, (i + 1) as i64);
    }
    acc
}

pub fn big_abs(x: &BigInt) -> BigInt {
    x.abs()
}
