//! Truncated asymptotic series in half-integer powers of `m`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{binomial_rational, Cq, Rat};

/// `Σ c_e m^{e/2}` over finitely many integer keys `e`, plus an optional
/// error key: when `error = Some(k)`, the series is only known modulo
/// `O(m^{k/2})` and no term with key `≤ k` is stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AsymptoticSeries {
    terms: BTreeMap<i32, Cq>,
    error: Option<i32>,
}

impl AsymptoticSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Cq::one())
    }

    pub fn monomial(key: i32, c: Cq) -> Self {
        let mut s = Self::zero();
        s.add_term(key, &c);
        s
    }

    /// Zero known only up to `O(m^{key/2})`.
    pub fn unknown(key: i32) -> Self {
        AsymptoticSeries { terms: BTreeMap::new(), error: Some(key) }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Cq)>, error: Option<i32>) -> Self {
        let mut s = AsymptoticSeries { terms: BTreeMap::new(), error };
        for (k, c) in terms {
            s.add_term(k, &c);
        }
        s
    }

    pub fn add_term(&mut self, key: i32, c: &Cq) {
        if c.is_zero() || self.error.is_some_and(|e| key <= e) {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot = &*slot + c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Cq)> {
        self.terms.iter().rev().map(|(k, c)| (*k, c))
    }

    pub fn error(&self) -> Option<i32> {
        self.error
    }

    pub fn coeff(&self, key: i32) -> Cq {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.error.is_none()
    }

    /// Largest key with a nonzero coefficient.
    pub fn leading_key(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Key bounding the size of the series, counting the error term.
    pub fn magnitude_key(&self) -> Option<i32> {
        match (self.leading_key(), self.error) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    /// Keys of half-integer powers carrying a nonzero coefficient.
    pub fn half_integer_keys(&self) -> Vec<i32> {
        self.terms.keys().copied().filter(|k| k.rem_euclid(2) == 1).collect()
    }

    /// Drop everything at or below `key` and record it as the error.
    pub fn truncate(&self, key: i32) -> Self {
        let err = Some(self.error.map_or(key, |e| e.max(key)));
        AsymptoticSeries { terms: self.terms.iter().filter(|(k, _)| **k > key).map(|(k, c)| (*k, c.clone())).collect(), error: err }
    }

    fn with_error(mut self, err: Option<i32>) -> Self {
        if let Some(e) = err {
            self.terms.retain(|k, _| *k > e);
            self.error = Some(self.error.map_or(e, |x| x.max(e)));
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.error = max_opt(self.error, other.error);
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        let err = out.error;
        out.with_error(err)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn scale(&self, s: &Cq) -> Self {
        if s.is_zero() {
            return AsymptoticSeries { terms: BTreeMap::new(), error: self.error };
        }
        self.map(|c| c * s)
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        self.scale(&Cq::real(s.clone()))
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    fn map(&self, f: impl Fn(&Cq) -> Cq) -> Self {
        AsymptoticSeries { terms: self.terms.iter().map(|(k, c)| (*k, f(c))).filter(|(_, c)| !c.is_zero()).collect(), error: self.error }
    }

    /// Multiply by `m^{k/2}`.
    pub fn shift(&self, k: i32) -> Self {
        AsymptoticSeries { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(), error: self.error.map(|e| e + k) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let err = max_opt(
            self.error.and_then(|e| other.magnitude_key().map(|m| e + m)),
            other.error.and_then(|e| self.magnitude_key().map(|m| e + m)),
        );
        let mut out = AsymptoticSeries { terms: BTreeMap::new(), error: err };
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = ka + kb;
                if err.is_some_and(|e| k <= e) {
                    continue;
                }
                let slot = out.terms.entry(k).or_default();
                slot.add_mul(ca, cb);
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// `1/self`, with everything at or below `floor` dropped.
    pub fn inverse(&self, floor: i32) -> Result<Self> {
        let lead = self.leading_key().ok_or_else(|| Error::InvalidParameter("inverse of a zero series".into()))?;
        let c = self.coeff(lead);
        let cinv = c.recip().expect("nonzero leading coefficient");
        // self = c m^{lead/2} (1 + x)
        let x = self.shift(-lead).scale(&cinv).sub(&Self::one());
        let geo = Self::geometric(&x, floor + lead, |k| if k % 2 == 0 { Rat::one() } else { Rat::from_int(-1) });
        Ok(geo.shift(-lead).scale(&cinv).truncate(floor))
    }

    /// `(1 + self)^{-1/2}` for a series with only negative keys, truncated at `floor`.
    pub fn inv_sqrt_one_plus(&self, floor: i32) -> Result<Self> {
        if self.magnitude_key().is_some_and(|k| k >= 0) {
            return Err(Error::InvalidParameter("(1+x)^(-1/2) needs x = o(1)".into()));
        }
        let half = Rat::new(-1, 2);
        Ok(Self::geometric(self, floor, |k| binomial_rational(&half, k)).truncate(floor))
    }

    /// `Σ_k coeff(k) x^k`, for `x = o(1)`, until powers fall below `floor`.
    fn geometric(x: &Self, floor: i32, coeff: impl Fn(u32) -> Rat) -> Self {
        let mut acc = Self::one();
        let Some(step) = x.magnitude_key() else {
            return acc;
        };
        assert!(step < 0, "expansion variable must decay");
        let mut power = Self::one();
        let mut k = 1u32;
        loop {
            power = power.mul(x).truncate(floor);
            if power.is_zero() && power.error.is_none_or(|e| e <= floor) {
                break;
            }
            acc = acc.add(&power.scale_rat(&coeff(k)));
            k += 1;
            if step * k as i32 <= floor {
                break;
            }
        }
        acc.truncate(floor)
    }

    /// Value at a concrete `m`, ignoring the error term.
    pub fn eval_f64(&self, m: f64) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in &self.terms {
            let w = m.powf(*k as f64 / 2.0);
            let (a, b) = c.to_f64();
            re += a * w;
            im += b * w;
        }
        (re, im)
    }
}

fn max_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

impl fmt::Display for AsymptoticSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k % 2 == 0 {
                write!(f, "({c})·m^{}", k / 2)?;
            } else {
                write!(f, "({c})·m^({k}/2)")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(e) = self.error {
            write!(f, " + O(m^({e}/2))")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(terms: &[(i32, i64, i64)]) -> AsymptoticSeries {
        AsymptoticSeries::from_terms(terms.iter().map(|(k, n, d)| (*k, Cq::frac(*n, *d))), None)
    }

    #[test]
    fn geometric_inverse() {
        // 1/(1 - c/m) = 1 + c/m + c²/m² + ...
        let c = Rat::new(3, 2);
        let x = AsymptoticSeries::one().sub(&AsymptoticSeries::monomial(-2, Cq::real(c.clone())));
        let inv = x.inverse(-7).unwrap();
        for k in 0..=3 {
            assert_eq!(inv.coeff(-2 * k), Cq::real(c.pow(k as u32)));
        }
        assert_eq!(inv.error(), Some(-7));
    }

    #[test]
    fn inverse_of_beta_integral() {
        // 1/(m+1) = m^{-1}(1 - 1/m + 1/m² ...)
        let m_plus_1 = s(&[(2, 1, 1), (0, 1, 1)]);
        let inv = m_plus_1.inverse(-7).unwrap();
        assert_eq!(inv, AsymptoticSeries::from_terms([(-2, Cq::one()), (-4, Cq::from_int(-1)), (-6, Cq::one())], Some(-7)));
    }

    #[test]
    fn inv_sqrt() {
        let x = s(&[(-2, 1, 1)]);
        let u = x.inv_sqrt_one_plus(-9).unwrap();
        let sq = u.mul(&u).mul(&AsymptoticSeries::one().add(&x)).truncate(-9);
        assert_eq!(sq, AsymptoticSeries::one().truncate(-9));
        assert_eq!(u.coeff(-2), Cq::frac(-1, 2));
        assert_eq!(u.coeff(-4), Cq::frac(3, 8));
        assert!(s(&[(0, 1, 1)]).inv_sqrt_one_plus(-4).is_err());
    }

    #[test]
    fn error_propagation() {
        let a = AsymptoticSeries::from_terms([(0, Cq::one())], Some(-5));
        let b = s(&[(-2, 1, 1), (-4, 1, 1)]);
        let p = a.mul(&b);
        assert_eq!(p.error(), Some(-7));
        assert_eq!(p.coeff(-2), Cq::one());
        assert_eq!(p.coeff(-4), Cq::one());
        let half = s(&[(-3, 2, 1)]);
        assert_eq!(half.half_integer_keys(), vec![-3]);
        assert_eq!(format!("{}", AsymptoticSeries::unknown(-4)), "0 + O(m^(-4/2))");
    }

    fn arb_series() -> impl Strategy<Value = AsymptoticSeries> {
        proptest::collection::vec((-8i32..=0, -5i64..=5, 1i64..=4), 0..5)
            .prop_map(|v| AsymptoticSeries::from_terms(v.into_iter().map(|(k, n, d)| (k, Cq::frac(n, d))), None))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn inverse_roundtrip(a in arb_series()) {
            prop_assume!(!a.is_zero());
            let lead = a.leading_key().unwrap();
            let floor = -12;
            let inv = a.inverse(floor - lead).unwrap();
            let prod = a.mul(&inv);
            prop_assert_eq!(prod.truncate(floor), AsymptoticSeries::one().truncate(floor));
        }
    }
}
