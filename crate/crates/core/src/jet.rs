//! Truncated power series in `z_1..z_n` and `z̄_1..z̄_n` with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::rational::{binomial, Cq, Rat};

/// Largest supported number of complex variables.
pub const MAX_VARS: usize = 4;

/// Largest supported truncation order (exponents are packed into bytes).
pub const MAX_ORDER: u32 = 200;

/// Packed monomial `z^P z̄^Q`: one byte per exponent, holomorphic exponents in
/// the low four bytes and anti-holomorphic exponents in the high four bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn new(hol: &[u32], anti: &[u32]) -> Mono {
        let mut k = 0u64;
        for (i, &p) in hol.iter().enumerate() {
            debug_assert!(p < 256);
            k |= (p as u64) << (8 * i);
        }
        for (i, &q) in anti.iter().enumerate() {
            debug_assert!(q < 256);
            k |= (q as u64) << (32 + 8 * i);
        }
        Mono(k)
    }

    pub fn from_indices(p: &MultiIndex, q: &MultiIndex) -> Mono {
        Mono::new(p.exps(), q.exps())
    }

    pub fn hol_var(i: usize) -> Mono {
        Mono(1u64 << (8 * i))
    }

    pub fn anti_var(i: usize) -> Mono {
        Mono(1u64 << (32 + 8 * i))
    }

    #[inline]
    pub fn hol(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xff) as u32
    }

    #[inline]
    pub fn anti(self, i: usize) -> u32 {
        ((self.0 >> (32 + 8 * i)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0.wrapping_mul(0x0101_0101_0101_0101) >> 56) as u32
    }

    #[inline]
    pub fn hol_degree(self) -> u32 {
        Mono(self.0 & 0xffff_ffff).degree()
    }

    #[inline]
    pub fn anti_degree(self) -> u32 {
        Mono(self.0 >> 32).degree()
    }

    pub fn hol_part(self) -> Mono {
        Mono(self.0 & 0xffff_ffff)
    }

    pub fn anti_part(self) -> Mono {
        Mono(self.0 & !0xffff_ffffu64)
    }

    /// Swap holomorphic and anti-holomorphic exponents.
    #[inline]
    pub fn conj(self) -> Mono {
        Mono(self.0.rotate_left(32))
    }

    #[inline]
    pub fn mul(self, other: Mono) -> Mono {
        Mono(self.0 + other.0)
    }

    pub fn is_pure_hol(self) -> bool {
        self.0 >> 32 == 0
    }

    pub fn is_pure_anti(self) -> bool {
        self.0 & 0xffff_ffff == 0
    }

    pub fn hol_index(self, n: usize) -> MultiIndex {
        MultiIndex::new((0..n).map(|i| self.hol(i)).collect())
    }

    pub fn anti_index(self, n: usize) -> MultiIndex {
        MultiIndex::new((0..n).map(|i| self.anti(i)).collect())
    }
}

/// Truncated bidegree series. Absent keys are zero; no stored key exceeds `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidegreeJet {
    n: usize,
    order: u32,
    terms: BTreeMap<Mono, Cq>,
}

fn check_n(n: usize) {
    assert!((1..=MAX_VARS).contains(&n), "number of variables must be in 1..={MAX_VARS}");
}

impl BidegreeJet {
    pub fn zero(n: usize, order: u32) -> Self {
        check_n(n);
        assert!(order <= MAX_ORDER, "order exceeds {MAX_ORDER}");
        BidegreeJet { n, order, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, order: u32, c: Cq) -> Self {
        let mut j = Self::zero(n, order);
        j.insert(Mono::ONE, c);
        j
    }

    pub fn one(n: usize, order: u32) -> Self {
        Self::constant(n, order, Cq::one())
    }

    /// The coordinate function `z_i` (0-based `i`).
    pub fn z(n: usize, order: u32, i: usize) -> Self {
        Self::from_terms(n, order, [(Mono::hol_var(i), Cq::one())])
    }

    /// The coordinate function `z̄_i` (0-based `i`).
    pub fn zbar(n: usize, order: u32, i: usize) -> Self {
        Self::from_terms(n, order, [(Mono::anti_var(i), Cq::one())])
    }

    /// `|z|^2 = Σ z_i z̄_i`.
    pub fn norm_sqr(n: usize, order: u32) -> Self {
        Self::from_terms(n, order, (0..n).map(|i| (Mono::hol_var(i).mul(Mono::anti_var(i)), Cq::one())))
    }

    pub fn monomial(n: usize, order: u32, p: &MultiIndex, q: &MultiIndex, c: Cq) -> Self {
        Self::from_terms(n, order, [(Mono::from_indices(p, q), c)])
    }

    /// Sums duplicate keys and drops zero terms and terms above `order`.
    pub fn from_terms(n: usize, order: u32, terms: impl IntoIterator<Item = (Mono, Cq)>) -> Self {
        let mut j = Self::zero(n, order);
        for (k, c) in terms {
            j.add_term(k, &c);
        }
        j
    }

    fn insert(&mut self, k: Mono, c: Cq) {
        if !c.is_zero() && k.degree() <= self.order {
            self.terms.insert(k, c);
        }
    }

    /// `self[k] += c`, ignoring keys above the order.
    pub fn add_term(&mut self, k: Mono, c: &Cq) {
        if c.is_zero() || k.degree() > self.order {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &Cq)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff_mono(&self, k: Mono) -> Cq {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, p: &MultiIndex, q: &MultiIndex) -> Cq {
        self.coeff_mono(Mono::from_indices(p, q))
    }

    pub fn constant_term(&self) -> Cq {
        self.coeff_mono(Mono::ONE)
    }

    /// Lowest degree among stored terms.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).min()
    }

    /// Lower bound on the valuation of the underlying series, accounting for truncation.
    pub fn effective_valuation(&self) -> u32 {
        self.valuation().unwrap_or(self.order + 1).min(self.order + 1)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|k| k.is_pure_hol())
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {} variables", self.n, other.n)));
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, &-c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &Cq) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rat(&self, s: &Rat) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Cq) -> Cq) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for (k, c) in self.terms() {
            out.insert(k, f(c));
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(Mono) -> bool) -> Self {
        let mut out = Self::zero(self.n, self.order);
        out.terms = self.terms.iter().filter(|(k, _)| keep(**k)).map(|(k, c)| (*k, c.clone())).collect();
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.mul_raw(other, self.order))
    }

    /// Product carried to `target`, which may exceed the operand orders when the
    /// valuations guarantee the result is still determined there.
    pub fn mul_to(&self, other: &Self, target: u32) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {} variables", self.n, other.n)));
        }
        let known = (self.order + other.effective_valuation()).min(other.order + self.effective_valuation());
        if target > known {
            return Err(Error::InsufficientOrder { needed: target, have: known, context: "product".into() });
        }
        Ok(self.mul_raw(other, target))
    }

    pub(crate) fn mul_raw(&self, other: &Self, target: u32) -> Self {
        let mut rhs: Vec<(u32, Mono, &Cq)> = other.terms.iter().map(|(k, c)| (k.degree(), *k, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: FxHashMap<Mono, Cq> = FxHashMap::default();
        for (ka, ca) in &self.terms {
            let da = ka.degree();
            if da > target {
                continue;
            }
            for (db, kb, cb) in &rhs {
                if da + db > target {
                    break;
                }
                acc.entry(ka.mul(*kb)).or_default().add_mul(ca, cb);
            }
        }
        let mut out = Self::zero(self.n, target);
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n, self.order);
        for _ in 0..e {
            acc = acc.mul_raw(self, self.order);
        }
        acc
    }

    /// Homogeneous component of total degree `d`, keeping this jet's order.
    pub fn homogeneous(&self, d: u32) -> Self {
        self.filter(|k| k.degree() == d)
    }

    /// Components of degree `0..=order`.
    pub fn homogeneous_parts(&self) -> Vec<Self> {
        let mut parts = vec![Self::zero(self.n, self.order); self.order as usize + 1];
        for (k, c) in self.terms() {
            parts[k.degree() as usize].terms.insert(k, c.clone());
        }
        parts
    }

    /// Drop terms above `order`. Raising the order is refused.
    pub fn truncate(&self, order: u32) -> Result<Self> {
        if order > self.order {
            return Err(Error::InsufficientOrder { needed: order, have: self.order, context: "truncate".into() });
        }
        Ok(self.with_order(order))
    }

    /// Re-declare the truncation order. Raising it asserts that the stored
    /// terms are the exact polynomial.
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = Self::zero(self.n, order);
        out.terms = self.terms.iter().filter(|(k, _)| k.degree() <= order).map(|(k, c)| (*k, c.clone())).collect();
        out
    }

    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::BasePoint("exp requires f(0) = 0".into()));
        }
        let f = self.homogeneous_parts();
        let mut e: Vec<Self> = vec![Self::one(self.n, self.order)];
        for d in 1..=self.order {
            let mut acc = Self::zero(self.n, self.order);
            for k in 1..=d {
                if f[k as usize].is_zero() || e[(d - k) as usize].is_zero() {
                    continue;
                }
                let prod = f[k as usize].mul_raw(&e[(d - k) as usize], d);
                for (key, c) in prod.terms() {
                    acc.add_term(key, &c.scale(&Rat::from_int(k as i64)));
                }
            }
            e.push(acc.scale_rat(&Rat::new(1, d as i64)));
        }
        Ok(Self::sum_parts(self.n, self.order, &e))
    }

    pub fn log(&self) -> Result<Self> {
        if !self.constant_term().is_one_cq() {
            return Err(Error::BasePoint("log requires f(0) = 1".into()));
        }
        let f = self.homogeneous_parts();
        let mut l: Vec<Self> = vec![Self::zero(self.n, self.order)];
        for d in 1..=self.order {
            let mut acc = f[d as usize].clone();
            let mut corr = Self::zero(self.n, self.order);
            for k in 1..d {
                if f[k as usize].is_zero() || l[(d - k) as usize].is_zero() {
                    continue;
                }
                let prod = f[k as usize].mul_raw(&l[(d - k) as usize], d);
                let w = Rat::from_int((d - k) as i64);
                for (key, c) in prod.terms() {
                    corr.add_term(key, &c.scale(&w));
                }
            }
            let corr = corr.scale_rat(&Rat::new(1, d as i64));
            for (key, c) in corr.terms() {
                acc.add_term(key, &-c);
            }
            l.push(acc);
        }
        Ok(Self::sum_parts(self.n, self.order, &l))
    }

    /// Multiplicative inverse to order.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0inv = c0.recip().ok_or_else(|| Error::BasePoint("invert requires f(0) != 0".into()))?;
        let f = self.homogeneous_parts();
        let mut inv: Vec<Self> = vec![Self::constant(self.n, self.order, c0inv.clone())];
        let neg = -&c0inv;
        for d in 1..=self.order {
            let mut acc = Self::zero(self.n, self.order);
            for k in 1..=d {
                if f[k as usize].is_zero() || inv[(d - k) as usize].is_zero() {
                    continue;
                }
                for (key, c) in f[k as usize].mul_raw(&inv[(d - k) as usize], d).terms() {
                    acc.add_term(key, c);
                }
            }
            inv.push(acc.scale(&neg));
        }
        Ok(Self::sum_parts(self.n, self.order, &inv))
    }

    fn sum_parts(n: usize, order: u32, parts: &[Self]) -> Self {
        let mut out = Self::zero(n, order);
        for p in parts {
            for (k, c) in p.terms() {
                out.terms.insert(k, c.clone());
            }
        }
        out
    }

    /// `∂/∂z_i` (0-based). The order drops by one.
    pub fn diff_hol(&self, i: usize) -> Self {
        self.diff(i, false)
    }

    /// `∂/∂z̄_i` (0-based). The order drops by one.
    pub fn diff_anti(&self, i: usize) -> Self {
        self.diff(i, true)
    }

    fn diff(&self, i: usize, anti: bool) -> Self {
        assert!(i < self.n, "axis out of range");
        let mut out = Self::zero(self.n, self.order.saturating_sub(1));
        let unit = if anti { Mono::anti_var(i) } else { Mono::hol_var(i) };
        for (k, c) in self.terms() {
            let e = if anti { k.anti(i) } else { k.hol(i) };
            if e == 0 {
                continue;
            }
            out.insert(Mono(k.0 - unit.0), c.scale(&Rat::from_int(e as i64)));
        }
        out
    }

    /// Complex conjugate as a function: swap `P <-> Q` and conjugate coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.order);
        out.terms = self.terms.iter().map(|(k, c)| (k.conj(), c.conj())).collect();
        out
    }

    /// Restriction to `z̄ = 0`.
    pub fn hol_part(&self) -> Self {
        self.filter(|k| k.is_pure_hol())
    }

    /// Restriction to `z = 0`.
    pub fn anti_part(&self) -> Self {
        self.filter(|k| k.is_pure_anti())
    }

    /// `f(Ψ(z))` for a holomorphic map `Ψ` with `Ψ(0) = 0`, given by its
    /// components. Each component must be known to at least this jet's order.
    pub fn compose_holomorphic(&self, map: &[BidegreeJet]) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::DimensionMismatch(format!("map has {} components, jet has {} variables", map.len(), self.n)));
        }
        let n_out = map[0].n;
        for c in map {
            if c.n != n_out {
                return Err(Error::DimensionMismatch("map components disagree on dimension".into()));
            }
            if !c.is_holomorphic() {
                return Err(Error::InvalidParameter("composition map must be holomorphic".into()));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::BasePoint("composition map must fix the origin".into()));
            }
            if c.order < self.order {
                return Err(Error::InsufficientOrder { needed: self.order, have: c.order, context: "composition map".into() });
            }
        }
        let order = self.order;
        let mut cache: FxHashMap<Mono, BidegreeJet> = FxHashMap::default();
        cache.insert(Mono::ONE, Self::one(n_out, order));
        let mut by_q: BTreeMap<Mono, Vec<(Mono, &Cq)>> = BTreeMap::new();
        for (k, c) in self.terms() {
            by_q.entry(Mono(k.0 >> 32)).or_default().push((k.hol_part(), c));
        }
        let mut out = Self::zero(n_out, order);
        for (q, list) in &by_q {
            let qdeg = q.degree();
            let budget = order - qdeg;
            let mut s = Self::zero(n_out, budget);
            for (p, c) in list {
                let pw = power_of_map(&mut cache, map, *p, self.n, order);
                for (k, v) in pw.terms() {
                    if k.degree() <= budget {
                        s.add_term(k, &(v * c));
                    }
                }
            }
            let conj_q = power_of_map(&mut cache, map, *q, self.n, order).conj();
            for (ka, ca) in s.terms() {
                let da = ka.degree();
                for (kb, cb) in conj_q.terms() {
                    if da + kb.degree() <= order {
                        out.add_term(ka.mul(kb), &(ca * cb));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact translation `f(t + w)` as a polynomial in `w`. The stored terms are
    /// treated as the complete polynomial.
    pub fn shift(&self, t: &[Cq]) -> Self {
        assert_eq!(t.len(), self.n);
        let tb: Vec<Cq> = t.iter().map(|x| x.conj()).collect();
        let mut out = Self::zero(self.n, self.order);
        for (k, c) in self.terms() {
            let mut partial: Vec<(Mono, Cq)> = vec![(Mono::ONE, c.clone())];
            for i in 0..self.n {
                for (anti, e, base) in [(false, k.hol(i), &t[i]), (true, k.anti(i), &tb[i])] {
                    if e == 0 {
                        continue;
                    }
                    let unit = if anti { Mono::anti_var(i) } else { Mono::hol_var(i) };
                    let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                    for (m0, c0) in &partial {
                        for j in 0..=e {
                            let coef = base.pow(e - j).scale(&Rat::from_int(binomial(e as u64, j as u64) as i64));
                            if coef.is_zero() {
                                continue;
                            }
                            next.push((Mono(m0.0 + unit.0 * j as u64), c0 * &coef));
                        }
                    }
                    partial = next;
                }
            }
            for (m, v) in partial {
                out.add_term(m, &v);
            }
        }
        out
    }

    /// Evaluate the stored polynomial at `z`.
    pub fn eval(&self, z: &[Cq]) -> Cq {
        assert_eq!(z.len(), self.n);
        let mut acc = Cq::zero();
        for (k, c) in self.terms() {
            let mut t = c.clone();
            for (i, zi) in z.iter().enumerate() {
                t = &t * &zi.pow(k.hol(i));
                t = &t * &zi.conj().pow(k.anti(i));
            }
            acc += &t;
        }
        acc
    }
}

fn power_of_map(cache: &mut FxHashMap<Mono, BidegreeJet>, map: &[BidegreeJet], p: Mono, n_in: usize, order: u32) -> BidegreeJet {
    if let Some(j) = cache.get(&p) {
        return j.clone();
    }
    let i = (0..n_in).find(|&i| p.hol(i) > 0).expect("nonconstant monomial");
    let lower = power_of_map(cache, map, Mono(p.0 - Mono::hol_var(i).0), n_in, order);
    let v = lower.mul_raw(&map[i], order);
    cache.insert(p, v.clone());
    v
}

trait IsOne {
    fn is_one_cq(&self) -> bool;
}

impl IsOne for Cq {
    fn is_one_cq(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }
}

impl fmt::Display for BidegreeJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<Mono> = self.terms.keys().copied().collect();
        keys.sort_by_key(|k| (k.degree(), std::cmp::Reverse(k.0)));
        for (idx, k) in keys.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", self.terms[k])?;
            for i in 0..self.n {
                for (e, name) in [(k.hol(i), "z"), (k.anti(i), "zb")] {
                    match e {
                        0 => {}
                        1 => write!(f, "*{name}{}", i + 1)?,
                        _ => write!(f, "*{name}{}^{e}", i + 1)?,
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(n: i64, d: i64) -> Cq {
        Cq::frac(n, d)
    }

    fn z(order: u32) -> BidegreeJet {
        BidegreeJet::z(1, order, 0)
    }

    fn zz(order: u32) -> BidegreeJet {
        BidegreeJet::norm_sqr(1, order)
    }

    #[test]
    fn mono_packing() {
        let m = Mono::new(&[2, 1], &[0, 3]);
        assert_eq!(m.degree(), 6);
        assert_eq!(m.hol_degree(), 3);
        assert_eq!(m.anti_degree(), 3);
        assert_eq!(m.conj(), Mono::new(&[0, 3], &[2, 1]));
    }

    #[test]
    fn mul_examples() {
        let one = BidegreeJet::one(1, 2);
        let f = one.add(&z(2)).unwrap();
        let g = one.sub(&z(2)).unwrap();
        let expect = one.sub(&z(2).mul(&z(2)).unwrap()).unwrap();
        assert_eq!(f.mul(&g).unwrap(), expect);
        assert!(zz(3).mul(&zz(3)).unwrap().is_zero());
        let e = BidegreeJet::from_terms(1, 2, [(Mono::ONE, c(1, 1)), (Mono::hol_var(0), c(1, 1)), (Mono::new(&[2], &[0]), c(1, 2))]);
        let sq = e.mul(&e).unwrap();
        let want = BidegreeJet::from_terms(1, 2, [(Mono::ONE, c(1, 1)), (Mono::hol_var(0), c(2, 1)), (Mono::new(&[2], &[0]), c(2, 1))]);
        assert_eq!(sq, want);
    }

    #[test]
    fn order_mismatch_is_error() {
        assert!(matches!(z(2).mul(&z(3)), Err(Error::OrderMismatch(2, 3))));
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(BidegreeJet::zero(1, 4).exp().unwrap(), BidegreeJet::one(1, 4));
        let f = BidegreeJet::one(1, 4).add(&zz(4)).unwrap();
        let want = BidegreeJet::from_terms(1, 4, [(Mono::new(&[1], &[1]), c(1, 1)), (Mono::new(&[2], &[2]), c(-1, 2))]);
        assert_eq!(f.log().unwrap(), want);
        let g = BidegreeJet::one(1, 5).add(&z(5)).unwrap();
        assert_eq!(g.log().unwrap().exp().unwrap(), g);
        assert!(z(3).log().is_err());
        assert!(BidegreeJet::one(1, 3).exp().is_err());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(BidegreeJet::one(1, 3).invert().unwrap(), BidegreeJet::one(1, 3));
        let f = BidegreeJet::one(1, 3).add(&z(3)).unwrap();
        let want = BidegreeJet::from_terms(
            1,
            3,
            [(Mono::ONE, c(1, 1)), (Mono::new(&[1], &[0]), c(-1, 1)), (Mono::new(&[2], &[0]), c(1, 1)), (Mono::new(&[3], &[0]), c(-1, 1))],
        );
        assert_eq!(f.invert().unwrap(), want);
        let g = BidegreeJet::constant(1, 2, c(2, 1)).add(&zz(2)).unwrap();
        let want = BidegreeJet::from_terms(1, 2, [(Mono::ONE, c(1, 2)), (Mono::new(&[1], &[1]), c(-1, 4))]);
        assert_eq!(g.invert().unwrap(), want);
        assert!(z(2).invert().is_err());
    }

    #[test]
    fn diff_examples() {
        let f = BidegreeJet::monomial(1, 4, &MultiIndex::new(vec![2]), &MultiIndex::new(vec![1]), Cq::one());
        assert_eq!(f.diff_hol(0), BidegreeJet::monomial(1, 3, &MultiIndex::new(vec![1]), &MultiIndex::new(vec![1]), c(2, 1)));
        let g = z(3).mul(&z(3)).unwrap();
        assert!(g.diff_anti(0).is_zero());
        let h = BidegreeJet::monomial(2, 6, &MultiIndex::new(vec![2, 0]), &MultiIndex::new(vec![2, 0]), c(1, 4));
        let d = h.diff_hol(0).diff_anti(0);
        assert_eq!(d, BidegreeJet::monomial(2, 4, &MultiIndex::new(vec![1, 0]), &MultiIndex::new(vec![1, 0]), Cq::one()));
    }

    #[test]
    fn mul_to_uses_valuation() {
        let q = zz(4).mul(&zz(4)).unwrap();
        let sq = q.mul_to(&q, 8).unwrap();
        assert_eq!(sq.len(), 1);
        assert!(q.mul_to(&q, 9).is_err());
    }

    #[test]
    fn composition_with_linear_map() {
        let f = zz(4).add(&z(4).mul(&z(4)).unwrap()).unwrap();
        let map = [BidegreeJet::z(1, 4, 0).scale(&c(2, 1))];
        let g = f.compose_holomorphic(&map).unwrap();
        let want = zz(4).scale(&c(4, 1)).add(&z(4).mul(&z(4)).unwrap().scale(&c(4, 1))).unwrap();
        assert_eq!(g, want);
    }

    #[test]
    fn shift_then_eval() {
        let f = BidegreeJet::from_terms(1, 6, [(Mono::new(&[2], &[1]), c(3, 1)), (Mono::new(&[0], &[1]), Cq::i())]);
        let t = [Cq::new(Rat::new(1, 2), Rat::new(-1, 3))];
        let w = [Cq::new(Rat::new(1, 5), Rat::new(2, 7))];
        let shifted = f.shift(&t);
        assert_eq!(shifted.eval(&w), f.eval(&[&t[0] + &w[0]]));
    }

    fn arb_jet(n: usize, order: u32) -> impl Strategy<Value = BidegreeJet> {
        let deg = order as usize;
        proptest::collection::vec((proptest::collection::vec(0u32..=deg as u32, 2 * n), -5i64..6, 1i64..4, -3i64..4), 0..8)
            .prop_map(move |raw| {
                let terms = raw.into_iter().map(|(e, re, d, im)| (Mono::new(&e[..n], &e[n..]), Cq::new(Rat::new(re, d), Rat::new(im, d))));
                BidegreeJet::from_terms(n, order, terms)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_laws(a in arb_jet(2, 4), b in arb_jet(2, 4), c in arb_jet(2, 4)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn exp_log_inverse(a in arb_jet(1, 5)) {
            let f = a.sub(&BidegreeJet::constant(1, 5, a.constant_term())).unwrap();
            prop_assert_eq!(f.exp().unwrap().log().unwrap(), f.clone());
            let g = BidegreeJet::one(1, 5).add(&f).unwrap();
            prop_assert_eq!(g.log().unwrap().exp().unwrap(), g);
        }

        #[test]
        fn invert_inverse(a in arb_jet(2, 4)) {
            let f = a.add(&BidegreeJet::constant(2, 4, Cq::frac(7, 3))).unwrap();
            if f.constant_term().is_zero() { return Ok(()); }
            prop_assert_eq!(f.mul(&f.invert().unwrap()).unwrap(), BidegreeJet::one(2, 4));
        }

        #[test]
        fn conj_is_involution_and_multiplicative(a in arb_jet(2, 4), b in arb_jet(2, 4)) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).unwrap().conj(), a.conj().mul(&b.conj()).unwrap());
        }
    }
}
