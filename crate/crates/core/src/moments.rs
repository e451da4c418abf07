//! Gaussian moments `∫ z^P z̄^Q |z|^{2q} e^{-m|z|²} dV₀` and the tail bound
//! that lets the pipeline integrate over all of ℂⁿ instead of a small ball.

use num::BigInt;

use crate::dd::{Dd, DdC};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::par::Execution;
use crate::quadrature::{integrate_panels, PanelOptions};
use crate::rational::{factorial, Rat};

/// `coeff · m^{m_power}`, exact in the coefficient and symbolic in `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moment {
    pub coeff: Rat,
    pub m_power: i32,
}

impl Moment {
    pub fn zero() -> Self {
        Moment { coeff: Rat::zero(), m_power: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn at(&self, m: u64) -> Rat {
        let mr = Rat::from_bigint(BigInt::from(m));
        if self.m_power >= 0 {
            &self.coeff * &mr.pow(self.m_power as u32)
        } else {
            &self.coeff / &mr.pow((-self.m_power) as u32)
        }
    }

    pub fn at_f64(&self, m: f64) -> f64 {
        self.coeff.to_f64() * m.powi(self.m_power)
    }
}

/// `∫ z^P z̄^Q e^{-m|z|²} dV₀`: zero off the diagonal, `P!/m^{n+|P|}` on it.
pub fn monomial_moment(p: &MultiIndex, q: &MultiIndex) -> Moment {
    assert_eq!(p.n(), q.n(), "multi-index dimensions differ");
    if p != q {
        return Moment::zero();
    }
    Moment { coeff: Rat::from_bigint(p.factorial()), m_power: -((p.n() as u32 + p.degree()) as i32) }
}

/// `∫ |z^P|² |z|^{2q} e^{-m|z|²} dV₀ = (|P|+n-1+q)! P! / ((|P|+n-1)! m^{n+|P|+q})`.
pub fn radial_moment(p: &MultiIndex, q: u32) -> Moment {
    let n = p.n() as u32;
    let base = p.degree() + n - 1;
    let coeff = Rat::from_bigint(factorial(base + q) * p.factorial()) / Rat::from_bigint(factorial(base));
    Moment { coeff, m_power: -((n + p.degree() + q) as i32) }
}

/// Outcome of [`tail_check`]. Tails are relative to `P!/m^{n+|P|}`.
#[derive(Clone, Debug)]
pub struct TailReport {
    pub m: u64,
    pub eps1: f64,
    /// `a = (log m / n)²`.
    pub a: f64,
    /// `q = ⌊ε₁ a⌋`.
    pub q: u64,
    /// `1/ε₁ - 1 - log(1/ε₁)`.
    pub rate: f64,
    /// Explicit bound `n(q+1)e^{-rate·q}`.
    pub bound: f64,
    pub eps2: f64,
    /// `e^{-ε₂ (log m)²}`.
    pub target: f64,
    /// Closed-form tail (n = 1).
    pub exact: Option<f64>,
    /// Quadratured tail and its error estimate (n = 1).
    pub quadrature: Option<(f64, f64)>,
    pub passes: bool,
}

/// Certify that the Gaussian tail outside `|z| = log m/√m` is negligible.
pub fn tail_check(p: &MultiIndex, m: u64, eps1: f64) -> Result<TailReport> {
    let n = p.n();
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::InvalidParameter(format!("ε₁ must lie in (0,1), got {eps1}")));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("tail check needs m ≥ 2".into()));
    }
    let lm = (m as f64).ln();
    let a = (lm / n as f64).powi(2);
    if p.degree() as f64 > eps1 * a {
        return Err(Error::Hypothesis(format!("|P| = {} exceeds ε₁(log m/n)² = {:.4}", p.degree(), eps1 * a)));
    }
    let q = (eps1 * a).floor() as u64;
    let rate = 1.0 / eps1 - 1.0 - (1.0 / eps1).ln();
    let bound = n as f64 * (q as f64 + 1.0) * (-rate * q as f64).exp();
    let eps2 = rate * eps1 / (n * n) as f64;
    let target = (-eps2 * lm * lm).exp();
    let (exact, quadrature) = if n == 1 {
        let k = p.degree();
        let v0 = lm * lm;
        // e^{-v0} Σ_{ℓ≤k} v0^ℓ/ℓ!
        let mut term = 1.0;
        let mut sum = 1.0;
        for l in 1..=k {
            term *= v0 / l as f64;
            sum += term;
        }
        let exact = (-v0).exp() * sum;
        let kf = Dd::from_bigint(&factorial(k));
        let f = move |v: Dd| vec![DdC::real(v.powi(k) * (-v).exp() / kf)];
        let opts = PanelOptions { min_stop: v0 + 2.0 * k as f64 + 40.0, ..Default::default() };
        let res = integrate_panels(&f, v0, f64::INFINITY, &opts, Execution::Sequential);
        (Some(exact), Some((res.value[0].re.to_f64(), res.error[0])))
    } else {
        (None, None)
    };
    let tail = quadrature.map(|(v, e)| v + e).or(exact);
    let passes = match tail {
        Some(t) => t <= bound && t <= target,
        None => true,
    };
    Ok(TailReport { m, eps1, a, q, rate, bound, eps2, target, exact, quadrature, passes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn moment_examples() {
        assert_eq!(monomial_moment(&mi(&[0]), &mi(&[0])).at(5), Rat::new(1, 5));
        assert!(monomial_moment(&mi(&[1, 0]), &mi(&[0, 1])).is_zero());
        assert_eq!(monomial_moment(&mi(&[2, 1]), &mi(&[2, 1])).at(2), Rat::new(1, 16));
        assert_eq!(radial_moment(&mi(&[1]), 1).at(1), Rat::from_int(2));
        assert_eq!(radial_moment(&mi(&[0, 0]), 1).at(3), Rat::new(2, 27));
        assert_eq!(monomial_moment(&mi(&[0, 0, 0]), &mi(&[0, 0, 0])), Moment { coeff: Rat::one(), m_power: -3 });
    }

    #[test]
    fn radial_reduces_to_monomial() {
        for n in 1..=3 {
            for p in MultiIndex::all_up_to(n, 6) {
                assert_eq!(radial_moment(&p, 0), monomial_moment(&p, &p));
            }
        }
    }

    #[test]
    fn tail_examples() {
        let r = tail_check(&mi(&[0]), 100, 0.5).unwrap();
        let want = (-(100f64.ln().powi(2))).exp();
        assert!((r.exact.unwrap() - want).abs() < 1e-20);
        assert!((r.quadrature.unwrap().0 - want).abs() < 1e-20);
        assert!((want - 6.1e-10).abs() < 0.1e-10);
        assert!(r.passes);
        let r = tail_check(&mi(&[4]), 1000, 0.5).unwrap();
        assert!(r.quadrature.unwrap().0 <= r.bound && r.passes);
        let r = tail_check(&mi(&[0]), 100, 0.999).unwrap();
        assert!(r.eps2 > 0.0 && r.eps2 < 1e-5);
        assert!(matches!(tail_check(&mi(&[30]), 100, 0.5), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn tail_bound_dominates_quadrature() {
        for m in [10u64, 100, 1000, 10_000] {
            let a = (m as f64).ln().powi(2);
            for k in 0..=((0.5 * a).floor() as u32).min(6) {
                let r = tail_check(&mi(&[k]), m, 0.5).unwrap();
                let (v, e) = r.quadrature.unwrap();
                assert!(v + e <= r.bound, "m={m} P={k}");
                assert!((v - r.exact.unwrap()).abs() <= 1e-12 * r.exact.unwrap().max(1e-300) + e);
            }
        }
    }

    proptest! {
        #[test]
        fn moments_decrease_in_m(p in proptest::collection::vec(0u32..4, 1..3), q in 0u32..3, m in 1u64..50) {
            let p = MultiIndex::new(p);
            let mo = radial_moment(&p, q);
            prop_assert!(mo.at(m) > mo.at(m + 1));
            prop_assert!(mo.at(m + 1) > Rat::zero());
        }
    }
}
