//! Metric, curvature and scalar curvature from a local Kähler potential.
//!
//! Conventions: `a = e^{-φ}`, `g_{αβ̄} = ∂_α ∂̄_β φ`, and the Riemann tensor is
//! `R_{ij̄kl̄} = -∂_k∂̄_l g_{ij̄} + (∂_k G · G^{-1} · ∂̄_l G)_{ij}`, so the
//! Fubini–Study metric on CP¹ has scalar curvature `+2`.

use crate::error::{Error, Result};
use crate::jet::BidegreeJet;
use crate::jet::Mono;
use crate::matrix_jet::{cmat, CMat, MatrixJet};
use crate::rational::{Cq, Rat};

/// Local Kähler potential `φ` with `φ(0) = 0` and positive Hessian at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialJet {
    phi: BidegreeJet,
}

impl PotentialJet {
    pub fn new(phi: BidegreeJet) -> Result<Self> {
        if !phi.constant_term().is_zero() {
            return Err(Error::BasePoint("potential must vanish at the base point".into()));
        }
        if !phi.is_real() {
            return Err(Error::InvalidParameter("potential must be real (Hermitian coefficients)".into()));
        }
        if phi.order() < 2 {
            return Err(Error::InsufficientOrder { needed: 2, have: phi.order(), context: "potential".into() });
        }
        let p = PotentialJet { phi };
        let g0 = p.hessian();
        if !cmat::is_positive_definite(&g0) {
            return Err(Error::NotPositive("complex Hessian of the potential at the base point".into()));
        }
        Ok(p)
    }

    pub fn phi(&self) -> &BidegreeJet {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    /// `g(0)`, read off the `z_α z̄_β` coefficients.
    pub fn hessian(&self) -> CMat {
        let n = self.n();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| self.phi.coeff_mono(Mono::hol_var(a).mul(Mono::anti_var(b))))
                    .collect()
            })
            .collect()
    }
}

pub fn metric_from_potential(p: &PotentialJet) -> Result<MatrixJet> {
    let n = p.n();
    let g = MatrixJet::from_fn(n, n, |a, b| p.phi().diff_hol(a).diff_anti(b))?;
    if !cmat::is_positive_definite(&g.constant_matrix()) {
        return Err(Error::NotPositive("metric at the base point".into()));
    }
    Ok(g)
}

/// Metric, curvature and their contractions.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub n: usize,
    pub metric: MatrixJet,
    pub inverse_metric: MatrixJet,
    /// `R_{ij̄kl̄}` stored at index `((i*n + j)*n + k)*n + l`.
    pub riemann: Vec<BidegreeJet>,
    pub ricci: MatrixJet,
    pub scalar: BidegreeJet,
    pub det_g: BidegreeJet,
}

impl CurvatureData {
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> &BidegreeJet {
        let n = self.n;
        &self.riemann[((i * n + j) * n + k) * n + l]
    }
}

pub fn curvature_data(p: &PotentialJet) -> Result<CurvatureData> {
    if p.order() < 4 {
        return Err(Error::InsufficientOrder { needed: 4, have: p.order(), context: "curvature".into() });
    }
    let n = p.n();
    let g = metric_from_potential(p)?;
    let ginv = g.inverse()?;
    let low = p.order() - 4;
    let ginv_low = ginv.truncate(low)?;
    let mut riemann = vec![BidegreeJet::zero(n, low); n * n * n * n];
    for k in 0..n {
        let dk = g.diff_hol(k).truncate(low)?;
        for l in 0..n {
            let dl = g.diff_anti(l).truncate(low)?;
            let second = g.diff_hol(k).diff_anti(l);
            let r = dk.mul(&ginv_low)?.mul(&dl)?.sub(&second)?;
            for i in 0..n {
                for j in 0..n {
                    riemann[((i * n + j) * n + k) * n + l] = r.get(i, j).clone();
                }
            }
        }
    }
    let ricci = MatrixJet::from_fn(n, n, |k, l| {
        let mut acc = BidegreeJet::zero(n, low);
        for i in 0..n {
            for j in 0..n {
                let t = ginv_low.get(j, i).mul(&riemann[((i * n + j) * n + k) * n + l]).expect("shared order");
                acc = acc.add(&t).expect("shared order");
            }
        }
        acc
    })?;
    let det_g = g.det()?;
    let d0 = det_g.constant_term();
    let normalized = det_g.scale(&d0.recip().ok_or_else(|| Error::NotPositive("det g(0) = 0".into()))?);
    let logdet = normalized.log()?;
    let ricci_logdet = MatrixJet::from_fn(n, n, |k, l| logdet.diff_hol(k).diff_anti(l).neg())?;
    if ricci_logdet != ricci {
        return Err(Error::Assertion("Ricci contraction disagrees with -∂∂̄ log det g".into()));
    }
    let mut scalar = BidegreeJet::zero(n, low);
    for k in 0..n {
        for l in 0..n {
            scalar = scalar.add(&ginv_low.get(l, k).mul(ricci.get(k, l))?)?;
        }
    }
    Ok(CurvatureData { n, metric: g, inverse_metric: ginv, riemann, ricci, scalar, det_g })
}

/// `ρ/2`, the expected first TYZ coefficient for a trivial twisting bundle.
pub fn a1_reference(c: &CurvatureData) -> BidegreeJet {
    c.scalar.scale_rat(&Rat::new(1, 2))
}

/// Scalar curvature at the base point.
pub fn scalar_at_origin(p: &PotentialJet) -> Result<Cq> {
    let lowered = PotentialJet::new(p.phi().truncate(4.min(p.order()))?)?;
    Ok(curvature_data(&lowered)?.scalar.constant_term())
}
