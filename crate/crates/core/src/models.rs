//! Built-in geometries: Fock space, Fubini–Study, a quartic perturbation of
//! Fock, user polynomials and seeded random polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dd::{Dd, DdC};
use crate::error::{Error, Result};
use crate::geometry::PotentialJet;
use crate::jet::{BidegreeJet, Mono};
use crate::matrix_jet::MatrixJet;
use crate::multiindex::MultiIndex;
use crate::normal_forms::{LocalData, LocalModel};
use crate::rational::{Cq, Rat};

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// `φ = |z|²`.
    Fock,
    /// `φ = Σ log(1 + |z_i|²)`, a product of projective lines.
    FubiniStudy,
    /// `φ = |z|² - ε|z|⁴`.
    PerturbedFock { eps: Rat },
    /// Polynomial potential `Σ c_{PQ} z^P z̄^Q`; treated as exact.
    User { terms: Vec<(MultiIndex, MultiIndex, Cq)> },
    /// Seeded random polynomial potential and bundle metric.
    Random { seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub r: usize,
    pub order: u32,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n: usize, r: usize, order: u32) -> Self {
        ModelSpec { kind, n, r, order }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Fock => "fock",
            ModelKind::FubiniStudy => "fubini_study",
            ModelKind::PerturbedFock { .. } => "perturbed_fock",
            ModelKind::User { .. } => "user",
            ModelKind::Random { .. } => "random",
        }
    }

    /// True when the potential, volume and bundle metric depend only on the `|z_i|²`.
    pub fn is_torus_invariant(&self) -> bool {
        match &self.kind {
            ModelKind::Fock | ModelKind::FubiniStudy | ModelKind::PerturbedFock { .. } => true,
            ModelKind::User { terms } => terms.iter().all(|(p, q, _)| p == q),
            ModelKind::Random { .. } => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::jet::MAX_VARS {
            return Err(Error::InvalidParameter(format!("n must lie in 1..={}", crate::jet::MAX_VARS)));
        }
        if self.r == 0 {
            return Err(Error::InvalidParameter("bundle rank must be positive".into()));
        }
        if self.order < 2 {
            return Err(Error::InvalidParameter("jet order must be at least 2".into()));
        }
        match &self.kind {
            ModelKind::PerturbedFock { eps } => {
                if eps.abs() >= Rat::new(1, 4) {
                    return Err(Error::InvalidParameter(format!("perturbed_fock needs |ε| < 1/4, got {eps}")));
                }
            }
            ModelKind::User { terms } => {
                for (p, q, c) in terms {
                    if p.n() != self.n || q.n() != self.n {
                        return Err(Error::DimensionMismatch(format!("user term {p}{q} has the wrong dimension")));
                    }
                    let mirror = terms.iter().find(|(p2, q2, _)| p2 == q && q2 == p).map(|t| t.2.clone());
                    if mirror != Some(c.conj()) {
                        return Err(Error::InvalidParameter(format!("user potential is not Hermitian at {p}{q}")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Potential and bundle metric jets at the origin.
    pub fn potential(&self) -> Result<(PotentialJet, MatrixJet)> {
        let data = self.local_data(&vec![Cq::zero(); self.n], self.order)?;
        Ok((PotentialJet::new(data.phi)?, data.h))
    }

    /// Closed-form evaluation `(φ, det g, H)` at a point, for the oracle.
    pub fn evaluator(&self) -> Result<Evaluator> {
        self.validate()?;
        let n = self.n;
        let r = self.r;
        Ok(match &self.kind {
            ModelKind::Fock => Evaluator::Fock,
            ModelKind::FubiniStudy => Evaluator::FubiniStudy,
            ModelKind::PerturbedFock { eps } => Evaluator::Perturbed { eps: Dd::from_rat(eps), n },
            ModelKind::User { .. } | ModelKind::Random { .. } => {
                let (phi, h) = self.polynomial_data()?;
                let pot = PotentialJet::new(phi.clone())?;
                let g = crate::geometry::metric_from_potential(&pot)?;
                // g is an exact polynomial; lift it so the determinant is not truncated
                let full = (g.order() * n as u32).max(g.order());
                let g = MatrixJet::from_fn(n, n, |i, j| g.get(i, j).with_order(full))?;
                let det = g.det()?;
                // Pure (anti)holomorphic terms are pluriharmonic: dropping them is a change
                // of frame that fixes the origin, and keeps the weight centred there.
                let phi = phi.filter(|k| !k.is_pure_hol() && !k.is_pure_anti());
                Evaluator::Polynomial {
                    phi: Poly::from_jet(&phi),
                    det: Poly::from_jet(&det),
                    h: (0..r * r).map(|k| Poly::from_jet(h.get(k / r, k % r))).collect(),
                    r,
                }
            }
        })
    }

    fn polynomial_data(&self) -> Result<(BidegreeJet, MatrixJet)> {
        let (n, r, order) = (self.n, self.r, self.order);
        match &self.kind {
            ModelKind::User { terms } => {
                let phi = BidegreeJet::from_terms(n, order, terms.iter().map(|(p, q, c)| (Mono::from_indices(p, q), c.clone())));
                if terms.iter().any(|(p, q, _)| p.degree() + q.degree() > order) {
                    return Err(Error::InvalidParameter("user potential has terms beyond the declared jet order".into()));
                }
                Ok((phi, MatrixJet::identity(r, n, order)))
            }
            ModelKind::Random { seed } => Ok(random_potential(*seed, n, r, order)),
            _ => unreachable!("closed-form model"),
        }
    }
}

impl LocalModel for ModelSpec {
    fn n(&self) -> usize {
        self.n
    }

    fn r(&self) -> usize {
        self.r
    }

    /// Exact expansion at `t`, translated so the base point is the origin and
    /// `φ(0) = 0`.
    fn local_data(&self, t: &[Cq], order: u32) -> Result<LocalData> {
        self.validate()?;
        let n = self.n;
        if t.len() != n {
            return Err(Error::DimensionMismatch(format!("base point has {} coordinates, model has {n}", t.len())));
        }
        let shifted_norm = |i: usize| -> BidegreeJet {
            // |z_i + t_i|² - |t_i|²
            let zi = BidegreeJet::z(n, order, i);
            let zb = BidegreeJet::zbar(n, order, i);
            let zz = zi.mul(&zb).expect("shared order");
            zz.add(&zi.scale(&t[i].conj())).and_then(|x| x.add(&zb.scale(&t[i]))).expect("shared order")
        };
        let identity = MatrixJet::identity(self.r, n, order);
        let (phi, h) = match &self.kind {
            ModelKind::Fock => {
                let mut phi = BidegreeJet::zero(n, order);
                for i in 0..n {
                    phi = phi.add(&shifted_norm(i))?;
                }
                (phi, identity)
            }
            ModelKind::FubiniStudy => {
                let mut phi = BidegreeJet::zero(n, order);
                for i in 0..n {
                    // log(1 + |z+t|²) - log(1 + |t|²) = log(1 + w/(1+|t|²))
                    let denom = (&Cq::one() + &Cq::real(t[i].norm_sqr())).recip().expect("positive");
                    let w = shifted_norm(i).scale(&denom);
                    phi = phi.add(&BidegreeJet::one(n, order).add(&w)?.log()?)?;
                }
                (phi, identity)
            }
            ModelKind::PerturbedFock { eps } => {
                let mut w = BidegreeJet::zero(n, order);
                for i in 0..n {
                    w = w.add(&shifted_norm(i))?;
                }
                // U = |t|² + w, φ = U - εU² - (|t|² - ε|t|⁴)
                let t2 = Cq::real(t.iter().map(|x| x.norm_sqr()).fold(Rat::zero(), |a, b| &a + &b));
                let cross = w.scale(&(&t2 * &Cq::from_int(2)));
                let quad = w.mul(&w)?.add(&cross)?;
                (w.sub(&quad.scale_rat(eps))?, identity)
            }
            ModelKind::User { .. } | ModelKind::Random { .. } => {
                let (phi, h) = self.polynomial_data()?;
                let phi = phi.shift(t);
                let c = phi.constant_term();
                let phi = phi.sub(&BidegreeJet::constant(n, phi.order(), c))?;
                let h = h.shift(t);
                (phi.truncate(order.min(phi.order()))?.with_order(order), h.truncate(order.min(h.order()))?.with_order(order))
            }
        };
        Ok(LocalData { base_point: t.to_vec(), phi, h })
    }
}

/// Seeded random polynomial potential with `g(0) = diag(s_i²)`,
/// `s_i ∈ {1, 2, 3/2}`, plus pure-holomorphic frame terms. For `r > 1` the
/// bundle metric is a random Hermitian polynomial with `H(0) = I`; for
/// `r = 1` the twist is trivial.
pub fn random_potential(seed: u64, n: usize, r: usize, order: u32) -> (BidegreeJet, MatrixJet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scales = [Rat::one(), Rat::from_int(2), Rat::new(3, 2)];
    let mut phi = BidegreeJet::zero(n, order);
    for i in 0..n {
        let s = &scales[rng.gen_range(0..scales.len())];
        phi.add_term(Mono::hol_var(i).mul(Mono::anti_var(i)), &Cq::real(s * s));
    }
    let coeff = |rng: &mut ChaCha8Rng, complex: bool| -> Cq {
        let den = rng.gen_range(2..=12);
        let re = Rat::new(rng.gen_range(-3..=3), den);
        let im = if complex { Rat::new(rng.gen_range(-3..=3), den) } else { Rat::zero() };
        Cq::new(re, im)
    };
    for d in 3..=order {
        let count = if d <= 6 { 3 } else { 2 };
        for _ in 0..count {
            let hol = rng.gen_range(1..d);
            let p = random_index(&mut rng, n, hol);
            let q = random_index(&mut rng, n, d - hol);
            let diag = p == q;
            let c = coeff(&mut rng, !diag);
            if c.is_zero() {
                continue;
            }
            phi.add_term(Mono::from_indices(&p, &q), &c);
            if !diag {
                phi.add_term(Mono::from_indices(&q, &p), &c.conj());
            }
        }
    }
    for d in 1..=order.min(4) {
        let p = random_index(&mut rng, n, d);
        let c = coeff(&mut rng, true);
        let zero = MultiIndex::zero(n);
        phi.add_term(Mono::from_indices(&p, &zero), &c);
        phi.add_term(Mono::from_indices(&zero, &p), &c.conj());
    }
    let mut h = MatrixJet::identity(r, n, order);
    if r == 1 {
        return (phi, h);
    }
    for i in 0..r {
        for j in i..r {
            for _ in 0..2 {
                let d = rng.gen_range(1..=order.min(3));
                let hol = rng.gen_range(0..=d);
                let p = random_index(&mut rng, n, hol);
                let q = random_index(&mut rng, n, d - hol);
                let c = coeff(&mut rng, i != j || p != q);
                let k = Mono::from_indices(&p, &q);
                let mut hij = h.get(i, j).clone();
                hij.add_term(k, &c);
                h.set(i, j, hij).expect("shared order");
                if i == j && p == q {
                    continue;
                }
                let mut hji = h.get(j, i).clone();
                hji.add_term(k.conj(), &c.conj());
                h.set(j, i, hji).expect("shared order");
            }
        }
    }
    (phi, h)
}

fn random_index(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> MultiIndex {
    let mut e = vec![0u32; n];
    for _ in 0..degree {
        e[rng.gen_range(0..n)] += 1;
    }
    MultiIndex::new(e)
}

/// A polynomial in `z, z̄` ready for double-double evaluation.
#[derive(Clone, Debug)]
pub struct Poly {
    terms: Vec<(Vec<u32>, Vec<u32>, DdC)>,
}

impl Poly {
    pub fn from_jet(j: &BidegreeJet) -> Self {
        let n = j.n();
        Poly {
            terms: j
                .terms()
                .map(|(k, c)| ((0..n).map(|i| k.hol(i)).collect(), (0..n).map(|i| k.anti(i)).collect(), DdC::from_cq(c)))
                .collect(),
        }
    }

    pub fn eval(&self, z: &[DdC]) -> DdC {
        let mut acc = DdC::ZERO;
        for (p, q, c) in &self.terms {
            let mut v = *c;
            for (i, zi) in z.iter().enumerate() {
                if p[i] > 0 {
                    v = v * zi.powi(p[i]);
                }
                if q[i] > 0 {
                    v = v * zi.conj().powi(q[i]);
                }
            }
            acc += v;
        }
        acc
    }
}

/// Pointwise evaluation of potential, volume density and bundle metric.
///
/// For polynomial models the potential omits its pluriharmonic terms.
#[derive(Clone, Debug)]
pub enum Evaluator {
    Fock,
    FubiniStudy,
    Perturbed { eps: Dd, n: usize },
    Polynomial { phi: Poly, det: Poly, h: Vec<Poly>, r: usize },
}

/// Values at one point: `φ`, `det g`, and `H` row-major (`None` means `H = I`).
#[derive(Clone, Debug)]
pub struct PointValues {
    pub phi: Dd,
    pub det_g: Dd,
    pub h: Option<Vec<DdC>>,
}

impl Evaluator {
    pub fn eval(&self, z: &[DdC]) -> PointValues {
        match self {
            Evaluator::Fock => {
                let u = z.iter().fold(Dd::ZERO, |a, x| a + x.norm_sqr());
                PointValues { phi: u, det_g: Dd::ONE, h: None }
            }
            Evaluator::FubiniStudy => {
                let mut phi = Dd::ZERO;
                let mut det = Dd::ONE;
                for x in z {
                    let w = Dd::ONE + x.norm_sqr();
                    phi += w.ln();
                    det = det / w.sqr();
                }
                PointValues { phi, det_g: det, h: None }
            }
            Evaluator::Perturbed { eps, n } => {
                let u = z.iter().fold(Dd::ZERO, |a, x| a + x.norm_sqr());
                let phi = u - *eps * u.sqr();
                let a = Dd::ONE - (*eps * u).mul_f64(2.0);
                let b = Dd::ONE - (*eps * u).mul_f64(4.0);
                PointValues { phi, det_g: a.powi(*n as u32 - 1) * b, h: None }
            }
            Evaluator::Polynomial { phi, det, h, r } => {
                let hv: Vec<DdC> = h.iter().map(|p| p.eval(z)).collect();
                let is_identity = *r == 1 && hv[0] == DdC::ONE;
                PointValues { phi: phi.eval(z).re, det_g: det.eval(z).re, h: if is_identity { None } else { Some(hv) } }
            }
        }
    }
}
