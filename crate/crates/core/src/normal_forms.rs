//! K-coordinates and K-frames of finite order at a base point.
//!
//! All jets handed to this module are expanded about the base point, i.e. in
//! the variable `w = z - t`; translating the model to `t` is the job of the
//! [`LocalModel`] implementation.

use crate::error::{Error, Result};
use crate::geometry::{metric_from_potential, PotentialJet};
use crate::jet::{BidegreeJet, Mono};
use crate::matrix_jet::{cmat, CMat, MatrixJet};
use crate::multiindex::MultiIndex;
use crate::par::{self, Execution};
use crate::rational::{Cq, Rat};

/// Potential and twisting-bundle metric expanded about a base point.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub base_point: Vec<Cq>,
    /// `φ = -log a` with `φ(0) = 0`.
    pub phi: BidegreeJet,
    /// `H = (h_{ij̄})`, an `r x r` Hermitian matrix jet.
    pub h: MatrixJet,
}

impl LocalData {
    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn r(&self) -> usize {
        self.h.rows()
    }
}

/// Source of exact local data at arbitrary base points.
pub trait LocalModel: Sync {
    fn n(&self) -> usize;
    fn r(&self) -> usize;
    fn local_data(&self, t: &[Cq], order: u32) -> Result<LocalData>;
}

/// Holomorphic coordinate change `z' = z D + h(z) D^{-1}` with `h_k = ∂b₂/∂z̄_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    pub d: CMat,
    pub d_inv: CMat,
    /// Components of `∂b₂/∂z̄`.
    pub h: Vec<BidegreeJet>,
    pub b2: BidegreeJet,
    /// `z -> z'`, an exact polynomial map.
    pub forward: Vec<BidegreeJet>,
    /// `z' -> z`, truncated.
    pub inverse: Vec<BidegreeJet>,
}

impl CoordinateChange {
    pub fn is_identity(&self) -> bool {
        let n = self.d.len();
        cmat::is_identity(&self.d)
            && self.b2.is_zero()
            && self.forward.iter().enumerate().all(|(i, f)| *f == BidegreeJet::z(n, f.order(), i))
    }
}

/// Frame change `e_L(t) = f^{-1} e_L` with `f = √a(t) + ξ/√a(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFrame {
    pub sqrt_a0: Rat,
    pub xi: BidegreeJet,
    pub factor: BidegreeJet,
}

/// Frame change `e(t) = e (Q^{-1})^T` with `Q = K + B K^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleFrame {
    pub k: CMat,
    pub bp: MatrixJet,
    pub q: MatrixJet,
    pub q_inv: MatrixJet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameChange {
    pub base_point: Vec<Cq>,
    pub order: u32,
    pub coords: CoordinateChange,
    pub line: LineFrame,
    pub bundle: BundleFrame,
}

impl FrameChange {
    pub fn is_identity(&self) -> bool {
        self.coords.is_identity() && self.line.xi.is_zero() && self.line.sqrt_a0.is_one() && self.bundle.bp.entries().iter().all(|e| e.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct NormalizedChart {
    pub n: usize,
    pub r: usize,
    pub p: u32,
    pub base_point: Vec<Cq>,
    /// `-log a'` in the new coordinates and frame.
    pub potential: BidegreeJet,
    pub log_a: BidegreeJet,
    pub metric: MatrixJet,
    pub bundle_metric: MatrixJet,
    pub change: Option<FrameChange>,
}

impl NormalizedChart {
    /// Wrap raw data without normalizing; used to audit arbitrary charts.
    pub fn unnormalized(log_a: BidegreeJet, bundle_metric: MatrixJet, p: u32) -> Result<Self> {
        let n = log_a.n();
        let potential = log_a.neg();
        let metric = MatrixJet::from_fn(n, n, |a, b| potential.diff_hol(a).diff_anti(b))?;
        Ok(NormalizedChart {
            n,
            r: bundle_metric.rows(),
            p,
            base_point: vec![Cq::zero(); n],
            potential,
            log_a,
            metric,
            bundle_metric,
            change: None,
        })
    }

    /// `a'` as a jet.
    pub fn line_metric(&self) -> Result<BidegreeJet> {
        self.log_a.exp()
    }

    /// The chart's data seen as fresh input, for idempotence checks.
    pub fn as_local_data(&self) -> LocalData {
        LocalData { base_point: self.base_point.clone(), phi: self.potential.clone(), h: self.bundle_metric.clone() }
    }
}

fn hol_degree_range(j: &BidegreeJet, lo: u32, hi: u32) -> BidegreeJet {
    j.filter(|k| k.is_pure_hol() && (lo..=hi).contains(&k.degree()))
}

/// Solve `Φ(Ψ(z')) = z'` for `Φ(z) = z D + h(z) D^{-1}` degree by degree.
///
/// `h` starts in degree 2, so one fixed-point step carried to order `k` fixes
/// degree `k` of `Ψ` once degrees below `k` are settled.
fn invert_map(d_inv: &CMat, h: &[BidegreeJet], n: usize, order: u32) -> Result<Vec<BidegreeJet>> {
    let lin = |v: &[BidegreeJet], m: &CMat, ord: u32| -> Vec<BidegreeJet> {
        (0..n)
            .map(|j| {
                let mut acc = BidegreeJet::zero(n, ord);
                for (i, vi) in v.iter().enumerate() {
                    if !m[i][j].is_zero() {
                        acc = acc.add(&vi.scale(&m[i][j])).expect("shared order");
                    }
                }
                acc
            })
            .collect()
    };
    let zs: Vec<BidegreeJet> = (0..n).map(|i| BidegreeJet::z(n, order, i)).collect();
    let mut psi = lin(&zs, d_inv, order);
    for k in 2..=order {
        let psi_k: Vec<BidegreeJet> = psi.iter().map(|x| x.with_order(k)).collect();
        let h_psi = h.iter().map(|hk| hk.with_order(k).compose_holomorphic(&psi_k)).collect::<Result<Vec<_>>>()?;
        let corr = lin(&h_psi, d_inv, k);
        let rhs: Vec<BidegreeJet> = zs.iter().zip(&corr).map(|(z, c)| z.with_order(k).sub(c).expect("shared order")).collect();
        psi = lin(&rhs, d_inv, k);
    }
    Ok(psi.into_iter().map(|x| x.with_order(order)).collect())
}

/// K-coordinates of order `p` for a metric matrix jet expanded about the base point.
///
/// Returns the coordinate change and the metric in the new coordinates, pulled
/// back through the Jacobian.
pub fn k_coordinates(g: &MatrixJet, p: u32) -> Result<(CoordinateChange, MatrixJet)> {
    let change = k_coordinate_change(g, p)?;
    let n = g.rows();
    let go = g.order();
    let inverse = &change.inverse;
    let jac = MatrixJet::from_fn(n, n, |a, i| inverse[i].diff_hol(a).with_order(go))?;
    let g_psi = g.compose_holomorphic(&inverse.iter().map(|x| x.with_order(go.max(1))).collect::<Vec<_>>())?;
    let g_new = jac.mul(&g_psi)?.mul(&jac.conj_transpose())?;
    Ok((change, g_new))
}

/// The coordinate change of [`k_coordinates`] without transforming the metric.
pub fn k_coordinate_change(g: &MatrixJet, p: u32) -> Result<CoordinateChange> {
    let n = g.rows();
    if !g.is_hermitian() {
        return Err(Error::NotHermitian("metric".into()));
    }
    if p < 2 {
        return Err(Error::InvalidParameter("normalization order must be at least 2".into()));
    }
    if g.order() + 1 < p {
        return Err(Error::InsufficientOrder { needed: p - 1, have: g.order(), context: "metric jet for K-coordinates".into() });
    }
    let d = cmat::exact_sqrt(&g.constant_matrix())?;
    let d_inv = cmat::inverse(&d).expect("positive root");
    let work = (g.order() + 2).max(p);
    let h: Vec<BidegreeJet> = (0..n)
        .map(|k| {
            let mut acc = BidegreeJet::zero(n, work);
            for i in 0..n {
                let hol = hol_degree_range(g.get(i, k), 1, p - 1).with_order(work);
                for (key, c) in hol.terms() {
                    let deg = key.degree() + 1;
                    acc.add_term(key.mul(Mono::hol_var(i)), &c.scale(&Rat::new(1, deg as i64)));
                }
            }
            acc
        })
        .collect();
    let b2 = {
        let mut acc = BidegreeJet::zero(n, p + 1);
        for (k, hk) in h.iter().enumerate() {
            for (key, c) in hk.terms() {
                acc.add_term(key.mul(Mono::anti_var(k)), c);
            }
        }
        acc
    };
    let forward: Vec<BidegreeJet> = (0..n)
        .map(|j| {
            let mut acc = BidegreeJet::zero(n, work);
            for i in 0..n {
                acc.add_term(Mono::hol_var(i), &d[i][j]);
            }
            for (k, hk) in h.iter().enumerate() {
                acc = acc.add(&hk.scale(&d_inv[k][j])).expect("shared order");
            }
            acc
        })
        .collect();
    let inverse = invert_map(&d_inv, &h, n, work)?;
    Ok(CoordinateChange { d, d_inv, h, b2, forward, inverse })
}

/// The same metric computed through the potential: `∂∂̄ (φ ∘ Ψ)`.
pub fn transformed_metric_via_potential(phi: &BidegreeJet, change: &CoordinateChange) -> Result<MatrixJet> {
    let n = phi.n();
    let map: Vec<BidegreeJet> = change.inverse.iter().map(|x| x.with_order(phi.order())).collect();
    let composed = phi.compose_holomorphic(&map)?;
    MatrixJet::from_fn(n, n, |a, b| composed.diff_hol(a).diff_anti(b))
}

fn exact_sqrt_positive(x: &Cq, what: &str) -> Result<Rat> {
    if !x.is_real() || x.re.signum() <= 0 {
        return Err(Error::NotPositive(format!("{what} at the base point")));
    }
    x.re.sqrt_exact().ok_or_else(|| Error::IrrationalSqrt(format!("{what} at the base point")))
}

/// K-frame of `L` of order `p`; returns the frame data and `a' = a |f|^{-2}`.
pub fn k_frame_line(a: &BidegreeJet, p: u32) -> Result<(LineFrame, BidegreeJet)> {
    let sqrt_a0 = exact_sqrt_positive(&a.constant_term(), "line metric")?;
    let xi = hol_degree_range(a, 1, p);
    let s = Cq::real(sqrt_a0.clone());
    let s_inv = s.recip().expect("positive");
    let factor = BidegreeJet::constant(a.n(), a.order(), s).add(&xi.scale(&s_inv))?;
    let denom = factor.mul(&factor.conj())?;
    let a_new = a.mul(&denom.invert()?)?;
    Ok((LineFrame { sqrt_a0, xi, factor }, a_new))
}

/// K-frame of `E` of order `p`; returns the frame data and `H' = Q^{-1} H Q^{-*}`.
pub fn k_frame_bundle(h: &MatrixJet, p: u32) -> Result<(BundleFrame, MatrixJet)> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("bundle metric".into()));
    }
    let k = cmat::exact_sqrt(&h.constant_matrix())?;
    let k_inv = cmat::inverse(&k).expect("positive root");
    let bp = h.map(|e| hol_degree_range(e, 1, p));
    let q = MatrixJet::from_constant(h.n(), h.order(), &k).add(&bp.right_const(&k_inv)?)?;
    let q_inv = q.inverse()?;
    let h_new = q_inv.mul(h)?.mul(&q_inv.conj_transpose())?;
    Ok((BundleFrame { k, bp, q, q_inv }, h_new))
}

/// Run the full construction on local data.
pub fn normalize(data: &LocalData, p: u32) -> Result<NormalizedChart> {
    let n = data.n();
    let pot = PotentialJet::new(data.phi.clone())?;
    let order = pot.order();
    if order < p + 1 {
        return Err(Error::InsufficientOrder { needed: p + 1, have: order, context: "potential jet for normalization".into() });
    }
    let g = metric_from_potential(&pot)?;
    let coords = k_coordinate_change(&g, p)?;
    let map: Vec<BidegreeJet> = coords.inverse.iter().map(|x| x.with_order(order)).collect();
    let phi1 = data.phi.compose_holomorphic(&map)?;
    let metric = MatrixJet::from_fn(n, n, |a, b| phi1.diff_hol(a).diff_anti(b).with_order(g.order()))?;

    // Line frame through the potential: with a = e^{-φ₁} and a(0) = 1, the
    // holomorphic part of a is exp(-φ₁|_{z̄=0}).
    let phi_hol = phi1.hol_part();
    let a_hol = phi_hol.neg().exp()?;
    let factor = hol_degree_range(&a_hol, 0, p);
    let xi = hol_degree_range(&a_hol, 1, p);
    let log_f = factor.log()?;
    let log_a = phi1.neg().sub(&log_f)?.sub(&log_f.conj())?;
    let line = LineFrame { sqrt_a0: Rat::one(), xi, factor };

    let h_order = data.h.order().min(order);
    let h_map: Vec<BidegreeJet> = coords.inverse.iter().map(|x| x.with_order(order.max(h_order))).collect();
    let h_psi = data.h.truncate(h_order)?.compose_holomorphic(&h_map)?;
    let (bundle, bundle_metric) = k_frame_bundle(&h_psi, p)?;

    Ok(NormalizedChart {
        n,
        r: data.r(),
        p,
        base_point: data.base_point.clone(),
        potential: log_a.neg(),
        log_a,
        metric,
        bundle_metric,
        change: Some(FrameChange { base_point: data.base_point.clone(), order: p, coords, line, bundle }),
    })
}

/// Normalize the model at every grid point.
pub fn family_charts(model: &dyn LocalModel, grid: &[Vec<Cq>], order: u32, p: u32, exec: Execution) -> Vec<Result<NormalizedChart>> {
    par::map(exec, grid, |t| normalize(&model.local_data(t, order)?, p))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    /// The value at the base point is not the identity.
    Constant,
    /// A pure-holomorphic Taylor coefficient `z^P` is nonzero.
    PureHolomorphic(MultiIndex),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub object: String,
    pub condition: Condition,
    pub value: Cq,
}

fn check_hol(object: String, j: &BidegreeJet, hi: u32, out: &mut Vec<Violation>) {
    let hi = hi.min(j.order());
    for (k, c) in j.terms() {
        if k.is_pure_hol() && k.degree() >= 1 && k.degree() <= hi {
            out.push(Violation { object: object.clone(), condition: Condition::PureHolomorphic(k.hol_index(j.n())), value: c.clone() });
        }
    }
}

/// Exact K-normality audit. Checks `g(t) = I`, `a(t) = 1`, `H(t) = I`, pure
/// holomorphic terms of `g` up to degree `p - 1` and of `a`, `H` up to degree `p`.
pub fn verify_k_normal(chart: &NormalizedChart, p: u32) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = chart.n;
    for (name, m, hi) in [("g", &chart.metric, p.saturating_sub(1)), ("h", &chart.bundle_metric, p)] {
        let c = m.constant_matrix();
        let k = m.rows();
        let id = cmat::identity(k);
        for i in 0..k {
            for j in 0..k {
                if c[i][j] != id[i][j] {
                    out.push(Violation { object: format!("{name}[{}{}]", i + 1, j + 1), condition: Condition::Constant, value: c[i][j].clone() });
                }
                check_hol(format!("{name}[{}{}]", i + 1, j + 1), m.get(i, j), hi, &mut out);
            }
        }
    }
    let la0 = chart.log_a.constant_term();
    if !la0.is_zero() {
        out.push(Violation { object: "a".into(), condition: Condition::Constant, value: la0 });
    }
    match chart.log_a.hol_part().sub(&BidegreeJet::constant(n, chart.log_a.order(), chart.log_a.constant_term())).and_then(|x| x.exp()) {
        Ok(a_hol) => check_hol("a".into(), &a_hol, p, &mut out),
        Err(e) => out.push(Violation { object: format!("a ({e})"), condition: Condition::Constant, value: Cq::zero() }),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64, d: i64) -> Cq {
        Cq::frac(n, d)
    }

    fn fs_phi(order: u32) -> BidegreeJet {
        BidegreeJet::one(1, order).add(&BidegreeJet::norm_sqr(1, order)).unwrap().log().unwrap()
    }

    fn trivial_h(n: usize, r: usize, order: u32) -> MatrixJet {
        MatrixJet::identity(r, n, order)
    }

    fn data(phi: BidegreeJet, h: MatrixJet) -> LocalData {
        LocalData { base_point: vec![Cq::zero(); phi.n()], phi, h }
    }

    fn skewed_phi() -> BidegreeJet {
        let terms = [
            (Mono::new(&[1], &[1]), c(1, 1)),
            (Mono::new(&[3], &[1]), c(1, 3)),
            (Mono::new(&[1], &[3]), c(1, 3)),
            (Mono::new(&[2], &[1]), Cq::new(Rat::new(1, 2), Rat::new(1, 4))),
            (Mono::new(&[1], &[2]), Cq::new(Rat::new(1, 2), Rat::new(-1, 4))),
            (Mono::new(&[2], &[0]), c(1, 5)),
            (Mono::new(&[0], &[2]), c(1, 5)),
            (Mono::new(&[2], &[2]), c(-1, 6)),
        ];
        BidegreeJet::from_terms(1, 8, terms)
    }

    #[test]
    fn flat_is_fixed() {
        let d = data(BidegreeJet::norm_sqr(2, 6), trivial_h(2, 1, 6));
        let chart = normalize(&d, 5).unwrap();
        assert!(chart.change.as_ref().unwrap().is_identity());
        assert_eq!(chart.metric, MatrixJet::identity(2, 2, 4));
        assert!(verify_k_normal(&chart, 5).is_empty());
    }

    #[test]
    fn fubini_study_is_already_normal() {
        let g = metric_from_potential(&PotentialJet::new(fs_phi(8)).unwrap()).unwrap();
        let (change, g_new) = k_coordinates(&g, 6).unwrap();
        assert!(change.is_identity());
        assert_eq!(g_new, g);
        let chart = normalize(&data(fs_phi(8), trivial_h(1, 1, 8)), 7).unwrap();
        assert!(verify_k_normal(&chart, 7).is_empty());
    }

    #[test]
    fn cubic_term_is_normalized() {
        let chart = normalize(&data(skewed_phi(), trivial_h(1, 1, 8)), 6).unwrap();
        assert!(verify_k_normal(&chart, 6).is_empty(), "{:?}", verify_k_normal(&chart, 6));
        let change = chart.change.as_ref().unwrap();
        assert!(!change.coords.is_identity());
        let via_potential = transformed_metric_via_potential(&skewed_phi(), &change.coords).unwrap();
        assert_eq!(via_potential, chart.metric);
        let direct = metric_from_potential(&PotentialJet::new(chart.potential.clone()).unwrap()).unwrap();
        assert_eq!(direct, chart.metric);
    }

    #[test]
    fn jacobian_and_potential_routes_agree() {
        use crate::models::{ModelKind, ModelSpec};
        let spec = ModelSpec::new(ModelKind::Random { seed: 3 }, 2, 1, 8);
        let d = spec.local_data(&[Cq::zero(), Cq::zero()], 8).unwrap();
        let chart = normalize(&d, 6).unwrap();
        let g = metric_from_potential(&PotentialJet::new(d.phi.clone()).unwrap()).unwrap();
        let (change, g_new) = k_coordinates(&g, 6).unwrap();
        assert!(!change.is_identity());
        assert_eq!(g_new, chart.metric);
    }

    #[test]
    fn forward_and_inverse_maps_compose_to_identity() {
        let g = metric_from_potential(&PotentialJet::new(skewed_phi()).unwrap()).unwrap();
        let (change, _) = k_coordinates(&g, 6).unwrap();
        let order = change.inverse[0].order();
        let fwd: Vec<_> = change.forward.iter().map(|f| f.with_order(order)).collect();
        let round = fwd[0].compose_holomorphic(&change.inverse).unwrap();
        assert_eq!(round, BidegreeJet::z(1, order, 0));
    }

    #[test]
    fn line_frame_examples() {
        let u = BidegreeJet::norm_sqr(1, 6);
        let gauss = u.neg().exp().unwrap();
        let (frame, a1) = k_frame_line(&gauss, 4).unwrap();
        assert_eq!(frame.factor, BidegreeJet::one(1, 6));
        assert_eq!(a1, gauss);
        let one_plus_z = BidegreeJet::one(1, 6).add(&BidegreeJet::z(1, 6, 0)).unwrap();
        let a = one_plus_z.mul(&one_plus_z.conj()).unwrap().mul(&gauss).unwrap();
        let (_, a1) = k_frame_line(&a, 4).unwrap();
        assert_eq!(a1.truncate(4).unwrap(), gauss.truncate(4).unwrap());
        assert_eq!(a1.constant_term(), Cq::one());
    }

    #[test]
    fn line_frame_routes_agree() {
        let chart = normalize(&data(skewed_phi(), trivial_h(1, 1, 8)), 6).unwrap();
        let change = chart.change.as_ref().unwrap();
        let phi1 = skewed_phi().compose_holomorphic(&change.coords.inverse.iter().map(|x| x.with_order(8)).collect::<Vec<_>>()).unwrap();
        let a = phi1.neg().exp().unwrap();
        let (frame, a1) = k_frame_line(&a, 6).unwrap();
        assert_eq!(frame.factor, change.line.factor);
        assert_eq!(a1, chart.line_metric().unwrap());
    }

    #[test]
    fn bundle_frame_examples() {
        let id = trivial_h(1, 2, 4);
        let (frame, h1) = k_frame_bundle(&id, 3).unwrap();
        assert_eq!(frame.q, id);
        assert_eq!(h1, id);
        let z = BidegreeJet::z(1, 4, 0);
        let mut h = MatrixJet::identity(2, 1, 4);
        h.set(0, 1, z.clone()).unwrap();
        h.set(1, 0, z.conj()).unwrap();
        let (_, h1) = k_frame_bundle(&h, 3).unwrap();
        assert!(h1.is_hermitian());
        for e in h1.entries() {
            assert!(e.terms().all(|(k, _)| !(k.is_pure_hol() && k.degree() >= 1 && k.degree() <= 3)));
        }
    }

    #[test]
    fn rank_one_bundle_matches_line_frame() {
        let u = BidegreeJet::norm_sqr(1, 5);
        let a = BidegreeJet::one(1, 5)
            .add(&BidegreeJet::z(1, 5, 0).scale(&c(1, 2)))
            .unwrap()
            .add(&BidegreeJet::zbar(1, 5, 0).scale(&c(1, 2)))
            .unwrap()
            .add(&u.scale(&c(1, 3)))
            .unwrap();
        let (_, a1) = k_frame_line(&a, 4).unwrap();
        let (_, h1) = k_frame_bundle(&MatrixJet::new(1, 1, vec![a.clone()]).unwrap(), 4).unwrap();
        assert_eq!(h1.get(0, 0), &a1);
    }

    #[test]
    fn unnormalized_chart_flags_pure_term() {
        let la = BidegreeJet::norm_sqr(1, 4).neg().add(&BidegreeJet::z(1, 4, 0).pow(2)).unwrap();
        let chart = NormalizedChart::unnormalized(la, trivial_h(1, 1, 4), 4).unwrap();
        let v = verify_k_normal(&chart, 4);
        assert!(v.iter().any(|x| x.object == "a" && x.condition == Condition::PureHolomorphic(MultiIndex::new(vec![2]))));
    }

    #[test]
    fn idempotent_and_monotone() {
        let mut h = MatrixJet::identity(2, 1, 9);
        let z = BidegreeJet::z(1, 9, 0);
        h.set(0, 1, z.scale(&c(1, 2))).unwrap();
        h.set(1, 0, z.conj().scale(&c(1, 2))).unwrap();
        let phi = skewed_phi().with_order(9);
        let chart = normalize(&data(phi, h), 7).unwrap();
        assert!(verify_k_normal(&chart, 7).is_empty());
        assert!(verify_k_normal(&chart, 5).is_empty());
        let again = normalize(&chart.as_local_data(), 7).unwrap();
        assert!(again.change.as_ref().unwrap().is_identity());
    }

    #[test]
    fn irrational_root_is_rejected() {
        let phi = BidegreeJet::norm_sqr(1, 6).scale(&c(2, 1));
        assert!(matches!(normalize(&data(phi, trivial_h(1, 1, 6)), 4), Err(Error::IrrationalSqrt(_))));
    }
}
