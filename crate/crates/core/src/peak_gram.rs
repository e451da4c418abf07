//! Peak-section Gram matrices as asymptotic series in `m`, their Neumann
//! inversion, and the resulting expansion of the Bergman density at the base
//! point.
//!
//! Sections are the local models `z^P e_j` with `|P| ≤ s`, ordered by
//! [`enumerate_sections`]. With `a = e^{-|z|²+ζ}` and `ξ_{ij} = det g · H_{ij}`
//! in K-normal form,
//!
//! ```text
//! (z^P e_i, z^Q e_j) = Σ_k m^k/k! ∫ z^P z̄^Q ζ^k ξ_{ij} e^{-m|z|²} dV₀,
//! ```
//!
//! and each monomial `z^I z̄^J` of `ζ^k ξ_{ij}/k!` with `P+I = Q+J` contributes
//! `(P+I)! m^{k-n-|P+I|}` times its coefficient.
//!
//! Entries of the normalized matrix `A = I - λGλ` involve `√(P!Q!)`. To stay
//! in rational arithmetic the block matrix stores `Ã_ab = √(w_a w_b) A_ab`
//! with `w = P!`; products become `(X⋆Y)_ac = Σ_b X_ab Y_bc / w_b`.

use num::BigInt;

use crate::error::{Error, Result};
use crate::geometry::{scalar_at_origin, PotentialJet};
use crate::jet::{BidegreeJet, Mono};
use crate::matrix_jet::CMat;
use crate::multiindex::{count_of_degree, count_up_to, enumerate_sections, MultiIndex, SectionIndex};
use crate::normal_forms::NormalizedChart;
use crate::par::{self, Execution};
use crate::rational::{factorial, Cq, Rat};
use crate::series::AsymptoticSeries;

/// Block sizes `δ_0..δ_s`, the tail size `δ_{s+1}`, and `k = Σ δ_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSizes {
    pub deltas: Vec<usize>,
    pub tail: usize,
    pub k: usize,
    /// `k ≤ 2 r sⁿ`, checked for `s ≥ 2` and vacuous otherwise.
    pub bound_ok: bool,
}

pub fn block_sizes(n: usize, r: usize, s: u32) -> BlockSizes {
    let deltas: Vec<usize> = (0..=s).map(|a| count_of_degree(n, r, a)).collect();
    let k = deltas.iter().sum();
    let bound_ok = s < 2 || (k as f64) <= 2.0 * r as f64 * (s as f64).powi(n as i32);
    BlockSizes { deltas, tail: count_up_to(n, r, s), k, bound_ok }
}

/// `ζ = log a + |z|²` of a normalized chart, truncated at the chart order.
pub fn zeta_from_chart(chart: &NormalizedChart) -> Result<BidegreeJet> {
    let n = chart.n;
    let p = chart.p.min(chart.log_a.order());
    let zeta = chart.log_a.add(&BidegreeJet::norm_sqr(n, chart.log_a.order()))?.truncate(p)?;
    for (k, c) in zeta.terms() {
        if k.hol_degree() < 2 || k.anti_degree() < 2 {
            return Err(Error::Regularity(format!("ζ has a term {c}·{k:?} with holomorphic or antiholomorphic degree below 2")));
        }
    }
    Ok(zeta)
}

/// `ζ^k ξ / k!` for `k = 0..=depth`, each carried to degree `2(depth + k)`.
fn kernel_terms(zeta: &BidegreeJet, xi: &BidegreeJet, depth: u32) -> Result<Vec<BidegreeJet>> {
    let zeta_deg = 2 * depth + 2;
    if zeta.order() < zeta_deg {
        return Err(Error::InsufficientOrder { needed: zeta_deg, have: zeta.order(), context: "ζ for the Gram expansion".into() });
    }
    if xi.order() < 2 * depth {
        return Err(Error::InsufficientOrder { needed: 2 * depth, have: xi.order(), context: "det g · H for the Gram expansion".into() });
    }
    let zeta = zeta.truncate(zeta_deg)?;
    let xi = xi.truncate(2 * depth)?;
    let mut out = vec![xi.clone()];
    let mut power = BidegreeJet::one(zeta.n(), 2 * depth);
    for k in 1..=depth {
        let target = 2 * (depth + k);
        power = power.with_order(2 * (depth + k - 1)).mul_to(&zeta, target)?;
        let kf = Rat::from_bigint(factorial(k));
        out.push(power.mul_to(&xi, target)?.scale_rat(&kf.recip().expect("k! > 0")));
    }
    Ok(out)
}

/// Scaled entry `m^{n+(|P|+|Q|)/2} (z^P e_i, z^Q e_j)` as a series of relative depth `depth`.
fn scaled_entry(kernel: &[BidegreeJet], p: &MultiIndex, q: &MultiIndex, depth: u32) -> AsymptoticSeries {
    let floor = -(2 * depth as i32 + 1);
    let mut out = AsymptoticSeries::unknown(floor);
    for (k, t) in kernel.iter().enumerate() {
        for (mono, c) in t.terms() {
            let n = p.n();
            let i = mono.hol_index(n);
            let j = mono.anti_index(n);
            let pi = p.add(&i);
            if pi != q.add(&j) {
                continue;
            }
            let key = 2 * k as i32 - mono.degree() as i32;
            if key <= floor {
                continue;
            }
            out.add_term(key, &c.scale(&Rat::from_bigint(pi.factorial())));
        }
    }
    out
}

/// Absolute expansion of `∫ z^P z̄^Q e^{mζ} ξ e^{-m|z|²} dV₀` to relative depth `s`.
///
/// Keys are twice the exponent of `m`, so the leading key is `-(2n + |P| + |Q|)`.
pub fn gram_entry_expansion(zeta: &BidegreeJet, xi: &BidegreeJet, p: &MultiIndex, q: &MultiIndex, s: u32) -> Result<AsymptoticSeries> {
    let kernel = kernel_terms(zeta, xi, s)?;
    let n = p.n() as i32;
    Ok(scaled_entry(&kernel, p, q, s).shift(-(2 * n + (p.degree() + q.degree()) as i32)))
}

/// `λ_{P,j}^{-2}` as a series.
#[derive(Clone, Debug)]
pub struct LambdaExpansion {
    pub index: SectionIndex,
    pub inverse_square: AsymptoticSeries,
}

fn xi_jets(chart: &NormalizedChart) -> Result<Vec<BidegreeJet>> {
    let det = chart.metric.det()?;
    let r = chart.r;
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            let h = chart.bundle_metric.get(i, j);
            let ord = det.order().min(h.order());
            out.push(det.truncate(ord)?.mul(&h.truncate(ord)?)?);
        }
    }
    Ok(out)
}

pub fn lambda_expansion(chart: &NormalizedChart, idx: &SectionIndex, s: u32) -> Result<LambdaExpansion> {
    let zeta = zeta_from_chart(chart)?;
    let xi = xi_jets(chart)?;
    let j = idx.j - 1;
    let inverse_square = gram_entry_expansion(&zeta, &xi[j * chart.r + j], &idx.p, &idx.p, s)?;
    let lead = -(2 * (chart.n as u32 + idx.p.degree()) as i32);
    if inverse_square.coeff(lead) != Cq::real(Rat::from_bigint(idx.p.factorial())) || inverse_square.leading_key() != Some(lead) {
        return Err(Error::Assertion(format!("λ⁻² for {idx} does not lead with P!/m^(n+|P|)")));
    }
    Ok(LambdaExpansion { index: idx.clone(), inverse_square })
}

/// The scaled normalized block matrix `Ã` together with the normalizers.
#[derive(Clone, Debug)]
pub struct GramBlockMatrix {
    pub n: usize,
    pub r: usize,
    /// Largest `|P|` in the basis.
    pub s: u32,
    /// Relative depth of every series.
    pub depth: u32,
    pub sizes: BlockSizes,
    pub sections: Vec<SectionIndex>,
    /// `P!` per section.
    pub weights: Vec<Rat>,
    /// `Ã_ab = √(w_a w_b) A_ab`, row-major.
    pub entries: Vec<AsymptoticSeries>,
    /// `u_a = (1+y_a)^{-1/2}` with `λ_a = m^{(n+|P_a|)/2} u_a / √w_a`.
    pub u: Vec<AsymptoticSeries>,
    /// `(a, b, key)` for every half-integer power found in a scaled Gram entry.
    pub half_integer_slots: Vec<(usize, usize, i32)>,
}

impl GramBlockMatrix {
    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn entry(&self, a: usize, b: usize) -> &AsymptoticSeries {
        &self.entries[a * self.len() + b]
    }

    pub fn floor(&self) -> i32 {
        -(2 * self.depth as i32 + 1)
    }

    /// Largest `|A_ab|` over the block `|P_a| = α`, `|P_b| = β`, evaluated at `m`.
    pub fn block_norm(&self, alpha: u32, beta: u32, m: f64) -> f64 {
        let mut best = 0.0f64;
        for (a, sa) in self.sections.iter().enumerate() {
            if sa.p.degree() != alpha {
                continue;
            }
            for (b, sb) in self.sections.iter().enumerate() {
                if sb.p.degree() != beta {
                    continue;
                }
                let (re, im) = self.entry(a, b).eval_f64(m);
                let w = (self.weights[a].to_f64() * self.weights[b].to_f64()).sqrt();
                best = best.max(re.hypot(im) / w);
            }
        }
        best
    }

    fn identity(&self) -> Vec<AsymptoticSeries> {
        let k = self.len();
        let mut out = vec![AsymptoticSeries::zero(); k * k];
        for a in 0..k {
            out[a * k + a] = AsymptoticSeries::monomial(0, Cq::real(self.weights[a].clone()));
        }
        out
    }

    /// Scaled product `(X⋆Y)_ac = Σ_b X_ab Y_bc / w_b`.
    fn star(&self, x: &[AsymptoticSeries], y: &[AsymptoticSeries], exec: Execution) -> Vec<AsymptoticSeries> {
        let k = self.len();
        let floor = self.floor();
        let inv_w: Vec<Rat> = self.weights.iter().map(|w| w.recip().expect("P! > 0")).collect();
        par::map_range(exec, k * k, |idx| {
            let (a, c) = (idx / k, idx % k);
            let mut acc = AsymptoticSeries::unknown(floor);
            for b in 0..k {
                let xa = &x[a * k + b];
                let yb = &y[b * k + c];
                if xa.is_zero() || yb.is_zero() {
                    continue;
                }
                acc = acc.add(&xa.mul(yb).scale_rat(&inv_w[b]));
            }
            acc.truncate(floor)
        })
    }
}

/// Normalized Gram block matrix on the basis `|P| ≤ basis_degree`, every
/// series carried to relative depth `depth`.
pub fn build_gram(chart: &NormalizedChart, basis_degree: u32, depth: u32, exec: Execution) -> Result<GramBlockMatrix> {
    let (n, r) = (chart.n, chart.r);
    let zeta = zeta_from_chart(chart)?;
    let xi = xi_jets(chart)?;
    let kernels = xi.iter().map(|x| kernel_terms(&zeta, x, depth)).collect::<Result<Vec<_>>>()?;
    let sections = enumerate_sections(n, r, basis_degree);
    let k = sections.len();
    let weights: Vec<Rat> = sections.iter().map(|s| Rat::from_bigint(s.p.factorial())).collect();
    let floor = -(2 * depth as i32 + 1);
    let scaled: Vec<AsymptoticSeries> = par::map_range(exec, k * k, |idx| {
        let (sa, sb) = (&sections[idx / k], &sections[idx % k]);
        scaled_entry(&kernels[(sa.j - 1) * r + (sb.j - 1)], &sa.p, &sb.p, depth)
    });
    let mut half_integer_slots = Vec::new();
    for (idx, e) in scaled.iter().enumerate() {
        for key in e.half_integer_keys() {
            half_integer_slots.push((idx / k, idx % k, key));
        }
    }
    let mut u = Vec::with_capacity(k);
    for a in 0..k {
        let diag = &scaled[a * k + a];
        if diag.leading_key() != Some(0) || diag.coeff(0) != Cq::real(weights[a].clone()) {
            return Err(Error::Assertion(format!("Gram diagonal for {} does not lead with P!", sections[a])));
        }
        let y = diag.scale_rat(&weights[a].recip().expect("P! > 0")).sub(&AsymptoticSeries::one());
        u.push(y.inv_sqrt_one_plus(floor)?);
    }
    let entries: Vec<AsymptoticSeries> = par::map_range(exec, k * k, |idx| {
        let (a, b) = (idx / k, idx % k);
        let g = u[a].mul(&u[b]).mul(&scaled[idx]).neg();
        let e = if a == b { g.add(&AsymptoticSeries::monomial(0, Cq::real(weights[a].clone()))) } else { g };
        e.truncate(floor)
    });
    for a in 0..k {
        if !entries[a * k + a].is_zero() {
            return Err(Error::Assertion(format!("normalized diagonal entry for {} is not 1", sections[a])));
        }
        for b in 0..a {
            if entries[a * k + b] != entries[b * k + a].conj() {
                return Err(Error::NotHermitian(format!("Gram entries ({}, {})", sections[a], sections[b])));
            }
        }
    }
    Ok(GramBlockMatrix {
        n,
        r,
        s: basis_degree,
        depth,
        sizes: block_sizes(n, r, basis_degree),
        sections,
        weights,
        entries,
        u,
        half_integer_slots,
    })
}

pub fn build_block_matrix(chart: &NormalizedChart, s: u32) -> Result<GramBlockMatrix> {
    build_gram(chart, s, s, Execution::default())
}

/// `N = Σ_{k≤s+1} Ã^k` in the scaled product, with its certificate.
#[derive(Clone, Debug)]
pub struct NeumannInverse {
    pub terms: usize,
    pub entries: Vec<AsymptoticSeries>,
}

pub fn neumann_inverse(a: &GramBlockMatrix, s: u32, exec: Execution) -> Result<NeumannInverse> {
    let k = a.len();
    for (idx, e) in a.entries.iter().enumerate() {
        if e.magnitude_key().is_some_and(|key| key > -2) {
            return Err(Error::Neumann(format!(
                "entry ({}, {}) of A is not O(1/m): {e}",
                a.sections[idx / k],
                a.sections[idx % k]
            )));
        }
    }
    let id = a.identity();
    let mut sum = id.clone();
    let mut power = id.clone();
    for _ in 0..=s {
        power = a.star(&power, &a.entries, exec);
        sum = sum.iter().zip(&power).map(|(x, y)| x.add(y)).collect();
    }
    let floor = a.floor();
    let one_minus: Vec<AsymptoticSeries> = id.iter().zip(&a.entries).map(|(x, y)| x.sub(y)).collect();
    let check = a.star(&sum, &one_minus, exec);
    for (idx, (c, want)) in check.iter().zip(&id).enumerate() {
        if c.truncate(floor) != want.truncate(floor) {
            return Err(Error::Neumann(format!(
                "certificate N(I-A) = I fails at ({}, {})",
                a.sections[idx / k],
                a.sections[idx % k]
            )));
        }
    }
    Ok(NeumannInverse { terms: s as usize + 2, entries: sum })
}

/// `𝔅(x₀) = mⁿ (a₀ + a₁/m + ⋯ + a_s/m^s)` as `r × r` coefficient matrices.
#[derive(Clone, Debug)]
pub struct TyzExpansion {
    pub n: usize,
    pub r: usize,
    pub s: u32,
    /// Entry `(j, k)` as an absolute series in `m`.
    pub series: Vec<Vec<AsymptoticSeries>>,
    /// `coeffs[k]` is the matrix `a_k`.
    pub coeffs: Vec<CMat>,
}

impl TyzExpansion {
    /// `mⁿ Σ_{k≤s} a_k m^{-k}` for the `(j, k)` entry.
    pub fn density_f64(&self, j: usize, k: usize, m: f64) -> f64 {
        let mut acc = 0.0;
        for (e, a) in self.coeffs.iter().enumerate() {
            acc += a[j][k].to_f64().0 * m.powi(self.n as i32 - e as i32);
        }
        acc
    }

    /// Exact value of the truncated expansion at an integer `m`.
    pub fn density_exact(&self, j: usize, k: usize, m: u64) -> Cq {
        let mr = Rat::from_bigint(BigInt::from(m));
        let mut acc = Cq::zero();
        for (e, a) in self.coeffs.iter().enumerate() {
            let pow = self.n as i32 - e as i32;
            let w = if pow >= 0 { mr.pow(pow as u32) } else { mr.pow((-pow) as u32).recip().expect("m > 0") };
            acc = &acc + &a[j][k].scale(&w);
        }
        acc
    }
}

pub fn assemble_bergman_expansion(chart: &NormalizedChart, s: u32) -> Result<TyzExpansion> {
    assemble_with(chart, s, Execution::default())
}

pub fn assemble_with(chart: &NormalizedChart, s: u32, exec: Execution) -> Result<TyzExpansion> {
    let min_p = 2 * s + 2;
    if chart.p < min_p {
        return Err(Error::InsufficientOrder { needed: min_p, have: chart.p, context: "normalization order for the expansion".into() });
    }
    let gram = build_gram(chart, s, s, exec)?;
    let inv = neumann_inverse(&gram, s, exec)?;
    let (n, r) = (chart.n, chart.r);
    let k = gram.len();
    let floor = gram.floor();
    let mut series = vec![vec![AsymptoticSeries::zero(); r]; r];
    for j in 0..r {
        for l in 0..r {
            // degree-0 sections come first and have weight 1
            let e = gram.u[j].mul(&gram.u[l]).mul(&inv.entries[l * k + j]).truncate(floor);
            series[j][l] = e.shift(2 * n as i32);
        }
    }
    let mut coeffs = Vec::with_capacity(s as usize + 1);
    for (j, row) in series.iter().enumerate() {
        for (l, e) in row.iter().enumerate() {
            if let Some(key) = e.half_integer_keys().first() {
                return Err(Error::Assertion(format!("half-integer power m^({key}/2) in 𝔅[{j}{l}]")));
            }
            if e.leading_key().is_some_and(|key| key > 2 * n as i32) {
                return Err(Error::Assertion(format!("𝔅[{j}{l}] grows faster than m^n")));
            }
        }
    }
    for e in 0..=s as i32 {
        let key = 2 * n as i32 - 2 * e;
        let m: CMat = (0..r).map(|j| (0..r).map(|l| series[j][l].coeff(key)).collect()).collect();
        coeffs.push(m);
    }
    for (e, a) in coeffs.iter().enumerate() {
        if !crate::matrix_jet::cmat::is_hermitian(a) {
            return Err(Error::Assertion(format!("a_{e} is not Hermitian")));
        }
    }
    if !crate::matrix_jet::cmat::is_identity(&coeffs[0]) {
        return Err(Error::Assertion("a₀ ≠ I".into()));
    }
    Ok(TyzExpansion { n, r, s, series, coeffs })
}

/// Independent prediction of `a₁` from curvature: `ρ/2 · I - Σ_k ∂_k∂̄_k Hᵀ(0)`
/// in the K-frame, checked against the assembled coefficient. The transpose
/// appears because the kernel is stored in `section ⊗ section*` components.
/// For a trivial twist this is `ρ/2`.
pub fn check_first_coefficient(chart: &NormalizedChart, tyz: &TyzExpansion) -> Result<CMat> {
    let rho = scalar_at_origin(&PotentialJet::new(chart.potential.clone())?)?;
    let half = rho.scale(&Rat::new(1, 2));
    let r = chart.r;
    let want: CMat = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut v = if i == j { half.clone() } else { Cq::zero() };
                    for k in 0..chart.n {
                        let c = chart.bundle_metric.get(j, i).coeff_mono(Mono::hol_var(k).mul(Mono::anti_var(k)));
                        v = &v - &c;
                    }
                    v
                })
                .collect()
        })
        .collect();
    if tyz.coeffs.len() > 1 && tyz.coeffs[1] != want {
        return Err(Error::Assertion(format!("a₁ disagrees with the curvature prediction {want:?}")));
    }
    Ok(want)
}

/// Least-squares slope of `-log|v|` against `log m`; `None` if any value is zero.
pub fn fit_decay_exponent(ms: &[f64], values: &[f64]) -> Option<f64> {
    if ms.len() < 2 || values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return None;
    }
    let xs: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| -v.abs().ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(cov / var)
}

/// One fitted decay exponent against its required value.
#[derive(Clone, Debug)]
pub struct DecayRow {
    pub label: String,
    pub values: Vec<f64>,
    /// `None` when the entry vanishes identically.
    pub fitted: Option<f64>,
    pub required: f64,
    /// Exponent of the leading term of the exact series, when nonzero.
    pub leading_exponent: Option<f64>,
    pub passes: bool,
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub ms: Vec<f64>,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.passes)
    }
}

fn decay_row(label: String, ms: &[f64], values: Vec<f64>, required: f64, lead: Option<i32>) -> DecayRow {
    let all_zero = values.iter().all(|v| *v == 0.0);
    let fitted = fit_decay_exponent(ms, &values);
    let passes = all_zero || fitted.is_some_and(|f| f >= required - 0.1);
    DecayRow { label, values, fitted, required, leading_exponent: lead.map(|k| -k as f64 / 2.0), passes }
}

fn block_leading_key(gram: &GramBlockMatrix, alpha: u32, beta: u32) -> Option<i32> {
    let mut best: Option<i32> = None;
    for (a, sa) in gram.sections.iter().enumerate() {
        for (b, sb) in gram.sections.iter().enumerate() {
            if sa.p.degree() == alpha && sb.p.degree() == beta {
                if let Some(k) = gram.entry(a, b).leading_key() {
                    best = Some(best.map_or(k, |x| x.max(k)));
                }
            }
        }
    }
    best
}

/// Fitted decay of `‖A_{αβ}‖` against `1 + |α-β|/2` for all `α, β ≤ max_block`.
pub fn block_decay_audit(chart: &NormalizedChart, max_block: u32, depth: u32, ms: &[f64]) -> Result<DecayReport> {
    let gram = build_gram(chart, max_block, depth, Execution::default())?;
    let mut rows = Vec::new();
    for alpha in 0..=max_block {
        for beta in 0..=max_block {
            let values: Vec<f64> = ms.iter().map(|m| gram.block_norm(alpha, beta, *m)).collect();
            let required = 1.0 + (alpha as f64 - beta as f64).abs() / 2.0;
            let lead = block_leading_key(&gram, alpha, beta);
            rows.push(decay_row(format!("A[{alpha},{beta}]"), ms, values, required, lead));
        }
    }
    Ok(DecayReport { ms: ms.to_vec(), rows })
}

/// Normalized inner products of low-degree peak sections against sections
/// vanishing to order `sigma`, against the bound `m^{-1-(σ-|P|)/2}`.
pub fn ruan_bound_check(chart: &NormalizedChart, sigma: u32, ms: &[f64]) -> Result<DecayReport> {
    let depth = sigma.div_ceil(2) + 2;
    let gram = build_gram(chart, sigma, depth, Execution::default())?;
    let mut rows = Vec::new();
    for (a, sa) in gram.sections.iter().enumerate() {
        if sa.p.degree() >= sigma {
            continue;
        }
        for (b, sb) in gram.sections.iter().enumerate() {
            if sb.p.degree() != sigma {
                continue;
            }
            let w = (gram.weights[a].to_f64() * gram.weights[b].to_f64()).sqrt();
            let values: Vec<f64> = ms
                .iter()
                .map(|m| {
                    let (re, im) = gram.entry(a, b).eval_f64(*m);
                    re.hypot(im) / w
                })
                .collect();
            let required = 1.0 + (sigma - sa.p.degree()) as f64 / 2.0;
            rows.push(decay_row(format!("({sa}, {sb})"), ms, values, required, gram.entry(a, b).leading_key()));
        }
    }
    Ok(DecayReport { ms: ms.to_vec(), rows })
}

/// Monomials of `ζ` that break rotation symmetry (`|I| ≠ |J|`); empty for radial models.
pub fn non_radial_terms(zeta: &BidegreeJet) -> Vec<Mono> {
    zeta.terms().filter(|(k, _)| k.hol_index(zeta.n()) != k.anti_index(zeta.n())).map(|(k, _)| k).collect()
}
