//! Independent oracles for the pipeline: the closed-form kernel of `O(m)` on
//! CP¹, and direct double-double quadrature of Gram integrals.
//!
//! The quadrature oracle never touches the jet pipeline. It evaluates the
//! model's potential, volume density and bundle metric pointwise in the
//! original coordinates, so agreement with the expansion is a real check.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use num::BigInt;

use crate::dd::{Dd, DdC};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};
use crate::multiindex::{enumerate_sections, MultiIndex, SectionIndex};
use crate::normal_forms::{normalize, LocalModel};
use crate::par::Execution;
use crate::peak_gram::{assemble_with, fit_decay_exponent, TyzExpansion};
use crate::dd::PI;
use crate::quadrature::{gauss_legendre, integrate_panels, PanelOptions};
use crate::rational::{factorial, Cq, Rat};

/// What an [`OracleResult`] measures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Entry `(j, k)` of the density matrix at the origin, 1-based.
    Density { j: usize, k: usize },
    /// `∫ z^P z̄^Q h_{ij} a^m dV_g`, bundle indices 1-based.
    GramEntry { p: MultiIndex, q: MultiIndex, i: usize, j: usize },
    /// `∫ z^P z̄^Q |z|^{2q} a^m dV_g` with `h₁₁`.
    Moment { p: MultiIndex, q: MultiIndex, radial: u32 },
    /// `‖z^k‖²` on CP¹.
    SectionNorm { k: u32 },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Density { j, k } => write!(f, "density[{j},{k}]"),
            Quantity::GramEntry { p, q, i, j } => write!(f, "gram[{p};{q};{i},{j}]"),
            Quantity::Moment { p, q, radial } => write!(f, "moment[{p};{q};{radial}]"),
            Quantity::SectionNorm { k } => write!(f, "norm[{k}]"),
        }
    }
}

/// A high-precision value with its estimated absolute error.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub m: u64,
    pub quantity: Quantity,
    pub value: DdC,
    pub error: f64,
}

/// `‖z^k‖² = k!(m-k)!/(m+1)!` for sections of `O(m)` on CP¹.
pub fn cp1_section_norm(m: u64, k: u32) -> Rat {
    assert!(k as u64 <= m, "z^k is a section of O(m) only for k ≤ m");
    let m32 = u32::try_from(m).expect("m fits in u32");
    Rat::from_bigint(factorial(k) * factorial(m32 - k)) / Rat::from_bigint(factorial(m32 + 1))
}

fn cp1_sum(m: u64, u: &Rat) -> Rat {
    let weight = (Rat::one() + u.clone()).pow(m as u32).recip().expect("1 + u > 0");
    let mut acc = Rat::zero();
    for k in 0..=m as u32 {
        acc = acc + u.pow(k) * weight.clone() / cp1_section_norm(m, k);
    }
    acc
}

/// Exact density `Σ_k |z^k|²(1+u)^{-m}/‖z^k‖²` of `O(m)` on CP¹ at `u = |z|²`.
///
/// The sum is evaluated term by term and compared with its value at the
/// origin; a mismatch is reported as an assertion failure.
pub fn cp1_exact_bergman(m: u64, u: &Rat) -> Result<Rat> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if u.signum() < 0 {
        return Err(Error::InvalidParameter("u = |z|² must be nonnegative".into()));
    }
    let value = cp1_sum(m, u);
    let at_origin = cp1_sum(m, &Rat::zero());
    if value != at_origin {
        return Err(Error::Assertion(format!("CP¹ density is not constant at m = {m}: {value} vs {at_origin}")));
    }
    Ok(value)
}

/// Radius choice for the quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    /// `|z| ≤ log m/√m`.
    LogBall,
    /// `|z|² ≤ R²`; `f64::INFINITY` integrates over the whole chart.
    Squared(f64),
}

impl Radius {
    pub fn radius_sq(self, m: u64) -> f64 {
        match self {
            Radius::LogBall => (m as f64).ln().powi(2) / m as f64,
            Radius::Squared(r2) => r2,
        }
    }
}

/// Quadrature of every Gram entry `G_ab = ∫ z^{P_a} z̄^{P_b} h_{j_a j_b} a^m dV_g`
/// over the sections of degree at most `basis_degree`.
#[derive(Clone, Debug)]
pub struct GramOracle {
    pub m: u64,
    pub sections: Vec<SectionIndex>,
    /// Row-major.
    pub entries: Vec<DdC>,
    pub errors: Vec<f64>,
}

impl GramOracle {
    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn entry(&self, a: usize, b: usize) -> (DdC, f64) {
        let k = self.len();
        (self.entries[a * k + b], self.errors[a * k + b])
    }
}

fn check_oracle_spec(spec: &ModelSpec, m: u64) -> Result<()> {
    spec.validate()?;
    if spec.n > 2 {
        return Err(Error::InvalidParameter("quadrature oracle supports n ≤ 2".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    Ok(())
}

/// One integrand `z^P z̄^Q |z|^{2·radial} h_{ij} a^m dV_g`, bundle indices 1-based.
#[derive(Clone, Debug)]
struct Entry {
    p: MultiIndex,
    q: MultiIndex,
    i: usize,
    j: usize,
    radial: u32,
}

/// Angular nodes per variable for weights that are not torus invariant.
const ANGLES: [usize; 2] = [32, 16];
const SPLIT_NODES: usize = 12;

fn power_table(x: Dd, max: u32) -> Vec<Dd> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut acc = Dd::ONE;
    for _ in 0..=max {
        out.push(acc);
        acc = acc * x;
    }
    out
}

/// Integrate a batch of entries over `|z|² ≤ R²`.
///
/// At every radial node the weights `a^m det g h_{ij}` are sampled on a
/// trapezoid grid of angles and reduced to their Fourier coefficients by a
/// separable DFT; each entry then reads off the coefficient at frequency
/// `P - Q`. This equals the plain trapezoid sum of the full integrand. The
/// reported error adds `10^{-30} ∫|integrand|` to the panel estimate.
fn integrate_entries(spec: &ModelSpec, entries: &[Entry], m: u64, radius: Radius, exec: Execution) -> Result<(Vec<DdC>, Vec<f64>)> {
    check_oracle_spec(spec, m)?;
    let r2 = radius.radius_sq(m);
    if !(r2 > 0.0) {
        return Err(Error::InvalidParameter(format!("quadrature radius² must be positive, got {r2}")));
    }
    let eval = spec.evaluator()?;
    let (n, r) = (spec.n, spec.r);
    let nw = r * r;
    let dmax = entries.iter().flat_map(|e| e.p.exps().iter().zip(e.q.exps()).map(|(a, b)| a.abs_diff(*b))).max().unwrap_or(0) as usize;
    let nf = 2 * dmax + 1;
    let max_pq = entries.iter().flat_map(|e| e.p.exps().iter().zip(e.q.exps()).map(|(a, b)| a + b)).max().unwrap_or(0);
    let max_radial = entries.iter().map(|e| e.radial).max().unwrap_or(0);
    // An angle-independent weight only meets the frequencies P - Q, which
    // dmax + 1 nodes integrate exactly.
    let invariant = spec.is_torus_invariant();
    let k = if invariant { dmax + 1 } else { ANGLES[(n - 1).min(1)].max(2 * dmax + 2) };
    // Otherwise the even nodes form the k/2 rule, and the gap between the two
    // rules bounds the aliasing error.
    let alias = !invariant && k % 2 == 0;
    let half_norm = Dd::new(2f64.powi(n as i32));
    // phase[t * nf + f] = e^{i (f - dmax) θ_t}
    let thetas: Vec<DdC> = (0..k).map(|t| DdC::cis(PI.mul_f64(2.0 * t as f64) / Dd::new(k as f64))).collect();
    let phase: Vec<DdC> = (0..k).flat_map(|t| (0..nf).map(move |f| (t, f))).map(|(t, f)| {
        let d = f as i64 - dmax as i64;
        if d >= 0 { thetas[t].powi(d as u32) } else { thetas[t].conj().powi((-d) as u32) }
    }).collect();
    let split: Vec<(Dd, Dd)> = if n == 1 {
        vec![(Dd::ONE, Dd::ONE)]
    } else {
        gauss_legendre(SPLIT_NODES).into_iter().map(|(x, w)| ((x + Dd::ONE).mul_f64(0.5), w.mul_f64(0.5))).collect()
    };
    let md = Dd::new(m as f64);
    let inv_k = Dd::ONE / Dd::new(k as f64);
    let invalid = AtomicBool::new(false);
    let len = entries.len();
    let weights = |z: &[DdC]| -> Option<Vec<DdC>> {
        let pv = eval.eval(z);
        if !(pv.det_g.hi > 0.0) || !pv.phi.is_finite() {
            invalid.store(true, Ordering::Relaxed);
            return None;
        }
        let expo = md * pv.phi;
        let w = if expo.hi > 700.0 { Dd::ZERO } else { (-expo).exp() * pv.det_g };
        Some(match &pv.h {
            None => (0..nw).map(|c| if c / r == c % r { DdC::real(w) } else { DdC::ZERO }).collect(),
            Some(h) => h.iter().map(|x| x.scale(w)).collect(),
        })
    };
    let radial = |v: Dd| -> Vec<DdC> {
        let u = v / md;
        let mut out = vec![DdC::ZERO; 3 * len];
        for (x, wx) in &split {
            let (radii, jac) = if n == 1 { (vec![u.sqrt()], Dd::ONE) } else { (vec![(u * *x).sqrt(), (u * (Dd::ONE - *x)).sqrt()], u * *wx) };
            // fourier[c * nf^n + f], modulus[c]
            let mut fourier = vec![DdC::ZERO; nw * nf.pow(n as u32)];
            let mut half = if alias { vec![DdC::ZERO; fourier.len()] } else { Vec::new() };
            let mut modulus = vec![Dd::ZERO; nw];
            if n == 1 {
                for t in 0..k {
                    let Some(w) = weights(&[thetas[t].scale(radii[0])]) else { return out };
                    for c in 0..nw {
                        modulus[c] += w[c].abs();
                        for f in 0..nf {
                            let x = w[c] * phase[t * nf + f];
                            fourier[c * nf + f] += x;
                            if alias && t % 2 == 0 {
                                half[c * nf + f] += x;
                            }
                        }
                    }
                }
            } else {
                let mut row = vec![DdC::ZERO; nw * nf];
                let mut half_row = if alias { vec![DdC::ZERO; nw * nf] } else { Vec::new() };
                for t2 in 0..k {
                    row.iter_mut().for_each(|x| *x = DdC::ZERO);
                    half_row.iter_mut().for_each(|x| *x = DdC::ZERO);
                    let z2 = thetas[t2].scale(radii[1]);
                    for t1 in 0..k {
                        let Some(w) = weights(&[thetas[t1].scale(radii[0]), z2]) else { return out };
                        for c in 0..nw {
                            modulus[c] += w[c].abs();
                            for f in 0..nf {
                                let x = w[c] * phase[t1 * nf + f];
                                row[c * nf + f] += x;
                                if alias && t1 % 2 == 0 {
                                    half_row[c * nf + f] += x;
                                }
                            }
                        }
                    }
                    for c in 0..nw {
                        for f1 in 0..nf {
                            let g = row[c * nf + f1];
                            for f2 in 0..nf {
                                fourier[(c * nf + f1) * nf + f2] += g * phase[t2 * nf + f2];
                            }
                            if alias && t2 % 2 == 0 {
                                let g = half_row[c * nf + f1];
                                for f2 in 0..nf {
                                    half[(c * nf + f1) * nf + f2] += g * phase[t2 * nf + f2];
                                }
                            }
                        }
                    }
                }
            }
            let norm = inv_k.powi(n as u32) * jac;
            let powers: Vec<Vec<Dd>> = radii.iter().map(|x| power_table(*x, max_pq)).collect();
            let u_powers = power_table(u, max_radial);
            for (e, entry) in entries.iter().enumerate() {
                let mut rp = u_powers[entry.radial as usize];
                let mut idx = 0;
                for d in 0..n {
                    let (a, b) = (entry.p.get(d), entry.q.get(d));
                    rp = rp * powers[d][(a + b) as usize];
                    idx = idx * nf + (a as i64 - b as i64 + dmax as i64) as usize;
                }
                let c = (entry.i - 1) * r + (entry.j - 1);
                let scale = rp * norm;
                let slot = c * nf.pow(n as u32) + idx;
                out[e] += fourier[slot].scale(scale);
                out[len + e] += DdC::real(modulus[c] * scale);
                if alias {
                    let gap = fourier[slot] - half[slot].scale(half_norm);
                    out[2 * len + e] += DdC::real(gap.abs() * scale.abs());
                }
            }
        }
        // du = dv / m
        out.iter().map(|x| x.scale(Dd::ONE / md)).collect()
    };
    let end = if r2.is_finite() { r2 * m as f64 } else { f64::INFINITY };
    let panels = PanelOptions { max_width: 5.0, ..Default::default() };
    let res = integrate_panels(&radial, 0.0, end, &panels, exec);
    if invalid.load(Ordering::Relaxed) {
        return Err(Error::InvalidParameter(format!(
            "radius² {r2} leaves the region where the {} metric is positive",
            spec.name()
        )));
    }
    let errors = (0..len)
        .map(|a| res.error[a] + 1e-30 * res.value[len + a].re.to_f64() + res.value[2 * len + a].re.to_f64())
        .collect();
    Ok((res.value[..len].to_vec(), errors))
}

/// One Gram entry `∫ z^P z̄^Q h_{ij} a^m dV_g` over `|z|² ≤ R²`.
///
/// `max_error`, when given, is a relative bound on the error estimate.
pub fn local_quadrature_gram(
    spec: &ModelSpec,
    p: &MultiIndex,
    q: &MultiIndex,
    i: usize,
    j: usize,
    m: u64,
    radius: Radius,
    max_error: Option<f64>,
    exec: Execution,
) -> Result<OracleResult> {
    if p.n() != spec.n || q.n() != spec.n {
        return Err(Error::DimensionMismatch(format!("multi-indices must have {} entries", spec.n)));
    }
    if !(1..=spec.r).contains(&i) || !(1..=spec.r).contains(&j) {
        return Err(Error::InvalidParameter(format!("bundle indices must lie in 1..={}", spec.r)));
    }
    let entry = Entry { p: p.clone(), q: q.clone(), i, j, radial: 0 };
    let (value, error) = integrate_entries(spec, &[entry], m, radius, exec)?;
    let (value, error) = (value[0], error[0]);
    if let Some(tol) = max_error {
        let scale = value.abs().to_f64().max(f64::MIN_POSITIVE);
        if error > tol * scale {
            return Err(Error::Oracle(format!("quadrature error {error:.3e} exceeds {tol:.1e} relative to {scale:.3e}")));
        }
    }
    Ok(OracleResult { m, quantity: Quantity::GramEntry { p: p.clone(), q: q.clone(), i, j }, value, error })
}

/// A batch of moments `∫ z^P z̄^Q |z|^{2q} h₁₁ a^m dV_g`, one sweep for all.
pub fn quadrature_moments(spec: &ModelSpec, list: &[(MultiIndex, MultiIndex, u32)], m: u64, radius: Radius, exec: Execution) -> Result<Vec<OracleResult>> {
    if list.iter().any(|(p, q, _)| p.n() != spec.n || q.n() != spec.n) {
        return Err(Error::DimensionMismatch(format!("multi-indices must have {} entries", spec.n)));
    }
    let entries: Vec<Entry> = list.iter().map(|(p, q, radial)| Entry { p: p.clone(), q: q.clone(), i: 1, j: 1, radial: *radial }).collect();
    let (values, errors) = integrate_entries(spec, &entries, m, radius, exec)?;
    Ok(list
        .iter()
        .zip(values.into_iter().zip(errors))
        .map(|((p, q, radial), (value, error))| OracleResult { m, quantity: Quantity::Moment { p: p.clone(), q: q.clone(), radial: *radial }, value, error })
        .collect())
}

/// Full Gram matrix over sections of degree at most `basis_degree`, in one sweep.
pub fn quadrature_gram_matrix(spec: &ModelSpec, basis_degree: u32, m: u64, radius: Radius, exec: Execution) -> Result<GramOracle> {
    let sections = enumerate_sections(spec.n, spec.r, basis_degree);
    let mut list = Vec::with_capacity(sections.len() * sections.len());
    for a in &sections {
        for b in &sections {
            list.push(Entry { p: a.p.clone(), q: b.p.clone(), i: a.j, j: b.j, radial: 0 });
        }
    }
    let (entries, errors) = integrate_entries(spec, &list, m, radius, exec)?;
    Ok(GramOracle { m, sections, entries, errors })
}

/// Inverse of a square matrix by Gauss–Jordan with partial pivoting.
pub fn invert_dd(a: &[DdC], k: usize) -> Result<Vec<DdC>> {
    assert_eq!(a.len(), k * k);
    let mut m = a.to_vec();
    let mut inv = vec![DdC::ZERO; k * k];
    for i in 0..k {
        inv[i * k + i] = DdC::ONE;
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|x, y| m[x * k + col].abs().to_f64().total_cmp(&m[y * k + col].abs().to_f64()))
            .expect("nonempty range");
        if m[pivot * k + col].abs().to_f64() == 0.0 {
            return Err(Error::Oracle("singular Gram matrix".into()));
        }
        if pivot != col {
            for c in 0..k {
                m.swap(pivot * k + c, col * k + c);
                inv.swap(pivot * k + c, col * k + c);
            }
        }
        let d = m[col * k + col].inv();
        for c in 0..k {
            m[col * k + c] = m[col * k + c] * d;
            inv[col * k + c] = inv[col * k + c] * d;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = m[row * k + col];
            if f == DdC::ZERO {
                continue;
            }
            for c in 0..k {
                let (mc, ic) = (m[col * k + c], inv[col * k + c]);
                m[row * k + c] -= f * mc;
                inv[row * k + c] -= f * ic;
            }
        }
    }
    Ok(inv)
}

/// Density matrix `(G^{-1})_{(0,k),(0,j)}` at the origin from a quadrature Gram
/// matrix, with first-order propagation of the entry errors.
pub fn density_from_gram(gram: &GramOracle, r: usize) -> Result<Vec<OracleResult>> {
    let k = gram.len();
    // Scale by the diagonal so pivoting sees entries of comparable size.
    let d: Vec<Dd> = (0..k).map(|a| gram.entries[a * k + a].re.sqrt()).collect();
    if d.iter().any(|x| !(x.hi > 0.0)) {
        return Err(Error::Oracle("Gram diagonal is not positive".into()));
    }
    let scaled: Vec<DdC> = (0..k * k).map(|ab| gram.entries[ab].scale(Dd::ONE / (d[ab / k] * d[ab % k]))).collect();
    let inv_s = invert_dd(&scaled, k)?;
    let inv: Vec<DdC> = (0..k * k).map(|ab| inv_s[ab].scale(Dd::ONE / (d[ab / k] * d[ab % k]))).collect();
    let mut out = Vec::with_capacity(r * r);
    for j in 1..=r {
        for l in 1..=r {
            // degree-0 sections come first
            let (a0, b0) = (l - 1, j - 1);
            let value = inv[a0 * k + b0];
            let mut err = 0.0;
            for a in 0..k {
                let left = inv[a0 * k + a].abs().to_f64();
                if left == 0.0 {
                    continue;
                }
                for b in 0..k {
                    err += left * gram.errors[a * k + b] * inv[b * k + b0].abs().to_f64();
                }
            }
            err += 1e-28 * value.abs().to_f64();
            out.push(OracleResult { m: gram.m, quantity: Quantity::Density { j, k: l }, value, error: err });
        }
    }
    Ok(out)
}

/// Oracle density matrix at the origin of the model chart, row-major over `(j, k)`.
///
/// Fock and CP¹ use closed forms; everything else goes through
/// [`quadrature_gram_matrix`].
pub fn oracle_density(spec: &ModelSpec, m: u64, basis_degree: u32, radius: Radius, exec: Execution) -> Result<Vec<OracleResult>> {
    check_oracle_spec(spec, m)?;
    match (&spec.kind, spec.n, spec.r) {
        (ModelKind::Fock, n, r) => {
            let v = Dd::new(m as f64).powi(n as u32);
            Ok(diagonal_results(m, r, DdC::real(v)))
        }
        (ModelKind::FubiniStudy, 1, r) => {
            let v = cp1_exact_bergman(m, &Rat::zero())?;
            Ok(diagonal_results(m, r, DdC::real(Dd::from_rat(&v))))
        }
        _ => density_from_gram(&quadrature_gram_matrix(spec, basis_degree, m, radius, exec)?, spec.r),
    }
}

fn diagonal_results(m: u64, r: usize, v: DdC) -> Vec<OracleResult> {
    let mut out = Vec::with_capacity(r * r);
    for j in 1..=r {
        for k in 1..=r {
            let value = if j == k { v } else { DdC::ZERO };
            out.push(OracleResult { m, quantity: Quantity::Density { j, k }, value, error: 0.0 });
        }
    }
    out
}

/// Exact closed-form density when one exists: `mⁿ I` for Fock, `(m+1) I` on CP¹.
pub fn exact_density(spec: &ModelSpec, m: u64) -> Option<Result<Rat>> {
    match (&spec.kind, spec.n) {
        (ModelKind::Fock, n) => Some(Ok(Rat::from_bigint(BigInt::from(m).pow(n as u32)))),
        (ModelKind::FubiniStudy, 1) => Some(cp1_exact_bergman(m, &Rat::zero())),
        _ => None,
    }
}

/// Truncation order as a function of `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Fixed(u32),
    /// `s(m) = ⌊log m⌋`.
    LogM,
}

impl Schedule {
    pub fn at(self, m: u64) -> u32 {
        match self {
            Schedule::Fixed(s) => s,
            Schedule::LogM => (m as f64).ln().floor() as u32,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Fixed(s) => write!(f, "{s}"),
            Schedule::LogM => write!(f, "log"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub schedule: Schedule,
    pub ms: Vec<u64>,
    /// Relative tolerance per row; `None` judges only the decay exponent.
    pub tolerance: Option<f64>,
    pub basis_degree: u32,
    pub radius: Radius,
    /// Normalization order; raised to the minimum the schedule needs.
    pub p: Option<u32>,
}

impl CompareOptions {
    pub fn new(schedule: Schedule, ms: Vec<u64>) -> Self {
        CompareOptions { schedule, ms, tolerance: None, basis_degree: 4, radius: Radius::Squared(1.0), p: None }
    }
}

#[derive(Clone, Debug)]
pub struct CompareRow {
    pub m: u64,
    pub s: u32,
    pub quantity: Quantity,
    pub pipeline: Dd,
    pub oracle: Dd,
    pub oracle_error: f64,
    pub abs_residual: f64,
    /// The residual is exactly zero (closed-form oracle).
    pub exact_zero: bool,
    pub passes: bool,
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub model: String,
    pub n: usize,
    pub r: usize,
    pub schedule: Schedule,
    pub rows: Vec<CompareRow>,
    /// Decay exponent of the largest residual per `m`, over residuals above
    /// oracle noise.
    pub fitted_exponent: Option<f64>,
    /// Required exponent for a fixed schedule: `s + 1 - n - 1/4`.
    pub required_exponent: Option<f64>,
    /// For the growing schedule: residuals beat `m^{-s₀}` for every `s₀ ≤ 3`.
    pub super_polynomial: Option<bool>,
    pub passes: bool,
}

fn rat_to_dd(c: &Cq) -> Dd {
    Dd::from_rat(&c.re)
}

/// Compare the truncated expansion at the origin against the oracle density.
pub fn compare_expansions(spec: &ModelSpec, opts: &CompareOptions, exec: Execution) -> Result<CompareReport> {
    spec.validate()?;
    if opts.ms.is_empty() {
        return Err(Error::InvalidParameter("compare needs at least one m".into()));
    }
    let s_max = opts.ms.iter().map(|m| opts.schedule.at(*m)).max().expect("nonempty");
    let p = opts.p.unwrap_or(2 * s_max + 10).max(2 * s_max + 2);
    let order = spec.order.max(p + 1);
    let origin = vec![Cq::zero(); spec.n];
    let data = spec.local_data(&origin, order)?;
    let chart = normalize(&data, p)?;
    let tyz = assemble_with(&chart, s_max, exec)?;

    let mut rows = Vec::new();
    for &m in &opts.ms {
        let s = opts.schedule.at(m);
        let oracle = oracle_density(spec, m, opts.basis_degree, opts.radius, exec)?;
        let exact = exact_density(spec, m).transpose()?;
        for res in oracle {
            let Quantity::Density { j, k } = res.quantity else { unreachable!() };
            let pipe = truncated_density(&tyz, j - 1, k - 1, m, s);
            if !pipe.im.is_zero() && j == k {
                return Err(Error::Assertion(format!("diagonal density entry ({j},{k}) is not real")));
            }
            let (abs_residual, exact_zero) = match &exact {
                Some(e) => {
                    let want = if j == k { Cq::real(e.clone()) } else { Cq::zero() };
                    let diff = &pipe - &want;
                    let (re, im) = diff.to_f64();
                    (re.hypot(im), diff.is_zero())
                }
                None => {
                    let pd = DdC::new(rat_to_dd(&pipe), Dd::from_rat(&pipe.im));
                    ((pd - res.value).abs().to_f64(), false)
                }
            };
            let oracle_abs = res.value.abs().to_f64();
            let passes = match opts.tolerance {
                Some(t) => exact_zero || abs_residual <= (t * oracle_abs).max(res.error),
                None => true,
            };
            rows.push(CompareRow {
                m,
                s,
                quantity: res.quantity,
                pipeline: rat_to_dd(&pipe),
                oracle: res.value.re,
                oracle_error: res.error,
                abs_residual,
                exact_zero,
                passes,
            });
        }
    }

    let (fitted_exponent, required_exponent, super_polynomial) = decay_summary(spec.n, opts, &rows);
    let mut passes = rows.iter().all(|r| r.passes);
    if let (Some(f), Some(req)) = (fitted_exponent, required_exponent) {
        passes &= f >= req;
    }
    if let Some(sp) = super_polynomial {
        passes &= sp;
    }
    Ok(CompareReport { model: spec.name().into(), n: spec.n, r: spec.r, schedule: opts.schedule, rows, fitted_exponent, required_exponent, super_polynomial, passes })
}

/// `mⁿ Σ_{k≤s} a_k m^{-k}` for entry `(j, k)`, 0-based.
pub fn truncated_density(tyz: &TyzExpansion, j: usize, k: usize, m: u64, s: u32) -> Cq {
    let mr = Rat::from_bigint(BigInt::from(m));
    let mut acc = Cq::zero();
    for (e, a) in tyz.coeffs.iter().enumerate().take(s as usize + 1) {
        let pow = tyz.n as i32 - e as i32;
        let w = if pow >= 0 { mr.pow(pow as u32) } else { mr.pow((-pow) as u32).recip().expect("m > 0") };
        acc = &acc + &a[j][k].scale(&w);
    }
    acc
}

/// Largest residual per `m`, and whether it stands above oracle noise.
fn worst_per_m(rows: &[CompareRow]) -> Vec<(u64, f64, bool)> {
    let mut out: Vec<(u64, f64, bool)> = Vec::new();
    for r in rows {
        let resolved = !r.exact_zero && r.abs_residual > 10.0 * r.oracle_error;
        match out.last_mut() {
            Some(last) if last.0 == r.m => {
                if r.abs_residual > last.1 {
                    *last = (r.m, r.abs_residual, resolved);
                }
            }
            _ => out.push((r.m, r.abs_residual, resolved)),
        }
    }
    out
}

fn decay_summary(n: usize, opts: &CompareOptions, rows: &[CompareRow]) -> (Option<f64>, Option<f64>, Option<bool>) {
    let worst = worst_per_m(rows);
    let resolved: Vec<&(u64, f64, bool)> = worst.iter().filter(|w| w.2).collect();
    let fitted = if resolved.len() >= 2 {
        let ms: Vec<f64> = resolved.iter().map(|w| w.0 as f64).collect();
        let vs: Vec<f64> = resolved.iter().map(|w| w.1).collect();
        fit_decay_exponent(&ms, &vs)
    } else {
        None
    };
    match opts.schedule {
        Schedule::Fixed(s) => (fitted, Some(s as f64 + 1.0 - n as f64 - 0.25), None),
        Schedule::LogM => {
            // Unresolved residuals are zero to oracle precision and count as decaying.
            let mut ok = fitted.is_none_or(|f| f > 3.0);
            for s0 in 1..=3 {
                let scaled: Vec<Option<f64>> = worst.iter().map(|w| w.2.then(|| w.1 * (w.0 as f64).powi(s0))).collect();
                for pair in scaled.windows(2) {
                    if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                        ok &= b < a;
                    }
                }
            }
            (fitted, None, Some(ok))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{monomial_moment, radial_moment};

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn fock(n: usize) -> ModelSpec {
        ModelSpec::new(ModelKind::Fock, n, 1, 8)
    }

    #[test]
    fn cp1_examples() {
        assert_eq!(cp1_exact_bergman(3, &Rat::new(7, 5)).unwrap(), Rat::from_int(4));
        assert_eq!(cp1_exact_bergman(1, &Rat::zero()).unwrap(), Rat::from_int(2));
        assert_eq!(cp1_section_norm(1, 0), Rat::new(1, 2));
        assert_eq!(cp1_section_norm(1, 1), Rat::new(1, 2));
        assert!(cp1_exact_bergman(0, &Rat::zero()).is_err());
    }

    #[test]
    fn cp1_density_is_constant() {
        for m in [1u64, 2, 5, 17, 60] {
            for u in [Rat::zero(), Rat::new(1, 3), Rat::from_int(4)] {
                assert_eq!(cp1_exact_bergman(m, &u).unwrap(), Rat::from_int(m as i64 + 1));
            }
        }
    }

    #[test]
    fn cp1_norms_match_quadrature() {
        let spec = ModelSpec::new(ModelKind::FubiniStudy, 1, 1, 8);
        let m = 50;
        let res = local_quadrature_gram(&spec, &mi(&[0]), &mi(&[0]), 1, 1, m, Radius::Squared(f64::INFINITY), Some(1e-10), Execution::Parallel)
            .unwrap();
        let want = Dd::from_rat(&cp1_section_norm(m, 0));
        assert!((res.value.re - want).abs().to_f64() < 1e-10 * want.to_f64());
        assert!((Dd::ONE / Dd::new(51.0) - want).abs().to_f64() < 1e-30);
        let res = local_quadrature_gram(&spec, &mi(&[3]), &mi(&[3]), 1, 1, 20, Radius::Squared(f64::INFINITY), None, Execution::Parallel).unwrap();
        let want = Dd::from_rat(&cp1_section_norm(20, 3));
        assert!((res.value.re - want).abs().to_f64() <= 1e-24 * want.to_f64() + res.error);
    }

    #[test]
    fn fock_examples() {
        let m = 10;
        let res = local_quadrature_gram(&fock(1), &mi(&[0]), &mi(&[0]), 1, 1, m, Radius::Squared(64.0 / m as f64), None, Execution::Parallel).unwrap();
        assert!((res.value.re.to_f64() - 0.1).abs() < 1e-12);
        assert!(res.error < 1e-12);
        let res = local_quadrature_gram(&fock(1), &mi(&[1]), &mi(&[0]), 1, 1, m, Radius::LogBall, None, Execution::Parallel).unwrap();
        assert!(res.value.abs().to_f64() < 1e-25);
    }

    #[test]
    fn fock_matches_moments() {
        for n in 1..=2 {
            for m in [1u64, 10, 100] {
                let g = quadrature_gram_matrix(&fock(n), 2, m, Radius::Squared(f64::INFINITY), Execution::Parallel).unwrap();
                for (a, sa) in g.sections.iter().enumerate() {
                    for (b, sb) in g.sections.iter().enumerate() {
                        let (v, e) = g.entry(a, b);
                        let want = Dd::from_rat(&monomial_moment(&sa.p, &sb.p).at(m));
                        assert!((v - DdC::real(want)).abs().to_f64() <= e.max(1e-28 * want.to_f64()), "n={n} m={m} {sa} {sb}");
                    }
                }
            }
        }
        let list: Vec<_> = MultiIndex::all_up_to(2, 2).into_iter().flat_map(|p| (0..3).map(move |q| (p.clone(), p.clone(), q))).collect();
        let res = quadrature_moments(&fock(2), &list, 7, Radius::Squared(f64::INFINITY), Execution::Sequential).unwrap();
        for ((p, _, q), o) in list.iter().zip(&res) {
            let want = Dd::from_rat(&radial_moment(p, *q).at(7));
            assert!((o.value.re - want).abs().to_f64() <= o.error.max(1e-28 * want.to_f64()), "{p} {q}");
        }
    }

    #[test]
    fn perturbed_radius_outside_validity() {
        let spec = ModelSpec::new(ModelKind::PerturbedFock { eps: Rat::new(1, 10) }, 1, 1, 8);
        let err = local_quadrature_gram(&spec, &mi(&[0]), &mi(&[0]), 1, 1, 10, Radius::Squared(f64::INFINITY), None, Execution::Parallel);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        assert!(local_quadrature_gram(&fock(3), &mi(&[0, 0, 0]), &mi(&[0, 0, 0]), 1, 1, 10, Radius::LogBall, None, Execution::Parallel).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a: Vec<DdC> = [4.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 2.0].iter().map(|x| DdC::real(Dd::new(*x))).collect();
        let inv = invert_dd(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = DdC::ZERO;
                for l in 0..3 {
                    acc += a[i * 3 + l] * inv[l * 3 + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((acc.re.to_f64() - want).abs() < 1e-30 && acc.im.abs().to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn compare_closed_forms() {
        let rep = compare_expansions(&fock(2), &CompareOptions::new(Schedule::Fixed(2), vec![5, 50]), Execution::Parallel).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_zero && r.abs_residual == 0.0));
        assert!(rep.passes);
        let fs = ModelSpec::new(ModelKind::FubiniStudy, 1, 1, 8);
        let rep = compare_expansions(&fs, &CompareOptions::new(Schedule::Fixed(1), vec![20, 40, 80]), Execution::Parallel).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact_zero));
        assert!(rep.passes);
    }

    #[test]
    fn compare_perturbed_decay() {
        let spec = ModelSpec::new(ModelKind::PerturbedFock { eps: Rat::new(1, 10) }, 1, 1, 8);
        let mut opts = CompareOptions::new(Schedule::Fixed(1), vec![50, 100, 200]);
        let rep = compare_expansions(&spec, &opts, Execution::Parallel).unwrap();
        let f = rep.fitted_exponent.unwrap();
        assert!((f - 1.0).abs() < 0.2, "{f}");
        assert!(rep.passes);
        opts.tolerance = Some(0.0);
        assert!(!compare_expansions(&spec, &opts, Execution::Parallel).unwrap().passes);
    }
}
