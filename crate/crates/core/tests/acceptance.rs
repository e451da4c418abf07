//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use bergman_core::dd::{Dd, DdC};
use bergman_core::error::Result;
use bergman_core::geometry::{scalar_at_origin, PotentialJet};
use bergman_core::matrix_jet::MatrixJet;
use bergman_core::models::{ModelKind, ModelSpec};
use bergman_core::moments::{monomial_moment, radial_moment, tail_check};
use bergman_core::multiindex::MultiIndex;
use bergman_core::normal_forms::{normalize, verify_k_normal, LocalModel, NormalizedChart};
use bergman_core::oracle::{compare_expansions, cp1_exact_bergman, quadrature_moments, truncated_density, CompareOptions, Radius, Schedule};
use bergman_core::par::Execution;
use bergman_core::peak_gram::{assemble_bergman_expansion, block_decay_audit, TyzExpansion};
use bergman_core::rational::{Cq, Rat};

static ASSERTIONS: AtomicUsize = AtomicUsize::new(0);
static RUNS: AtomicUsize = AtomicUsize::new(0);

/// Record pipeline runs and any internal assertion that fires.
fn track<T>(r: Result<T>) -> Result<T> {
    RUNS.fetch_add(1, Ordering::Relaxed);
    if let Err(e) = &r {
        if e.is_assertion() {
            ASSERTIONS.fetch_add(1, Ordering::Relaxed);
        }
    }
    r
}

fn origin(n: usize) -> Vec<Cq> {
    vec![Cq::zero(); n]
}

fn chart(spec: &ModelSpec, p: u32) -> Result<NormalizedChart> {
    let data = spec.local_data(&origin(spec.n), spec.order.max(p + 1))?;
    track(normalize(&data, p))
}

fn expansion(spec: &ModelSpec, p: u32, s: u32) -> Result<(NormalizedChart, TyzExpansion)> {
    let c = chart(spec, p)?;
    let tyz = track(assemble_bergman_expansion(&c, s))?;
    Ok((c, tyz))
}

fn eps(num: i64, den: i64) -> ModelKind {
    ModelKind::PerturbedFock { eps: Rat::new(num, den) }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, title: &str, elapsed: Duration, out: Result<Outcome>) -> bool {
    let (pass, detail) = match out {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("{} criterion {id:>2}: {title} [{:.1}s] {detail}", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    pass
}

fn run(id: u32, title: &str, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let t0 = Instant::now();
    let out = f();
    report(id, title, t0.elapsed(), out)
}

fn builtin_models() -> Vec<ModelSpec> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for r in 1..=2 {
            for kind in [ModelKind::Fock, ModelKind::FubiniStudy, eps(1, 10), eps(1, 100)] {
                out.push(ModelSpec::new(kind, n, r, 12));
            }
        }
    }
    out
}

fn criterion_1() -> Result<Outcome> {
    let t0 = Instant::now();
    let mut specs = builtin_models();
    let mut seed = 0;
    for n in 1..=2 {
        for r in 1..=2 {
            for _ in 0..5 {
                specs.push(ModelSpec::new(ModelKind::Random { seed }, n, r, 12));
                seed += 1;
            }
        }
    }
    let mut bad = Vec::new();
    for spec in &specs {
        let (_, tyz) = expansion(spec, 10, 2)?;
        let id = MatrixJet::identity(spec.r, spec.n, 0).constant_matrix();
        if tyz.coeffs[0] != id {
            bad.push(format!("{} n={} r={}", spec.name(), spec.n, spec.r));
        }
    }
    let elapsed = t0.elapsed();
    Ok(Outcome {
        pass: bad.is_empty() && elapsed < Duration::from_secs(60),
        detail: format!("{} models ({} random), a₀ ≠ I for {:?}, {:.1}s < 60s", specs.len(), 20, bad, elapsed.as_secs_f64()),
    })
}

fn criterion_2() -> Result<Outcome> {
    let t0 = Instant::now();
    let mut specs = vec![ModelSpec::new(ModelKind::Fock, 1, 1, 12), ModelSpec::new(ModelKind::Fock, 2, 1, 12)];
    for n in 1..=2 {
        specs.push(ModelSpec::new(ModelKind::FubiniStudy, n, 1, 12));
        specs.push(ModelSpec::new(eps(1, 10), n, 1, 12));
        specs.push(ModelSpec::new(eps(1, 100), n, 1, 12));
    }
    for i in 0..10 {
        specs.push(ModelSpec::new(ModelKind::Random { seed: 1000 + i }, 1 + (i as usize % 2), 1, 12));
    }
    let mut bad = Vec::new();
    for spec in &specs {
        let data = spec.local_data(&origin(spec.n), 12)?;
        // curvature from the original potential, independent of the normal form
        let rho = scalar_at_origin(&PotentialJet::new(data.phi.clone())?)?;
        let (_, tyz) = expansion(spec, 10, 2)?;
        let want = rho.scale(&Rat::new(1, 2));
        if tyz.coeffs[1][0][0] != want {
            bad.push(format!("{} n={}: a₁ = {} vs ρ/2 = {}", spec.name(), spec.n, tyz.coeffs[1][0][0], want));
        }
    }
    let elapsed = t0.elapsed();
    Ok(Outcome {
        pass: bad.is_empty() && elapsed < Duration::from_secs(300),
        detail: format!("{} models (10 random), mismatches {:?}, {:.1}s < 300s", specs.len(), bad, elapsed.as_secs_f64()),
    })
}

fn criterion_3() -> Result<Outcome> {
    let spec = ModelSpec::new(ModelKind::FubiniStudy, 1, 1, 8);
    let (_, tyz) = expansion(&spec, 4, 1)?;
    let mut bad = Vec::new();
    for m in 1..=200u64 {
        let u = Rat::new(m as i64 % 7, 3);
        let oracle = cp1_exact_bergman(m, &u)?;
        let pipe = truncated_density(&tyz, 0, 0, m, 1);
        if pipe != Cq::real(oracle) {
            bad.push(m);
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: format!("m(a₀ + a₁/m) = m+1 for m ∈ 1..=200, mismatches {bad:?}") })
}

fn criterion_4() -> Result<Outcome> {
    let t0 = Instant::now();
    let mut worst_err = 0.0f64;
    let mut bad = 0;
    let mut count = 0;
    for n in 1..=2 {
        let spec = ModelSpec::new(ModelKind::Fock, n, 1, 4);
        let ps = MultiIndex::all_up_to(n, 4);
        let mut list = Vec::new();
        for p in &ps {
            for q in &ps {
                for radial in 0..=2 {
                    list.push((p.clone(), q.clone(), radial));
                }
            }
        }
        for m in [1u64, 10, 100] {
            let res = quadrature_moments(&spec, &list, m, Radius::Squared(f64::INFINITY), Execution::Parallel)?;
            for ((p, q, radial), o) in list.iter().zip(&res) {
                let exact = if *radial == 0 {
                    monomial_moment(p, q)
                } else if p == q {
                    radial_moment(p, *radial)
                } else {
                    monomial_moment(p, q)
                };
                let want = DdC::real(Dd::from_rat(&exact.at(m)));
                // Cauchy–Schwarz scale of the integrand
                let scale = (radial_moment(p, *radial).at(m).to_f64() * radial_moment(q, *radial).at(m).to_f64()).sqrt();
                let diff = (o.value - want).abs().to_f64();
                let rel_err = o.error / scale;
                worst_err = worst_err.max(rel_err);
                count += 1;
                if diff > o.error.max(1e-30 * scale) || rel_err > 1e-10 {
                    bad += 1;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    Ok(Outcome {
        pass: bad == 0 && elapsed < Duration::from_secs(120),
        detail: format!("{count} moments, {bad} outside oracle error, worst relative oracle error {worst_err:.1e} ≤ 1e-10, {:.1}s < 120s", elapsed.as_secs_f64()),
    })
}

fn criterion_5() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for m in [100u64, 1000, 10_000] {
        for k in 0..=4 {
            let r = tail_check(&MultiIndex::new(vec![k]), m, 0.5)?;
            let (tail, err) = r.quadrature.expect("n = 1 quadratures the tail");
            worst = worst.max((tail + err) / r.bound);
            if !(r.passes && tail + err <= r.bound && tail + err <= r.target) {
                bad.push((m, k));
            }
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: format!("ε₁ = 1/2, worst tail/bound = {worst:.2e}, failures {bad:?}") })
}

fn criterion_6() -> Result<Outcome> {
    let t0 = Instant::now();
    let (order, p) = (12, 10);
    let mut violations = 0;
    let mut not_idempotent = 0;
    let mut nontrivial = 0;
    for i in 0..50u64 {
        let spec = ModelSpec::new(ModelKind::Random { seed: 2000 + i }, 1 + (i as usize % 2), 1 + (i as usize / 2 % 2), order);
        let data = spec.local_data(&origin(spec.n), order)?;
        let c = track(normalize(&data, p))?;
        violations += verify_k_normal(&c, p).len();
        if !c.change.as_ref().is_some_and(|ch| ch.is_identity()) {
            nontrivial += 1;
        }
        let again = track(normalize(&c.as_local_data(), p))?;
        if !again.change.as_ref().is_some_and(|ch| ch.is_identity()) || again.metric != c.metric || again.bundle_metric != c.bundle_metric {
            not_idempotent += 1;
        }
    }
    let elapsed = t0.elapsed();
    Ok(Outcome {
        pass: violations == 0 && not_idempotent == 0 && elapsed < Duration::from_secs(300),
        detail: format!(
            "50 random potentials ({nontrivial} needed a change), {violations} violations, {not_idempotent} not idempotent, {:.1}s < 300s",
            elapsed.as_secs_f64()
        ),
    })
}

fn criterion_7() -> Result<Outcome> {
    let ms = [50.0, 100.0, 200.0, 400.0];
    let mut rows = 0;
    let mut vanishing = 0;
    let mut failures = Vec::new();
    for n in 1..=2 {
        for kind in [ModelKind::FubiniStudy, eps(1, 10)] {
            let spec = ModelSpec::new(kind, n, 1, 16);
            let c = chart(&spec, 14)?;
            let rep = track(block_decay_audit(&c, 3, 4, &ms))?;
            for row in &rep.rows {
                rows += 1;
                if row.fitted.is_none() {
                    vanishing += 1;
                }
                if !row.passes {
                    failures.push(format!("{} n={n} {}", spec.name(), row.label));
                }
            }
        }
    }
    // Rotation-invariant models have A ≡ 0; audit a generic chart through its exact leading exponents.
    let spec = ModelSpec::new(ModelKind::Random { seed: 7 }, 1, 1, 16);
    let c = chart(&spec, 14)?;
    let rep = track(block_decay_audit(&c, 3, 4, &ms))?;
    let mut generic_bad = Vec::new();
    for row in &rep.rows {
        if row.leading_exponent.is_some_and(|e| e < row.required) {
            generic_bad.push(row.label.clone());
        }
    }
    Ok(Outcome {
        pass: failures.is_empty() && generic_bad.is_empty(),
        detail: format!(
            "{rows} blocks over fubini_study/perturbed_fock n=1,2 ({vanishing} vanish identically), failures {failures:?}; random chart leading exponents below 1+|α-β|/2: {generic_bad:?}"
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let t0 = Instant::now();
    let spec = ModelSpec::new(eps(1, 10), 1, 1, 8);
    let mut pass = true;
    let mut parts = Vec::new();
    for s in 1..=2 {
        let rep = track(compare_expansions(&spec, &CompareOptions::new(Schedule::Fixed(s), vec![50, 100, 200, 400]), Execution::Parallel))?;
        let fitted = rep.fitted_exponent;
        let ok = fitted.is_some_and(|f| f >= s as f64 - 0.25);
        pass &= ok;
        parts.push(format!("s={s}: slope {} ≥ {}", fitted.map_or("none".into(), |f| format!("{f:.3}")), s as f64 - 0.25));
    }
    let elapsed = t0.elapsed();
    pass &= elapsed < Duration::from_secs(900);
    Ok(Outcome { pass, detail: format!("{}, {:.1}s < 900s", parts.join("; "), elapsed.as_secs_f64()) })
}

fn criterion_9() -> Result<Outcome> {
    let ms = vec![50, 100, 200, 400, 800];
    let fs = ModelSpec::new(ModelKind::FubiniStudy, 1, 1, 8);
    let rep = track(compare_expansions(&fs, &CompareOptions::new(Schedule::LogM, ms.clone()), Execution::Parallel))?;
    let fs_zero = rep.rows.iter().all(|r| r.abs_residual <= r.oracle_error);
    let pf = ModelSpec::new(eps(1, 10), 1, 1, 8);
    let rep = track(compare_expansions(&pf, &CompareOptions::new(Schedule::LogM, ms), Execution::Parallel))?;
    let resolved = rep.rows.iter().all(|r| r.abs_residual > 10.0 * r.oracle_error);
    let sp = rep.super_polynomial == Some(true);
    let residuals: Vec<String> = rep.rows.iter().map(|r| format!("{}:{:.1e}", r.m, r.abs_residual)).collect();
    Ok(Outcome {
        pass: fs_zero && sp && resolved,
        detail: format!(
            "fubini_study residual 0 to oracle precision: {fs_zero}; perturbed_fock residuals at s=⌊log m⌋ [{}] beat m^-s₀ for s₀ ≤ 3: {sp} (fit {:.2})",
            residuals.join(", "),
            rep.fitted_exponent.unwrap_or(f64::NAN)
        ),
    })
}

fn main() {
    let mut all = true;
    all &= run(1, "a₀ = I on built-in and 20 random models", criterion_1);
    all &= run(2, "a₁ = ρ/2 exactly for line bundles", criterion_2);
    all &= run(3, "CP¹ expansion equals the closed-form kernel", criterion_3);
    all &= run(4, "Gaussian moments match quadrature", criterion_4);
    all &= run(5, "Gaussian tail bound", criterion_5);
    all &= run(6, "normal-form postconditions and idempotence", criterion_6);
    all &= run(7, "Gram block decay", criterion_7);
    all &= run(8, "residual order against the quadrature oracle", criterion_8);
    all &= run(9, "super-polynomial residuals under s = ⌊log m⌋", criterion_9);
    let fired = ASSERTIONS.load(Ordering::Relaxed);
    let runs = RUNS.load(Ordering::Relaxed);
    all &= report(10, "Neumann certificate and parity assertions never fire", Duration::ZERO, Ok(Outcome { pass: fired == 0, detail: format!("{fired} assertions across {runs} pipeline runs") }));
    if !all {
        std::process::exit(1);
    }
}
