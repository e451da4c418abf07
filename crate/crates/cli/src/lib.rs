//! Batch front-end: `normalize`, `expand`, `oracle` and `compare` driven by a
//! JSON run configuration, writing CSV/JSON reports plus `manifest.json`.
//!
//! Exit codes: 0 success, 2 configuration, input or I/O error, 3 internal
//! pipeline assertion, 4 oracle tolerance or comparison failure.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use serde::Serialize;

use bergman_core::error::Error;
use bergman_core::jet::BidegreeJet;
use bergman_core::models::ModelKind;
use bergman_core::multiindex::MultiIndex;
use bergman_core::normal_forms::{normalize, verify_k_normal, Condition, LocalModel, NormalizedChart};
use bergman_core::oracle::{compare_expansions, exact_density, local_quadrature_gram, oracle_density, CompareOptions, OracleResult, Schedule};
use bergman_core::par::{self, Execution};
use bergman_core::peak_gram::{assemble_with, check_first_coefficient};
use bergman_core::rational::Cq;

use config::{Resolved, RunConfig};
use report::{complex_matrix, complex_vec, float, write_csv, write_json, Complex};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Pipeline(#[from] Error),
    /// An oracle tolerance or comparison check failed.
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Pipeline(e) if e.is_assertion() => 3,
            CliError::Pipeline(Error::Oracle(_)) | CliError::Check(_) => 4,
            // inputs the pipeline cannot handle, e.g. an irrational square root
            CliError::Pipeline(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Normalize,
    Expand,
    Oracle,
    Compare,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Normalize => "normalize",
            Command::Expand => "expand",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

#[derive(Serialize)]
struct OutputFile {
    file: String,
    rows: usize,
}

#[derive(Serialize)]
struct CompareSummary {
    schedule: String,
    fitted_exponent: Option<String>,
    required_exponent: Option<String>,
    super_polynomial: Option<bool>,
    passes: bool,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    model: &'static str,
    n: usize,
    r: usize,
    seed: Option<u64>,
    s: u32,
    p: u32,
    m_list: Vec<u64>,
    assumptions: [&'static str; 2],
    outputs: Vec<OutputFile>,
    compare: Option<CompareSummary>,
    status: &'static str,
    exit_code: i32,
    message: Option<String>,
}

/// Modeling choices behind every expansion, repeated in each manifest.
const ASSUMPTIONS: [&str; 2] = [
    "peak sections are the local models z^P e_j; their global correction is below e^{-(log m)^2/4} and is dropped",
    "Gram entries use full-space Gaussian moments; the cut-off tail is certified separately",
];

#[derive(Default)]
struct Outcome {
    outputs: Vec<OutputFile>,
    compare: Option<CompareSummary>,
    failure: Option<CliError>,
}

/// Execute one subcommand. Reports and `manifest.json` go to `inv.out`.
pub fn run(inv: &Invocation) -> Result<(), CliError> {
    let cfg = RunConfig::load(&inv.config)?.resolve(inv.seed)?;
    std::fs::create_dir_all(&inv.out).map_err(|e| CliError::Io(format!("{}: {e}", inv.out.display())))?;
    let exec = if inv.jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };
    let outcome = par::with_jobs(inv.jobs, || match inv.command {
        Command::Normalize => run_normalize(&cfg, &inv.out),
        Command::Expand => run_expand(&cfg, &inv.out, exec),
        Command::Oracle => run_oracle(&cfg, &inv.out, exec),
        Command::Compare => run_compare(&cfg, &inv.out, exec),
    });
    let mut outcome = outcome.unwrap_or_else(|e| Outcome { failure: Some(e), ..Default::default() });
    let failure = outcome.failure.take();
    let manifest = Manifest {
        tool: "bergman",
        version: env!("CARGO_PKG_VERSION"),
        command: inv.command.name(),
        model: cfg.spec.name(),
        n: cfg.spec.n,
        r: cfg.spec.r,
        seed: match cfg.spec.kind {
            ModelKind::Random { seed } => Some(seed),
            _ => None,
        },
        s: cfg.s,
        p: cfg.p,
        m_list: cfg.m_list.clone(),
        assumptions: ASSUMPTIONS,
        outputs: outcome.outputs,
        compare: outcome.compare,
        status: if failure.is_none() { "ok" } else { "failed" },
        exit_code: failure.as_ref().map_or(0, CliError::exit_code),
        message: failure.as_ref().map(ToString::to_string),
    };
    write_json(&inv.out.join("manifest.json"), &manifest)?;
    failure.map_or(Ok(()), Err)
}

fn chart_at(cfg: &Resolved, point: &[Cq]) -> Result<NormalizedChart, CliError> {
    let data = cfg.spec.local_data(point, cfg.spec.order.max(cfg.p + 1))?;
    Ok(normalize(&data, cfg.p)?)
}

#[derive(Serialize)]
struct Term {
    p: Vec<u32>,
    q: Vec<u32>,
    value: Complex,
}

/// Terms of degree at most `max_degree`, sorted by degree then exponents.
fn low_terms(j: &BidegreeJet, max_degree: u32) -> Vec<Term> {
    let n = j.n();
    let mut terms: Vec<(u32, MultiIndex, MultiIndex, Cq)> = j
        .terms()
        .filter(|(k, c)| k.degree() <= max_degree && !c.is_zero())
        .map(|(k, c)| (k.degree(), k.hol_index(n), k.anti_index(n), c.clone()))
        .collect();
    terms.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
    terms.into_iter().map(|(_, p, q, c)| Term { p: p.exps().to_vec(), q: q.exps().to_vec(), value: Complex::from(&c) }).collect()
}

#[derive(Serialize)]
struct ViolationRow {
    object: String,
    condition: String,
    value: Complex,
}

#[derive(Serialize)]
struct FrameSummary {
    identity: bool,
    /// Linear part `D` of the coordinate change.
    linear: Vec<Vec<Complex>>,
    sqrt_a: Complex,
    bundle_linear: Vec<Vec<Complex>>,
}

#[derive(Serialize)]
struct NormalizeRow {
    model: &'static str,
    n: usize,
    r: usize,
    p: u32,
    point: Vec<Complex>,
    k_normal: bool,
    violations: Vec<ViolationRow>,
    frame: Option<FrameSummary>,
    /// Normalized potential `-log a` through degree 4.
    potential: Vec<Term>,
}

fn run_normalize(cfg: &Resolved, out: &Path) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut bad = 0;
    for point in &cfg.points {
        let chart = chart_at(cfg, point)?;
        let violations: Vec<ViolationRow> = verify_k_normal(&chart, cfg.p)
            .into_iter()
            .map(|v| ViolationRow {
                object: v.object,
                condition: match v.condition {
                    Condition::Constant => "constant".into(),
                    Condition::PureHolomorphic(p) => format!("pure_holomorphic {p}"),
                },
                value: Complex::from(&v.value),
            })
            .collect();
        bad += violations.len();
        rows.push(NormalizeRow {
            model: cfg.spec.name(),
            n: cfg.spec.n,
            r: cfg.spec.r,
            p: cfg.p,
            point: complex_vec(point),
            k_normal: violations.is_empty(),
            violations,
            frame: chart.change.as_ref().map(|f| FrameSummary {
                identity: f.is_identity(),
                linear: complex_matrix(&f.coords.d),
                sqrt_a: Complex::from(&Cq::real(f.line.sqrt_a0.clone())),
                bundle_linear: complex_matrix(&f.bundle.k),
            }),
            potential: low_terms(&chart.potential, 4),
        });
    }
    let file = &cfg.outputs.normalize;
    write_json(&out.join(file), &rows)?;
    let failure = (bad > 0).then(|| CliError::Pipeline(Error::Assertion(format!("{bad} K-normality violations"))));
    Ok(Outcome { outputs: vec![OutputFile { file: file.clone(), rows: rows.len() }], failure, ..Default::default() })
}

#[derive(Serialize)]
struct ExpandRow {
    model: &'static str,
    n: usize,
    r: usize,
    s: u32,
    point: Vec<Complex>,
    /// `coeffs[k]` is the `r × r` matrix `a_k`.
    coeffs: Vec<Vec<Vec<Complex>>>,
}

fn run_expand(cfg: &Resolved, out: &Path, exec: Execution) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for point in &cfg.points {
        let chart = chart_at(cfg, point)?;
        let tyz = assemble_with(&chart, cfg.s, exec)?;
        let r = cfg.spec.r;
        for i in 0..r {
            for j in 0..r {
                let want = if i == j { Cq::one() } else { Cq::zero() };
                if tyz.coeffs[0][i][j] != want {
                    return Err(Error::Assertion(format!("a₀ ≠ I at entry ({}, {})", i + 1, j + 1)).into());
                }
            }
        }
        check_first_coefficient(&chart, &tyz)?;
        rows.push(ExpandRow {
            model: cfg.spec.name(),
            n: cfg.spec.n,
            r,
            s: cfg.s,
            point: complex_vec(point),
            coeffs: tyz.coeffs.iter().map(complex_matrix).collect(),
        });
    }
    let file = &cfg.outputs.expand;
    write_json(&out.join(file), &rows)?;
    Ok(Outcome { outputs: vec![OutputFile { file: file.clone(), rows: rows.len() }], ..Default::default() })
}

/// `oracle` and `compare` work in the model chart at the origin.
fn require_origin(cfg: &Resolved, what: &str) -> Result<(), CliError> {
    if cfg.points.iter().any(|p| p.iter().any(|c| !c.is_zero())) {
        return Err(CliError::Config(format!("{what} runs at the origin; drop the nonzero base points")));
    }
    if !cfg.oracle && exact_density(&cfg.spec, 1).is_none() {
        return Err(CliError::Config(format!("{} has no closed-form kernel and the oracle is disabled", cfg.spec.name())));
    }
    Ok(())
}

pub const ORACLE_HEADER: [&str; 8] = ["model", "n", "r", "m", "quantity", "value_re", "value_im", "error"];

fn run_oracle(cfg: &Resolved, out: &Path, exec: Execution) -> Result<Outcome, CliError> {
    require_origin(cfg, "oracle")?;
    if !cfg.oracle && !cfg.gram_entries.is_empty() {
        return Err(CliError::Config("gram_entries need the quadrature oracle".into()));
    }
    let mut results: Vec<OracleResult> = Vec::new();
    for &m in &cfg.m_list {
        results.extend(oracle_density(&cfg.spec, m, cfg.basis_degree, cfg.radius, exec)?);
        for (p, q, i, j) in &cfg.gram_entries {
            results.push(local_quadrature_gram(&cfg.spec, p, q, *i, *j, m, cfg.radius, None, exec)?);
        }
    }
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|o| {
            vec![
                cfg.spec.name().to_string(),
                cfg.spec.n.to_string(),
                cfg.spec.r.to_string(),
                o.m.to_string(),
                o.quantity.to_string(),
                float(o.value.re.to_f64()),
                float(o.value.im.to_f64()),
                float(o.error),
            ]
        })
        .collect();
    let file = &cfg.outputs.oracle;
    write_csv(&out.join(file), &ORACLE_HEADER, &rows)?;
    let failure = cfg.tolerance.and_then(|tol| {
        let worst = results.iter().filter(|o| o.error > tol * o.value.abs().to_f64()).count();
        (worst > 0).then(|| CliError::Check(format!("{worst} oracle values exceed relative error {tol:e}")))
    });
    Ok(Outcome { outputs: vec![OutputFile { file: file.clone(), rows: rows.len() }], failure, ..Default::default() })
}

pub const COMPARE_HEADER: [&str; 10] = ["model", "n", "r", "s", "m", "quantity", "pipeline_value", "oracle_value", "abs_residual", "fitted_exponent"];

fn run_compare(cfg: &Resolved, out: &Path, exec: Execution) -> Result<Outcome, CliError> {
    require_origin(cfg, "compare")?;
    let mut opts = CompareOptions::new(cfg.schedule, cfg.m_list.clone());
    opts.tolerance = cfg.tolerance;
    opts.basis_degree = cfg.basis_degree;
    opts.radius = cfg.radius;
    opts.p = Some(cfg.p);
    let rep = compare_expansions(&cfg.spec, &opts, exec)?;
    let fitted = rep.fitted_exponent.map(float).unwrap_or_default();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|row| {
            vec![
                rep.model.clone(),
                rep.n.to_string(),
                rep.r.to_string(),
                row.s.to_string(),
                row.m.to_string(),
                row.quantity.to_string(),
                float(row.pipeline.to_f64()),
                float(row.oracle.to_f64()),
                float(row.abs_residual),
                fitted.clone(),
            ]
        })
        .collect();
    let file = &cfg.outputs.compare;
    write_csv(&out.join(file), &COMPARE_HEADER, &rows)?;
    let failing = rep.rows.iter().filter(|r| !r.passes).count();
    let failure = (!rep.passes).then(|| {
        CliError::Check(match (failing, rep.fitted_exponent, rep.required_exponent) {
            (0, Some(f), Some(req)) => format!("fitted exponent {f:.3} below {req:.3}"),
            (0, ..) => "residuals do not decay super-polynomially".into(),
            (k, ..) => format!("{k} rows exceed the tolerance"),
        })
    });
    Ok(Outcome {
        outputs: vec![OutputFile { file: file.clone(), rows: rows.len() }],
        compare: Some(CompareSummary {
            schedule: match rep.schedule {
                Schedule::Fixed(s) => format!("fixed({s})"),
                Schedule::LogM => "log".into(),
            },
            fitted_exponent: rep.fitted_exponent.map(float),
            required_exponent: rep.required_exponent.map(float),
            super_polynomial: rep.super_polynomial,
            passes: rep.passes,
        }),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        assert_eq!(CliError::Pipeline(Error::IrrationalSqrt("x".into())).exit_code(), 2);
        assert_eq!(CliError::Pipeline(Error::Assertion("x".into())).exit_code(), 3);
        assert_eq!(CliError::Pipeline(Error::Neumann("x".into())).exit_code(), 3);
        assert_eq!(CliError::Pipeline(Error::Oracle("x".into())).exit_code(), 4);
        assert_eq!(CliError::Check("x".into()).exit_code(), 4);
    }
}
