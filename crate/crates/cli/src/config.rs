//! Run configuration: one JSON document per run.

use std::path::Path;

use serde::Deserialize;

use bergman_core::models::{ModelKind, ModelSpec};
use bergman_core::multiindex::MultiIndex;
use bergman_core::oracle::{Radius, Schedule};
use bergman_core::rational::{Cq, Rat};

use crate::CliError;

/// An exact scalar: an integer, or a string such as `"-3/4"` or `"0.125"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_rat(&self) -> Result<Rat, CliError> {
        match self {
            Scalar::Int(n) => Ok(Rat::from_int(*n)),
            Scalar::Text(s) => s.parse().map_err(CliError::Config),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::Int(0)
    }
}

/// A base-point coordinate: a real scalar or `[re, im]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coordinate {
    Real(Scalar),
    Complex([Scalar; 2]),
}

impl Coordinate {
    fn to_cq(&self) -> Result<Cq, CliError> {
        match self {
            Coordinate::Real(x) => Ok(Cq::real(x.to_rat()?)),
            Coordinate::Complex([re, im]) => Ok(Cq::new(re.to_rat()?, im.to_rat()?)),
        }
    }
}

/// One coefficient `c z^P z̄^Q` of a user potential.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub re: Scalar,
    #[serde(default)]
    pub im: Scalar,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "one")]
    pub r: usize,
    /// Jet order; defaults to `2s + 10`.
    pub order: Option<u32>,
    /// Quartic coefficient of `perturbed_fock`.
    pub eps: Option<Scalar>,
    /// Seed of the `random` model.
    pub seed: Option<u64>,
    #[serde(default)]
    pub terms: Vec<Term>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleConfig {
    #[default]
    Fixed,
    /// `s(m) = ⌊log m⌋`.
    Log,
}

/// Quadrature radius: `"log_ball"` for `log m/√m`, or a number giving `R²`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RadiusConfig {
    Squared(f64),
    Named(String),
}

impl Default for RadiusConfig {
    fn default() -> Self {
        RadiusConfig::Squared(1.0)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramEntry {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    #[serde(default = "one")]
    pub i: usize,
    #[serde(default = "one")]
    pub j: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub normalize: String,
    pub expand: String,
    pub oracle: String,
    pub compare: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            normalize: "normalize.json".into(),
            expand: "expand.json".into(),
            oracle: "oracle.csv".into(),
            compare: "compare.csv".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub s: u32,
    pub m_list: Vec<u64>,
    /// Defaults to the origin.
    #[serde(default)]
    pub base_points: Vec<Vec<Coordinate>>,
    /// `false` restricts `oracle` and `compare` to closed-form kernels.
    #[serde(default = "yes")]
    pub oracle: bool,
    /// `compare`: relative residual tolerance per row. `oracle`: relative
    /// bound on the quadrature error estimate.
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "four")]
    pub basis_degree: u32,
    #[serde(default)]
    pub radius: RadiusConfig,
    /// Normalization order; defaults to `2s + 10`.
    pub p: Option<u32>,
    /// Extra Gram entries reported by `oracle`.
    #[serde(default)]
    pub gram_entries: Vec<GramEntry>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn yes() -> bool {
    true
}

fn four() -> u32 {
    4
}

/// A validated configuration with exact values.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub spec: ModelSpec,
    pub s: u32,
    pub p: u32,
    pub m_list: Vec<u64>,
    pub points: Vec<Vec<Cq>>,
    pub oracle: bool,
    pub tolerance: Option<f64>,
    pub schedule: Schedule,
    pub basis_degree: u32,
    pub radius: Radius,
    pub gram_entries: Vec<(MultiIndex, MultiIndex, usize, usize)>,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Check the invariants and build the model. `seed` overrides the seed of
    /// a `random` model.
    pub fn resolve(&self, seed: Option<u64>) -> Result<Resolved, CliError> {
        let cfg = |msg: String| CliError::Config(msg);
        let m = &self.model;
        if self.m_list.is_empty() {
            return Err(cfg("m_list must not be empty".into()));
        }
        if self.m_list.contains(&0) {
            return Err(cfg("m_list entries must be positive".into()));
        }
        let min_order = 2 * self.s + 10;
        let order = m.order.unwrap_or(min_order);
        if order < min_order {
            return Err(cfg(format!("jet order {order} is below 2s + 10 = {min_order}")));
        }
        let p = self.p.unwrap_or(min_order);
        if p < 2 * self.s + 2 {
            return Err(cfg(format!("normalization order {p} is below 2s + 2 = {}", 2 * self.s + 2)));
        }
        let kind = match m.name.as_str() {
            "fock" => ModelKind::Fock,
            "fubini_study" => ModelKind::FubiniStudy,
            "perturbed_fock" => {
                let eps = m.eps.as_ref().ok_or_else(|| cfg("perturbed_fock needs eps".into()))?;
                ModelKind::PerturbedFock { eps: eps.to_rat()? }
            }
            "user" => {
                if m.terms.is_empty() {
                    return Err(cfg("user model needs terms".into()));
                }
                let terms = m
                    .terms
                    .iter()
                    .map(|t| Ok((MultiIndex::new(t.p.clone()), MultiIndex::new(t.q.clone()), Cq::new(t.re.to_rat()?, t.im.to_rat()?))))
                    .collect::<Result<Vec<_>, CliError>>()?;
                ModelKind::User { terms }
            }
            "random" => ModelKind::Random { seed: seed.or(m.seed).unwrap_or(0) },
            other => return Err(cfg(format!("unknown model {other:?}"))),
        };
        let spec = ModelSpec::new(kind, m.n, m.r, order);
        spec.validate().map_err(|e| cfg(e.to_string()))?;

        let points = if self.base_points.is_empty() {
            vec![vec![Cq::zero(); m.n]]
        } else {
            self.base_points
                .iter()
                .map(|pt| {
                    if pt.len() != m.n {
                        return Err(cfg(format!("base point has {} coordinates, model has n = {}", pt.len(), m.n)));
                    }
                    pt.iter().map(Coordinate::to_cq).collect()
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        let radius = match &self.radius {
            RadiusConfig::Squared(r2) if *r2 > 0.0 => Radius::Squared(*r2),
            RadiusConfig::Named(s) if s == "log_ball" => Radius::LogBall,
            RadiusConfig::Named(s) if s == "infinity" => Radius::Squared(f64::INFINITY),
            other => return Err(cfg(format!("radius must be a positive R², \"log_ball\" or \"infinity\", got {other:?}"))),
        };
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(cfg(format!("tolerance must be nonnegative, got {t}")));
            }
        }
        let gram_entries = self
            .gram_entries
            .iter()
            .map(|g| {
                if g.p.len() != m.n || g.q.len() != m.n {
                    return Err(cfg(format!("gram entry multi-indices need {} entries", m.n)));
                }
                Ok((MultiIndex::new(g.p.clone()), MultiIndex::new(g.q.clone()), g.i, g.j))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Resolved {
            spec,
            s: self.s,
            p,
            m_list: self.m_list.clone(),
            points,
            oracle: self.oracle,
            tolerance: self.tolerance,
            schedule: match self.schedule {
                ScheduleConfig::Fixed => Schedule::Fixed(self.s),
                ScheduleConfig::Log => Schedule::LogM,
            },
            basis_degree: self.basis_degree,
            radius,
            gram_entries,
            outputs: self.outputs.clone(),
        })
    }
}
