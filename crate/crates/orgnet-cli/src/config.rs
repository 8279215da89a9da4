//! JSON run-configuration schema and its conversion into engine types.
//!
//! Keys mirror the engine type and field names.  Two shorthands keep large
//! symmetric games terse: `"weights": {"uniform": 250}` and
//! `"benefits": {"constant": 2.0}`; a bare integer stands for a
//! single-point task or worker count, e.g. `"p": 2`.

use orgnet::{
    make_pmf, BranchingSpec64, CostSpec64, CultureMap64, Depth, GameConfig64, GameTemplate64,
    Pmf64, ProjectMenu64, ShockSpec64,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const CONFIG_VERSION: u64 = 1;

/// The run-configuration file.  Commands read the sections they need and
/// ignore the rest, so one file can drive several commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub culture: Option<CultureCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benefits: Option<BenefitsCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shocks: Option<ShocksCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shock_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub menu: Option<MenuCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cultures: Option<BTreeMap<String, f64>>,
}

/// A task/worker count distribution: either a single count (`2`) or a full
/// table over `support` with `probs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PmfCfg {
    Single(u32),
    Table { support: Vec<u32>, probs: Vec<f64> },
}

impl PmfCfg {
    pub fn build(&self) -> orgnet::Result<Pmf64> {
        match self {
            PmfCfg::Single(n) => make_pmf(vec![*n], vec![1.0]),
            PmfCfg::Table { support, probs } => make_pmf(support.clone(), probs.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthCfg {
    Infinite,
    Finite(u32),
}

impl From<DepthCfg> for Depth {
    fn from(d: DepthCfg) -> Depth {
        match d {
            DepthCfg::Infinite => Depth::Infinite,
            DepthCfg::Finite(l) => Depth::Finite(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecCfg {
    pub p: PmfCfg,
    pub q: PmfCfg,
    pub depth: DepthCfg,
}

impl SpecCfg {
    pub fn build(&self) -> orgnet::Result<BranchingSpec64> {
        BranchingSpec64::new(self.p.build()?, self.q.build()?, self.depth.into())
    }
}

/// An inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl GridCfg {
    /// Expands to the points `start, start + step, ...` up to `end`
    /// (inclusive, with a half-step tolerance for round-off).
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0 && self.end >= self.start) {
            return Err(format!(
                "grid needs step > 0 and end >= start, got {}:{}:{}",
                self.start, self.step, self.end
            ));
        }
        let n = ((self.end - self.start) / self.step + 0.5).floor() as usize;
        Ok((0..=n)
            .map(|i| (self.start + i as f64 * self.step).min(self.end))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsCfg {
    Uniform { uniform: usize },
    List(Vec<f64>),
}

impl WeightsCfg {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            WeightsCfg::Uniform { uniform } => {
                vec![1.0 / (*uniform).max(1) as f64; *uniform]
            }
            WeightsCfg::List(w) => w.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BenefitsCfg {
    Constant { constant: f64 },
    List(Vec<f64>),
}

impl BenefitsCfg {
    pub fn to_vec(&self, k: usize) -> Vec<f64> {
        match self {
            BenefitsCfg::Constant { constant } => vec![*constant; k],
            BenefitsCfg::List(a) => a.clone(),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CultureCfg {
    pub baseline: f64,
    pub weights: WeightsCfg,
    #[serde(default = "one")]
    pub beta: f64,
}

impl CultureCfg {
    pub fn build(&self) -> orgnet::Result<CultureMap64> {
        CultureMap64::new(self.baseline, self.weights.to_vec(), self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostCfg {
    Barrier { alpha: f64 },
    SmoothBarrier { alpha: f64, gamma: f64 },
}

impl CostCfg {
    pub fn build(&self) -> CostSpec64 {
        match *self {
            CostCfg::Barrier { alpha } => CostSpec64::Barrier { alpha },
            CostCfg::SmoothBarrier { alpha, gamma } => CostSpec64::SmoothBarrier { alpha, gamma },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShocksCfg {
    pub psi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
}

impl ShocksCfg {
    pub fn build(&self) -> orgnet::Result<ShockSpec64> {
        let spec = ShockSpec64::uniform(self.psi, self.s_lo, self.s_hi)?;
        match self.quadrature_nodes {
            Some(n) => spec.with_nodes(n),
            None => Ok(spec),
        }
    }
}

/// Game template for project selection: everything of a [`GameConfig64`]
/// except the technology and the baseline, which the menu supplies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateCfg {
    pub weights: WeightsCfg,
    #[serde(default = "one")]
    pub beta: f64,
    pub benefits: BenefitsCfg,
    pub cost: CostCfg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shocks: Option<ShocksCfg>,
}

impl TemplateCfg {
    pub fn build(&self) -> orgnet::Result<GameTemplate64> {
        let weights = self.weights.to_vec();
        let benefits = self.benefits.to_vec(weights.len());
        Ok(GameTemplate64 {
            weights,
            beta: self.beta,
            benefits,
            cost: self.cost.build(),
            shocks: match &self.shocks {
                Some(s) => Some(s.build()?),
                None => None,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuCfg {
    pub simple_spec: SpecCfg,
    pub complex_spec: SpecCfg,
    pub v_simple: f64,
    pub v_complex: f64,
    pub game: TemplateCfg,
    #[serde(default)]
    pub net_of_costs: bool,
}

impl MenuCfg {
    pub fn build(&self) -> orgnet::Result<ProjectMenu64> {
        Ok(ProjectMenu64::new(
            self.simple_spec.build()?,
            self.complex_spec.build()?,
            self.v_simple,
            self.v_complex,
            self.game.build()?,
        )?
        .with_net_of_costs(self.net_of_costs))
    }
}

impl FileConfig {
    /// Assembles the full investment game from the `spec`, `culture`,
    /// `cost`, `benefits`, and optional `shocks` sections.
    pub fn game_config(&self) -> Result<GameConfig64, super::CliError> {
        let spec = require(&self.spec, "spec")?.build()?;
        let culture = require(&self.culture, "culture")?.build()?;
        let cost = require(&self.cost, "cost")?.build();
        let k = culture.weights().len();
        let benefits = require(&self.benefits, "benefits")?.to_vec(k);
        let shocks = match &self.shocks {
            Some(s) => Some(s.build()?),
            None => None,
        };
        Ok(GameConfig64::new(spec, culture, cost, benefits, shocks)?)
    }
}

/// Missing-section error, named after the config key.
pub fn require<'a, T>(field: &'a Option<T>, key: &str) -> Result<&'a T, super::CliError> {
    field
        .as_ref()
        .ok_or_else(|| super::CliError::Config(format!("missing required key `{key}`")))
}
