use serde::{Deserialize, Serialize};

use greedylab_core::bases::BasisRep;
use greedylab_core::dkk::{ConcaveFamily, DkkSpace};
use greedylab_core::params::{LebesgueBudget, SearchMode};
use greedylab_core::spaces::SpaceSpec;
use greedylab_core::tga::TieRule;

/// One experiment, selected by its `op` field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Norm(NormConfig),
    PartitionFromConcave(PartitionConfig),
    Construct(ConstructConfig),
    Tga(TgaConfig),
    Params(ParamsConfig),
    Verify(VerifyConfig),
    Reproduce(ReproduceConfig),
}

impl ExperimentConfig {
    pub fn op(&self) -> &'static str {
        match self {
            ExperimentConfig::Norm(_) => "norm",
            ExperimentConfig::PartitionFromConcave(_) => "partition_from_concave",
            ExperimentConfig::Construct(_) => "construct",
            ExperimentConfig::Tga(_) => "tga",
            ExperimentConfig::Params(_) => "params",
            ExperimentConfig::Verify(_) => "verify",
            ExperimentConfig::Reproduce(_) => "reproduce",
        }
    }

    /// Replace every seed in the config with `seed`.
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Params(p) => p.measure.set_seed(seed),
            ExperimentConfig::Verify(v) => v.seed = Some(seed),
            ExperimentConfig::Reproduce(r) => r.seed = Some(seed),
            _ => {}
        }
    }

    /// Replace every exhaustive enumeration budget with `budget`.
    pub fn set_budget(&mut self, budget: u64) {
        match self {
            ExperimentConfig::Params(p) => p.measure.set_budget(budget),
            ExperimentConfig::Verify(v) => v.budget = Some(budget),
            ExperimentConfig::Reproduce(r) => r.budget = Some(budget),
            _ => {}
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentConfig::Params(p) => p.measure.seed(),
            ExperimentConfig::Verify(v) => v.seed,
            ExperimentConfig::Reproduce(r) => r.seed,
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisRep>,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub phi: ConcaveFamily,
    pub b: f64,
    pub r_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    /// A full DKK description; when absent the default instance is built.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dkk: Option<DkkSpace>,
    /// Number of dyadic blocks of the default instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TgaConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisRep>,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default)]
    pub tie: TieRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisRep>,
    pub measure: Measure,
}

/// A parameter measurement and its arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Measure {
    Democracy { m_max: usize, mode: SearchMode },
    KTilde { m_max: usize, mode: SearchMode },
    K { m_max: usize, mode: SearchMode },
    Beta { r: usize, q: f64, mode: SearchMode },
    Eta { r: usize, q: f64, mode: SearchMode },
    QuasiGreedy { trials: u64, seed: u64 },
    Suppression {
        mode: SearchMode,
        #[serde(default = "one")]
        b: usize,
        #[serde(default)]
        d: usize,
    },
    DemTqg { trials: u64, seed: u64 },
    Lebesgue { m: usize, budget: LebesgueBudget },
    Concavity { trials: u64, seed: u64 },
    BasisConstant { trials: u64, seed: u64 },
}

fn one() -> usize {
    1
}

fn mode_seed(mode: &mut SearchMode, seed: u64) {
    if let SearchMode::Sampled { seed: s, .. } = mode {
        *s = seed;
    }
}

fn mode_budget(mode: &mut SearchMode, budget: u64) {
    if let SearchMode::Exhaustive { budget: b, .. } = mode {
        *b = budget;
    }
}

impl Measure {
    fn mode_mut(&mut self) -> Option<&mut SearchMode> {
        match self {
            Measure::Democracy { mode, .. }
            | Measure::KTilde { mode, .. }
            | Measure::K { mode, .. }
            | Measure::Beta { mode, .. }
            | Measure::Eta { mode, .. }
            | Measure::Suppression { mode, .. } => Some(mode),
            _ => None,
        }
    }

    fn set_seed(&mut self, seed: u64) {
        match self {
            Measure::QuasiGreedy { seed: s, .. }
            | Measure::DemTqg { seed: s, .. }
            | Measure::Concavity { seed: s, .. }
            | Measure::BasisConstant { seed: s, .. } => *s = seed,
            Measure::Lebesgue { budget, .. } => budget.seed = seed,
            other => {
                if let Some(mode) = other.mode_mut() {
                    mode_seed(mode, seed);
                }
            }
        }
    }

    fn set_budget(&mut self, budget: u64) {
        if let Some(mode) = self.mode_mut() {
            mode_budget(mode, budget);
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Measure::QuasiGreedy { seed, .. }
            | Measure::DemTqg { seed, .. }
            | Measure::Concavity { seed, .. }
            | Measure::BasisConstant { seed, .. } => Some(*seed),
            Measure::Lebesgue { budget, .. } => Some(budget.seed),
            Measure::Democracy { mode, .. }
            | Measure::KTilde { mode, .. }
            | Measure::K { mode, .. }
            | Measure::Beta { mode, .. }
            | Measure::Eta { mode, .. }
            | Measure::Suppression { mode, .. } => match mode {
                SearchMode::Sampled { seed, .. } => Some(*seed),
                SearchMode::Exhaustive { .. } => None,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// A report to re-check; its witnesses are re-evaluated against `basis`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisRep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceConfig {
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}
