//! Experiment configs: one JSON file describes one experiment. The
//! payload schema is keyed by the `experiment` tag; `gexpect schema`
//! prints the full contract.

use serde::{Deserialize, Serialize};

use gexpect_core::{
    Builder, CovariancePolytope, DecaySchedule, DpPolicy, GridResolution, LimitLaw, MeanPolytope,
    Mode, SequenceSpec, TestFunction,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "spec", rename_all = "snake_case")]
pub enum Experiment {
    Clt(CltSpec),
    Lln(LlnSpec),
    Pde(PdeSpec),
    Maximal(MaximalSpec),
    Hausdorff(HausdorffSpec),
    Validate(ValidateSpec),
}

impl Experiment {
    pub fn tag(&self) -> &'static str {
        match self {
            Experiment::Clt(_) => "clt",
            Experiment::Lln(_) => "lln",
            Experiment::Pde(_) => "pde",
            Experiment::Maximal(_) => "maximal",
            Experiment::Hausdorff(_) => "hausdorff",
            Experiment::Validate(_) => "validate",
        }
    }
}

/// A sequence description: builder id plus params, the declared limit
/// (defaulted from the builder when it has a canonical one), and the
/// declared moment bound and rate schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub builder: Builder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_bound: Option<f64>,
    /// Weakened moment order in (2, 3]; the bound defaults to the third
    /// moment in clt mode and always the second in lln mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<DecaySchedule>,
}

impl SequenceConfig {
    pub fn build(&self) -> Result<SequenceSpec, CliError> {
        let base = match &self.builder {
            Builder::Explicit { .. } => None,
            b => Some(SequenceSpec::from_builder(b.clone()).map_err(CliError::config)?),
        };

        let mode = match (self.mode, &base) {
            (Some(m), _) => m,
            (None, Some(b)) => b.mode(),
            (None, None) => {
                return Err(CliError::Config(
                    "explicit sequences must declare a mode".into(),
                ))
            }
        };
        if let Some(b) = &base {
            if b.mode() != mode {
                return Err(CliError::Config(format!(
                    "builder targets the {:?} limit but the config declares {:?}",
                    b.mode(),
                    mode
                )));
            }
        }

        let limit = match &self.limit {
            Some(value) => match mode {
                Mode::Clt => LimitLaw::GNormal(
                    serde_json::from_value::<CovariancePolytope>(value.clone())
                        .map_err(CliError::config)?,
                ),
                Mode::Lln => LimitLaw::Maximal(
                    serde_json::from_value::<MeanPolytope>(value.clone())
                        .map_err(CliError::config)?,
                ),
            },
            None => match &base {
                Some(b) => b.limit().clone(),
                None => {
                    return Err(CliError::Config(
                        "explicit sequences must declare a limit".into(),
                    ))
                }
            },
        };

        let moment_bound = match (self.moment_bound, &base) {
            (Some(m), _) => m,
            (None, Some(b)) => b.moment_bound(),
            (None, None) => {
                return Err(CliError::Config(
                    "explicit sequences must declare a moment_bound".into(),
                ))
            }
        };

        let schedule = self
            .schedule
            .clone()
            .or_else(|| base.as_ref().and_then(|b| b.schedule().cloned()));

        if let Some(d) = self.dimension {
            if d != self.builder.dimension() {
                return Err(CliError::Config(format!(
                    "declared dimension {d} does not match the builder dimension {}",
                    self.builder.dimension()
                )));
            }
        }

        let spec = SequenceSpec::new(self.builder.clone(), limit, moment_bound, schedule)
            .map_err(CliError::config)?;
        match self.moment_order {
            Some(order) => spec.with_moment_order(order).map_err(CliError::config),
            None => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CltSpec {
    pub sequence: SequenceConfig,
    pub phi: TestFunction,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub pde: GridResolution,
    #[serde(default)]
    pub dp: DpPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlnSpec {
    pub sequence: SequenceConfig,
    pub phi: TestFunction,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub dp: DpPolicy,
}

/// Solver run: exactly one of `sigma2` (1-d variance interval), `theta`
/// (covariance polytope) or `gamma` (mean polytope, first-order
/// transport) selects the equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<CovariancePolytope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MeanPolytope>,
    pub phi: TestFunction,
    pub grid: GridConfig,
}

/// Grid geometry; scalar extents give a 1-d grid, two-element arrays a
/// 2-d one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    TwoD {
        #[serde(rename = "L")]
        l: [f64; 2],
        #[serde(rename = "J")]
        j: [usize; 2],
        #[serde(rename = "T")]
        t: f64,
        dt: f64,
    },
    OneD {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "J")]
        j: usize,
        #[serde(rename = "T")]
        t: f64,
        dt: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalSpec {
    pub gamma: MeanPolytope,
    pub phi: TestFunction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffSpec {
    pub a: CovariancePolytope,
    pub b: CovariancePolytope,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    pub sequence: SequenceConfig,
    #[serde(default = "default_n_check")]
    pub n_check: usize,
    #[serde(default = "default_probe_count")]
    pub probes: usize,
}

fn default_n_check() -> usize {
    32
}

fn default_probe_count() -> usize {
    16
}
