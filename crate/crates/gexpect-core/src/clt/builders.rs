//! Sequence builders: deterministic rules that produce the per-step
//! scenario set together with the limit object, moment bound, and decay
//! schedule the rule provably satisfies.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{g_from_scenarios, CovariancePolytope, DecaySchedule};
use crate::error::{Error, Result};
use crate::pde::MeanPolytope;
use crate::scenario::{DiscreteDistribution, ScenarioSet};

/// Which limit theorem a sequence targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Clt,
    Lln,
}

/// The declared limit law of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitLaw {
    /// Covariance-uncertain normal limit, identified by its polytope.
    GNormal(CovariancePolytope),
    /// Maximal distribution, identified by its mean polytope.
    Maximal(MeanPolytope),
}

impl LimitLaw {
    pub fn mode(&self) -> Mode {
        match self {
            LimitLaw::GNormal(_) => Mode::Clt,
            LimitLaw::Maximal(_) => Mode::Lln,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            LimitLaw::GNormal(t) => t.dimension(),
            LimitLaw::Maximal(g) => g.dimension(),
        }
    }
}

/// Step-generation rules. Serialized as `{"id": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "id",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum Builder {
    /// The same scenario set at every step (the identically distributed
    /// baseline). Requires zero scenario means.
    Iid { scenario_set: ScenarioSet },
    /// Step `i` draws from `{(+-a, 1/2)}, {(+-b, 1/2)}`; the variance
    /// interval is `[a^2, b^2]` at every step.
    ScaledInterval { a: f64, b: f64 },
    /// Variance interval `[lo2 + c/i, hi2 + c/i]`, whose Hausdorff gap to
    /// `[lo2, hi2]` is exactly `c/i`.
    HausdorffDecay {
        sigma_lo2: f64,
        sigma_hi2: f64,
        c: f64,
    },
    /// Variance interval offset by `spike` at powers of two and by `1/i`
    /// elsewhere: the gaps do not converge but their averages do.
    CesaroSpike {
        sigma_lo2: f64,
        sigma_hi2: f64,
        #[serde(default = "default_spike")]
        spike: f64,
    },
    /// Variance interval offset by `c * ratio^i`: a Cauchy sequence of
    /// sets with no pre-declared limit; the limit is found numerically by
    /// running the offsets out until they are below 1e-12.
    CauchySets {
        sigma_lo2: f64,
        sigma_hi2: f64,
        c: f64,
        #[serde(default = "default_ratio")]
        ratio: f64,
    },
    /// Point masses at the interval endpoints (optionally smeared by
    /// `+-noise` around each endpoint, which leaves the means in place).
    LlnMeanInterval {
        lo: f64,
        hi: f64,
        #[serde(default)]
        noise: f64,
    },
    /// Point masses at the polytope vertices, optionally smeared by
    /// `+-noise` per coordinate.
    LlnMeanPolytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        noise: f64,
    },
    /// An explicit list of per-step scenario sets, cycled when a run needs
    /// more steps than the list holds. The limit and moment bound must be
    /// declared by the caller.
    Explicit { steps: Vec<ScenarioSet> },
}

fn default_spike() -> f64 {
    1.0
}

fn default_ratio() -> f64 {
    0.5
}

impl Builder {
    pub fn dimension(&self) -> usize {
        match self {
            Builder::Iid { scenario_set } => scenario_set.dimension(),
            Builder::ScaledInterval { .. }
            | Builder::HausdorffDecay { .. }
            | Builder::CesaroSpike { .. }
            | Builder::CauchySets { .. }
            | Builder::LlnMeanInterval { .. } => 1,
            Builder::LlnMeanPolytope { vertices, .. } => {
                vertices.first().map(|v| v.len()).unwrap_or(0)
            }
            Builder::Explicit { steps } => steps.first().map(|s| s.dimension()).unwrap_or(0),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Input(msg.into()));
        match self {
            Builder::Iid { .. } => Ok(()),
            Builder::ScaledInterval { a, b } => {
                if !(0.0 <= *a && a <= b && b.is_finite()) {
                    return bad("scaled_interval requires 0 <= a <= b");
                }
                Ok(())
            }
            Builder::HausdorffDecay {
                sigma_lo2,
                sigma_hi2,
                c,
            } => {
                if !(0.0 <= *sigma_lo2 && sigma_lo2 <= sigma_hi2 && *c >= 0.0) {
                    return bad("hausdorff_decay requires 0 <= sigma_lo2 <= sigma_hi2 and c >= 0");
                }
                Ok(())
            }
            Builder::CesaroSpike {
                sigma_lo2,
                sigma_hi2,
                spike,
            } => {
                if !(0.0 <= *sigma_lo2 && sigma_lo2 <= sigma_hi2 && *spike >= 0.0) {
                    return bad("cesaro_spike requires 0 <= sigma_lo2 <= sigma_hi2 and spike >= 0");
                }
                Ok(())
            }
            Builder::CauchySets {
                sigma_lo2,
                sigma_hi2,
                c,
                ratio,
            } => {
                if !(0.0 <= *sigma_lo2 && sigma_lo2 <= sigma_hi2 && *c >= 0.0) {
                    return bad("cauchy_sets requires 0 <= sigma_lo2 <= sigma_hi2 and c >= 0");
                }
                if !(0.0 < *ratio && *ratio < 1.0) {
                    return bad("cauchy_sets requires 0 < ratio < 1");
                }
                Ok(())
            }
            Builder::LlnMeanInterval { lo, hi, noise } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi && *noise >= 0.0) {
                    return bad("lln_mean_interval requires lo <= hi and noise >= 0");
                }
                Ok(())
            }
            Builder::LlnMeanPolytope { vertices, noise } => {
                if vertices.is_empty() || *noise < 0.0 {
                    return bad("lln_mean_polytope requires vertices and noise >= 0");
                }
                let d = vertices[0].len();
                if d == 0 || d > 2 || vertices.iter().any(|v| v.len() != d) {
                    return bad("lln_mean_polytope vertices must share dimension 1 or 2");
                }
                Ok(())
            }
            Builder::Explicit { steps } => {
                if steps.is_empty() {
                    return bad("explicit builder requires at least one step");
                }
                let d = steps[0].dimension();
                if steps.iter().any(|s| s.dimension() != d) {
                    return bad("explicit steps must share one dimension");
                }
                Ok(())
            }
        }
    }

    /// The scenario set of step `i` (1-based).
    pub fn step(&self, i: usize) -> ScenarioSet {
        assert!(i >= 1, "steps are 1-based");
        match self {
            Builder::Iid { scenario_set } => scenario_set.clone(),
            Builder::ScaledInterval { a, b } => ScenarioSet::symmetric_1d(&[*a, *b]).unwrap(),
            Builder::HausdorffDecay {
                sigma_lo2,
                sigma_hi2,
                c,
            } => {
                let off = c / i as f64;
                ScenarioSet::symmetric_1d(&[(sigma_lo2 + off).sqrt(), (sigma_hi2 + off).sqrt()])
                    .unwrap()
            }
            Builder::CesaroSpike {
                sigma_lo2,
                sigma_hi2,
                spike,
            } => {
                let off = if i.is_power_of_two() {
                    *spike
                } else {
                    1.0 / i as f64
                };
                ScenarioSet::symmetric_1d(&[(sigma_lo2 + off).sqrt(), (sigma_hi2 + off).sqrt()])
                    .unwrap()
            }
            Builder::CauchySets {
                sigma_lo2,
                sigma_hi2,
                c,
                ratio,
            } => {
                let off = c * ratio.powi(i as i32);
                ScenarioSet::symmetric_1d(&[(sigma_lo2 + off).sqrt(), (sigma_hi2 + off).sqrt()])
                    .unwrap()
            }
            Builder::LlnMeanInterval { lo, hi, noise } => {
                let scenarios = [*lo, *hi]
                    .iter()
                    .map(|&q| noisy_point(&[q], *noise))
                    .collect::<Vec<_>>();
                ScenarioSet::new(1, scenarios).unwrap()
            }
            Builder::LlnMeanPolytope { vertices, noise } => {
                let scenarios = vertices.iter().map(|v| noisy_point(v, *noise)).collect();
                ScenarioSet::new(vertices[0].len(), scenarios).unwrap()
            }
            Builder::Explicit { steps } => steps[(i - 1) % steps.len()].clone(),
        }
    }
}

/// A point mass at `mean`, or the `2^d` corner smear `mean +- noise` per
/// coordinate; either way the scenario mean is exactly `mean`.
fn noisy_point(mean: &[f64], noise: f64) -> DiscreteDistribution {
    if noise == 0.0 {
        return DiscreteDistribution::point_mass(mean.to_vec()).unwrap();
    }
    let d = mean.len();
    let corners = 1usize << d;
    let w = 1.0 / corners as f64;
    let atoms = (0..corners)
        .map(|mask| {
            let point = mean
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    if mask >> k & 1 == 1 {
                        m + noise
                    } else {
                        m - noise
                    }
                })
                .collect();
            (point, w)
        })
        .collect();
    DiscreteDistribution::new(atoms).unwrap()
}

/// A sequence of sequentially independent steps with its declared limit,
/// moment bound and rate schedule. Construction does not check the limit
/// hypotheses; `validate_hypotheses` does, so deliberately broken
/// sequences remain expressible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    dimension: usize,
    builder: Builder,
    limit: LimitLaw,
    moment_bound: f64,
    /// Order of the moment the bound applies to. Defaults to 3 in the
    /// central-limit mode; any order in (2, 3] is accepted, the weakened
    /// hypothesis. The mean mode always checks the second moment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    moment_order: Option<f64>,
    schedule: Option<DecaySchedule>,
}

impl SequenceSpec {
    pub fn new(
        builder: Builder,
        limit: LimitLaw,
        moment_bound: f64,
        schedule: Option<DecaySchedule>,
    ) -> Result<Self> {
        builder.validate()?;
        let dimension = builder.dimension();
        if limit.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: limit.dimension(),
            });
        }
        if !(moment_bound.is_finite() && moment_bound >= 0.0) {
            return Err(Error::Input(
                "moment bound must be finite and nonnegative".into(),
            ));
        }
        if let Some(s) = &schedule {
            s.validate()?;
        }
        Ok(SequenceSpec {
            dimension,
            builder,
            limit,
            moment_bound,
            moment_order: None,
            schedule,
        })
    }

    /// Declares the bound for a weaker moment order in (2, 3] instead of
    /// the default third moment (central-limit mode only).
    pub fn with_moment_order(mut self, order: f64) -> Result<Self> {
        if self.mode() != Mode::Clt {
            return Err(Error::Input(
                "custom moment orders apply to the central-limit mode only".into(),
            ));
        }
        if !(order > 2.0 && order <= 3.0) {
            return Err(Error::Input(format!(
                "moment order must lie in (2, 3], got {order}"
            )));
        }
        self.moment_order = Some(order);
        Ok(self)
    }

    /// The moment order the declared bound refers to.
    pub fn moment_order(&self) -> f64 {
        match self.mode() {
            Mode::Clt => self.moment_order.unwrap_or(3.0),
            Mode::Lln => 2.0,
        }
    }

    /// Builds the sequence with the limit, moment bound and schedule the
    /// builder rule guarantees. The explicit builder has no canonical
    /// limit and must go through [`SequenceSpec::new`].
    pub fn from_builder(builder: Builder) -> Result<Self> {
        builder.validate()?;
        let (limit, moment_bound, schedule) = match &builder {
            Builder::Iid { scenario_set } => {
                let theta = g_from_scenarios(scenario_set)?;
                (
                    LimitLaw::GNormal(theta),
                    scenario_set.moment(3.0)?,
                    DecaySchedule::Zero,
                )
            }
            Builder::ScaledInterval { a, b } => (
                LimitLaw::GNormal(CovariancePolytope::interval(a * a, b * b)?),
                b.powi(3),
                DecaySchedule::Zero,
            ),
            Builder::HausdorffDecay {
                sigma_lo2,
                sigma_hi2,
                c,
            } => (
                LimitLaw::GNormal(CovariancePolytope::interval(*sigma_lo2, *sigma_hi2)?),
                (sigma_hi2 + c).powf(1.5),
                DecaySchedule::Harmonic { scale: *c },
            ),
            Builder::CesaroSpike {
                sigma_lo2,
                sigma_hi2,
                spike,
            } => (
                LimitLaw::GNormal(CovariancePolytope::interval(*sigma_lo2, *sigma_hi2)?),
                (sigma_hi2 + spike.max(1.0)).powf(1.5),
                DecaySchedule::PowerOfTwoSpike {
                    spike: *spike,
                    scale: 1.0,
                },
            ),
            Builder::CauchySets {
                sigma_lo2,
                sigma_hi2,
                c,
                ratio,
            } => {
                // Run the offsets out to their numerical limit.
                let mut i = 1;
                let mut off = c * ratio;
                while off > 1e-12 && i < 10_000 {
                    i += 1;
                    off = c * ratio.powi(i);
                }
                (
                    LimitLaw::GNormal(CovariancePolytope::interval(
                        sigma_lo2 + off,
                        sigma_hi2 + off,
                    )?),
                    (sigma_hi2 + c * ratio).powf(1.5),
                    DecaySchedule::Geometric {
                        scale: *c,
                        ratio: *ratio,
                    },
                )
            }
            Builder::LlnMeanInterval { lo, hi, noise } => {
                let m = [(lo, noise), (hi, noise)]
                    .iter()
                    .map(|(q, n)| *q * *q + *n * *n)
                    .fold(0.0f64, f64::max);
                (
                    LimitLaw::Maximal(MeanPolytope::interval(*lo, *hi)?),
                    m,
                    DecaySchedule::Zero,
                )
            }
            Builder::LlnMeanPolytope { vertices, noise } => {
                let d = vertices[0].len();
                let m = vertices
                    .iter()
                    .map(|v| v.iter().map(|c| c * c).sum::<f64>() + d as f64 * noise * noise)
                    .fold(0.0f64, f64::max);
                (
                    LimitLaw::Maximal(MeanPolytope::new(d, vertices.clone())?),
                    m,
                    DecaySchedule::Zero,
                )
            }
            Builder::Explicit { .. } => {
                return Err(Error::Input(
                    "the explicit builder needs a declared limit; use SequenceSpec::new".into(),
                ))
            }
        };
        SequenceSpec::new(builder, limit, moment_bound, Some(schedule))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn mode(&self) -> Mode {
        self.limit.mode()
    }

    pub fn builder(&self) -> &Builder {
        &self.builder
    }

    pub fn limit(&self) -> &LimitLaw {
        &self.limit
    }

    pub fn moment_bound(&self) -> f64 {
        self.moment_bound
    }

    pub fn schedule(&self) -> Option<&DecaySchedule> {
        self.schedule.as_ref()
    }

    /// The scenario set of step `i` (1-based).
    pub fn step_scenarios(&self, i: usize) -> ScenarioSet {
        self.builder.step(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::hausdorff;

    #[test]
    fn scaled_interval_matches_its_declared_limit() {
        let seq = SequenceSpec::from_builder(Builder::ScaledInterval { a: 1.0, b: 2.0 }).unwrap();
        assert_eq!(seq.moment_bound(), 8.0);
        let LimitLaw::GNormal(theta) = seq.limit() else {
            panic!("clt limit expected")
        };
        assert_eq!(theta.as_interval(), Some((1.0, 4.0)));
        let step = seq.step_scenarios(5);
        assert_eq!(step.moment(3.0).unwrap(), 8.0);
        assert!(step.check_mean_certain_zero());
    }

    #[test]
    fn hausdorff_decay_gaps_are_c_over_i() {
        let seq = SequenceSpec::from_builder(Builder::HausdorffDecay {
            sigma_lo2: 1.0,
            sigma_hi2: 4.0,
            c: 1.0,
        })
        .unwrap();
        let LimitLaw::GNormal(theta) = seq.limit().clone() else {
            panic!()
        };
        for i in [1usize, 10] {
            let theta_i = g_from_scenarios(&seq.step_scenarios(i)).unwrap();
            let d = hausdorff(&theta_i, &theta).unwrap();
            assert!((d - 1.0 / i as f64).abs() < 1e-9, "i = {i}: {d}");
        }
    }

    #[test]
    fn lln_point_masses_have_the_interval_support_function() {
        let seq = SequenceSpec::from_builder(Builder::LlnMeanInterval {
            lo: -1.0,
            hi: 1.0,
            noise: 0.0,
        })
        .unwrap();
        let step = seq.step_scenarios(3);
        for p in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let g_i = step.sup_of(|y| p * y[0]);
            assert!((g_i - p.abs()).abs() < 1e-12);
        }
        assert_eq!(seq.mode(), Mode::Lln);
    }

    #[test]
    fn noise_preserves_means_and_raises_second_moment() {
        let seq = SequenceSpec::from_builder(Builder::LlnMeanInterval {
            lo: -1.0,
            hi: 1.0,
            noise: 0.5,
        })
        .unwrap();
        let step = seq.step_scenarios(1);
        for s in step.scenarios() {
            let m = s.mean()[0];
            assert!((m.abs() - 1.0).abs() < 1e-12);
        }
        assert_eq!(seq.moment_bound(), 1.25);
        assert!(step.moment(2.0).unwrap() <= 1.25 + 1e-12);
    }

    #[test]
    fn cauchy_sets_limit_is_found_numerically() {
        let seq = SequenceSpec::from_builder(Builder::CauchySets {
            sigma_lo2: 1.0,
            sigma_hi2: 4.0,
            c: 1.0,
            ratio: 0.5,
        })
        .unwrap();
        let LimitLaw::GNormal(theta) = seq.limit() else {
            panic!()
        };
        let (lo, hi) = theta.as_interval().unwrap();
        assert!((lo - 1.0).abs() < 1e-11);
        assert!((hi - 4.0).abs() < 1e-11);
    }

    #[test]
    fn iid_builder_rejects_mean_uncertain_steps() {
        let skew = ScenarioSet::new(
            1,
            vec![DiscreteDistribution::new(vec![(vec![0.0], 0.9), (vec![1.0], 0.1)]).unwrap()],
        )
        .unwrap();
        assert!(SequenceSpec::from_builder(Builder::Iid { scenario_set: skew }).is_err());
    }

    #[test]
    fn builder_json_uses_id_and_params() {
        let b = Builder::ScaledInterval { a: 1.0, b: 2.0 };
        let json = serde_json::to_value(&b).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"id": "scaled_interval", "params": {"a": 1.0, "b": 2.0}})
        );
        let back: Builder = serde_json::from_value(json).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<Builder>(r#"{"id": "unknown", "params": {}}"#).is_err());
    }
}
