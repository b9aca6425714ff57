//! Finite scenario families and the sublinear expectations they carry.
//!
//! A sublinear expectation is represented as the pointwise maximum of
//! finitely many discrete linear expectations. Every supremum is attained
//! at a scenario, so evaluation is exact up to floating-point summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::SymMatrix;
use crate::testfn::TestFunction;

/// Constructors renormalize weights whose sum deviates from 1 by at most
/// this much, and reject anything worse.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Componentwise tolerance for "this scenario has zero mean".
pub const MEAN_TOL: f64 = 1e-12;

/// Slack allowed before an axiom probe counts as a violation.
pub const AXIOM_TOL: f64 = 1e-9;

/// One finitely supported distribution on `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Vec<f64>, f64)>", into = "Vec<(Vec<f64>, f64)>")]
pub struct DiscreteDistribution {
    dimension: usize,
    atoms: Vec<(Vec<f64>, f64)>,
}

impl TryFrom<Vec<(Vec<f64>, f64)>> for DiscreteDistribution {
    type Error = Error;
    fn try_from(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        DiscreteDistribution::new(atoms)
    }
}

impl From<DiscreteDistribution> for Vec<(Vec<f64>, f64)> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms
    }
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::Construction("distribution needs at least one atom".into()))?;
        let dimension = first.0.len();
        if dimension == 0 {
            return Err(Error::Construction(
                "atom points must have dimension >= 1".into(),
            ));
        }
        let mut sum = 0.0;
        for (point, weight) in &atoms {
            if point.len() != dimension {
                return Err(Error::Construction(
                    "all atom points must share one dimension".into(),
                ));
            }
            if point.iter().any(|c| !c.is_finite()) {
                return Err(Error::Construction("atom points must be finite".into()));
            }
            if !weight.is_finite() || *weight <= 0.0 {
                return Err(Error::Construction(
                    "atom weights must be strictly positive".into(),
                ));
            }
            sum += weight;
        }
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Construction(format!(
                "atom weights sum to {sum}, more than {WEIGHT_TOL} away from 1"
            )));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0 == atoms[j].0 {
                    return Err(Error::Construction(
                        "atom points must be pairwise distinct".into(),
                    ));
                }
            }
        }
        let atoms = atoms.into_iter().map(|(p, w)| (p, w / sum)).collect();
        Ok(DiscreteDistribution { dimension, atoms })
    }

    /// Rademacher-style distribution: `point` and `-point` with weight 1/2,
    /// collapsing to a point mass when `point` is the origin.
    pub fn symmetric_pair(point: Vec<f64>) -> Result<Self> {
        if point.iter().all(|c| *c == 0.0) {
            return Self::new(vec![(point, 1.0)]);
        }
        let neg = point.iter().map(|c| -c).collect();
        Self::new(vec![(neg, 0.5), (point, 0.5)])
    }

    pub fn point_mass(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![(point, 1.0)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    /// Linear expectation of `f`, accumulated in atom order.
    pub fn expectation_of(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.atoms.iter().map(|(p, w)| w * f(p)).sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dimension];
        for (p, w) in &self.atoms {
            for (mi, pi) in m.iter_mut().zip(p) {
                *mi += w * pi;
            }
        }
        m
    }

    /// The matrix `sum_j w_j x_j x_j^T`.
    pub fn second_moment_matrix(&self) -> SymMatrix {
        let d = self.dimension;
        let mut entries = vec![0.0; d * d];
        for (p, w) in &self.atoms {
            for i in 0..d {
                for j in 0..d {
                    entries[i * d + j] += w * p[i] * p[j];
                }
            }
        }
        SymMatrix::new(d, entries).expect("second moment matrix is well formed")
    }

    /// `E |X|^p` with the Euclidean norm.
    pub fn absolute_moment(&self, p: f64) -> f64 {
        self.expectation_of(|x| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            r.powf(p)
        })
    }
}

/// A nonempty finite family of scenarios on a common `R^d`; the carrier of
/// one sublinear expectation restricted to functions of a single vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioSetSpec", into = "ScenarioSetSpec")]
pub struct ScenarioSet {
    dimension: usize,
    scenarios: Vec<DiscreteDistribution>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioSetSpec {
    dimension: usize,
    scenarios: Vec<Vec<(Vec<f64>, f64)>>,
}

impl TryFrom<ScenarioSetSpec> for ScenarioSet {
    type Error = Error;
    fn try_from(spec: ScenarioSetSpec) -> Result<Self> {
        let scenarios = spec
            .scenarios
            .into_iter()
            .map(DiscreteDistribution::new)
            .collect::<Result<Vec<_>>>()?;
        ScenarioSet::new(spec.dimension, scenarios)
    }
}

impl From<ScenarioSet> for ScenarioSetSpec {
    fn from(s: ScenarioSet) -> Self {
        ScenarioSetSpec {
            dimension: s.dimension,
            scenarios: s.scenarios.into_iter().map(|d| d.atoms).collect(),
        }
    }
}

impl ScenarioSet {
    pub fn new(dimension: usize, scenarios: Vec<DiscreteDistribution>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::Construction("scenario set must be nonempty".into()));
        }
        for s in &scenarios {
            if s.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: s.dimension(),
                });
            }
        }
        Ok(ScenarioSet {
            dimension,
            scenarios,
        })
    }

    /// One-dimensional set from symmetric two-point scenarios at the given
    /// magnitudes, e.g. `[1.0, 2.0]` gives `{(+-1, 1/2)}, {(+-2, 1/2)}`.
    pub fn symmetric_1d(magnitudes: &[f64]) -> Result<Self> {
        let scenarios = magnitudes
            .iter()
            .map(|&m| DiscreteDistribution::symmetric_pair(vec![m]))
            .collect::<Result<Vec<_>>>()?;
        ScenarioSet::new(1, scenarios)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scenarios(&self) -> &[DiscreteDistribution] {
        &self.scenarios
    }

    /// Maximum over scenarios of the linear expectation of `f`.
    pub fn sup_of(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.scenarios
            .iter()
            .map(|s| s.expectation_of(&f))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same as [`sup_of`](Self::sup_of) but also reports which scenario
    /// attains the maximum; ties go to the lowest index.
    pub fn sup_of_with_attaining(&self, f: impl Fn(&[f64]) -> f64) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut idx = 0;
        for (k, s) in self.scenarios.iter().enumerate() {
            let v = s.expectation_of(&f);
            if v > best {
                best = v;
                idx = k;
            }
        }
        (best, idx)
    }

    /// The sublinear expectation of `phi(X)`.
    pub fn evaluate(&self, phi: &TestFunction) -> Result<f64> {
        phi.check_dimension(self.dimension)?;
        Ok(self.sup_of(|x| phi.eval(x)))
    }

    /// [`evaluate`](Self::evaluate) plus the index of the attaining scenario.
    pub fn evaluate_with_attaining(&self, phi: &TestFunction) -> Result<(f64, usize)> {
        phi.check_dimension(self.dimension)?;
        Ok(self.sup_of_with_attaining(|x| phi.eval(x)))
    }

    /// True when every scenario mean is componentwise zero within
    /// [`MEAN_TOL`]; equivalently the expectation of every linear
    /// functional and its negation both vanish.
    pub fn check_mean_certain_zero(&self) -> bool {
        self.scenarios
            .iter()
            .all(|s| s.mean().iter().all(|m| m.abs() <= MEAN_TOL))
    }

    /// The sublinear absolute moment `max_theta E_theta |X|^p`, `p >= 1`.
    pub fn moment(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Input(format!("moment order must be >= 1, got {p}")));
        }
        Ok(self
            .scenarios
            .iter()
            .map(|s| s.absolute_moment(p))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Every atom point appearing in any scenario.
    pub fn union_support(&self) -> Vec<&[f64]> {
        self.scenarios
            .iter()
            .flat_map(|s| s.atoms().iter().map(|(p, _)| p.as_slice()))
            .collect()
    }

    /// Checks the four defining axioms on the given probes and reports the
    /// worst violation per axiom. Failures are report entries, not errors.
    pub fn verify_axioms(&self, probes: &[AxiomProbe]) -> Result<AxiomReport> {
        if probes.is_empty() {
            return Err(Error::Input(
                "verify_axioms needs at least one probe".into(),
            ));
        }
        let mut worst = [0.0f64; 4];
        for probe in probes {
            probe.phi.check_dimension(self.dimension)?;
            probe.psi.check_dimension(self.dimension)?;
            if probe.lambda < 0.0 {
                return Err(Error::Input(
                    "homogeneity probe requires lambda >= 0".into(),
                ));
            }
            let phi = |x: &[f64]| probe.phi.eval(x);
            let psi = |x: &[f64]| probe.psi.eval(x);
            let e_phi = self.sup_of(phi);
            let e_psi = self.sup_of(psi);

            // (a) monotonicity: the pointwise max dominates both arguments
            // on the union support, so its value must dominate both values.
            let e_max = self.sup_of(|x| phi(x).max(psi(x)));
            let mono = (e_phi - e_max).max(e_psi - e_max).max(0.0);
            worst[0] = worst[0].max(mono);

            // (b) constant preserving.
            let e_const = self.sup_of(|_| probe.constant);
            worst[1] = worst[1].max((e_const - probe.constant).abs());

            // (c) sub-additivity.
            let e_sum = self.sup_of(|x| phi(x) + psi(x));
            worst[2] = worst[2].max((e_sum - e_phi - e_psi).max(0.0));

            // (d) positive homogeneity.
            let e_scaled = self.sup_of(|x| probe.lambda * phi(x));
            worst[3] = worst[3].max((e_scaled - probe.lambda * e_phi).abs());
        }
        let checks = [
            Axiom::Monotonicity,
            Axiom::ConstantPreserving,
            Axiom::Subadditivity,
            Axiom::PositiveHomogeneity,
        ]
        .into_iter()
        .zip(worst)
        .map(|(axiom, violation)| AxiomCheck {
            axiom,
            pass: violation <= AXIOM_TOL,
            worst_violation: violation,
        })
        .collect();
        Ok(AxiomReport { checks })
    }
}

/// One axiom probe: a pair of test functions, a homogeneity factor and a
/// constant to preserve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomProbe {
    pub phi: TestFunction,
    pub psi: TestFunction,
    pub lambda: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    ConstantPreserving,
    Subadditivity,
    PositiveHomogeneity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub pass: bool,
    /// Largest amount by which the axiom inequality was broken (0 = held).
    pub worst_violation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::Catalog;

    fn two_scale() -> ScenarioSet {
        ScenarioSet::symmetric_1d(&[1.0, 2.0]).unwrap()
    }

    #[test]
    fn single_scenario_plain_expectation() {
        let s = ScenarioSet::symmetric_1d(&[1.0]).unwrap();
        let phi = TestFunction::quadratic_clipped(10.0).unwrap();
        assert_eq!(s.evaluate(&phi).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_takes_the_worst_scenario() {
        let phi = TestFunction::quadratic_clipped(10.0).unwrap();
        assert_eq!(two_scale().evaluate(&phi).unwrap(), 4.0);
        let (v, idx) = two_scale().evaluate_with_attaining(&phi).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(idx, 1);
    }

    #[test]
    fn symmetric_scenarios_have_zero_linear_part() {
        let phi = TestFunction::linear(0.0, &[1.0]).unwrap();
        assert_eq!(two_scale().evaluate(&phi).unwrap(), 0.0);
    }

    #[test]
    fn ties_report_lowest_index() {
        let s = ScenarioSet::new(
            1,
            vec![
                DiscreteDistribution::symmetric_pair(vec![2.0]).unwrap(),
                DiscreteDistribution::symmetric_pair(vec![-2.0]).unwrap(),
            ],
        )
        .unwrap();
        let (_, idx) = s.evaluate_with_attaining(&TestFunction::abs()).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn mean_certainty_examples() {
        assert!(ScenarioSet::symmetric_1d(&[1.0])
            .unwrap()
            .check_mean_certain_zero());
        let origin = ScenarioSet::new(
            1,
            vec![DiscreteDistribution::point_mass(vec![0.0]).unwrap()],
        )
        .unwrap();
        assert!(origin.check_mean_certain_zero());
        let skew = ScenarioSet::new(
            1,
            vec![DiscreteDistribution::new(vec![(vec![0.0], 0.9), (vec![1.0], 0.1)]).unwrap()],
        )
        .unwrap();
        assert!(!skew.check_mean_certain_zero());
    }

    #[test]
    fn moments_by_enumeration() {
        assert_eq!(two_scale().moment(3.0).unwrap(), 8.0);
        assert_eq!(two_scale().moment(2.0).unwrap(), 4.0);
        let s1 = ScenarioSet::symmetric_1d(&[1.0]).unwrap();
        assert_eq!(s1.moment(2.0).unwrap(), 1.0);
        let origin = ScenarioSet::new(
            1,
            vec![DiscreteDistribution::point_mass(vec![0.0]).unwrap()],
        )
        .unwrap();
        assert_eq!(origin.moment(5.0).unwrap(), 0.0);
        assert!(two_scale().moment(0.5).is_err());
    }

    #[test]
    fn axiom_report_on_spec_probes() {
        let pos_part =
            TestFunction::new(Catalog::PiecewiseLinear1d, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let neg_part =
            TestFunction::new(Catalog::PiecewiseLinear1d, vec![-1.0, 0.0, 0.0, 0.0]).unwrap();
        let s = two_scale();

        // x^+ and x^- each evaluate to 1; their sum is |x| with value 2:
        // sub-additivity holds with equality.
        assert_eq!(s.evaluate(&pos_part).unwrap(), 1.0);
        assert_eq!(s.evaluate(&neg_part).unwrap(), 1.0);
        assert_eq!(s.evaluate(&TestFunction::abs()).unwrap(), 2.0);

        let probes = vec![
            AxiomProbe {
                phi: pos_part,
                psi: neg_part,
                lambda: 0.0,
                constant: 5.0,
            },
            AxiomProbe {
                phi: TestFunction::abs(),
                psi: TestFunction::clipped_abs(1.5).unwrap(),
                lambda: 2.5,
                constant: -3.0,
            },
        ];
        let report = s.verify_axioms(&probes).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn verify_axioms_rejects_empty_and_negative_lambda() {
        let s = two_scale();
        assert!(s.verify_axioms(&[]).is_err());
        let bad = AxiomProbe {
            phi: TestFunction::abs(),
            psi: TestFunction::abs(),
            lambda: -1.0,
            constant: 0.0,
        };
        assert!(s.verify_axioms(&[bad]).is_err());
    }

    #[test]
    fn construction_guards() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![1.0], 0.5), (vec![1.0], 0.5)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![1.0], 0.7), (vec![2.0], 0.7)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![1.0], -0.5), (vec![2.0], 1.5)]).is_err());
        assert!(ScenarioSet::new(1, vec![]).is_err());
        let d2 = DiscreteDistribution::point_mass(vec![0.0, 0.0]).unwrap();
        assert!(ScenarioSet::new(1, vec![d2]).is_err());
    }

    #[test]
    fn weights_renormalize_within_tolerance() {
        let w = 0.5 + 2e-13;
        let d = DiscreteDistribution::new(vec![(vec![-1.0], w), (vec![1.0], w)]).unwrap();
        let total: f64 = d.atoms().iter().map(|(_, w)| w).sum();
        assert_eq!(total, 1.0);
    }

    #[test]
    fn scenario_set_json_shape() {
        let s = two_scale();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "dimension": 1,
                "scenarios": [
                    [[[-1.0], 0.5], [[1.0], 0.5]],
                    [[[-2.0], 0.5], [[2.0], 0.5]],
                ]
            })
        );
        let back: ScenarioSet = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }
}
