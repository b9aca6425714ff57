//! Exact evaluation of sublinear expectations of normalized sums by
//! backward dynamic programming, the brute-force tree oracle it is checked
//! against, sequence builders for the convergence theorems, and the
//! experiment drivers that tabulate finite-n values against the limits.

mod builders;
mod dp;
mod experiment;
mod oracle;

pub use builders::{Builder, LimitLaw, Mode, SequenceSpec};
pub use dp::{evaluate_sum_expectation, lattice_tables, DpMode, DpValue, LatticeValueTable};
pub use experiment::{
    clt_convergence_experiment, lln_convergence_experiment, validate_hypotheses, ConditionCheck,
    ConvergenceRow, ConvergenceTable, DpPolicy, HypothesisProbes, HypothesisReport,
};
pub use oracle::enumerate_oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{DiscreteDistribution, ScenarioSet};

/// Normalization applied to the partial sum before the test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `S_n / sqrt(n)`, the central-limit normalization.
    InvSqrtN,
    /// `S_n / n`, the law-of-large-numbers normalization.
    InvN,
}

impl Scaling {
    pub fn factor(&self, n: usize) -> f64 {
        match self {
            Scaling::InvSqrtN => 1.0 / (n as f64).sqrt(),
            Scaling::InvN => 1.0 / n as f64,
        }
    }
}

/// The joint scenario family of `(X, Y)` with `Y` sequentially independent
/// from `X`: one joint scenario per choice of a scenario for `X` together
/// with a scenario for `Y` selected per atom of `X`. The flat maximum over
/// this family equals the nested two-stage maximization, so products built
/// here realize one step of the independence recursion exactly.
pub fn independence_product(first: &ScenarioSet, second: &ScenarioSet) -> Result<ScenarioSet> {
    let sx = first.scenarios();
    let sy = second.scenarios();
    let max_atoms_x = sx.iter().map(|s| s.atoms().len()).max().unwrap_or(0);
    let policies_per_scenario = (sy.len() as f64).powi(max_atoms_x as i32);
    if policies_per_scenario * sx.len() as f64 > 10_000.0 {
        return Err(Error::Refusal(
            "independence product would enumerate more than 10000 joint scenarios".into(),
        ));
    }

    let dx = first.dimension();
    let dy = second.dimension();
    let mut joint = Vec::new();
    for scen_x in sx {
        let atoms_x = scen_x.atoms();
        // Odometer over one scenario choice of Y per atom of X.
        let mut choice = vec![0usize; atoms_x.len()];
        loop {
            let mut atoms = Vec::new();
            for ((x, wx), pick) in atoms_x.iter().zip(&choice) {
                for (y, wy) in sy[*pick].atoms() {
                    let mut point = Vec::with_capacity(dx + dy);
                    point.extend_from_slice(x);
                    point.extend_from_slice(y);
                    atoms.push((point, wx * wy));
                }
            }
            joint.push(DiscreteDistribution::new(atoms)?);

            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < sy.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    ScenarioSet::new(dx + dy, joint)
}
