//! Brute-force evaluation of the independence recursion over the full
//! outcome tree, with no state merging. Exponentially slower than the DP
//! and deliberately so: it shares no code path with it, which is what
//! makes it a usable oracle.

use crate::clt::builders::SequenceSpec;
use crate::clt::Scaling;
use crate::error::{Error, Result};
use crate::scenario::ScenarioSet;
use crate::testfn::TestFunction;

const NODE_CAP: f64 = 1e8;

/// `E-hat[phi(S_n * scale)]` by direct recursion over every outcome path.
/// Requires `n <= 10` and refuses trees beyond 1e8 nodes. `n = 0` returns
/// `phi(0)` (the empty sum).
pub fn enumerate_oracle(
    seq: &SequenceSpec,
    n: usize,
    scaling: Scaling,
    phi: &TestFunction,
) -> Result<f64> {
    let d = seq.dimension();
    phi.check_dimension(d)?;
    if n == 0 {
        return Ok(phi.eval(&vec![0.0; d]));
    }
    if n > 10 {
        return Err(Error::Input(format!(
            "enumeration oracle handles n <= 10, got {n}"
        )));
    }
    let steps: Vec<ScenarioSet> = (1..=n).map(|i| seq.step_scenarios(i)).collect();
    let mut tree_nodes = 1.0f64;
    for step in &steps {
        let branching: usize = step.scenarios().iter().map(|s| s.atoms().len()).sum();
        tree_nodes *= branching as f64;
        if tree_nodes > NODE_CAP {
            return Err(Error::Refusal(format!(
                "outcome tree exceeds {NODE_CAP:e} nodes; use the DP instead"
            )));
        }
    }
    let scale = scaling.factor(n);
    let mut point = vec![0.0; d];
    Ok(descend(&steps, 0, &mut point, scale, phi))
}

fn descend(
    steps: &[ScenarioSet],
    depth: usize,
    partial: &mut Vec<f64>,
    scale: f64,
    phi: &TestFunction,
) -> f64 {
    if depth == steps.len() {
        let scaled: Vec<f64> = partial.iter().map(|c| c * scale).collect();
        return phi.eval(&scaled);
    }
    let mut best = f64::NEG_INFINITY;
    for scen in steps[depth].scenarios() {
        let mut acc = 0.0;
        for (atom, w) in scen.atoms() {
            for (p, a) in partial.iter_mut().zip(atom) {
                *p += a;
            }
            acc += w * descend(steps, depth + 1, partial, scale, phi);
            for (p, a) in partial.iter_mut().zip(atom) {
                *p -= a;
            }
        }
        best = best.max(acc);
    }
    best
}
