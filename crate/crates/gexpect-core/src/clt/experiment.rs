//! Convergence experiments and hypothesis validation: tabulate the exact
//! finite-n expectations against the limit computed independently (PDE
//! solve or hull maximization), and check the conditions a sequence
//! claims to satisfy.

use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ambiguity::{
    check_condition_iv, g_from_scenarios, hausdorff, random_unit_matrices, DecaySchedule,
};
use crate::clt::builders::{LimitLaw, Mode, SequenceSpec};
use crate::clt::dp::{evaluate_sum_expectation, DpMode};
use crate::clt::Scaling;
use crate::error::{Error, Result};
use crate::matrices::SymMatrix;
use crate::pde::{gnormal_expectation, maximal_expectation, GridResolution};
use crate::testfn::TestFunction;

/// One convergence measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dp_value: f64,
    pub limit_value: f64,
    pub gap: f64,
    pub seconds: f64,
}

/// Rows with strictly increasing `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn final_gap(&self) -> Option<f64> {
        self.rows.last().map(|r| r.gap)
    }

    /// CSV columns `n,dp_value,limit_value,gap,seconds`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"n,dp_value,limit_value,gap,seconds\n")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.n, r.dp_value, r.limit_value, r.gap, r.seconds
            )?;
        }
        Ok(())
    }
}

/// How the experiment picks the DP discretization per n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DpPolicy {
    /// Lattice when the supports allow it, otherwise interpolation with a
    /// spacing chosen so the reported error stays below `target_error`.
    Auto {
        target_error: f64,
    },
    Lattice,
    Interpolated {
        spacing: f64,
    },
}

impl Default for DpPolicy {
    fn default() -> Self {
        DpPolicy::Auto { target_error: 1e-3 }
    }
}

impl DpPolicy {
    fn resolve(
        &self,
        seq: &SequenceSpec,
        n: usize,
        scaling: Scaling,
        phi: &TestFunction,
    ) -> Result<DpMode> {
        match self {
            DpPolicy::Lattice => Ok(DpMode::Lattice),
            DpPolicy::Interpolated { spacing } => Ok(DpMode::Interpolated { spacing: *spacing }),
            DpPolicy::Auto { target_error } => {
                // Probe the lattice path cheaply by asking for one step's
                // worth of supports; a failed pitch shows up identically
                // for the full run, so just try the real thing.
                match evaluate_sum_expectation(seq, 1, scaling, phi, DpMode::Lattice) {
                    Ok(_) => Ok(DpMode::Lattice),
                    Err(Error::Config(_)) => {
                        let lip = phi.lipschitz().max(1e-12);
                        let spacing = target_error / (lip * n as f64 * scaling.factor(n));
                        Ok(DpMode::Interpolated { spacing })
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Input("n_list must be nonempty".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::Input(
            "n_list must be strictly increasing and positive".into(),
        ));
    }
    Ok(())
}

/// Tabulates `E-hat[phi(S_n / sqrt(n))]` against the heat-flow value of the
/// declared covariance limit.
pub fn clt_convergence_experiment(
    seq: &SequenceSpec,
    phi: &TestFunction,
    n_list: &[usize],
    pde_res: &GridResolution,
    dp: &DpPolicy,
) -> Result<ConvergenceTable> {
    check_n_list(n_list)?;
    let LimitLaw::GNormal(theta) = seq.limit() else {
        return Err(Error::Precondition(
            "sequence does not declare a covariance limit".into(),
        ));
    };
    let limit_value = gnormal_expectation(theta, phi, pde_res)?.value;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let start = Instant::now();
        let mode = dp.resolve(seq, n, Scaling::InvSqrtN, phi)?;
        let v = evaluate_sum_expectation(seq, n, Scaling::InvSqrtN, phi, mode)?;
        rows.push(ConvergenceRow {
            n,
            dp_value: v.value,
            limit_value,
            gap: (v.value - limit_value).abs(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(ConvergenceTable { rows })
}

/// Tabulates `E-hat[phi(S_n / n)]` against the exact hull maximum of the
/// declared mean limit.
pub fn lln_convergence_experiment(
    seq: &SequenceSpec,
    phi: &TestFunction,
    n_list: &[usize],
    dp: &DpPolicy,
) -> Result<ConvergenceTable> {
    check_n_list(n_list)?;
    let LimitLaw::Maximal(gamma) = seq.limit() else {
        return Err(Error::Precondition(
            "sequence does not declare a mean limit".into(),
        ));
    };
    let limit_value = maximal_expectation(gamma, phi)?.value;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let start = Instant::now();
        let mode = dp.resolve(seq, n, Scaling::InvN, phi)?;
        let v = evaluate_sum_expectation(seq, n, Scaling::InvN, phi, mode)?;
        rows.push(ConvergenceRow {
            n,
            dp_value: v.value,
            limit_value,
            gap: (v.value - limit_value).abs(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(ConvergenceTable { rows })
}

/// Probe directions used by the hypothesis checks.
#[derive(Debug, Clone)]
pub struct HypothesisProbes {
    pub matrices: Vec<SymMatrix>,
    pub vectors: Vec<Vec<f64>>,
}

impl HypothesisProbes {
    pub fn random(dimension: usize, count: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let matrices = random_unit_matrices(dimension, count, seed);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let vectors = (0..count)
            .map(|_| loop {
                let v: Vec<f64> = (0..dimension)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 1e-6 {
                    return v.iter().map(|c| c / n).collect();
                }
            })
            .collect();
        HypothesisProbes { matrices, vectors }
    }
}

/// Outcome of one condition check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub pass: bool,
    /// Largest violation observed (0 when the condition holds).
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub mode: Mode,
    pub checks: Vec<ConditionCheck>,
    /// Running averages of the rate terms (or of the Hausdorff gaps when
    /// no schedule is declared).
    pub cesaro_means: Vec<f64>,
}

impl HypothesisReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const GAP_TOL: f64 = 1e-10;

/// Checks the declared hypotheses on the first `n_check` steps: zero
/// means and third moments plus the generator-gap bound in the
/// central-limit mode, second moments plus the support-function gap in
/// the mean mode. Failures are report entries, not errors.
pub fn validate_hypotheses(
    seq: &SequenceSpec,
    n_check: usize,
    probes: &HypothesisProbes,
) -> Result<HypothesisReport> {
    if n_check == 0 {
        return Err(Error::Input("need at least one step to validate".into()));
    }
    let steps: Vec<_> = (1..=n_check).map(|i| seq.step_scenarios(i)).collect();
    let mut checks = Vec::new();

    checks.push(ConditionCheck {
        condition: "sequential-independence".into(),
        pass: true,
        worst: 0.0,
        detail: "structural: each step's maximization is history-free".into(),
    });

    let mut cesaro = Vec::new();
    match seq.mode() {
        Mode::Clt => {
            let bad_mean: Vec<usize> = steps
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.check_mean_certain_zero())
                .map(|(i, _)| i + 1)
                .collect();
            checks.push(ConditionCheck {
                condition: "zero-mean".into(),
                pass: bad_mean.is_empty(),
                worst: bad_mean.len() as f64,
                detail: if bad_mean.is_empty() {
                    "all step means vanish".into()
                } else {
                    format!("nonzero mean at steps {bad_mean:?}")
                },
            });

            // Default is the third moment; a declared order in (2, 3]
            // checks the weakened hypothesis instead.
            let order = seq.moment_order();
            let mut worst = f64::NEG_INFINITY;
            for s in &steps {
                worst = worst.max(s.moment(order)? - seq.moment_bound());
            }
            checks.push(ConditionCheck {
                condition: "moment-bound".into(),
                pass: worst <= 1e-12,
                worst: worst.max(0.0),
                detail: format!("sup_i E|X_i|^{order} - M = {worst:.3e}"),
            });

            let LimitLaw::GNormal(theta) = seq.limit() else {
                unreachable!()
            };
            if bad_mean.is_empty() {
                let g_seq: Vec<_> = steps
                    .iter()
                    .map(g_from_scenarios)
                    .collect::<Result<Vec<_>>>()?;
                if let Some(sched) = seq.schedule() {
                    let report = check_condition_iv(&g_seq, theta, sched, &probes.matrices)?;
                    cesaro = report.cesaro_means.clone();
                    checks.push(ConditionCheck {
                        condition: "generator-gap".into(),
                        pass: report.pass,
                        worst: report.worst_excess.max(0.0),
                        detail: format!(
                            "|G_i(A) - G(A)| <= a_i ||A|| on {} probes, {} violations",
                            probes.matrices.len(),
                            report.violations.len()
                        ),
                    });
                } else {
                    // No declared rate: fall back to the averaged Hausdorff
                    // gaps, whose trend is the certifying quantity.
                    let gaps: Vec<f64> = g_seq
                        .iter()
                        .map(|t| hausdorff(t, theta))
                        .collect::<Result<Vec<_>>>()?;
                    let mut acc = 0.0;
                    cesaro = gaps
                        .iter()
                        .enumerate()
                        .map(|(i, g)| {
                            acc += g;
                            acc / (i + 1) as f64
                        })
                        .collect();
                    let initial = cesaro[0];
                    let last = *cesaro.last().unwrap();
                    let pass = if initial > 0.0 { last < initial } else { true };
                    checks.push(ConditionCheck {
                        condition: "hausdorff-cesaro".into(),
                        pass,
                        worst: last,
                        detail: format!("mean d_H over {n_check} steps: {last:.3e}"),
                    });
                }
            }
        }
        Mode::Lln => {
            let mut worst = f64::NEG_INFINITY;
            for s in &steps {
                worst = worst.max(s.moment(2.0)? - seq.moment_bound());
            }
            checks.push(ConditionCheck {
                condition: "second-moment".into(),
                pass: worst <= 1e-12,
                worst: worst.max(0.0),
                detail: format!("sup_i E|Y_i|^2 - M = {worst:.3e}"),
            });

            let LimitLaw::Maximal(gamma) = seq.limit() else {
                unreachable!()
            };
            let sched = seq.schedule().cloned().unwrap_or(DecaySchedule::Zero);
            let mut worst = f64::NEG_INFINITY;
            let mut violations = 0usize;
            for (i, s) in steps.iter().enumerate() {
                let a_i = sched.term(i + 1);
                for p in &probes.vectors {
                    let g_i = s.sup_of(|y| y.iter().zip(p).map(|(a, b)| a * b).sum());
                    let g = gamma.support_value(p);
                    let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let excess = (g_i - g).abs() - a_i * norm - GAP_TOL;
                    worst = worst.max(excess);
                    if excess > 0.0 {
                        violations += 1;
                    }
                }
            }
            cesaro = sched.cesaro_means(n_check);
            checks.push(ConditionCheck {
                condition: "support-gap".into(),
                pass: violations == 0,
                worst: worst.max(0.0),
                detail: format!(
                    "|g_i(p) - g(p)| <= a_i |p| on {} probes, {violations} violations",
                    probes.vectors.len()
                ),
            });
        }
    }

    Ok(HypothesisReport {
        mode: seq.mode(),
        checks,
        cesaro_means: cesaro,
    })
}
