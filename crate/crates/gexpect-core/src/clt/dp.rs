//! Backward dynamic programming over reachable partial sums.
//!
//! With every step supported on a common lattice `h Z^d` the reachable
//! states form a finite lattice subset and the recursion
//! `u_i(s) = max_theta sum_j w_j u_{i+1}(s + x_j)` is exact: the answer
//! carries no discretization error at all. Steps that do not share a
//! lattice go through multilinear interpolation on per-level grids, whose
//! (nonnegative-weight, hence monotone) error is reported, not absorbed.

use std::collections::{HashMap, HashSet};

use crate::clt::builders::SequenceSpec;
use crate::clt::Scaling;
use crate::error::{Error, Result};
use crate::scenario::ScenarioSet;
use crate::testfn::TestFunction;

/// How the state space is discretized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DpMode {
    /// Require a common lattice; fail if there is none.
    Lattice,
    /// Multilinear interpolation with the given grid spacing.
    Interpolated { spacing: f64 },
}

/// A DP answer with its discretization error bound (zero in lattice mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpValue {
    pub value: f64,
    pub error_bound: f64,
}

/// The backward value function at one level, keyed by lattice point (in
/// units of the pitch). Its domain is exactly the set of sums reachable
/// from the origin in `level` steps.
#[derive(Debug, Clone)]
pub struct LatticeValueTable {
    pub pitch: f64,
    pub level: usize,
    pub values: HashMap<[i64; 2], f64>,
}

impl LatticeValueTable {
    pub fn value_at(&self, point: [i64; 2]) -> Option<f64> {
        self.values.get(&point).copied()
    }
}

/// `E-hat[phi(S_n * scale)]` for the first `n` steps of the sequence.
pub fn evaluate_sum_expectation(
    seq: &SequenceSpec,
    n: usize,
    scaling: Scaling,
    phi: &TestFunction,
    mode: DpMode,
) -> Result<DpValue> {
    if n == 0 {
        return Err(Error::Input("the sum needs at least one step".into()));
    }
    let d = seq.dimension();
    if d > 2 {
        return Err(Error::Unsupported(format!(
            "DP state space covers d in {{1, 2}}, got {d}"
        )));
    }
    phi.check_dimension(d)?;
    let steps: Vec<ScenarioSet> = (1..=n).map(|i| seq.step_scenarios(i)).collect();
    let scale = scaling.factor(n);
    match mode {
        DpMode::Lattice => {
            let value = lattice_backward(&steps, d, scale, phi, None)?;
            Ok(DpValue {
                value,
                error_bound: 0.0,
            })
        }
        DpMode::Interpolated { spacing } => interp_backward(&steps, d, scale, phi, spacing),
    }
}

/// All intermediate value tables of a lattice-mode run, outermost level
/// first; mainly a window for property tests.
pub fn lattice_tables(
    seq: &SequenceSpec,
    n: usize,
    scaling: Scaling,
    phi: &TestFunction,
) -> Result<Vec<LatticeValueTable>> {
    if n == 0 {
        return Err(Error::Input("the sum needs at least one step".into()));
    }
    let d = seq.dimension();
    if d > 2 {
        return Err(Error::Unsupported(format!(
            "DP state space covers d in {{1, 2}}, got {d}"
        )));
    }
    phi.check_dimension(d)?;
    let steps: Vec<ScenarioSet> = (1..=n).map(|i| seq.step_scenarios(i)).collect();
    let mut tables = Vec::with_capacity(n + 1);
    lattice_backward(&steps, d, scaling.factor(n), phi, Some(&mut tables))?;
    tables.reverse();
    Ok(tables)
}

/// Greatest common pitch of all support coordinates, or `None` when the
/// supports are not commensurable at a usable scale.
fn common_pitch(steps: &[ScenarioSet]) -> Option<f64> {
    let mut largest: f64 = 0.0;
    let mut pitch: f64 = 0.0;
    for step in steps {
        for scen in step.scenarios() {
            for (point, _) in scen.atoms() {
                for &c in point {
                    let c = c.abs();
                    largest = largest.max(c);
                    if c > 0.0 {
                        pitch = float_gcd(pitch, c);
                    }
                }
            }
        }
    }
    if largest == 0.0 {
        return Some(1.0); // every atom sits at the origin
    }
    // A pitch far below the coordinate scale means "incommensurable in
    // practice": the state space would explode.
    if pitch < 1e-6 * largest {
        return None;
    }
    for step in steps {
        for scen in step.scenarios() {
            for (point, _) in scen.atoms() {
                for &c in point {
                    let units = c / pitch;
                    if (units - units.round()).abs() > 1e-9 {
                        return None;
                    }
                }
            }
        }
    }
    Some(pitch)
}

fn float_gcd(a: f64, b: f64) -> f64 {
    let (mut x, mut y) = if a >= b { (a, b) } else { (b, a) };
    if x == 0.0 {
        return y;
    }
    let scale = x;
    while y > 1e-9 * scale {
        let r = (x - y * (x / y).round()).abs();
        x = y;
        y = r;
    }
    x
}

/// Integer atoms of one scenario: `(lattice units, weight)`.
type IntScenario = Vec<([i64; 2], f64)>;

fn lattice_backward(
    steps: &[ScenarioSet],
    d: usize,
    scale: f64,
    phi: &TestFunction,
    mut collect: Option<&mut Vec<LatticeValueTable>>,
) -> Result<f64> {
    let pitch = common_pitch(steps).ok_or_else(|| {
        Error::Config(
            "step supports do not share a lattice pitch; supply an interpolation spacing".into(),
        )
    })?;

    // Integer support per step and scenario.
    let int_steps: Vec<Vec<IntScenario>> = steps
        .iter()
        .map(|step| {
            step.scenarios()
                .iter()
                .map(|scen| {
                    scen.atoms()
                        .iter()
                        .map(|(point, w)| {
                            let mut units = [0i64; 2];
                            for (k, c) in point.iter().enumerate() {
                                units[k] = (c / pitch).round() as i64;
                            }
                            (units, *w)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // Reachable sets, forward from the origin.
    let n = steps.len();
    let mut levels: Vec<Vec<[i64; 2]>> = Vec::with_capacity(n + 1);
    levels.push(vec![[0, 0]]);
    for step in &int_steps {
        let prev = levels.last().unwrap();
        let mut next: HashSet<[i64; 2]> = HashSet::new();
        for p in prev {
            for scen in step {
                for (a, _) in scen {
                    next.insert([p[0] + a[0], p[1] + a[1]]);
                }
            }
        }
        let mut next: Vec<[i64; 2]> = next.into_iter().collect();
        next.sort_unstable();
        levels.push(next);
    }

    // Terminal data, then the backward maximization.
    let eval_at = |p: &[i64; 2]| -> f64 {
        let point = [p[0] as f64 * pitch * scale, p[1] as f64 * pitch * scale];
        phi.eval(&point[..d])
    };
    let mut table: HashMap<[i64; 2], f64> = levels[n].iter().map(|p| (*p, eval_at(p))).collect();
    if let Some(tables) = collect.as_deref_mut() {
        tables.push(LatticeValueTable {
            pitch,
            level: n,
            values: table.clone(),
        });
    }
    for i in (0..n).rev() {
        let step = &int_steps[i];
        let mut next_table: HashMap<[i64; 2], f64> = HashMap::with_capacity(levels[i].len());
        for p in &levels[i] {
            let mut best = f64::NEG_INFINITY;
            for scen in step {
                let mut acc = 0.0;
                for (a, w) in scen {
                    let q = [p[0] + a[0], p[1] + a[1]];
                    acc += w * table[&q];
                }
                best = best.max(acc);
            }
            next_table.insert(*p, best);
        }
        table = next_table;
        if let Some(tables) = collect.as_deref_mut() {
            tables.push(LatticeValueTable {
                pitch,
                level: i,
                values: table.clone(),
            });
        }
    }
    Ok(table[&[0, 0]])
}

fn interp_backward(
    steps: &[ScenarioSet],
    d: usize,
    scale: f64,
    phi: &TestFunction,
    spacing: f64,
) -> Result<DpValue> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::Config(
            "interpolation spacing must be positive".into(),
        ));
    }
    let n = steps.len();
    // Per-axis reach of one step; level i lives on [-i*reach, i*reach].
    let mut reach = [0.0f64; 2];
    for step in steps {
        for scen in step.scenarios() {
            for (point, _) in scen.atoms() {
                for (k, c) in point.iter().enumerate() {
                    reach[k] = reach[k].max(c.abs());
                }
            }
        }
    }
    let half_nodes = |level: usize, k: usize| -> i64 {
        (((level as f64 * reach[k]) / spacing).ceil() as i64).max(1)
    };

    let grid_values = |level: usize, f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
        let m0 = half_nodes(level, 0);
        match d {
            1 => (-m0..=m0).map(|i| f(&[i as f64 * spacing])).collect(),
            _ => {
                let m1 = half_nodes(level, 1);
                let mut v = Vec::with_capacity(((2 * m0 + 1) * (2 * m1 + 1)) as usize);
                for i in -m0..=m0 {
                    for j in -m1..=m1 {
                        v.push(f(&[i as f64 * spacing, j as f64 * spacing]));
                    }
                }
                v
            }
        }
    };

    let mut table = grid_values(n, &|x| {
        let scaled: Vec<f64> = x.iter().map(|c| c * scale).collect();
        phi.eval(&scaled)
    });

    for i in (0..n).rev() {
        let m_next = [half_nodes(i + 1, 0), half_nodes(i + 1, 1)];
        let stride = 2 * m_next[1] + 1;
        let interp = |x: &[f64]| -> f64 {
            match d {
                1 => {
                    let t = x[0] / spacing + m_next[0] as f64;
                    let i0 = (t.floor() as i64).clamp(0, 2 * m_next[0] - 1) as usize;
                    let frac = (t - i0 as f64).clamp(0.0, 1.0);
                    table[i0] * (1.0 - frac) + table[i0 + 1] * frac
                }
                _ => {
                    let t0 = x[0] / spacing + m_next[0] as f64;
                    let t1 = x[1] / spacing + m_next[1] as f64;
                    let i0 = (t0.floor() as i64).clamp(0, 2 * m_next[0] - 1) as usize;
                    let j0 = (t1.floor() as i64).clamp(0, 2 * m_next[1] - 1) as usize;
                    let f0 = (t0 - i0 as f64).clamp(0.0, 1.0);
                    let f1 = (t1 - j0 as f64).clamp(0.0, 1.0);
                    let base = i0 * stride as usize + j0;
                    let v00 = table[base];
                    let v01 = table[base + 1];
                    let v10 = table[base + stride as usize];
                    let v11 = table[base + stride as usize + 1];
                    v00 * (1.0 - f0) * (1.0 - f1)
                        + v01 * (1.0 - f0) * f1
                        + v10 * f0 * (1.0 - f1)
                        + v11 * f0 * f1
                }
            }
        };

        let step = &steps[i];
        let next = grid_values(i, &|s: &[f64]| {
            let mut best = f64::NEG_INFINITY;
            for scen in step.scenarios() {
                let mut acc = 0.0;
                for (a, w) in scen.atoms() {
                    let q: Vec<f64> = s.iter().zip(a).map(|(si, ai)| si + ai).collect();
                    acc += w * interp(&q);
                }
                best = best.max(acc);
            }
            best
        });
        table = next;
    }
    let value = table[table.len() / 2];
    if !value.is_finite() {
        return Err(Error::Numerical("DP value became non-finite".into()));
    }
    Ok(DpValue {
        value,
        error_bound: phi.lipschitz() * spacing * n as f64 * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clt::builders::Builder;
    use crate::clt::oracle::enumerate_oracle;

    fn two_scale() -> SequenceSpec {
        SequenceSpec::from_builder(Builder::ScaledInterval { a: 1.0, b: 2.0 }).unwrap()
    }

    #[test]
    fn base_case_matches_single_step_evaluation() {
        let seq = two_scale();
        let phi = TestFunction::cosine();
        let dp =
            evaluate_sum_expectation(&seq, 1, Scaling::InvSqrtN, &phi, DpMode::Lattice).unwrap();
        let direct = seq.step_scenarios(1).sup_of(|x| phi.eval(&[x[0]]));
        assert!((dp.value - direct).abs() < 1e-15);
        assert_eq!(dp.error_bound, 0.0);
    }

    #[test]
    fn two_step_absolute_value_by_hand() {
        // u_1(0) = 2/sqrt(2) and u_1(+-1) = u_1(+-2) = sqrt(2), so the
        // answer is sqrt(2).
        let seq = two_scale();
        let dp = evaluate_sum_expectation(
            &seq,
            2,
            Scaling::InvSqrtN,
            &TestFunction::abs(),
            DpMode::Lattice,
        )
        .unwrap();
        assert!((dp.value - 2.0f64.sqrt()).abs() < 1e-15, "{}", dp.value);
    }

    #[test]
    fn classical_fourth_step_second_moment() {
        let seq = SequenceSpec::from_builder(Builder::ScaledInterval { a: 1.0, b: 1.0 }).unwrap();
        let phi = TestFunction::quadratic_clipped(10.0).unwrap();
        let dp =
            evaluate_sum_expectation(&seq, 4, Scaling::InvSqrtN, &phi, DpMode::Lattice).unwrap();
        assert!((dp.value - 1.0).abs() < 1e-14, "{}", dp.value);
    }

    #[test]
    fn rejects_zero_steps_and_high_dimension() {
        let seq = two_scale();
        let phi = TestFunction::abs();
        assert!(matches!(
            evaluate_sum_expectation(&seq, 0, Scaling::InvSqrtN, &phi, DpMode::Lattice),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn non_lattice_supports_need_interpolation() {
        let seq = SequenceSpec::from_builder(Builder::HausdorffDecay {
            sigma_lo2: 1.0,
            sigma_hi2: 4.0,
            c: 1.0,
        })
        .unwrap();
        let phi = TestFunction::cosine();
        assert!(matches!(
            evaluate_sum_expectation(&seq, 4, Scaling::InvSqrtN, &phi, DpMode::Lattice),
            Err(Error::Config(_))
        ));
        let dp = evaluate_sum_expectation(
            &seq,
            4,
            Scaling::InvSqrtN,
            &phi,
            DpMode::Interpolated { spacing: 1e-3 },
        )
        .unwrap();
        let oracle = enumerate_oracle(&seq, 4, Scaling::InvSqrtN, &phi).unwrap();
        assert!(
            (dp.value - oracle).abs() <= dp.error_bound,
            "dp {} oracle {oracle} bound {}",
            dp.value,
            dp.error_bound
        );
    }

    #[test]
    fn interpolation_agrees_with_lattice_on_lattice_supports() {
        let seq = two_scale();
        let phi = TestFunction::cosine();
        let exact =
            evaluate_sum_expectation(&seq, 6, Scaling::InvSqrtN, &phi, DpMode::Lattice).unwrap();
        let approx = evaluate_sum_expectation(
            &seq,
            6,
            Scaling::InvSqrtN,
            &phi,
            DpMode::Interpolated { spacing: 5e-4 },
        )
        .unwrap();
        assert!((exact.value - approx.value).abs() <= approx.error_bound);
    }

    #[test]
    fn fractional_binary_supports_stay_exact() {
        // Noise 0.5 around +-1 gives supports on the 0.5 lattice.
        let seq = SequenceSpec::from_builder(Builder::LlnMeanInterval {
            lo: -1.0,
            hi: 1.0,
            noise: 0.5,
        })
        .unwrap();
        let phi = TestFunction::clipped_abs(2.0).unwrap();
        let dp = evaluate_sum_expectation(&seq, 3, Scaling::InvN, &phi, DpMode::Lattice).unwrap();
        let oracle = enumerate_oracle(&seq, 3, Scaling::InvN, &phi).unwrap();
        assert!((dp.value - oracle).abs() < 1e-12);
    }

    #[test]
    fn tables_cover_exactly_the_reachable_sums() {
        let seq = two_scale();
        let tables = lattice_tables(&seq, 2, Scaling::InvSqrtN, &TestFunction::abs()).unwrap();
        assert_eq!(tables.len(), 3);
        assert_eq!(tables[0].level, 0);
        assert_eq!(tables[0].values.len(), 1);
        // After one step: +-1, +-2.
        assert_eq!(tables[1].values.len(), 4);
        // After two: sums of two values from {+-1, +-2}.
        let mut pts: Vec<i64> = tables[2].values.keys().map(|p| p[0]).collect();
        pts.sort_unstable();
        assert_eq!(pts, vec![-4, -3, -2, -1, 0, 1, 2, 3, 4]);
    }
}
