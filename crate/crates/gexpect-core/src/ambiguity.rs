//! Covariance ambiguity sets: polytopes of positive semidefinite matrices,
//! the sublinear generator they induce, the Hausdorff metric between them,
//! and the convergence-condition checkers built on both.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::SymMatrix;
use crate::scenario::ScenarioSet;

/// Smallest eigenvalue a polytope vertex may have and still count as PSD.
pub const PSD_TOL: f64 = 1e-10;

/// Additive slack used by the inequality checkers.
pub const CHECK_TOL: f64 = 1e-10;

/// Convex hull of finitely many PSD matrices. The represented set is the
/// hull of the stored vertices; vertices are kept as given, without
/// deduplication or hull minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeSpec", into = "PolytopeSpec")]
pub struct CovariancePolytope {
    dimension: usize,
    vertices: Vec<SymMatrix>,
}

/// Accepts either the explicit vertex form or, in dimension 1, the
/// `{"interval": [lo, hi]}` shorthand.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolytopeSpec {
    Interval {
        interval: [f64; 2],
    },
    Vertices {
        dimension: usize,
        vertices: Vec<Vec<Vec<f64>>>,
    },
}

impl TryFrom<PolytopeSpec> for CovariancePolytope {
    type Error = Error;
    fn try_from(spec: PolytopeSpec) -> Result<Self> {
        match spec {
            PolytopeSpec::Interval { interval: [lo, hi] } => CovariancePolytope::interval(lo, hi),
            PolytopeSpec::Vertices {
                dimension,
                vertices,
            } => {
                let vertices = vertices
                    .iter()
                    .map(|rows| SymMatrix::from_rows(rows))
                    .collect::<Result<Vec<_>>>()?;
                CovariancePolytope::new(dimension, vertices)
            }
        }
    }
}

impl From<CovariancePolytope> for PolytopeSpec {
    fn from(p: CovariancePolytope) -> Self {
        PolytopeSpec::Vertices {
            dimension: p.dimension,
            vertices: p.vertices.into_iter().map(Vec::<Vec<f64>>::from).collect(),
        }
    }
}

impl CovariancePolytope {
    pub fn new(dimension: usize, vertices: Vec<SymMatrix>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Construction(
                "polytope needs at least one vertex".into(),
            ));
        }
        for v in &vertices {
            if v.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.dimension(),
                });
            }
            if !v.is_psd(PSD_TOL) {
                return Err(Error::Construction(format!(
                    "vertex with smallest eigenvalue {} is not positive semidefinite",
                    v.min_eigenvalue()
                )));
            }
        }
        Ok(CovariancePolytope {
            dimension,
            vertices,
        })
    }

    /// The 1-d variance interval `[lo, hi]` as a two-vertex polytope.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::Construction(format!(
                "invalid variance interval [{lo}, {hi}]"
            )));
        }
        Self::new(1, vec![SymMatrix::scalar(lo), SymMatrix::scalar(hi)])
    }

    pub fn singleton(vertex: SymMatrix) -> Result<Self> {
        let d = vertex.dimension();
        Self::new(d, vec![vertex])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[SymMatrix] {
        &self.vertices
    }

    /// For 1-d polytopes, the represented interval `[min, max]`.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        if self.dimension != 1 {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            lo = lo.min(v.get(0, 0));
            hi = hi.max(v.get(0, 0));
        }
        Some((lo, hi))
    }

    /// The sublinear generator `G(A) = 1/2 sup_Q tr[A Q]`. A linear map
    /// over a hull attains its maximum at a vertex, so enumerating the
    /// vertices is exact.
    pub fn generator_value(&self, a: &SymMatrix) -> Result<f64> {
        if a.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: a.dimension(),
            });
        }
        Ok(self
            .vertices
            .iter()
            .map(|q| 0.5 * a.trace_product(q))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Largest per-axis diagonal entry over the vertices; an upper bound
    /// for the variance in each coordinate over the whole hull.
    pub fn max_diagonal(&self) -> Vec<f64> {
        (0..self.dimension)
            .map(|k| {
                self.vertices
                    .iter()
                    .map(|v| v.get(k, k))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

/// The per-scenario second-moment matrices of a mean-zero scenario set,
/// one polytope vertex per scenario. Satisfies
/// `generator_value(result, A) = 1/2 * sup_theta E_theta<AX, X>`.
pub fn g_from_scenarios(s: &ScenarioSet) -> Result<CovariancePolytope> {
    if !s.check_mean_certain_zero() {
        return Err(Error::Precondition(
            "scenario set must be mean-zero in every scenario".into(),
        ));
    }
    let vertices: Vec<SymMatrix> = s
        .scenarios()
        .iter()
        .map(|d| d.second_moment_matrix())
        .collect();
    CovariancePolytope::new(s.dimension(), vertices)
}

/// Squared-distance projection of `point` onto the hull by pairwise
/// Frank-Wolfe over the simplex of vertex weights. Exact line search;
/// stops when the duality gap certifies the distance to within `1e-9`
/// absolute, with an iteration cap of 10_000.
pub fn point_to_hull_distance(point: &SymMatrix, hull: &CovariancePolytope) -> f64 {
    let verts = &hull.vertices;
    let k = verts.len();
    let dim = point.dimension();
    let n2 = dim * dim;

    // Start at the nearest vertex; for a single vertex that is the answer.
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, v) in verts.iter().enumerate() {
        let d = v.distance(point);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    if k == 1 {
        return best_d;
    }

    let mut weights = vec![0.0; k];
    weights[best] = 1.0;
    let mut x = vec![0.0; n2];
    let mut residual = vec![0.0; n2];
    for _ in 0..10_000 {
        // x = sum_k w_k V_k, recomputed each round to avoid drift.
        x.iter_mut().for_each(|v| *v = 0.0);
        for (w, v) in weights.iter().zip(verts) {
            if *w != 0.0 {
                for (xi, vi) in x.iter_mut().zip(v.entries()) {
                    *xi += w * vi;
                }
            }
        }
        for ((r, xi), pi) in residual.iter_mut().zip(&x).zip(point.entries()) {
            *r = xi - pi;
        }
        let f: f64 = residual.iter().map(|r| r * r).sum();
        if f <= 1e-24 {
            return 0.0;
        }

        // Gradient in weight space is 2<residual, V_k>.
        let grads: Vec<f64> = verts
            .iter()
            .map(|v| {
                2.0 * residual
                    .iter()
                    .zip(v.entries())
                    .map(|(r, e)| r * e)
                    .sum::<f64>()
            })
            .collect();
        let toward = (0..k)
            .min_by(|&i, &j| grads[i].partial_cmp(&grads[j]).unwrap())
            .unwrap();
        let away = (0..k)
            .filter(|&i| weights[i] > 0.0)
            .max_by(|&i, &j| grads[i].partial_cmp(&grads[j]).unwrap())
            .unwrap();

        // Duality gap <grad, x - s> bounds f - f*; stop once the implied
        // distance error is below 1e-9.
        let grad_dot_x: f64 = weights.iter().zip(&grads).map(|(w, g)| w * g).sum();
        let gap = grad_dot_x - grads[toward];
        if gap <= 1e-9 * f.sqrt() + 1e-18 {
            break;
        }

        // Pairwise step: move weight from the away vertex to the toward
        // vertex along d = V_t - V_a with exact line search on the quadratic.
        let vt = verts[toward].entries();
        let va = verts[away].entries();
        let mut dir_dot_res = 0.0;
        let mut dir_norm2 = 0.0;
        for i in 0..n2 {
            let di = vt[i] - va[i];
            dir_dot_res += di * residual[i];
            dir_norm2 += di * di;
        }
        if dir_norm2 <= 1e-300 {
            break;
        }
        let step = (-dir_dot_res / dir_norm2).clamp(0.0, weights[away]);
        if step <= 0.0 {
            break;
        }
        weights[toward] += step;
        weights[away] -= step;
    }

    x.iter_mut().for_each(|v| *v = 0.0);
    for (w, v) in weights.iter().zip(verts) {
        for (xi, vi) in x.iter_mut().zip(v.entries()) {
            *xi += w * vi;
        }
    }
    x.iter()
        .zip(point.entries())
        .map(|(xi, pi)| (xi - pi) * (xi - pi))
        .sum::<f64>()
        .sqrt()
}

/// Hausdorff distance between the represented hulls: the larger of the two
/// one-sided excesses, each attained at a vertex because point-to-convex-set
/// distance is convex.
pub fn hausdorff(t1: &CovariancePolytope, t2: &CovariancePolytope) -> Result<f64> {
    if t1.dimension() != t2.dimension() {
        return Err(Error::DimensionMismatch {
            expected: t1.dimension(),
            got: t2.dimension(),
        });
    }
    let excess = |from: &CovariancePolytope, to: &CovariancePolytope| {
        from.vertices
            .iter()
            .map(|v| point_to_hull_distance(v, to))
            .fold(0.0, f64::max)
    };
    Ok(excess(t1, t2).max(excess(t2, t1)))
}

/// Closed form for variance intervals: `max(|a-c|, |b-d|)`.
pub fn hausdorff_interval(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// A deterministic nonnegative sequence `a_1, a_2, ...` used as the
/// convergence-rate envelope in the condition checkers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum DecaySchedule {
    Zero,
    Constant {
        value: f64,
    },
    /// `scale / n`.
    Harmonic {
        scale: f64,
    },
    /// `scale * ratio^n`.
    Geometric {
        scale: f64,
        ratio: f64,
    },
    /// `spike` when `n` is a power of two, otherwise `scale / n`. The
    /// terms do not converge but their running averages do.
    PowerOfTwoSpike {
        spike: f64,
        scale: f64,
    },
}

impl DecaySchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DecaySchedule::Zero => true,
            DecaySchedule::Constant { value } => *value >= 0.0,
            DecaySchedule::Harmonic { scale } => *scale >= 0.0,
            DecaySchedule::Geometric { scale, ratio } => {
                *scale >= 0.0 && (0.0..=1.0).contains(ratio)
            }
            DecaySchedule::PowerOfTwoSpike { spike, scale } => *spike >= 0.0 && *scale >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Construction(
                "decay schedule terms must be nonnegative".into(),
            ))
        }
    }

    /// The term `a_n`, 1-based.
    pub fn term(&self, n: usize) -> f64 {
        assert!(n >= 1, "decay schedules are 1-based");
        match self {
            DecaySchedule::Zero => 0.0,
            DecaySchedule::Constant { value } => *value,
            DecaySchedule::Harmonic { scale } => scale / n as f64,
            DecaySchedule::Geometric { scale, ratio } => scale * ratio.powi(n as i32),
            DecaySchedule::PowerOfTwoSpike { spike, scale } => {
                if n.is_power_of_two() {
                    *spike
                } else {
                    scale / n as f64
                }
            }
        }
    }

    /// Running averages `(a_1 + ... + a_n) / n` for `n = 1..=n_max`.
    pub fn cesaro_means(&self, n_max: usize) -> Vec<f64> {
        let mut partial = 0.0;
        (1..=n_max)
            .map(|n| {
                partial += self.term(n);
                partial / n as f64
            })
            .collect()
    }
}

/// Trace of running averages plus a heuristic verdict; the trace is the
/// authoritative output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CesaroTrace {
    pub means: Vec<f64>,
    pub pass: bool,
}

/// Computes the running averages of the schedule up to `n_max` and flags
/// whether the final mean dropped below a tenth of the initial one.
pub fn cesaro_limit_zero(sched: &DecaySchedule, n_max: usize) -> Result<CesaroTrace> {
    if n_max < 10 {
        return Err(Error::Input(format!(
            "trend test needs n_max >= 10, got {n_max}"
        )));
    }
    sched.validate()?;
    let means = sched.cesaro_means(n_max);
    let initial = means[0];
    let last = means[n_max - 1];
    let pass = if initial > 0.0 {
        last < 0.1 * initial
    } else {
        last == 0.0
    };
    Ok(CesaroTrace { means, pass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundViolation {
    /// 1-based sequence index.
    pub index: usize,
    pub probe: usize,
    pub lhs: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionIvReport {
    pub pass: bool,
    pub violations: Vec<BoundViolation>,
    /// Largest `lhs - bound` observed (negative when everything holds).
    pub worst_excess: f64,
    pub cesaro_means: Vec<f64>,
}

/// Checks `|G_n(A) - G(A)| <= a_n ||A||` for every listed polytope and
/// probe matrix, and reports the running averages of the schedule.
pub fn check_condition_iv(
    g_seq: &[CovariancePolytope],
    g_limit: &CovariancePolytope,
    sched: &DecaySchedule,
    probes: &[SymMatrix],
) -> Result<ConditionIvReport> {
    if probes.is_empty() {
        return Err(Error::Input(
            "condition check needs at least one probe".into(),
        ));
    }
    sched.validate()?;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (i, theta_n) in g_seq.iter().enumerate() {
        let a_n = sched.term(i + 1);
        for (p, a) in probes.iter().enumerate() {
            let lhs = (theta_n.generator_value(a)? - g_limit.generator_value(a)?).abs();
            let bound = a_n * a.frobenius_norm() + CHECK_TOL;
            worst = worst.max(lhs - bound);
            if lhs > bound {
                violations.push(BoundViolation {
                    index: i + 1,
                    probe: p,
                    lhs,
                    bound,
                });
            }
        }
    }
    Ok(ConditionIvReport {
        pass: violations.is_empty(),
        violations,
        worst_excess: worst,
        cesaro_means: sched.cesaro_means(g_seq.len()),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pass: bool,
    pub lipschitz_constant: f64,
    pub violations: Vec<BoundViolation>,
    pub worst_excess: f64,
}

/// Checks the common Lipschitz bound
/// `|G_i(A) - G_i(B)| <= 1/2 M^(2/3) ||A - B||` on the given probe pairs.
pub fn lipschitz_bound_check(
    g_seq: &[CovariancePolytope],
    m_bound: f64,
    probes: &[(SymMatrix, SymMatrix)],
) -> Result<LipschitzReport> {
    if m_bound < 0.0 {
        return Err(Error::Input("moment bound must be nonnegative".into()));
    }
    let c0 = 0.5 * m_bound.powf(2.0 / 3.0);
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (i, theta) in g_seq.iter().enumerate() {
        for (p, (a, b)) in probes.iter().enumerate() {
            let lhs = (theta.generator_value(a)? - theta.generator_value(b)?).abs();
            let bound = c0 * a.sub(b).frobenius_norm() + CHECK_TOL;
            worst = worst.max(lhs - bound);
            if lhs > bound {
                violations.push(BoundViolation {
                    index: i + 1,
                    probe: p,
                    lhs,
                    bound,
                });
            }
        }
    }
    Ok(LipschitzReport {
        pass: violations.is_empty(),
        lipschitz_constant: c0,
        violations,
        worst_excess: worst,
    })
}

/// Samples the generator gap `|G_1(A) - G_2(A)|` over random unit-norm
/// probes plus all normalized vertex differences, and returns the largest
/// gap seen. The result never exceeds the Hausdorff distance of the hulls
/// (up to tolerance).
pub fn uniform_gap_on_unit_ball(
    t1: &CovariancePolytope,
    t2: &CovariancePolytope,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples < 1 {
        return Err(Error::Input("need at least one sample".into()));
    }
    if t1.dimension() != t2.dimension() {
        return Err(Error::DimensionMismatch {
            expected: t1.dimension(),
            got: t2.dimension(),
        });
    }
    let d = t1.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::with_capacity(samples + t1.vertices.len() * t2.vertices.len());
    for _ in 0..samples {
        probes.push(SymMatrix::random_unit(d, &mut rng));
    }
    for v1 in &t1.vertices {
        for v2 in &t2.vertices {
            let diff = v1.sub(v2);
            let n = diff.frobenius_norm();
            if n > 1e-12 {
                probes.push(diff.scale(1.0 / n));
            }
        }
    }
    let mut gap: f64 = 0.0;
    for a in &probes {
        gap = gap.max((t1.generator_value(a)? - t2.generator_value(a)?).abs());
    }
    Ok(gap)
}

/// Deterministic batch of random unit-Frobenius-norm probe matrices.
pub fn random_unit_matrices(dimension: usize, count: usize, seed: u64) -> Vec<SymMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SymMatrix::random_unit(dimension, &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: f64, hi: f64) -> CovariancePolytope {
        CovariancePolytope::interval(lo, hi).unwrap()
    }

    #[test]
    fn generator_value_examples() {
        let theta = interval(1.0, 4.0);
        assert_eq!(theta.generator_value(&SymMatrix::scalar(0.0)).unwrap(), 0.0);
        // sup over q in [1,4] of q*(-2)/2 attains at q = 1.
        assert_eq!(
            theta.generator_value(&SymMatrix::scalar(-2.0)).unwrap(),
            -1.0
        );
        let hull = CovariancePolytope::new(
            2,
            vec![
                SymMatrix::diagonal(&[1.0, 0.0]),
                SymMatrix::diagonal(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        assert_eq!(hull.generator_value(&SymMatrix::identity(2)).unwrap(), 0.5);
    }

    #[test]
    fn generator_matches_scenario_quadratic_form() {
        let s = ScenarioSet::symmetric_1d(&[1.0, 2.0]).unwrap();
        let theta = g_from_scenarios(&s).unwrap();
        assert_eq!(theta.as_interval(), Some((1.0, 4.0)));
        for a in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let g = theta.generator_value(&SymMatrix::scalar(a)).unwrap();
            let direct = 0.5 * s.sup_of(|x| a * x[0] * x[0]);
            assert!((g - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn g_from_scenarios_examples() {
        let s = ScenarioSet::symmetric_1d(&[1.0]).unwrap();
        let theta = g_from_scenarios(&s).unwrap();
        assert_eq!(theta.as_interval(), Some((1.0, 1.0)));

        let atoms = vec![
            (vec![1.0, 0.0], 0.25),
            (vec![-1.0, 0.0], 0.25),
            (vec![0.0, 1.0], 0.25),
            (vec![0.0, -1.0], 0.25),
        ];
        let s2 = ScenarioSet::new(
            2,
            vec![crate::scenario::DiscreteDistribution::new(atoms).unwrap()],
        )
        .unwrap();
        let theta2 = g_from_scenarios(&s2).unwrap();
        let half_identity = SymMatrix::diagonal(&[0.5, 0.5]);
        assert!(theta2.vertices()[0].distance(&half_identity) < 1e-15);
    }

    #[test]
    fn g_from_scenarios_rejects_nonzero_mean() {
        let skew = ScenarioSet::new(
            1,
            vec![crate::scenario::DiscreteDistribution::new(vec![
                (vec![0.0], 0.9),
                (vec![1.0], 0.1),
            ])
            .unwrap()],
        )
        .unwrap();
        assert!(matches!(
            g_from_scenarios(&skew),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let theta = interval(1.0, 4.0);
        assert_eq!(hausdorff(&theta, &theta).unwrap(), 0.0);
        let d = hausdorff(&interval(1.0, 4.0), &interval(2.0, 3.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
        assert_eq!(hausdorff_interval((1.0, 4.0), (2.0, 3.0)), 1.0);

        let s1 = CovariancePolytope::singleton(SymMatrix::diagonal(&[1.0, 1.0])).unwrap();
        let s2 = CovariancePolytope::singleton(SymMatrix::diagonal(&[2.0, 1.0])).unwrap();
        assert!((hausdorff(&s1, &s2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_finds_interior_and_face_points() {
        // Origin projected onto the segment between diag(1,0) and diag(0,1):
        // nearest point is diag(1/2, 1/2) at Frobenius distance 1/sqrt(2).
        let hull = CovariancePolytope::new(
            2,
            vec![
                SymMatrix::diagonal(&[1.0, 0.0]),
                SymMatrix::diagonal(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        let d = point_to_hull_distance(&SymMatrix::zero(2), &hull);
        assert!((d - 0.5_f64.sqrt()).abs() < 1e-9, "{d}");

        // A vertex of the hull is at distance zero.
        let d0 = point_to_hull_distance(&SymMatrix::diagonal(&[1.0, 0.0]), &hull);
        assert!(d0 < 1e-9, "{d0}");

        // A point of the hull that is not a vertex.
        let mid = SymMatrix::diagonal(&[0.25, 0.75]);
        let dm = point_to_hull_distance(&mid, &hull);
        assert!(dm < 1e-9, "{dm}");
    }

    #[test]
    fn condition_iv_io_examples() {
        let theta = interval(1.0, 4.0);
        let probes = random_unit_matrices(1, 8, 1);

        // Identical sets with a zero schedule pass.
        let seq: Vec<_> = (0..8).map(|_| theta.clone()).collect();
        let report = check_condition_iv(&seq, &theta, &DecaySchedule::Zero, &probes).unwrap();
        assert!(report.pass);

        // [1 + 1/n, 4 + 1/n] with a_n = 1/n passes, and the running
        // averages are H_n / n.
        let seq: Vec<_> = (1..=32)
            .map(|n| interval(1.0 + 1.0 / n as f64, 4.0 + 1.0 / n as f64))
            .collect();
        let report = check_condition_iv(
            &seq,
            &theta,
            &DecaySchedule::Harmonic { scale: 1.0 },
            &probes,
        )
        .unwrap();
        assert!(report.pass, "worst excess {}", report.worst_excess);
        let h4: f64 = (1..=4).map(|k| 1.0 / k as f64).sum();
        assert!((report.cesaro_means[3] - h4 / 4.0).abs() < 1e-15);

        // A fixed offset cannot be covered by a 1/n schedule from n = 3 on.
        let seq: Vec<_> = (0..8).map(|_| interval(1.0, 5.0)).collect();
        let report = check_condition_iv(
            &seq,
            &theta,
            &DecaySchedule::Harmonic { scale: 1.0 },
            &[SymMatrix::scalar(1.0)],
        )
        .unwrap();
        assert!(!report.pass);
        assert!(report.violations.iter().all(|v| v.index >= 3));
        assert!(report.violations.iter().any(|v| v.index == 3));
    }

    #[test]
    fn cesaro_trend_examples() {
        let trace = cesaro_limit_zero(&DecaySchedule::Harmonic { scale: 1.0 }, 1000).unwrap();
        assert!(trace.pass);
        let last = trace.means[999];
        assert!((last - 0.007485).abs() < 1e-4, "{last}");

        let trace = cesaro_limit_zero(&DecaySchedule::Constant { value: 1.0 }, 100).unwrap();
        assert!(!trace.pass);
        assert!(trace.means.iter().all(|m| (*m - 1.0).abs() < 1e-12));

        // Spikes at powers of two still average out.
        let sched = DecaySchedule::PowerOfTwoSpike {
            spike: 1.0,
            scale: 1.0,
        };
        let trace = cesaro_limit_zero(&sched, 4096).unwrap();
        assert!(trace.pass, "final mean {}", trace.means[4095]);

        assert!(cesaro_limit_zero(&DecaySchedule::Zero, 5).is_err());
    }

    #[test]
    fn lipschitz_bound_examples() {
        // M = 8 gives the constant 1/2 * 8^(2/3) = 2, matched with equality
        // by [1,4] on positive probes.
        let theta = interval(1.0, 4.0);
        let probes = vec![
            (SymMatrix::scalar(1.0), SymMatrix::scalar(2.0)),
            (SymMatrix::scalar(3.0), SymMatrix::scalar(3.0)),
            (SymMatrix::scalar(-1.0), SymMatrix::scalar(1.0)),
        ];
        let report = lipschitz_bound_check(&[theta], 8.0, &probes).unwrap();
        assert!(report.pass);
        assert!((report.lipschitz_constant - 2.0).abs() < 1e-12);

        let tight = lipschitz_bound_check(
            &[interval(1.0, 4.0)],
            1.0, // C0 = 1/2, too small for the slope 2 of G on [1,4]
            &[(SymMatrix::scalar(1.0), SymMatrix::scalar(2.0))],
        )
        .unwrap();
        assert!(!tight.pass);
    }

    #[test]
    fn uniform_gap_examples() {
        let theta = interval(1.0, 4.0);
        assert_eq!(
            uniform_gap_on_unit_ball(&theta, &theta, 16, 3).unwrap(),
            0.0
        );

        let gap = uniform_gap_on_unit_ball(&theta, &interval(2.0, 3.0), 64, 3).unwrap();
        assert!((gap - 0.5).abs() < 1e-12, "{gap}");
        assert!(gap <= hausdorff(&theta, &interval(2.0, 3.0)).unwrap() + 1e-9);

        let s1 = CovariancePolytope::singleton(SymMatrix::diagonal(&[1.0, 1.0])).unwrap();
        let s2 = CovariancePolytope::singleton(SymMatrix::diagonal(&[2.0, 1.0])).unwrap();
        let gap = uniform_gap_on_unit_ball(&s1, &s2, 64, 3).unwrap();
        assert!((gap - 0.5).abs() < 1e-12, "{gap}");
    }

    #[test]
    fn polytope_psd_guard() {
        let bad = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(CovariancePolytope::new(2, vec![bad]).is_err());
    }

    #[test]
    fn interval_shorthand_deserializes() {
        let p: CovariancePolytope = serde_json::from_str(r#"{"interval": [1.0, 4.0]}"#).unwrap();
        assert_eq!(p.as_interval(), Some((1.0, 4.0)));
        let q: CovariancePolytope =
            serde_json::from_str(r#"{"dimension": 2, "vertices": [[[1.0, 0.0], [0.0, 1.0]]]}"#)
                .unwrap();
        assert_eq!(q.dimension(), 2);
    }
}
