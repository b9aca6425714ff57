//! Mean polytopes and the first-order transport they generate. The
//! limiting expectation is an exact maximization over the hull; the
//! upwind solver exists to cross-check the PDE route against that closed
//! form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::grid::{Grid1D, Grid2D};
use crate::pde::PdeSolution;
use crate::testfn::TestFunction;

const CFL_SLACK: f64 = 1e-9;

/// Convex hull of finitely many mean vectors; the carrier of the support
/// function `g(p) = max_q <p, q>` and of the maximal distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeanPolytopeSpec", into = "MeanPolytopeSpec")]
pub struct MeanPolytope {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MeanPolytopeSpec {
    Interval {
        interval: [f64; 2],
    },
    Vertices {
        dimension: usize,
        vertices: Vec<Vec<f64>>,
    },
}

impl TryFrom<MeanPolytopeSpec> for MeanPolytope {
    type Error = Error;
    fn try_from(spec: MeanPolytopeSpec) -> Result<Self> {
        match spec {
            MeanPolytopeSpec::Interval { interval: [lo, hi] } => MeanPolytope::interval(lo, hi),
            MeanPolytopeSpec::Vertices {
                dimension,
                vertices,
            } => MeanPolytope::new(dimension, vertices),
        }
    }
}

impl From<MeanPolytope> for MeanPolytopeSpec {
    fn from(p: MeanPolytope) -> Self {
        MeanPolytopeSpec::Vertices {
            dimension: p.dimension,
            vertices: p.vertices,
        }
    }
}

impl MeanPolytope {
    pub fn new(dimension: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Construction(
                "mean polytope dimension must be >= 1".into(),
            ));
        }
        if vertices.is_empty() {
            return Err(Error::Construction(
                "mean polytope needs at least one vertex".into(),
            ));
        }
        for v in &vertices {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Construction("vertices must be finite".into()));
            }
        }
        Ok(MeanPolytope {
            dimension,
            vertices,
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::Construction(format!(
                "invalid mean interval [{lo}, {hi}]"
            )));
        }
        Self::new(1, vec![vec![lo], vec![hi]])
    }

    pub fn singleton(vertex: Vec<f64>) -> Result<Self> {
        let d = vertex.len();
        Self::new(d, vec![vertex])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// The support function `max_q <p, q>`, exact by vertex enumeration.
    pub fn support_value(&self, p: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(p).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let dist = self.vertices[i]
                    .iter()
                    .zip(&self.vertices[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d = d.max(dist);
            }
        }
        d
    }
}

/// Result of maximizing a function over a hull by barycentric sampling
/// followed by local refinement. `covering_radius` bounds how far any hull
/// point can be from the sampled grid, so the true maximum exceeds `value`
/// by at most the Lipschitz constant times it.
#[derive(Debug, Clone)]
pub struct HullMax {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub covering_radius: f64,
}

/// Maximizes `f` over the hull. The grid resolution defaults to a spacing
/// of about one thousandth of the diameter (reduced for vertex-heavy
/// hulls to cap the enumeration), then a simplex hill climb sharpens the
/// value; the reported covering radius comes from the grid alone.
pub fn maximize_over_hull(gamma: &MeanPolytope, f: impl Fn(&[f64]) -> f64) -> HullMax {
    let verts = gamma.vertices();
    let k = verts.len();
    let d = gamma.dimension();
    let diam = gamma.diameter();
    if k == 1 || diam == 0.0 {
        return HullMax {
            value: f(&verts[0]),
            argmax: verts[0].clone(),
            covering_radius: 0.0,
        };
    }

    let resolution = grid_resolution_for(k);
    let point_of = |weights: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; d];
        for (w, v) in weights.iter().zip(verts) {
            for (pi, vi) in p.iter_mut().zip(v) {
                *pi += w * vi;
            }
        }
        p
    };

    // Enumerate all weight vectors with entries m/r summing to 1.
    let mut best_val = f64::NEG_INFINITY;
    let mut best_w = vec![0.0; k];
    let mut counts = vec![0usize; k];
    let mut weights = vec![0.0; k];
    enumerate_compositions(resolution, k, &mut counts, &mut |counts| {
        for (w, c) in weights.iter_mut().zip(counts) {
            *w = *c as f64 / resolution as f64;
        }
        let v = f(&point_of(&weights));
        if v > best_val {
            best_val = v;
            best_w.copy_from_slice(&weights);
        }
    });

    // Hill climb along simplex edges with a shrinking step.
    let mut step = 1.0 / resolution as f64;
    let mut budget = 200_000usize;
    while step > 1e-10 && budget > 0 {
        let mut improved = false;
        'pairs: for i in 0..k {
            for j in 0..k {
                if i == j || best_w[j] < step {
                    continue;
                }
                let mut cand = best_w.clone();
                cand[i] += step;
                cand[j] -= step;
                let v = f(&point_of(&cand));
                budget -= 1;
                if v > best_val {
                    best_val = v;
                    best_w = cand;
                    improved = true;
                    break 'pairs;
                }
                if budget == 0 {
                    break 'pairs;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    // Sum-preserving rounding moves each weight by at most 1/r, so a hull
    // point is within diam * (k-1)/r of a grid point.
    let covering = diam * (k - 1) as f64 / resolution as f64;
    HullMax {
        value: best_val,
        argmax: point_of(&best_w),
        covering_radius: covering,
    }
}

fn grid_resolution_for(k: usize) -> usize {
    // Largest r <= 1000 keeping C(r + k - 1, k - 1) around 600k points.
    let mut r = 1000usize;
    loop {
        let mut count = 1.0f64;
        for i in 1..k {
            count *= (r + i) as f64 / i as f64;
        }
        if count <= 600_000.0 || r <= 8 {
            return r;
        }
        r = r * 3 / 4;
    }
}

fn enumerate_compositions(
    total: usize,
    slots: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    fn rec(
        remaining: usize,
        slot: usize,
        counts: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if slot + 1 == counts.len() {
            counts[slot] = remaining;
            visit(counts);
            return;
        }
        for m in 0..=remaining {
            counts[slot] = m;
            rec(remaining - m, slot + 1, counts, visit);
        }
    }
    debug_assert_eq!(counts.len(), slots);
    rec(total, 0, counts, visit);
}

/// The limiting expectation of `phi` under the maximal distribution on
/// `gamma`: `max_{y in hull} phi(y)`, with the residual grid error
/// reported as `error_bound`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaximalValue {
    pub value: f64,
    pub error_bound: f64,
    pub argmax: Vec<f64>,
}

pub fn maximal_expectation(gamma: &MeanPolytope, phi: &TestFunction) -> Result<MaximalValue> {
    phi.check_dimension(gamma.dimension())?;
    let hm = maximize_over_hull(gamma, |y| phi.eval(y));
    Ok(MaximalValue {
        value: hm.value,
        error_bound: phi.lipschitz() * hm.covering_radius,
        argmax: hm.argmax,
    })
}

/// Closed form for the transport flow: `u(t, y) = max_{q in hull}
/// phi(y + t q)`.
pub fn hopf_lax_value(gamma: &MeanPolytope, phi: &TestFunction, t: f64, y: &[f64]) -> Result<f64> {
    phi.check_dimension(gamma.dimension())?;
    if y.len() != gamma.dimension() {
        return Err(Error::DimensionMismatch {
            expected: gamma.dimension(),
            got: y.len(),
        });
    }
    let shifted = |q: &[f64]| {
        let point: Vec<f64> = y.iter().zip(q).map(|(yi, qi)| yi + t * qi).collect();
        phi.eval(&point)
    };
    Ok(maximize_over_hull(gamma, shifted).value)
}

/// Upwind scheme for `du/dt = max_q <q, Du>` in one dimension; each
/// vertex speed differences into the direction it transports from, and
/// the maximum of those monotone updates stays monotone. Stable for
/// `dt * max|q| / dx <= 1`.
pub fn solve_maximal_pde_1d_with(
    gamma: &MeanPolytope,
    initial: impl Fn(f64) -> f64,
    grid: &Grid1D,
) -> Result<PdeSolution> {
    if gamma.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: gamma.dimension(),
        });
    }
    let dx = grid.dx();
    let dt = grid.dt();
    let speeds: Vec<f64> = gamma.vertices().iter().map(|v| v[0]).collect();
    let max_speed = speeds.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let cfl_ratio = dt * max_speed / dx;
    if cfl_ratio > 1.0 + CFL_SLACK {
        return Err(Error::Config(format!(
            "upwind scheme unstable: dt * max|q| / dx = {cfl_ratio:.4} > 1"
        )));
    }

    let xs = grid.xs();
    let mut u: Vec<f64> = xs.iter().map(|&x| initial(x)).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "initial data is not finite on the grid".into(),
        ));
    }
    let mut next = u.clone();
    let j_max = xs.len() - 1;
    for _ in 0..grid.steps() {
        for j in 1..j_max {
            let mut best = f64::NEG_INFINITY;
            for &q in &speeds {
                let flux = if q >= 0.0 {
                    q * (u[j + 1] - u[j]) / dx
                } else {
                    q * (u[j] - u[j - 1]) / dx
                };
                best = best.max(flux);
            }
            next[j] = u[j] + dt * best;
        }
        std::mem::swap(&mut u, &mut next);
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("solution became non-finite".into()));
    }
    Ok(PdeSolution {
        axes: vec![xs],
        values: u,
        steps: grid.steps(),
        cfl_ratio,
    })
}

pub fn solve_maximal_pde_1d(
    gamma: &MeanPolytope,
    phi: &TestFunction,
    grid: &Grid1D,
) -> Result<PdeSolution> {
    phi.check_dimension(1)?;
    solve_maximal_pde_1d_with(gamma, |x| phi.eval(&[x]), grid)
}

/// Two-dimensional upwind scheme; stable for
/// `dt * max_q (|q1|/dx1 + |q2|/dx2) <= 1`.
pub fn solve_maximal_pde_2d_with(
    gamma: &MeanPolytope,
    initial: impl Fn(f64, f64) -> f64,
    grid: &Grid2D,
) -> Result<PdeSolution> {
    if gamma.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: gamma.dimension(),
        });
    }
    let (dx1, dx2) = grid.dx();
    let dt = grid.dt();
    let speeds: Vec<(f64, f64)> = gamma.vertices().iter().map(|v| (v[0], v[1])).collect();
    let reach = speeds
        .iter()
        .map(|(q1, q2)| q1.abs() / dx1 + q2.abs() / dx2)
        .fold(0.0f64, f64::max);
    let cfl_ratio = dt * reach;
    if cfl_ratio > 1.0 + CFL_SLACK {
        return Err(Error::Config(format!(
            "upwind scheme unstable: dt * max_q sum|q_i|/dx_i = {cfl_ratio:.4} > 1"
        )));
    }

    let xs = grid.axis(0);
    let ys = grid.axis(1);
    let (j1, j2) = (xs.len(), ys.len());
    let mut u: Vec<f64> = Vec::with_capacity(j1 * j2);
    for &x in &xs {
        for &y in &ys {
            u.push(initial(x, y));
        }
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "initial data is not finite on the grid".into(),
        ));
    }
    let mut next = u.clone();
    for _ in 0..grid.steps() {
        for i in 1..j1 - 1 {
            for j in 1..j2 - 1 {
                let c = u[i * j2 + j];
                let mut best = f64::NEG_INFINITY;
                for &(q1, q2) in &speeds {
                    let f1 = if q1 >= 0.0 {
                        q1 * (u[(i + 1) * j2 + j] - c) / dx1
                    } else {
                        q1 * (c - u[(i - 1) * j2 + j]) / dx1
                    };
                    let f2 = if q2 >= 0.0 {
                        q2 * (u[i * j2 + j + 1] - c) / dx2
                    } else {
                        q2 * (c - u[i * j2 + j - 1]) / dx2
                    };
                    best = best.max(f1 + f2);
                }
                next[i * j2 + j] = c + dt * best;
            }
        }
        std::mem::swap(&mut u, &mut next);
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("solution became non-finite".into()));
    }
    Ok(PdeSolution {
        axes: vec![xs, ys],
        values: u,
        steps: grid.steps(),
        cfl_ratio,
    })
}

pub fn solve_maximal_pde_2d(
    gamma: &MeanPolytope,
    phi: &TestFunction,
    grid: &Grid2D,
) -> Result<PdeSolution> {
    phi.check_dimension(2)?;
    solve_maximal_pde_2d_with(gamma, |x, y| phi.eval(&[x, y]), grid)
}
