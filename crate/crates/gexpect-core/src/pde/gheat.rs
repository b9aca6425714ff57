//! Explicit monotone schemes for the covariance-generated heat flow
//! `du/dt = G(D^2 u)`, solved forward from `u(0, .) = phi` and evaluated
//! at the horizon. Boundary nodes stay frozen at the initial data, so the
//! half-width must keep the boundary influence away from the evaluation
//! region (six standard deviations by default).

use crate::ambiguity::CovariancePolytope;
use crate::error::{Error, Result};
use crate::pde::grid::{Grid1D, Grid2D};
use crate::pde::{GridResolution, PdeSolution};
use crate::testfn::TestFunction;

const CFL_SLACK: f64 = 1e-9;

/// One-dimensional flow with variance interval `[sigma_lo2, sigma_hi2]`:
/// `du/dt = 1/2 (sigma_hi2 (u_xx)^+ - sigma_lo2 (u_xx)^-)` with a centered
/// second difference. Stable and monotone for `dt <= dx^2 / sigma_hi2`.
pub fn solve_gheat_1d_with(
    sigma_lo2: f64,
    sigma_hi2: f64,
    initial: impl Fn(f64) -> f64,
    grid: &Grid1D,
) -> Result<PdeSolution> {
    if !(0.0..).contains(&sigma_lo2) || sigma_hi2 < sigma_lo2 || !sigma_hi2.is_finite() {
        return Err(Error::Input(format!(
            "need 0 <= sigma_lo2 <= sigma_hi2, got [{sigma_lo2}, {sigma_hi2}]"
        )));
    }
    let dx = grid.dx();
    let dt = grid.dt();
    let cfl_ratio = dt * sigma_hi2 / (dx * dx);
    if cfl_ratio > 1.0 + CFL_SLACK {
        return Err(Error::Config(format!(
            "explicit scheme unstable: dt * sigma_hi2 / dx^2 = {cfl_ratio:.4} > 1"
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
    let inv_dx2 = 1.0 / (dx * dx);
    let j_max = xs.len() - 1;
    for _ in 0..grid.steps() {
        for j in 1..j_max {
            let d2 = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2;
            next[j] = u[j] + dt * 0.5 * (sigma_hi2 * d2.max(0.0) - sigma_lo2 * (-d2).max(0.0));
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

pub fn solve_gheat_1d(
    sigma_lo2: f64,
    sigma_hi2: f64,
    phi: &TestFunction,
    grid: &Grid1D,
) -> Result<PdeSolution> {
    phi.check_dimension(1)?;
    solve_gheat_1d_with(sigma_lo2, sigma_hi2, |x| phi.eval(&[x]), grid)
}

/// Two-dimensional flow `du/dt = max_Q 1/2 tr[Q D^2 u]` over the polytope
/// vertices, with the sign-split nine-point cross stencil. Every vertex
/// must be diagonally dominant (`q11 >= |q12|`, `q22 >= |q12|`, and the
/// grid-scaled variants) for the stencil to stay monotone; anything else
/// is rejected rather than approximated.
pub fn solve_gheat_2d_with(
    theta: &CovariancePolytope,
    initial: impl Fn(f64, f64) -> f64,
    grid: &Grid2D,
) -> Result<PdeSolution> {
    if theta.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: theta.dimension(),
        });
    }
    let (dx1, dx2) = grid.dx();
    let dt = grid.dt();
    let verts: Vec<(f64, f64, f64)> = theta
        .vertices()
        .iter()
        .map(|q| (q.get(0, 0), q.get(1, 1), q.get(0, 1)))
        .collect();
    let mut denom: f64 = 0.0;
    for &(q11, q22, q12) in &verts {
        let c = q12.abs();
        if q11 + 1e-12 < c || q22 + 1e-12 < c {
            return Err(Error::Unsupported(format!(
                "vertex diag({q11}, {q22}) with off-diagonal {q12} is not diagonally dominant"
            )));
        }
        if q11 * (dx2 / dx1) + 1e-12 < c || q22 * (dx1 / dx2) + 1e-12 < c {
            return Err(Error::Config(
                "grid aspect ratio breaks diagonal dominance of the stencil".into(),
            ));
        }
        denom = denom.max(q11 / (dx1 * dx1) + q22 / (dx2 * dx2) + c / (dx1 * dx2));
    }
    let cfl_ratio = if denom > 0.0 { dt * denom / 0.5 } else { 0.0 };
    if cfl_ratio > 1.0 + CFL_SLACK {
        return Err(Error::Config(format!(
            "explicit scheme unstable: dt exceeds the 2-d stability bound by factor {cfl_ratio:.4}"
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
    let inv11 = 1.0 / (dx1 * dx1);
    let inv22 = 1.0 / (dx2 * dx2);
    let inv_cross = 1.0 / (2.0 * dx1 * dx2);
    for _ in 0..grid.steps() {
        for i in 1..j1 - 1 {
            for j in 1..j2 - 1 {
                let c = u[i * j2 + j];
                let up0 = u[(i + 1) * j2 + j];
                let um0 = u[(i - 1) * j2 + j];
                let u0p = u[i * j2 + j + 1];
                let u0m = u[i * j2 + j - 1];
                let axis_sum = up0 + um0 + u0p + u0m;
                let dxx = (up0 - 2.0 * c + um0) * inv11;
                let dyy = (u0p - 2.0 * c + u0m) * inv22;
                let mut best = f64::NEG_INFINITY;
                for &(q11, q22, q12) in &verts {
                    let cross = if q12 >= 0.0 {
                        let upp = u[(i + 1) * j2 + j + 1];
                        let umm = u[(i - 1) * j2 + j - 1];
                        (2.0 * c + upp + umm - axis_sum) * inv_cross
                    } else {
                        let upm = u[(i + 1) * j2 + j - 1];
                        let ump = u[(i - 1) * j2 + j + 1];
                        -(2.0 * c + upm + ump - axis_sum) * inv_cross
                    };
                    let val = 0.5 * (q11 * dxx + q22 * dyy) + q12 * cross;
                    best = best.max(val);
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

pub fn solve_gheat_2d(
    theta: &CovariancePolytope,
    phi: &TestFunction,
    grid: &Grid2D,
) -> Result<PdeSolution> {
    phi.check_dimension(2)?;
    solve_gheat_2d_with(theta, |x, y| phi.eval(&[x, y]), grid)
}

/// The limiting expectation of `phi` under the law generated by `theta`,
/// computed as the horizon-1 center value of the heat flow.
#[derive(Debug, Clone)]
pub struct GnormalResult {
    pub value: f64,
    pub solution: PdeSolution,
}

pub fn gnormal_expectation(
    theta: &CovariancePolytope,
    phi: &TestFunction,
    res: &GridResolution,
) -> Result<GnormalResult> {
    if !(res.dx.is_finite() && res.dx > 0.0) {
        return Err(Error::Config("grid resolution dx must be positive".into()));
    }
    let horizon = 1.0;
    match theta.dimension() {
        1 => {
            let (lo, hi) = theta.as_interval().expect("dimension checked");
            let lo = lo.max(0.0);
            let hi = hi.max(0.0);
            let grid = grid_1d_for(hi, horizon, res)?;
            let solution = solve_gheat_1d(lo, hi, phi, &grid)?;
            Ok(GnormalResult {
                value: solution.center_value(),
                solution,
            })
        }
        2 => {
            let diag = theta.max_diagonal();
            let grid = grid_2d_for(theta, &diag, horizon, res)?;
            let solution = solve_gheat_2d(theta, phi, &grid)?;
            Ok(GnormalResult {
                value: solution.center_value(),
                solution,
            })
        }
        d => Err(Error::Unsupported(format!(
            "heat-flow solver covers d in {{1, 2}}, got {d}"
        ))),
    }
}

fn grid_1d_for(sigma_hi2: f64, horizon: f64, res: &GridResolution) -> Result<Grid1D> {
    let target = (res.padding * sigma_hi2.sqrt() * horizon.sqrt()).max(1.0);
    let m = (target / res.dx).ceil() as usize;
    let half_width = m as f64 * res.dx;
    let dt = if sigma_hi2 > 0.0 {
        res.cfl_fraction * res.dx * res.dx / sigma_hi2
    } else {
        horizon
    };
    Grid1D::new(half_width, 2 * m + 1, horizon, dt)
}

fn grid_2d_for(
    theta: &CovariancePolytope,
    max_diag: &[f64],
    horizon: f64,
    res: &GridResolution,
) -> Result<Grid2D> {
    let mut half = [0.0f64; 2];
    let mut nodes = [0usize; 2];
    for k in 0..2 {
        let target = (res.padding * max_diag[k].max(0.0).sqrt() * horizon.sqrt()).max(1.0);
        let m = (target / res.dx).ceil() as usize;
        half[k] = m as f64 * res.dx;
        nodes[k] = 2 * m + 1;
    }
    let mut denom: f64 = 0.0;
    for q in theta.vertices() {
        denom = denom.max(
            q.get(0, 0) / (res.dx * res.dx)
                + q.get(1, 1) / (res.dx * res.dx)
                + q.get(0, 1).abs() / (res.dx * res.dx),
        );
    }
    let dt = if denom > 0.0 {
        res.cfl_fraction * 0.5 / denom
    } else {
        horizon
    };
    Grid2D::new((half[0], half[1]), (nodes[0], nodes[1]), horizon, dt)
}
