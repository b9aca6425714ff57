//! Monotone explicit finite-difference solvers for the two limit laws:
//! the fully nonlinear second-order heat flow generated by a covariance
//! polytope, and the first-order support-function transport generated by
//! a mean polytope, plus the exact closed forms used to cross-check them.

mod gheat;
mod grid;
mod maximal;

pub use gheat::{
    gnormal_expectation, solve_gheat_1d, solve_gheat_1d_with, solve_gheat_2d, solve_gheat_2d_with,
    GnormalResult,
};
pub use grid::{Grid1D, Grid2D};
pub use maximal::{
    hopf_lax_value, maximal_expectation, maximize_over_hull, solve_maximal_pde_1d,
    solve_maximal_pde_1d_with, solve_maximal_pde_2d, solve_maximal_pde_2d_with, HullMax,
    MaximalValue, MeanPolytope,
};

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Final-time solution values on the grid, with scheme metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeSolution {
    /// Node coordinates per axis (one axis in 1-d, two in 2-d).
    pub axes: Vec<Vec<f64>>,
    /// Values at the final time, row-major over the axes.
    pub values: Vec<f64>,
    pub steps: usize,
    /// Actual time step divided by the largest stable one.
    pub cfl_ratio: f64,
}

impl PdeSolution {
    /// Value at the spatial origin (all grids are centered with odd node
    /// counts, so the origin is a node).
    pub fn center_value(&self) -> f64 {
        match self.axes.len() {
            1 => self.values[self.axes[0].len() / 2],
            _ => {
                let (j1, j2) = (self.axes[0].len(), self.axes[1].len());
                self.values[(j1 / 2) * j2 + j2 / 2]
            }
        }
    }

    pub fn value_at(&self, idx: &[usize]) -> f64 {
        match self.axes.len() {
            1 => self.values[idx[0]],
            _ => self.values[idx[0] * self.axes[1].len() + idx[1]],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV rows `x[,y],u` with a header, UTF-8, `.` decimals, `\n` endings.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        match self.axes.len() {
            1 => {
                w.write_all(b"x,u\n")?;
                for (x, u) in self.axes[0].iter().zip(&self.values) {
                    writeln!(w, "{x},{u}")?;
                }
            }
            _ => {
                w.write_all(b"x,y,u\n")?;
                let j2 = self.axes[1].len();
                for (i, x) in self.axes[0].iter().enumerate() {
                    for (j, y) in self.axes[1].iter().enumerate() {
                        writeln!(w, "{x},{y},{}", self.values[i * j2 + j])?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// How to build a grid when only a spatial resolution is requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridResolution {
    /// Target node spacing.
    pub dx: f64,
    /// Half-width in units of the largest standard deviation; the default
    /// keeps the boundary influence away from the evaluation point.
    #[serde(default = "default_padding")]
    pub padding: f64,
    /// Fraction of the largest stable time step to actually take.
    #[serde(default = "default_cfl_fraction")]
    pub cfl_fraction: f64,
}

fn default_padding() -> f64 {
    6.0
}

fn default_cfl_fraction() -> f64 {
    0.8
}

impl GridResolution {
    pub fn with_dx(dx: f64) -> Self {
        GridResolution {
            dx,
            padding: default_padding(),
            cfl_fraction: default_cfl_fraction(),
        }
    }
}

impl Default for GridResolution {
    fn default() -> Self {
        Self::with_dx(0.01)
    }
}
