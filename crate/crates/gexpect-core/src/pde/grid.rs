//! Centered space-time grids for the explicit schemes. Node counts are
//! odd so the spatial origin is always a node; the time step is rounded
//! down so an integer number of steps lands exactly on the horizon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_width: f64,
    nodes: usize,
    horizon: f64,
    dt: f64,
    steps: usize,
}

fn split_steps(horizon: f64, dt: f64) -> (usize, f64) {
    let steps = ((horizon / dt - 1e-9).ceil() as usize).max(1);
    (steps, horizon / steps as f64)
}

impl Grid1D {
    pub fn new(half_width: f64, nodes: usize, horizon: f64, dt: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config("grid half-width must be positive".into()));
        }
        if nodes < 3 || nodes.is_multiple_of(2) {
            return Err(Error::Config(
                "node count must be odd and at least 3".into(),
            ));
        }
        if !(horizon.is_finite() && horizon > 0.0) || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(
                "horizon and time step must be positive".into(),
            ));
        }
        let (steps, dt) = split_steps(horizon, dt);
        Ok(Grid1D {
            half_width,
            nodes,
            horizon,
            dt,
            steps,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    pub fn center(&self) -> usize {
        (self.nodes - 1) / 2
    }

    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.nodes)
            .map(|j| -self.half_width + j as f64 * dx)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    half_widths: (f64, f64),
    nodes: (usize, usize),
    horizon: f64,
    dt: f64,
    steps: usize,
}

impl Grid2D {
    pub fn new(
        half_widths: (f64, f64),
        nodes: (usize, usize),
        horizon: f64,
        dt: f64,
    ) -> Result<Self> {
        for l in [half_widths.0, half_widths.1] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config("grid half-widths must be positive".into()));
            }
        }
        for j in [nodes.0, nodes.1] {
            if j < 3 || j.is_multiple_of(2) {
                return Err(Error::Config(
                    "node counts must be odd and at least 3".into(),
                ));
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(
                "horizon and time step must be positive".into(),
            ));
        }
        let (steps, dt) = split_steps(horizon, dt);
        Ok(Grid2D {
            half_widths,
            nodes,
            horizon,
            dt,
            steps,
        })
    }

    pub fn square(half_width: f64, nodes: usize, horizon: f64, dt: f64) -> Result<Self> {
        Self::new((half_width, half_width), (nodes, nodes), horizon, dt)
    }

    pub fn half_widths(&self) -> (f64, f64) {
        self.half_widths
    }

    pub fn nodes(&self) -> (usize, usize) {
        self.nodes
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dx(&self) -> (f64, f64) {
        (
            2.0 * self.half_widths.0 / (self.nodes.0 - 1) as f64,
            2.0 * self.half_widths.1 / (self.nodes.1 - 1) as f64,
        )
    }

    pub fn center(&self) -> (usize, usize) {
        ((self.nodes.0 - 1) / 2, (self.nodes.1 - 1) / 2)
    }

    pub fn axis(&self, k: usize) -> Vec<f64> {
        let (l, j) = if k == 0 {
            (self.half_widths.0, self.nodes.0)
        } else {
            (self.half_widths.1, self.nodes.1)
        };
        let dx = 2.0 * l / (j - 1) as f64;
        (0..j).map(|i| -l + i as f64 * dx).collect()
    }
}
