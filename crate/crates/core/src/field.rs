//! Uniform grids on `[0, 1]` and sampled fields.
//!
//! All integral norms use the composite trapezoid rule, consistent with
//! reading a sampled field as its piecewise-linear interpolant.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt_f64;

pub const DEFAULT_SIM_CELLS: usize = 200;
pub const DEFAULT_ORACLE_CELLS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid1D {
    n_cells: usize,
}

impl Grid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::param("n_cells", "must be positive"));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// `y_i = i/n`; the last node is exactly 1.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(|i| self.node(i))
    }

    /// Trapezoid weights: `h/2` at both ends, `h` in the interior.
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_cells {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// `∫₀¹ φ` for node samples `φ_i`.
    pub fn integrate(&self, samples: impl IntoIterator<Item = f64>) -> f64 {
        let n = self.n_cells;
        let mut interior = 0.0;
        let mut ends = 0.0;
        for (i, s) in samples.into_iter().enumerate() {
            if i == 0 || i == n {
                ends += s;
            } else {
                interior += s;
            }
        }
        self.h() * (interior + 0.5 * ends)
    }
}

/// Node samples of a real function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::Precondition(format!(
                "field has {} values, grid expects {}",
                values.len(),
                grid.n_nodes()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, values: grid.nodes().map(f).collect() }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![0.0; grid.n_nodes()] }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| alpha * v).collect() }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::param("p", format!("must lie in [1, inf), got {p}")));
        }
        let integral = self.grid.integrate(self.values.iter().map(|v| v.abs().powf(p)));
        Ok(integral.powf(p.recip()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lyapunov_v().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `V(w) = ‖w‖²_{L²}`.
    pub fn lyapunov_v(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|v| v * v))
    }

    /// Second-order finite differences: central in the interior, one-sided
    /// three-point stencils at the ends.
    pub fn derivative(&self) -> Result<Field> {
        let n = self.grid.n_cells;
        if n < 2 {
            return Err(Error::Precondition(format!("derivative needs at least 2 cells, grid has {n}")));
        }
        let v = &self.values;
        let inv2h = 0.5 / self.grid.h();
        let mut d = Vec::with_capacity(n + 1);
        d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h);
        d.extend((1..n).map(|i| (v[i + 1] - v[i - 1]) * inv2h));
        d.push((3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) * inv2h);
        Ok(Field { grid: self.grid, values: d })
    }

    /// Writes `y,value` rows (with header) at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "y,value")?;
        for (y, v) in self.grid.nodes().zip(&self.values) {
            writeln!(out, "{},{}", fmt_f64(y), fmt_f64(*v))?;
        }
        Ok(())
    }
}
