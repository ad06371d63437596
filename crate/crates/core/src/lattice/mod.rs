//! Discrete fields on a rectangular worldsheet `[0,1]²`.
//!
//! Nodes carry `X`, edges carry one-forms as integrated cochains (the value
//! on an edge is the line integral along it, oriented in `+σ¹` or `+σ²`),
//! plaquettes carry two-forms integrated over the cell.

use rayon::prelude::*;

use crate::error::{Error, Result};

mod action;
mod residual;
mod solver;
mod study;

pub use action::{action, deform, eps_tilde_sweep, first_variation_probe, VariationProbe};
pub use residual::{
    coordinate_coframe, eom_residual_coboundary, eom_residual_coordinate,
    eom_residual_intrinsic, eom_residual_invariant, eom_residual_linear, linear_tilde_residual,
    Residuals,
};
pub use solver::{integrate_group_field, pure_gauge_dual_field, SolverOutput};
pub use study::{
    convergence_order, loglog_slope, random_fields, run_convergence_study, smooth_dual_profile,
    smooth_fields, solve_on_grid, ConvergenceRow, ConvergenceStudy, StudySettings,
};

/// Node counts of the grid on `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Worldsheet {
    nx: usize,
    ny: usize,
}

impl Worldsheet {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidLattice(format!(
                "need at least 2 nodes per direction, got {nx}x{ny}"
            )));
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / (self.ny - 1) as f64
    }

    /// Worldsheet coordinates `(σ¹, σ²)` of node `(i, j)`.
    pub fn sigma(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx(), j as f64 * self.hy())
    }

    pub fn node_grid(&self, dim: usize) -> Grid {
        Grid::zeros(self.nx, self.ny, dim)
    }

    pub fn edge_field(&self, dim: usize) -> EdgeField {
        EdgeField {
            x: Grid::zeros(self.nx - 1, self.ny, dim),
            y: Grid::zeros(self.nx, self.ny - 1, dim),
        }
    }

    pub fn plaquette_grid(&self, dim: usize) -> Grid {
        Grid::zeros(self.nx - 1, self.ny - 1, dim)
    }

    /// Nodes `(i, j)` not on the boundary of the rectangle.
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }
}

/// A `cols × rows` array of `dim`-vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    cols: usize,
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(cols: usize, rows: usize, dim: usize) -> Self {
        Self {
            cols,
            rows,
            dim,
            data: vec![0.0; cols * rows * dim],
        }
    }

    /// Fill by a function of the cell index.
    pub fn from_fn(cols: usize, rows: usize, dim: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>) -> Self {
        let mut g = Self::zeros(cols, rows, dim);
        for j in 0..rows {
            for i in 0..cols {
                let v = f(i, j);
                g.get_mut(i, j).copy_from_slice(&v);
            }
        }
        g
    }

    /// Fill in parallel; the first error in row-major order wins.
    pub fn try_par_from_fn(
        cols: usize,
        rows: usize,
        dim: usize,
        f: impl Fn(usize, usize) -> Result<Vec<f64>> + Sync,
    ) -> Result<Self> {
        let cells: Vec<Result<Vec<f64>>> = (0..cols * rows)
            .into_par_iter()
            .map(|idx| f(idx % cols, idx / cols))
            .collect();
        let mut data = Vec::with_capacity(cols * rows * dim);
        for c in cells {
            let v = c?;
            debug_assert_eq!(v.len(), dim);
            data.extend_from_slice(&v);
        }
        Ok(Self {
            cols,
            rows,
            dim,
            data,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let o = (j * self.cols + i) * self.dim;
        &self.data[o..o + self.dim]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = (j * self.cols + i) * self.dim;
        &mut self.data[o..o + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Index and value of the largest-magnitude component, row-major first wins.
    pub fn argmax(&self) -> Option<(usize, usize, usize, f64)> {
        let mut best: Option<(usize, usize, usize, f64)> = None;
        for (idx, v) in self.data.iter().enumerate() {
            if best.is_none_or(|b| v.abs() > b.3.abs()) {
                let cell = idx / self.dim;
                best = Some((cell % self.cols, cell / self.cols, idx % self.dim, *v));
            }
        }
        best
    }

    /// Same shape, same storage layout.
    pub fn same_shape(&self, other: &Grid) -> bool {
        self.cols == other.cols && self.rows == other.rows && self.dim == other.dim
    }

    /// Cellwise linear map.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Grid {
        let out_dim = if self.data.is_empty() { self.dim } else { f(self.get(0, 0)).len() };
        Grid::from_fn(self.cols, self.rows, out_dim, |i, j| f(self.get(i, j)))
    }

    pub fn sub(&self, other: &Grid) -> Grid {
        assert!(self.same_shape(other));
        Grid {
            cols: self.cols,
            rows: self.rows,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// An edge cochain: values on x-edges `(i,j)→(i+1,j)` and y-edges `(i,j)→(i,j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField {
    pub x: Grid,
    pub y: Grid,
}

/// Orientation of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

impl EdgeField {
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn max_abs(&self) -> f64 {
        self.x.max_abs().max(self.y.max_abs())
    }

    pub fn grid(&self, dir: Direction) -> &Grid {
        match dir {
            Direction::X => &self.x,
            Direction::Y => &self.y,
        }
    }

    /// Build edge values in parallel from `(direction, i, j)` of the tail node.
    pub fn try_par_from_fn(
        ws: &Worldsheet,
        dim: usize,
        f: impl Fn(Direction, usize, usize) -> Result<Vec<f64>> + Sync,
    ) -> Result<Self> {
        Ok(Self {
            x: Grid::try_par_from_fn(ws.nx - 1, ws.ny, dim, |i, j| f(Direction::X, i, j))?,
            y: Grid::try_par_from_fn(ws.nx, ws.ny - 1, dim, |i, j| f(Direction::Y, i, j))?,
        })
    }

    pub fn from_fn(ws: &Worldsheet, dim: usize, mut f: impl FnMut(Direction, usize, usize) -> Vec<f64>) -> Self {
        let x = Grid::from_fn(ws.nx - 1, ws.ny, dim, |i, j| f(Direction::X, i, j));
        let y = Grid::from_fn(ws.nx, ws.ny - 1, dim, |i, j| f(Direction::Y, i, j));
        Self { x, y }
    }

    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> EdgeField {
        EdgeField {
            x: self.x.map(&f),
            y: self.y.map(&f),
        }
    }

    pub fn sub(&self, other: &EdgeField) -> EdgeField {
        EdgeField {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
        }
    }
}

/// Head node of the edge with tail `(i, j)`.
#[inline]
pub fn head(dir: Direction, i: usize, j: usize) -> (usize, usize) {
    match dir {
        Direction::X => (i + 1, j),
        Direction::Y => (i, j + 1),
    }
}

/// Node field `X`, right-invariant `A`, and optionally `A` in the chart coframe.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFields {
    pub x: Grid,
    pub a: EdgeField,
    pub a_coord: Option<EdgeField>,
}

impl LatticeFields {
    /// Check shapes against the worldsheet and target dimension.
    pub fn validate(&self, ws: &Worldsheet, dim: usize) -> Result<()> {
        let ok_nodes = self.x.same_shape(&ws.node_grid(dim));
        let e = ws.edge_field(dim);
        let ok_edges = self.a.x.same_shape(&e.x) && self.a.y.same_shape(&e.y);
        let ok_coord = self
            .a_coord
            .as_ref()
            .is_none_or(|c| c.x.same_shape(&e.x) && c.y.same_shape(&e.y));
        if !(ok_nodes && ok_edges && ok_coord) {
            return Err(Error::InvalidLattice(format!(
                "field shapes do not match a {}x{} worldsheet with target dimension {dim}",
                ws.nx, ws.ny
            )));
        }
        if let Some(pos) = self.x.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: vec![pos / dim, pos % dim],
            });
        }
        Ok(())
    }

    /// The coordinate-coframe one-form, or an error when absent.
    pub fn require_coord(&self) -> Result<&EdgeField> {
        self.a_coord
            .as_ref()
            .ok_or_else(|| Error::InvalidLattice("coordinate-coframe A is not populated".into()))
    }
}

/// `X(head) - X(tail)` on every edge.
pub fn node_difference(ws: &Worldsheet, x: &Grid) -> EdgeField {
    EdgeField::from_fn(ws, x.dim(), |dir, i, j| {
        let (hi, hj) = head(dir, i, j);
        x.get(hi, hj).iter().zip(x.get(i, j)).map(|(a, b)| a - b).collect()
    })
}

/// Edge midpoint of a node field.
pub fn edge_midpoint(x: &Grid, dir: Direction, i: usize, j: usize) -> Vec<f64> {
    let (hi, hj) = head(dir, i, j);
    x.get(i, j)
        .iter()
        .zip(x.get(hi, hj))
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

/// Average of the four corners of plaquette `(i, j)`.
pub fn plaquette_center(x: &Grid, i: usize, j: usize) -> Vec<f64> {
    let (a, b, c, d) = (x.get(i, j), x.get(i + 1, j), x.get(i, j + 1), x.get(i + 1, j + 1));
    (0..x.dim())
        .map(|k| 0.25 * (a[k] + b[k] + c[k] + d[k]))
        .collect()
}

/// Circulation `∮ a` around plaquette `(i, j)`, counter-clockwise.
pub fn exterior_derivative(a: &EdgeField) -> Grid {
    let cols = a.y.cols() - 1;
    let rows = a.x.rows() - 1;
    Grid::from_fn(cols, rows, a.dim(), |i, j| {
        let (b, r, t, l) = (a.x.get(i, j), a.y.get(i + 1, j), a.x.get(i, j + 1), a.y.get(i, j));
        (0..a.dim()).map(|k| b[k] + r[k] - t[k] - l[k]).collect()
    })
}

/// Averages of a one-form over the two x-edges and the two y-edges of a plaquette.
pub fn plaquette_averages(a: &EdgeField, i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
    let ax = a.x.get(i, j).iter().zip(a.x.get(i, j + 1)).map(|(p, q)| 0.5 * (p + q)).collect();
    let ay = a.y.get(i, j).iter().zip(a.y.get(i + 1, j)).map(|(p, q)| 0.5 * (p + q)).collect();
    (ax, ay)
}

/// `α ∧ β` on a plaquette from edge averages: `ᾱ_x β̄_y - ᾱ_y β̄_x`.
#[inline]
pub fn wedge(alpha_x: f64, alpha_y: f64, beta_x: f64, beta_y: f64) -> f64 {
    alpha_x * beta_y - alpha_y * beta_x
}
