//! Constructing solutions: a flat dual field from a gauge profile, then `X`
//! by integrating the first equation edge by edge.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{edge_midpoint, node_difference, EdgeField, Grid, Worldsheet};
use crate::bialgebra::DoubleAlgebra;
use crate::error::{Error, Result};
use crate::group::{frame_matrix, pi_matrix, GroupPoint, Subgroup};
use crate::linalg::{matrix_exp, matrix_log_near_identity, max_abs, project_onto_span};

/// `Ã` on each edge `p → q` from `log(h̃(p)⁻¹ h̃(q))`, with `h̃` given by dual chart coordinates.
///
/// The logarithm is taken at the level of adjoint matrices and projected onto
/// the span of `ad_{T̃^k}`; the result is re-exponentiated as a check.
pub fn pure_gauge_dual_field(double: &DoubleAlgebra, ws: &Worldsheet, profile: &Grid) -> Result<EdgeField> {
    let n = double.half_dim();
    if !profile.same_shape(&ws.node_grid(n)) {
        return Err(Error::InvalidLattice("gauge profile does not match the worldsheet".into()));
    }
    let points: Vec<GroupPoint> = (0..ws.nx() * ws.ny())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % ws.nx(), idx / ws.nx());
            GroupPoint::new(double, Subgroup::Dual, profile.get(i, j))
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| &points[j * ws.nx() + i];
    let basis: Vec<DMatrix<f64>> = (0..n).map(|k| double.total().ad(n + k).clone()).collect();
    EdgeField::try_par_from_fn(ws, n, |dir, i, j| {
        let (hi, hj) = super::head(dir, i, j);
        let m = at(i, j).adjoint_inv() * at(hi, hj).adjoint();
        let log = matrix_log_near_identity(&m)?;
        let (coeffs, residual) = project_onto_span(&basis, &log);
        let scale = 1.0 + max_abs(&log);
        if residual > 1e-9 * scale {
            return Err(Error::LogFailure {
                reason: format!("edge logarithm leaves the dual subalgebra (residual {residual:e})"),
            });
        }
        let mut gen = DMatrix::zeros(2 * n, 2 * n);
        for (k, b) in basis.iter().enumerate() {
            gen += b * coeffs[k];
        }
        let back = matrix_exp(&gen)?;
        let err = max_abs(&(back - &m));
        if err > 1e-9 * (1.0 + max_abs(&m)) {
            return Err(Error::LogFailure {
                reason: format!("re-exponentiation mismatch {err:e}"),
            });
        }
        Ok(coeffs.as_slice().to_vec())
    })
}

/// Integrated group field and the integrability defect on unused edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutput {
    pub x: Grid,
    /// `|e ΔX + Π A| / h_y` on y-edges not used by the stepping (column 0 is zero).
    pub cross: Grid,
    pub max_cross: f64,
}

fn step(double: &DoubleAlgebra, tail: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    let g = GroupPoint::new(double, Subgroup::Base, tail)?;
    let fr = frame_matrix(double, &g)?;
    let pi = pi_matrix(double, &g)?;
    let dx = -(fr.f * pi * DVector::from_column_slice(a));
    Ok(tail.iter().zip(dx.iter()).map(|(x, d)| x + d).collect())
}

/// Build `X` from `x0` at node `(0,0)`: first up column 0, then along each row.
///
/// Each step solves `e(X_tail) ΔX + Π(X_tail) A = 0` explicitly. Rows are
/// independent once column 0 is known and run in parallel.
pub fn integrate_group_field(
    double: &DoubleAlgebra,
    ws: &Worldsheet,
    a: &EdgeField,
    x0: &[f64],
) -> Result<SolverOutput> {
    let n = double.half_dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    let e = ws.edge_field(n);
    if !(a.x.same_shape(&e.x) && a.y.same_shape(&e.y)) {
        return Err(Error::InvalidLattice("A does not match the worldsheet".into()));
    }
    let mut column = vec![x0.to_vec()];
    for j in 0..ws.ny() - 1 {
        let next = step(double, &column[j], a.y.get(0, j))?;
        column.push(next);
    }
    let rows: Vec<Vec<Vec<f64>>> = column
        .par_iter()
        .enumerate()
        .map(|(j, start)| {
            let mut row = vec![start.clone()];
            for i in 0..ws.nx() - 1 {
                let next = step(double, &row[i], a.x.get(i, j))?;
                row.push(next);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let x = Grid::from_fn(ws.nx(), ws.ny(), n, |i, j| rows[j][i].clone());
    let dx = node_difference(ws, &x);
    let hy = ws.hy();
    let cross = Grid::try_par_from_fn(ws.nx(), ws.ny() - 1, n, |i, j| {
        if i == 0 {
            return Ok(vec![0.0; n]);
        }
        let mid = edge_midpoint(&x, super::Direction::Y, i, j);
        let g = GroupPoint::new(double, Subgroup::Base, &mid)?;
        let fr = frame_matrix(double, &g)?;
        let pi = pi_matrix(double, &g)?;
        let r = fr.e * DVector::from_column_slice(dx.y.get(i, j))
            + pi * DVector::from_column_slice(a.y.get(i, j));
        Ok(r.iter().map(|v| v / hy).collect())
    })?;
    let max_cross = cross.max_abs();
    Ok(SolverOutput { x, cross, max_cross })
}
