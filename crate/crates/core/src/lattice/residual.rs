//! Equation-of-motion residuals in coordinate, right-invariant, intrinsic,
//! coboundary and linear form.

use nalgebra::{DMatrix, DVector};

use super::{
    edge_midpoint, exterior_derivative, node_difference, plaquette_averages,
    plaquette_center, wedge, EdgeField, Grid, LatticeFields, Worldsheet,
};
use crate::bialgebra::{r_bracket, CoboundaryData, DoubleAlgebra};
use crate::bivector::ChartBivector;
use crate::error::{Error, Result};
use crate::group::{frame_matrix, pi_matrix, GroupPoint, Subgroup};
use crate::lie::LieAlgebra;
use crate::settings::Tolerances;

/// Per-edge residual of the first equation, per-plaquette residual of the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub eq1: EdgeField,
    pub eq2: Grid,
}

impl Residuals {
    pub fn max_eq1(&self) -> f64 {
        self.eq1.max_abs()
    }

    pub fn max_eq2(&self) -> f64 {
        self.eq2.max_abs()
    }
}

/// `Σ_{i,j} M[k][i][j] (α_i ∧ β_j)` contracted over a plaquette, for each `k`.
fn wedge_contract(
    dim_out: usize,
    alpha: &EdgeField,
    beta: &EdgeField,
    coeff: impl Fn(usize, usize, usize) -> f64 + Sync,
) -> Grid {
    let cols = alpha.y.cols() - 1;
    let rows = alpha.x.rows() - 1;
    let na = alpha.dim();
    let nb = beta.dim();
    Grid::from_fn(cols, rows, dim_out, |i, j| {
        let (ax, ay) = plaquette_averages(alpha, i, j);
        let (bx, by) = plaquette_averages(beta, i, j);
        (0..dim_out)
            .map(|k| {
                let mut s = 0.0;
                for p in 0..na {
                    for q in 0..nb {
                        let c = coeff(k, p, q);
                        if c != 0.0 {
                            s += c * wedge(ax[p], ay[p], bx[q], by[q]);
                        }
                    }
                }
                s
            })
            .collect()
    })
}

fn add(a: &Grid, b: &Grid) -> Grid {
    Grid::from_fn(a.cols(), a.rows(), a.dim(), |i, j| {
        a.get(i, j).iter().zip(b.get(i, j)).map(|(p, q)| p + q).collect()
    })
}

fn check_fields(ws: &Worldsheet, fields: &LatticeFields, dim: usize) -> Result<()> {
    fields.validate(ws, dim)
}

/// Richardson-extrapolated `∂_k P^{ij}` at `y`, indexed `[k][(i, j)]`.
fn bivector_gradient(p: &dyn ChartBivector, y: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
    let grad = |s: f64| -> Result<Vec<DMatrix<f64>>> {
        (0..y.len())
            .map(|k| {
                let mut plus = y.to_vec();
                let mut minus = y.to_vec();
                plus[k] += s;
                minus[k] -= s;
                Ok((p.eval(&plus)? - p.eval(&minus)?) / (2.0 * s))
            })
            .collect()
    };
    let coarse = grad(h)?;
    let fine = grad(h / 2.0)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| c.zip_map(f, |c, f| (4.0 * f - c) / 3.0))
        .collect())
}

/// Coordinate form: `dX^i + P^{ij}(X) A_j` per edge and
/// `dA_k + ½ ∂_k P^{ij}(X) A_i ∧ A_j` per plaquette.
///
/// `P` is evaluated at edge midpoints and its derivatives at plaquette centres.
pub fn eom_residual_coordinate(
    p: &dyn ChartBivector,
    ws: &Worldsheet,
    fields: &LatticeFields,
    tolerances: &Tolerances,
) -> Result<Residuals> {
    let n = p.dim();
    check_fields(ws, fields, n)?;
    let a = fields.require_coord()?;
    let dx = node_difference(ws, &fields.x);
    let eq1 = EdgeField::try_par_from_fn(ws, n, |dir, i, j| {
        let mid = edge_midpoint(&fields.x, dir, i, j);
        let pm = p.eval(&mid)?;
        let av = DVector::from_column_slice(a.grid(dir).get(i, j));
        let r = DVector::from_column_slice(dx.grid(dir).get(i, j)) + pm * av;
        Ok(r.as_slice().to_vec())
    })?;
    let da = exterior_derivative(a);
    let eq2 = Grid::try_par_from_fn(ws.nx() - 1, ws.ny() - 1, n, |i, j| {
        let c = plaquette_center(&fields.x, i, j);
        let h = crate::checks::scaled_step(tolerances, &c);
        let grad = bivector_gradient(p, &c, h)?;
        let (ax, ay) = plaquette_averages(a, i, j);
        let base = da.get(i, j);
        Ok((0..n)
            .map(|k| {
                let mut s = base[k];
                for u in 0..n {
                    for v in 0..n {
                        s += 0.5 * grad[k][(u, v)] * wedge(ax[u], ay[u], ax[v], ay[v]);
                    }
                }
                s
            })
            .collect())
    })?;
    Ok(Residuals { eq1, eq2 })
}

struct EdgeGeometry {
    /// `T = e(X_mid) ΔX`.
    t: EdgeField,
    /// `Π(X_mid)` per edge, stored row-major.
    pi: EdgeField,
    /// `g`-block of `Ad_{X_mid}` and of its inverse, row-major.
    adjoint: Option<(EdgeField, EdgeField)>,
}

fn edge_geometry(double: &DoubleAlgebra, ws: &Worldsheet, x: &Grid, with_adjoint: bool) -> Result<EdgeGeometry> {
    let n = double.half_dim();
    let dx = node_difference(ws, x);
    let width = if with_adjoint { n + 3 * n * n } else { n + n * n };
    let packed = EdgeField::try_par_from_fn(ws, width, |dir, i, j| {
        let mid = edge_midpoint(x, dir, i, j);
        let g = GroupPoint::new(double, Subgroup::Base, &mid)?;
        let fr = frame_matrix(double, &g)?;
        let d = DVector::from_column_slice(dx.grid(dir).get(i, j));
        let mut out = (fr.e * d).as_slice().to_vec();
        out.extend(row_major(&pi_matrix(double, &g)?));
        if with_adjoint {
            out.extend(row_major(&g.adjoint().view((0, 0), (n, n)).into_owned()));
            out.extend(row_major(&g.adjoint_inv().view((0, 0), (n, n)).into_owned()));
        }
        Ok(out)
    })?;
    let slice = |from: usize, len: usize| packed.map(|v| v[from..from + len].to_vec());
    let t = slice(0, n);
    let pi = slice(n, n * n);
    let adjoint = with_adjoint.then(|| (slice(n + n * n, n * n), slice(n + 2 * n * n, n * n)));
    Ok(EdgeGeometry { t, pi, adjoint })
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

fn from_row_major(n: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, v)
}

/// Apply a per-edge matrix (stored row-major) to an edge field.
fn apply_edge_matrix(mats: &EdgeField, v: &EdgeField, transpose: bool) -> EdgeField {
    let n = v.dim();
    let apply = |g: &Grid, w: &Grid| {
        Grid::from_fn(w.cols(), w.rows(), n, |i, j| {
            let mut m = from_row_major(n, g.get(i, j));
            if transpose {
                m.transpose_mut();
            }
            (m * DVector::from_column_slice(w.get(i, j))).as_slice().to_vec()
        })
    };
    EdgeField {
        x: apply(&mats.x, &v.x),
        y: apply(&mats.y, &v.y),
    }
}

fn dual_curvature(double: &DoubleAlgebra, a: &EdgeField) -> Grid {
    let f = double.cocommutator();
    let n = double.half_dim();
    let da = exterior_derivative(a);
    let quad = wedge_contract(n, a, a, |k, p, q| 0.5 * f.get(p, q, k));
    add(&da, &quad)
}

/// Right-invariant form: `T^i + Π^{ij} A_j` per edge and
/// `dA_k + ½ R_{T_k}(Π^{ij}) A_i ∧ A_j + c_kj^i A_i ∧ T^j` per plaquette.
///
/// `T = e(X) ΔX` and `Π(X)` are taken at edge midpoints. The derivative
/// `R_{T_k}Π^{ij}` is replaced by its closed form, whose `Π`-dependent part
/// enters as `c_kl^i A_i ∧ (Π A)^l` with `Π A` an edge cochain.
pub fn eom_residual_invariant(
    double: &DoubleAlgebra,
    ws: &Worldsheet,
    fields: &LatticeFields,
) -> Result<Residuals> {
    let n = double.half_dim();
    check_fields(ws, fields, n)?;
    let geo = edge_geometry(double, ws, &fields.x, false)?;
    let pi_a = apply_edge_matrix(&geo.pi, &fields.a, false);
    let eq1 = EdgeField {
        x: add(&geo.t.x, &pi_a.x),
        y: add(&geo.t.y, &pi_a.y),
    };
    let c = double.base_constants();
    let curvature = dual_curvature(double, &fields.a);
    let pi_term = wedge_contract(n, &fields.a, &pi_a, |k, i, l| c.get(k, l, i));
    let t_term = wedge_contract(n, &fields.a, &geo.t, |k, i, l| c.get(k, l, i));
    let eq2 = add(&add(&curvature, &pi_term), &t_term);
    Ok(Residuals { eq1, eq2 })
}

/// Intrinsic form: `Θ - Π(X)(Ã)` per edge and `dÃ + ½[Ã ∧ Ã]_{g*}` per plaquette.
///
/// The plaquette residual reads only `Ã` and the dual structure constants.
pub fn eom_residual_intrinsic(
    double: &DoubleAlgebra,
    ws: &Worldsheet,
    fields: &LatticeFields,
) -> Result<Residuals> {
    let n = double.half_dim();
    check_fields(ws, fields, n)?;
    let geo = edge_geometry(double, ws, &fields.x, false)?;
    // Π(X)(Ã)^i = Ã_j Π^{ji}
    let image = apply_edge_matrix(&geo.pi, &fields.a, true);
    let eq1 = geo.t.sub(&image);
    let eq2 = dual_curvature(double, &fields.a);
    Ok(Residuals { eq1, eq2 })
}

/// Coboundary form in `B = K⁻¹ Ã`: `Θ + (R - Ad_X R Ad_X⁻¹) B` per edge and
/// `dB + ½[B ∧ B]_R` per plaquette.
pub fn eom_residual_coboundary(
    double: &DoubleAlgebra,
    cb: &CoboundaryData,
    ws: &Worldsheet,
    fields: &LatticeFields,
) -> Result<Residuals> {
    let n = double.half_dim();
    check_fields(ws, fields, n)?;
    let tol = double.tolerances();
    if cb.residual > tol.coboundary_residual {
        return Err(Error::NotCoboundary {
            residual: cb.residual,
        });
    }
    let base = double.base();
    let big_r = cb.big_r.as_ref().ok_or(Error::NotSemisimple {
        det: base.killing_determinant(),
    })?;
    let k_inv = base
        .killing_form()
        .clone()
        .try_inverse()
        .ok_or(Error::NotSemisimple {
            det: base.killing_determinant(),
        })?;
    let b = fields
        .a
        .map(|v| (&k_inv * DVector::from_column_slice(v)).as_slice().to_vec());
    let geo = edge_geometry(double, ws, &fields.x, true)?;
    let (ad_g, ad_g_inv) = geo.adjoint.as_ref().expect("adjoint blocks requested");
    let op = |g: &Grid, gi: &Grid, w: &Grid| {
        Grid::from_fn(w.cols(), w.rows(), n, |i, j| {
            let ad = from_row_major(n, g.get(i, j));
            let ad_inv = from_row_major(n, gi.get(i, j));
            let m = big_r - &ad * big_r * ad_inv;
            (m * DVector::from_column_slice(w.get(i, j))).as_slice().to_vec()
        })
    };
    let mapped = EdgeField {
        x: op(&ad_g.x, &ad_g_inv.x, &b.x),
        y: op(&ad_g.y, &ad_g_inv.y, &b.y),
    };
    let eq1 = EdgeField {
        x: add(&geo.t.x, &mapped.x),
        y: add(&geo.t.y, &mapped.y),
    };
    // [T_p, T_q]_R components
    let mut rb = vec![0.0; n * n * n];
    for p in 0..n {
        for q in 0..n {
            let ep = DVector::from_fn(n, |i, _| if i == p { 1.0 } else { 0.0 });
            let eq = DVector::from_fn(n, |i, _| if i == q { 1.0 } else { 0.0 });
            let v = r_bracket(base, big_r, &ep, &eq);
            for k in 0..n {
                rb[(p * n + q) * n + k] = v[k];
            }
        }
    }
    let db = exterior_derivative(&b);
    let quad = wedge_contract(n, &b, &b, |k, p, q| 0.5 * rb[(p * n + q) * n + k]);
    Ok(Residuals {
        eq1,
        eq2: add(&db, &quad),
    })
}

/// Linear model on `g*`: `dX_i + c_ij^k X_k A^j` per edge and
/// `dA^i + ½ c_jk^i A^j ∧ A^k` per plaquette.
pub fn eom_residual_linear(
    algebra: &LieAlgebra,
    ws: &Worldsheet,
    fields: &LatticeFields,
) -> Result<Residuals> {
    let n = algebra.dim();
    check_fields(ws, fields, n)?;
    let c = algebra.constants();
    let dx = node_difference(ws, &fields.x);
    let eq1 = EdgeField::from_fn(ws, n, |dir, i, j| {
        let mid = edge_midpoint(&fields.x, dir, i, j);
        let a = fields.a.grid(dir).get(i, j);
        let d = dx.grid(dir).get(i, j);
        (0..n)
            .map(|ii| {
                let mut s = d[ii];
                for jj in 0..n {
                    for k in 0..n {
                        s += c.get(ii, jj, k) * mid[k] * a[jj];
                    }
                }
                s
            })
            .collect()
    });
    let da = exterior_derivative(&fields.a);
    let quad = wedge_contract(n, &fields.a, &fields.a, |i, p, q| 0.5 * c.get(p, q, i));
    Ok(Residuals {
        eq1,
        eq2: add(&da, &quad),
    })
}

/// Linear model in `X̃ = K⁻¹ X`: `dX̃ + [Ã, X̃]` per edge.
pub fn linear_tilde_residual(
    algebra: &LieAlgebra,
    ws: &Worldsheet,
    fields: &LatticeFields,
    tolerances: &Tolerances,
) -> Result<EdgeField> {
    let n = algebra.dim();
    check_fields(ws, fields, n)?;
    if !algebra.is_semisimple(tolerances.semisimple_det) {
        return Err(Error::NotSemisimple {
            det: algebra.killing_determinant(),
        });
    }
    let k_inv = algebra
        .killing_form()
        .clone()
        .try_inverse()
        .ok_or(Error::NotSemisimple {
            det: algebra.killing_determinant(),
        })?;
    let xt = fields
        .x
        .map(|v| (&k_inv * DVector::from_column_slice(v)).as_slice().to_vec());
    let dxt = node_difference(ws, &xt);
    Ok(EdgeField::from_fn(ws, n, |dir, i, j| {
        let mid = DVector::from_vec(edge_midpoint(&xt, dir, i, j));
        let a = DVector::from_column_slice(fields.a.grid(dir).get(i, j));
        let r = DVector::from_column_slice(dxt.grid(dir).get(i, j)) + algebra.bracket_vec(&a, &mid);
        r.as_slice().to_vec()
    }))
}

/// `A` expressed in the chart coframe, `A_coord = e(X_mid)ᵀ A` per edge.
pub fn coordinate_coframe(double: &DoubleAlgebra, ws: &Worldsheet, fields: &LatticeFields) -> Result<EdgeField> {
    let n = double.half_dim();
    check_fields(ws, fields, n)?;
    EdgeField::try_par_from_fn(ws, n, |dir, i, j| {
        let mid = edge_midpoint(&fields.x, dir, i, j);
        let g = GroupPoint::new(double, Subgroup::Base, &mid)?;
        let fr = frame_matrix(double, &g)?;
        let a = DVector::from_column_slice(fields.a.grid(dir).get(i, j));
        Ok((fr.e.transpose() * a).as_slice().to_vec())
    })
}

