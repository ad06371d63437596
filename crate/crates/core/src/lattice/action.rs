//! Discrete action and the first-variation probe.

use super::{
    node_difference, plaquette_averages, plaquette_center, wedge, EdgeField, Grid, LatticeFields,
    Worldsheet,
};
use crate::bivector::ChartBivector;
use crate::error::{Error, Result};

/// `S = Σ_plaquettes A_i ∧ dX^i + ½ P^{jk}(X) A_j ∧ A_k` with `A` in the chart coframe.
///
/// `P` is evaluated at plaquette centres. Per-plaquette terms are computed in
/// parallel and summed in row-major order.
pub fn action(p: &dyn ChartBivector, ws: &Worldsheet, fields: &LatticeFields) -> Result<f64> {
    let n = p.dim();
    fields.validate(ws, n)?;
    let a = fields.require_coord()?;
    let dx = node_difference(ws, &fields.x);
    let terms = Grid::try_par_from_fn(ws.nx() - 1, ws.ny() - 1, 1, |i, j| {
        let (ax, ay) = plaquette_averages(a, i, j);
        let (dxx, dxy) = plaquette_averages(&dx, i, j);
        let c = plaquette_center(&fields.x, i, j);
        let pm = p.eval(&c)?;
        let mut s = 0.0;
        for k in 0..n {
            s += wedge(ax[k], ay[k], dxx[k], dxy[k]);
        }
        for u in 0..n {
            for v in 0..n {
                s += 0.5 * pm[(u, v)] * wedge(ax[u], ay[u], ax[v], ay[v]);
            }
        }
        Ok(vec![s])
    })?;
    Ok(terms.as_slice().iter().sum())
}

/// Deformation `X → X + εY(X)`, `A → (A + ε̃B)(1 - ε ∂Y)` of a field configuration.
pub struct VariationProbe<'a> {
    /// Target vector field in chart coordinates.
    pub y: &'a (dyn Fn(&[f64]) -> Vec<f64> + Sync),
    /// Chart-coframe one-form added to `A`.
    pub b: EdgeField,
    pub eps: f64,
    pub eps_tilde: f64,
}

const PROBE_LIMIT: f64 = 0.1;

/// `∂_m Y^j` by Richardson-extrapolated central differences, indexed `[j][m]`.
fn jacobian(y: &(dyn Fn(&[f64]) -> Vec<f64> + Sync), at: &[f64]) -> Vec<Vec<f64>> {
    let n = at.len();
    let h = 1e-4 * (1.0 + at.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    let diff = |s: f64, m: usize| {
        let mut plus = at.to_vec();
        let mut minus = at.to_vec();
        plus[m] += s;
        minus[m] -= s;
        let (yp, ym) = (y(&plus), y(&minus));
        (0..n).map(|j| (yp[j] - ym[j]) / (2.0 * s)).collect::<Vec<_>>()
    };
    let mut jac = vec![vec![0.0; n]; n];
    for m in 0..n {
        let (c, f) = (diff(h, m), diff(h / 2.0, m));
        for j in 0..n {
            jac[j][m] = (4.0 * f[j] - c[j]) / 3.0;
        }
    }
    jac
}

/// Apply the probe deformation. `Y` acts on interior nodes only, and the
/// pull-back factor is applied on edges whose endpoints are both interior.
pub fn deform(ws: &Worldsheet, fields: &LatticeFields, probe: &VariationProbe<'_>) -> Result<LatticeFields> {
    if probe.eps.abs() > PROBE_LIMIT || probe.eps_tilde.abs() > PROBE_LIMIT {
        return Err(Error::InvalidInput(format!(
            "probe parameters must satisfy |eps|, |eps_tilde| <= {PROBE_LIMIT}"
        )));
    }
    let n = fields.x.dim();
    let a = fields.require_coord()?;
    if !(probe.b.x.same_shape(&a.x) && probe.b.y.same_shape(&a.y)) {
        return Err(Error::InvalidLattice("probe one-form does not match the worldsheet".into()));
    }
    let x = Grid::from_fn(ws.nx(), ws.ny(), n, |i, j| {
        let v = fields.x.get(i, j);
        if ws.is_interior(i, j) && probe.eps != 0.0 {
            let yv = (probe.y)(v);
            v.iter().zip(&yv).map(|(x, d)| x + probe.eps * d).collect()
        } else {
            v.to_vec()
        }
    });
    let a_new = EdgeField::from_fn(ws, n, |dir, i, j| {
        let shifted: Vec<f64> = a
            .grid(dir)
            .get(i, j)
            .iter()
            .zip(probe.b.grid(dir).get(i, j))
            .map(|(a, b)| a + probe.eps_tilde * b)
            .collect();
        let (hi, hj) = super::head(dir, i, j);
        if probe.eps == 0.0 || !(ws.is_interior(i, j) && ws.is_interior(hi, hj)) {
            return shifted;
        }
        let mid = super::edge_midpoint(&fields.x, dir, i, j);
        let jac = jacobian(probe.y, &mid);
        (0..n)
            .map(|ii| {
                let mut s = shifted[ii];
                for jj in 0..n {
                    s -= probe.eps * shifted[jj] * jac[jj][ii];
                }
                s
            })
            .collect()
    });
    Ok(LatticeFields {
        x,
        a: fields.a.clone(),
        a_coord: Some(a_new),
    })
}

/// `|S[X̃, Ã] - S[X, A]|` for the probe deformation.
pub fn first_variation_probe(
    p: &dyn ChartBivector,
    ws: &Worldsheet,
    fields: &LatticeFields,
    probe: &VariationProbe<'_>,
) -> Result<f64> {
    let s0 = action(p, ws, fields)?;
    let s1 = action(p, ws, &deform(ws, fields, probe)?)?;
    Ok((s1 - s0).abs())
}

/// Probe values along `ε̃ ∈ eps_tildes` (with `ε = 0`) and their log-log slope.
///
/// Zero probe values make the slope non-finite; callers treat that as a failure.
pub fn eps_tilde_sweep(
    p: &dyn ChartBivector,
    ws: &Worldsheet,
    fields: &LatticeFields,
    b: &EdgeField,
    eps_tildes: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if eps_tildes.len() < 2 {
        return Err(Error::InvalidInput("a sweep needs at least two values".into()));
    }
    let still = |x: &[f64]| vec![0.0; x.len()];
    let values = eps_tildes
        .iter()
        .map(|&eps_tilde| {
            let probe = VariationProbe {
                y: &still,
                b: b.clone(),
                eps: 0.0,
                eps_tilde,
            };
            first_variation_probe(p, ws, fields, &probe)
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = super::loglog_slope(eps_tildes, &values);
    Ok((values, slope))
}
