//! Product-of-exponentials chart on the double group and the Poisson-Lie bivector.

use nalgebra::DMatrix;

use crate::bialgebra::DoubleAlgebra;
use crate::bivector::ChartBivector;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, matrix_exp, max_abs};

/// Which half of the double a chart point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subgroup {
    /// `G`, generated by `T_0..T_{n-1}`.
    Base,
    /// `G̃`, generated by `T̃^0..T̃^{n-1}`.
    Dual,
}

impl Subgroup {
    /// Index of the first generator in the double basis.
    pub fn offset(self, n: usize) -> usize {
        match self {
            Subgroup::Base => 0,
            Subgroup::Dual => n,
        }
    }
}

/// A point `e^{α_0 E_0} ··· e^{α_{n-1} E_{n-1}}` with cached adjoint matrices.
#[derive(Debug, Clone)]
pub struct GroupPoint {
    subgroup: Subgroup,
    coords: Vec<f64>,
    adjoint: DMatrix<f64>,
    adjoint_inv: DMatrix<f64>,
}

fn path_product(
    double: &DoubleAlgebra,
    subgroup: Subgroup,
    coords: &[f64],
) -> Result<DMatrix<f64>> {
    let n = double.half_dim();
    let off = subgroup.offset(n);
    let mut m = DMatrix::identity(2 * n, 2 * n);
    for (k, &alpha) in coords.iter().enumerate() {
        if alpha != 0.0 {
            m *= matrix_exp(&(double.total().ad(off + k) * alpha))?;
        }
    }
    Ok(m)
}

impl GroupPoint {
    pub fn new(double: &DoubleAlgebra, subgroup: Subgroup, coords: &[f64]) -> Result<Self> {
        let n = double.half_dim();
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coords.len(),
            });
        }
        if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: vec![index] });
        }
        let adjoint = path_product(double, subgroup, coords)?;
        // inverse along the reversed path
        let off = subgroup.offset(n);
        let mut adjoint_inv = DMatrix::identity(2 * n, 2 * n);
        for k in (0..n).rev() {
            if coords[k] != 0.0 {
                adjoint_inv *= matrix_exp(&(double.total().ad(off + k) * (-coords[k])))?;
            }
        }
        Ok(Self {
            subgroup,
            coords: coords.to_vec(),
            adjoint,
            adjoint_inv,
        })
    }

    pub fn identity(double: &DoubleAlgebra, subgroup: Subgroup) -> Self {
        let n = double.half_dim();
        Self {
            subgroup,
            coords: vec![0.0; n],
            adjoint: DMatrix::identity(2 * n, 2 * n),
            adjoint_inv: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn subgroup(&self) -> Subgroup {
        self.subgroup
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `(Ad_g)_X` on the double.
    pub fn adjoint(&self) -> &DMatrix<f64> {
        &self.adjoint
    }

    /// `(Ad_{g⁻¹})_X`, built from the reversed path.
    pub fn adjoint_inv(&self) -> &DMatrix<f64> {
        &self.adjoint_inv
    }
}

/// `(Ad_g)_X` for a chart point.
pub fn adjoint(p: &GroupPoint) -> DMatrix<f64> {
    p.adjoint.clone()
}

/// Max-norm of `Adᵀ B Ad - B`.
pub fn form_preservation_defect(double: &DoubleAlgebra, ad: &DMatrix<f64>) -> f64 {
    max_abs(&(ad.transpose() * double.bform() * ad - double.bform()))
}

/// Max over basis pairs of `|Ad[x,y] - [Ad x, Ad y]|`.
pub fn automorphism_defect(double: &DoubleAlgebra, ad: &DMatrix<f64>) -> f64 {
    let total = double.total();
    let big = total.dim();
    let mut worst: f64 = 0.0;
    for a in 0..big {
        for b in 0..big {
            let xa = ad.column(a).into_owned();
            let xb = ad.column(b).into_owned();
            let mut lhs = nalgebra::DVector::zeros(big);
            for k in 0..big {
                let c = total.constants().get(a, b, k);
                if c != 0.0 {
                    lhs += ad.column(k) * c;
                }
            }
            let rhs = total.bracket_vec(&xa, &xb);
            worst = worst.max((lhs - rhs).amax());
        }
    }
    worst
}

/// Blocks of `(Ad_{g⁻¹})_X = [[aᵀ, bᵀ], [0, dᵀ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointDecomposition {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl AdjointDecomposition {
    /// Rebuild the `2n × 2n` matrix from the three blocks.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let n = self.a.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a.transpose());
        m.view_mut((0, n), (n, n)).copy_from(&self.b.transpose());
        m.view_mut((n, n), (n, n)).copy_from(&self.d.transpose());
        m
    }
}

/// Split `(Ad_{g⁻¹})_X` into `a`, `b`, `d`, checking the lower-left block vanishes.
pub fn decompose(ad_inv: &DMatrix<f64>, zero_tol: f64) -> Result<AdjointDecomposition> {
    let big = ad_inv.nrows();
    if !big.is_multiple_of(2) || ad_inv.ncols() != big {
        return Err(Error::InvalidInput(format!(
            "adjoint matrix must be square of even size, got {}x{}",
            ad_inv.nrows(),
            ad_inv.ncols()
        )));
    }
    let n = big / 2;
    let lower = ad_inv.view((n, 0), (n, n));
    let defect = lower.amax();
    if defect > zero_tol * (1.0 + max_abs(ad_inv)) {
        return Err(Error::ZeroBlockViolation { defect });
    }
    Ok(AdjointDecomposition {
        a: ad_inv.view((0, 0), (n, n)).transpose(),
        b: ad_inv.view((0, n), (n, n)).transpose(),
        d: ad_inv.view((n, n), (n, n)).transpose(),
    })
}

/// `Π(g)` from an adjoint pair by the block formula.
///
/// Returns the components that enter `T_X + Π(X) A = 0`, i.e. `-b a⁻¹`.
pub fn pi_from_adjoint(
    double: &DoubleAlgebra,
    ad_inv: &DMatrix<f64>,
    coords: &[f64],
) -> Result<DMatrix<f64>> {
    let tol = double.tolerances();
    let dec = decompose(ad_inv, tol.tol)?;
    let condition = condition_number(&dec.a);
    if !condition.is_finite() || condition > tol.chart_condition {
        return Err(Error::ChartBoundary {
            coords: coords.to_vec(),
            condition,
        });
    }
    let a_inv = dec.a.clone().try_inverse().ok_or(Error::ChartBoundary {
        coords: coords.to_vec(),
        condition,
    })?;
    Ok(-(&dec.b * a_inv))
}

/// `Π(g)` by the projector formula `P Ad_g P̃ Ad_{g⁻¹} P̃`, same sign convention.
pub fn pi_from_projectors(
    double: &DoubleAlgebra,
    ad: &DMatrix<f64>,
    ad_inv: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = double.half_dim();
    let m = double.proj_g() * ad * double.proj_gdual() * ad_inv * double.proj_gdual();
    -m.view((0, n), (n, n)).into_owned()
}

/// `Π(g)` for a point of `G`.
pub fn pi_matrix(double: &DoubleAlgebra, p: &GroupPoint) -> Result<DMatrix<f64>> {
    check_base(p)?;
    pi_from_adjoint(double, p.adjoint_inv(), p.coords())
}

/// Both pipelines at once: `(block, projector)`.
pub fn pi_both(double: &DoubleAlgebra, p: &GroupPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let block = pi_matrix(double, p)?;
    let proj = pi_from_projectors(double, p.adjoint(), p.adjoint_inv());
    Ok((block, proj))
}

fn check_base(p: &GroupPoint) -> Result<()> {
    if p.subgroup() != Subgroup::Base {
        return Err(Error::InvalidInput(
            "operation requires a point of the base group".into(),
        ));
    }
    Ok(())
}

/// `e` and its inverse `f` relating chart and right-invariant frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameChange {
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

/// Columns `e[:, j] = Ad_{g<j}(E_j)` restricted to the point's half of the double.
pub fn frame_matrix(double: &DoubleAlgebra, p: &GroupPoint) -> Result<FrameChange> {
    let n = double.half_dim();
    let off = p.subgroup().offset(n);
    let mut e = DMatrix::zeros(n, n);
    let mut prefix = DMatrix::<f64>::identity(2 * n, 2 * n);
    for j in 0..n {
        e.set_column(j, &prefix.view((off, off + j), (n, 1)).column(0));
        if p.coords[j] != 0.0 {
            prefix *= matrix_exp(&(double.total().ad(off + j) * p.coords[j]))?;
        }
    }
    let condition = condition_number(&e);
    let chart_boundary = || Error::ChartBoundary {
        coords: p.coords.clone(),
        condition,
    };
    if !condition.is_finite() || condition > double.tolerances().chart_condition {
        return Err(chart_boundary());
    }
    let f = e.clone().try_inverse().ok_or_else(chart_boundary)?;
    Ok(FrameChange { e, f })
}

/// Central-difference estimate of `e` at step `h`.
///
/// Column `j` is the right-translated derivative `∂_j g · g⁻¹` read off from
/// `(Ad(α + h e_j) - Ad(α - h e_j)) Ad(α)⁻¹ / 2h` in the basis of `ad`.
pub fn frame_matrix_fd(double: &DoubleAlgebra, p: &GroupPoint, h: f64) -> Result<DMatrix<f64>> {
    let n = double.half_dim();
    let off = p.subgroup().offset(n);
    let basis: Vec<DMatrix<f64>> = (0..n).map(|k| double.total().ad(off + k).clone()).collect();
    let mut e = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut plus = p.coords.clone();
        let mut minus = p.coords.clone();
        plus[j] += h;
        minus[j] -= h;
        let ap = path_product(double, p.subgroup(), &plus)?;
        let am = path_product(double, p.subgroup(), &minus)?;
        let deriv = (ap - am) * p.adjoint_inv() / (2.0 * h);
        let (coeffs, _) = crate::linalg::project_onto_span(&basis, &deriv);
        e.set_column(j, &coeffs);
    }
    Ok(e)
}

/// Chart components `P^{αβ} = f^α_m f^β_n Π^{mn}`.
pub fn coordinate_bivector(double: &DoubleAlgebra, p: &GroupPoint) -> Result<DMatrix<f64>> {
    let pi = pi_matrix(double, p)?;
    let frame = frame_matrix(double, p)?;
    Ok(&frame.f * pi * frame.f.transpose())
}

/// The Poisson-Lie bivector of a double, viewed in the chart of `G`.
#[derive(Debug, Clone)]
pub struct GroupBivector {
    double: DoubleAlgebra,
}

impl GroupBivector {
    pub fn new(double: DoubleAlgebra) -> Self {
        Self { double }
    }

    pub fn double(&self) -> &DoubleAlgebra {
        &self.double
    }
}

impl ChartBivector for GroupBivector {
    fn dim(&self) -> usize {
        self.double.half_dim()
    }

    fn eval(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let p = GroupPoint::new(&self.double, Subgroup::Base, y)?;
        coordinate_bivector(&self.double, &p)
    }
}
