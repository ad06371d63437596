//! Finite-dimensional real Lie algebras given by structure constants.

use nalgebra::{DMatrix, DVector};

use crate::defect::Defect;
use crate::error::{Error, Result};

/// Dense rank-3 array `c[i][j][k]` with `[T_i, T_j] = Σ_k c[i][j][k] T_k`.
///
/// Antisymmetry in `(i, j)` holds exactly for every constructed value.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    coeffs: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim * dim],
        }
    }

    /// Build from a dense array in `(i, j, k)` row-major order.
    ///
    /// Input whose antisymmetry defect exceeds `antisym_tol` is rejected;
    /// smaller defects are removed by exact antisymmetrization.
    pub fn from_dense(dim: usize, coeffs: Vec<f64>, antisym_tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if coeffs.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                found: coeffs.len(),
            });
        }
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = coeffs[(i * dim + j) * dim + k];
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            index: vec![i, j, k],
                        });
                    }
                    let w = coeffs[(j * dim + i) * dim + k];
                    let defect = (v + w).abs();
                    if defect > antisym_tol {
                        return Err(Error::NotAntisymmetric { i, j, k, defect });
                    }
                    out.coeffs[(i * dim + j) * dim + k] = 0.5 * (v - w);
                }
            }
        }
        Ok(out)
    }

    /// Build from sparse entries `(i, j, k, value)`, each setting
    /// `c_ij^k = value` and `c_ji^k = -value`.
    ///
    /// Repeated or mirrored `(i, j, k)` entries and diagonal `(i, i, k)`
    /// entries with non-zero value are rejected.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut out = Self::zeros(dim);
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidInput(format!(
                    "index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: vec![i, j, k],
                });
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::NotAntisymmetric {
                        i,
                        j,
                        k,
                        defect: 2.0 * v.abs(),
                    });
                }
                continue;
            }
            let a = (i * dim + j) * dim + k;
            let b = (j * dim + i) * dim + k;
            if seen[a] || seen[b] {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry for ({i}, {j}, {k})"
                )));
            }
            seen[a] = true;
            seen[b] = true;
            out.coeffs[a] = v;
            out.coeffs[b] = -v;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[(i * self.dim + j) * self.dim + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Non-zero entries with `i < j`, in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// Max over `(i, j, k, s)` of `|c_jk^r c_ri^s + c_ki^r c_rj^s + c_ij^r c_rk^s|`.
    pub fn jacobiator(&self) -> Defect {
        let n = self.dim;
        let mut worst = Defect::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for s in 0..n {
                        let mut sum = 0.0;
                        for r in 0..n {
                            sum += self.get(j, k, r) * self.get(r, i, s)
                                + self.get(k, i, r) * self.get(r, j, s)
                                + self.get(i, j, r) * self.get(r, k, s);
                        }
                        worst.observe(sum, || vec![i, j, k, s]);
                    }
                }
            }
        }
        worst
    }
}

/// Coordinates of an element in the basis `(T_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(pub DVector<f64>);

impl AlgebraElement {
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Self(DVector::from_column_slice(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }
}

/// A Lie algebra with eagerly cached adjoint matrices and Killing form.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    constants: StructureConstants,
    ad: Vec<DMatrix<f64>>,
    killing: DMatrix<f64>,
}

impl LieAlgebra {
    pub fn new(constants: StructureConstants) -> Self {
        let n = constants.dim();
        let ad: Vec<DMatrix<f64>> = (0..n)
            .map(|i| DMatrix::from_fn(n, n, |k, j| constants.get(i, j, k)))
            .collect();
        let killing = DMatrix::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for l in 0..n {
                for m in 0..n {
                    s += constants.get(i, l, m) * constants.get(j, m, l);
                }
            }
            s
        });
        Self {
            constants,
            ad,
            killing,
        }
    }

    pub fn dim(&self) -> usize {
        self.constants.dim()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    /// Matrix of `ad_{T_i}` acting on coordinate columns: `ad_i[k][j] = c_ij^k`.
    pub fn ad(&self, i: usize) -> &DMatrix<f64> {
        &self.ad[i]
    }

    pub fn ad_matrices(&self) -> &[DMatrix<f64>] {
        &self.ad
    }

    /// `ad_x = Σ x^i ad_i`.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                m += &self.ad[i] * *xi;
            }
        }
        m
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        Ok(AlgebraElement(self.bracket_vec(&x.0, &y.0)))
    }

    pub fn bracket_vec(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += self.constants.get(i, j, k) * w;
                }
            }
        }
        out
    }

    /// `K_ij = Σ c_il^m c_jm^l`.
    pub fn killing_form(&self) -> &DMatrix<f64> {
        &self.killing
    }

    pub fn killing_determinant(&self) -> f64 {
        self.killing.determinant()
    }

    pub fn is_semisimple(&self, det_threshold: f64) -> bool {
        self.killing_determinant().abs() > det_threshold
    }

    /// Max over basis triples of `|K([z,x],y) + K(x,[z,y])|`.
    pub fn killing_invariance_defect(&self) -> Defect {
        let n = self.dim();
        let mut worst = Defect::zero();
        for z in 0..n {
            // (ad_z)^T K + K ad_z = 0 encodes the identity on all basis pairs.
            let m = self.ad[z].transpose() * &self.killing + &self.killing * &self.ad[z];
            for x in 0..n {
                for y in 0..n {
                    worst.observe(m[(x, y)], || vec![z, x, y]);
                }
            }
        }
        worst
    }

    /// Coadjoint action: `<ad*_y ξ, z> = -<ξ, [y, z]>`.
    pub fn coadjoint(&self, y: &AlgebraElement, xi: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(y.dim())?;
        self.check_dim(xi.len())?;
        Ok(-(self.ad_of(&y.0).transpose() * xi))
    }

    /// Max over basis `X, ξ, η` of `|K⁻¹(ad*_X ξ, η) + K⁻¹(ξ, ad*_X η)|`.
    ///
    /// Only defined for semisimple algebras.
    pub fn killing_inverse_coadjoint_defect(&self, det_threshold: f64) -> Result<Defect> {
        let det = self.killing_determinant();
        if det.abs() <= det_threshold {
            return Err(Error::NotSemisimple { det });
        }
        let kinv = self
            .killing
            .clone()
            .try_inverse()
            .ok_or(Error::NotSemisimple { det })?;
        let n = self.dim();
        let mut worst = Defect::zero();
        for x in 0..n {
            // ad*_X as a matrix on covector coordinates is -ad_X^T.
            let co = -self.ad[x].transpose();
            let m = co.transpose() * &kinv + &kinv * &co;
            for a in 0..n {
                for b in 0..n {
                    worst.observe(m[(a, b)], || vec![x, a, b]);
                }
            }
        }
        Ok(worst)
    }
}
