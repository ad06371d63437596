//! Bivector fields given by components in a coordinate chart.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::StructureConstants;

/// A bivector field `P^{ij}(y)` on an open set of `R^n`.
pub trait ChartBivector: Sync {
    fn dim(&self) -> usize;

    /// Components at `y`, an antisymmetric `n × n` matrix.
    fn eval(&self, y: &[f64]) -> Result<DMatrix<f64>>;
}

/// The linear bivector `P^{ij}(ξ) = c_ij^k ξ_k` on the dual of a Lie algebra.
#[derive(Debug, Clone)]
pub struct LinearBivector {
    constants: StructureConstants,
}

impl LinearBivector {
    pub fn new(constants: StructureConstants) -> Self {
        Self { constants }
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }
}

impl ChartBivector for LinearBivector {
    fn dim(&self) -> usize {
        self.constants.dim()
    }

    fn eval(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.constants.get(i, j, k) * y[k]).sum()
        }))
    }
}

/// A bivector given by a closure, used for hand-made fixtures.
pub struct FnBivector<F> {
    dim: usize,
    f: F,
}

impl<F> FnBivector<F>
where
    F: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> ChartBivector for FnBivector<F>
where
    F: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: y.len(),
            });
        }
        Ok((self.f)(y))
    }
}

/// Three-dimensional bivector with `P^{01} = y0·y1` and `P^{12} = 1`.
///
/// Its Jacobiator component `(0,1,2)` equals `-y0`, so it is not Poisson
/// away from the plane `y0 = 0`.
pub fn non_poisson_fixture() -> FnBivector<impl Fn(&[f64]) -> DMatrix<f64> + Sync> {
    FnBivector::new(3, |y: &[f64]| {
        let mut p = DMatrix::zeros(3, 3);
        p[(0, 1)] = y[0] * y[1];
        p[(1, 0)] = -p[(0, 1)];
        p[(1, 2)] = 1.0;
        p[(2, 1)] = -1.0;
        p
    })
}
