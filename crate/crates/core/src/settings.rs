use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every check.
///
/// Defect checks compare against `tol * (1 + scale)` where `scale` is the
/// largest input magnitude involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Default relative tolerance for algebraic identities.
    pub tol: f64,
    /// Rejection threshold for non-antisymmetric coefficient input.
    pub antisymmetry: f64,
    /// Largest admissible condition number of the `a(g)` block.
    pub chart_condition: f64,
    /// Relative residual below which a bialgebra counts as coboundary.
    pub coboundary_residual: f64,
    /// Base step of central differences (scaled by coordinate magnitude).
    pub fd_step: f64,
    /// Threshold on |det K| for semisimplicity.
    pub semisimple_det: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            antisymmetry: 1e-12,
            chart_condition: 1e8,
            coboundary_residual: 1e-8,
            fd_step: 1e-3,
            semisimple_det: 1e-10,
        }
    }
}

impl Tolerances {
    /// Scale-relative threshold `tol * (1 + scale)`.
    pub fn scaled(&self, scale: f64) -> f64 {
        self.tol * (1.0 + scale.abs())
    }
}
