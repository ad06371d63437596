//! Dense matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest absolute entry of a matrix (0 for empty matrices).
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
///
/// Backed by nalgebra's implementation (Higham 2005, degree up to 13).
pub fn matrix_exp(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let norm = m.lp_norm(1);
    // e^700 is near the f64 limit; anything beyond cannot be represented.
    if norm > 700.0 {
        return Err(Error::Overflow { norm });
    }
    let e = m.exp();
    if e.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(e)
}

/// Principal logarithm of a matrix close to the identity.
///
/// Uses the series `log M = 2 Σ S^(2k+1)/(2k+1)` with `S = (M-I)(M+I)^-1`,
/// which converges for `|S| < 1`; inputs with `|S|_2 >= 0.5` are rejected.
pub fn matrix_log_near_identity(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    let id = DMatrix::<f64>::identity(n, n);
    let plus = m + &id;
    let inv = plus.try_inverse().ok_or_else(|| Error::LogFailure {
        reason: "M + I is singular".into(),
    })?;
    let s = (m - &id) * inv;
    let s_norm = s.norm();
    if s_norm >= 0.5 {
        return Err(Error::LogFailure {
            reason: format!("outside series radius (|S| = {s_norm:.3})"),
        });
    }
    let s2 = &s * &s;
    let mut term = s.clone();
    let mut acc = s.clone();
    let mut k = 1usize;
    loop {
        term = &term * &s2;
        let denom = (2 * k + 1) as f64;
        let contrib = &term / denom;
        acc += &contrib;
        if max_abs(&contrib) <= f64::EPSILON * max_abs(&acc).max(f64::MIN_POSITIVE) || k > 200 {
            break;
        }
        k += 1;
    }
    Ok(acc * 2.0)
}

/// Condition number in the 2-norm (infinite for singular input).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Least-squares coordinates of `target` in the span of `basis`.
///
/// Returns the coefficient vector and the max-norm of the fit residual.
pub fn project_onto_span(basis: &[DMatrix<f64>], target: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let rows = target.len();
    let cols = basis.len();
    let design = DMatrix::from_fn(rows, cols, |r, c| basis[c].as_slice()[r]);
    let rhs = DVector::from_column_slice(target.as_slice());
    let svd = design.clone().svd(true, true);
    let coeffs = svd
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols));
    let residual = &design * &coeffs - rhs;
    (coeffs, max_abs_vec(&residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(matrix_exp(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn exp_of_nilpotent_terminates() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = matrix_exp(&m).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(max_abs(&(e - expected)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -3.0, 10.0]));
        let e = matrix_exp(&m).unwrap();
        for (i, a) in [0.5_f64, -3.0, 10.0].iter().enumerate() {
            assert!((e[(i, i)] - a.exp()).abs() <= 1e-14 * a.exp());
        }
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn exp_rejects_extreme_norm() {
        let m = DMatrix::from_element(2, 2, 1e6);
        assert!(matches!(matrix_exp(&m), Err(Error::Overflow { .. })));
    }

    #[test]
    fn log_inverts_exp_near_identity() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.1, -0.05, 0.02, 0.03, 0.1, -0.1, 0.0, 0.01]);
        let back = matrix_log_near_identity(&matrix_exp(&m).unwrap()).unwrap();
        assert!(max_abs(&(back - m)) < 1e-14);
    }

    #[test]
    fn log_rejects_far_points() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![10.0, 1.0]));
        assert!(matches!(
            matrix_log_near_identity(&m),
            Err(Error::LogFailure { .. })
        ));
    }
}
