//! Dense least squares via QR decomposition, with an SVD-based condition
//! number. Normal equations are avoided on purpose: the BHF basis turns
//! near-collinear when all distances sit past the tanh knee, and the
//! condition number must be reported faithfully in exactly that regime.

use nalgebra::{DMatrix, DVector};

use super::FitError;

#[derive(Debug)]
pub(super) struct LeastSquares {
    pub coeffs: Vec<f64>,
    pub condition_number: f64,
}

/// Solve `min ||A x - y||` for the tall matrix with the given columns.
///
/// Errors with [`FitError::RankDeficient`] when the smallest singular
/// value drops below `max(m, n) * eps * sigma_max`, carrying the condition
/// number either way.
pub(super) fn solve(columns: &[&[f64]], y: &[f64]) -> Result<LeastSquares, FitError> {
    let rows = y.len();
    let cols = columns.len();
    debug_assert!(cols > 0 && columns.iter().all(|c| c.len() == rows));
    if rows < cols {
        return Err(FitError::DegenerateDesign(format!(
            "{rows} samples cannot determine {cols} parameters"
        )));
    }

    let a = DMatrix::from_fn(rows, cols, |i, j| columns[j][i]);

    let singular = a.singular_values();
    let s_max = singular.iter().cloned().fold(0.0f64, f64::max);
    let s_min = singular.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_number = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    let rank_floor = rows.max(cols) as f64 * f64::EPSILON * s_max;
    if s_min <= rank_floor {
        return Err(FitError::RankDeficient { condition_number });
    }

    let qr = a.qr();
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, cols).into_owned();
    let coeffs = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or(FitError::RankDeficient { condition_number })?;

    Ok(LeastSquares {
        coeffs: coeffs.iter().copied().collect(),
        condition_number,
    })
}
