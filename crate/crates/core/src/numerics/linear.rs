//! Dense linear solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Solution of a dense linear system plus a 1-norm condition estimate.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    pub condition_estimate: f64,
}

/// Solves `m x = b` by partially pivoted LU.
pub fn solve_linear(m: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    solve_linear_with_condition(m, b).map(|s| s.x)
}

pub fn solve_linear_with_condition(m: &DMatrix<f64>, b: &[f64]) -> Result<LinearSolution> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n || b.len() != n {
        return Err(invalid(
            "solve_linear needs a square matrix and a matching right-hand side",
        ));
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max_piv = diag.amax();
    let min_piv = diag.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let pivot_ratio = if max_piv > 0.0 { min_piv / max_piv } else { 0.0 };
    if pivot_ratio <= f64::EPSILON * n as f64 {
        return Err(Error::Singular { pivot_ratio });
    }
    let rhs = DVector::from_column_slice(b);
    let x = lu.solve(&rhs).ok_or(Error::Singular { pivot_ratio })?;
    let inv = lu.try_inverse().ok_or(Error::Singular { pivot_ratio })?;
    let condition_estimate = one_norm(m) * one_norm(&inv);
    Ok(LinearSolution {
        x: x.iter().copied().collect(),
        condition_estimate,
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
