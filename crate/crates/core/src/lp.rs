//! Phase-one simplex on a dense tableau.
//!
//! Decides feasibility of `A x = b, x >= 0` by minimising the sum of
//! artificial variables. Entering and leaving variables follow Bland's rule
//! (lowest eligible index), so the method terminates on degenerate problems.

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Default feasibility tolerance on the residual infeasibility.
pub const FEAS_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
/// Pivot candidates smaller than this fraction of the largest entry in the
/// entering column are treated as cancellation noise.
const PIVOT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PhaseOne {
    pub feasible: bool,
    /// Sum of artificial variables at termination.
    pub infeasibility: f64,
    /// Basic solution for the structural variables (nonnegative).
    pub x: Vec<f64>,
    pub pivots: usize,
}

/// Runs phase one with the default tolerance.
pub fn phase_one(a: &Matrix, b: &[f64]) -> Result<PhaseOne> {
    phase_one_with_tol(a, b, FEAS_TOL)
}

pub fn phase_one_with_tol(a: &Matrix, b: &[f64], feas_tol: f64) -> Result<PhaseOne> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{m} constraints but rhs of length {}",
            b.len()
        )));
    }
    let width = n + m + 1;
    let rhs_col = n + m;
    // rows 0..m are constraints, row m holds reduced costs of the phase-one
    // objective
    let mut t = Matrix::zeros(m + 1, width);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, rhs_col)] = sign * b[i];
    }
    for j in 0..n {
        t[(m, j)] = -(0..m).map(|i| t[(i, j)]).sum::<f64>();
    }
    t[(m, rhs_col)] = -(0..m).map(|i| t[(i, rhs_col)]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (n + m + 10);
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..n + m).find(|&j| t[(m, j)] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        let col_max = (0..m).fold(0.0_f64, |acc, i| acc.max(t[(i, enter)].abs()));
        let min_pivot = PIVOT_TOL.max(PIVOT_REL_TOL * col_max);
        for i in 0..m {
            let coef = t[(i, enter)];
            if coef > min_pivot {
                let ratio = t[(i, rhs_col)].max(0.0) / coef;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - 1e-15
                            || (ratio <= best_ratio + 1e-15 && basis[i] < basis[l])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry in exact arithmetic.
        let Some(row) = leave else {
            break;
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::LpIterationLimit(max_pivots));
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[(i, rhs_col)].max(0.0);
        }
    }
    let infeasibility = (-t[(m, rhs_col)]).max(0.0);
    Ok(PhaseOne {
        feasible: infeasibility <= feas_tol,
        infeasibility,
        x,
        pivots,
    })
}

fn pivot(t: &mut Matrix, row: usize, col: usize) {
    let width = t.cols();
    let p = t[(row, col)];
    for j in 0..width {
        t[(row, j)] /= p;
    }
    t[(row, col)] = 1.0;
    for i in 0..t.rows() {
        if i == row {
            continue;
        }
        let f = t[(i, col)];
        if f == 0.0 {
            continue;
        }
        for j in 0..width {
            t[(i, j)] -= f * t[(row, j)];
        }
        t[(i, col)] = 0.0;
    }
}
