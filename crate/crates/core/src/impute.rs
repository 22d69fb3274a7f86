//! Trace-norm-regularized matrix completion by proximal gradient descent.
//!
//! Minimizes `0.5 * ||P(A) - P(B)||_F^2 + lambda * ||B||_*` over dense B,
//! where P zeroes everything outside the observed set. Each iteration takes
//! a gradient step on the squared loss and then applies singular-value
//! soft-thresholding, the proximal operator of the trace norm.

use crate::cooccurrence::CooccurrenceMatrix;
use crate::error::{Error, Result};
use crate::svd::{svd, SvdResult};
use nalgebra::DMatrix;

/// Parameters for [`soft_impute`].
///
/// The squared loss has a Lipschitz-continuous gradient with constant 1, so
/// the fixed unit step size converges at an O(1/k) rate.
#[derive(Debug, Clone)]
pub struct ImputeConfig {
    /// Regularization weight on the trace norm.
    pub lambda: f64,
    /// Gradient step size; descent is guaranteed for values up to 1.
    pub step_size: f64,
    pub max_iterations: usize,
    /// Stop when the relative objective change drops below this.
    pub rel_tolerance: f64,
    /// Clamp the final matrix to [0, 1] after the iteration finishes.
    pub clip_to_unit: bool,
}

impl Default for ImputeConfig {
    fn default() -> Self {
        ImputeConfig {
            lambda: 0.0,
            step_size: 1.0,
            max_iterations: 500,
            rel_tolerance: 1e-6,
            clip_to_unit: true,
        }
    }
}

impl ImputeConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        ImputeConfig {
            lambda,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidInput("lambda must be finite and >= 0".into()));
        }
        if self.step_size <= 0.0 || !self.step_size.is_finite() {
            return Err(Error::InvalidInput(
                "step_size must be finite and > 0".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be >= 1".into()));
        }
        if self.rel_tolerance <= 0.0 {
            return Err(Error::InvalidInput("rel_tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// Result of a [`soft_impute`] run.
#[derive(Debug, Clone)]
pub struct ImputedMatrix {
    /// The completed matrix (clamped to [0, 1] when configured).
    pub values: DMatrix<f64>,
    pub iterations_run: usize,
    /// Objective at the final iterate, before any clamping.
    pub final_objective: f64,
    /// Objective at the start point followed by one value per iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

/// Zero every entry of `matrix` outside `omega`.
pub fn project(matrix: &DMatrix<f64>, omega: &[(usize, usize)]) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(matrix.nrows(), matrix.ncols());
    for &(i, j) in omega {
        if i >= matrix.nrows() || j >= matrix.ncols() {
            return Err(Error::PositionOutOfBounds {
                row: i,
                col: j,
                nrows: matrix.nrows(),
                ncols: matrix.ncols(),
            });
        }
        out[(i, j)] = matrix[(i, j)];
    }
    Ok(out)
}

/// The completion objective:
/// `0.5 * sum over omega of (A_ij - B_ij)^2 + lambda * ||B||_*`.
pub fn objective(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    omega: &[(usize, usize)],
    lambda: f64,
) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: format!("{}x{}", a.nrows(), a.ncols()),
            right: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    let mut loss = 0.0;
    for &(i, j) in omega {
        if i >= a.nrows() || j >= a.ncols() {
            return Err(Error::PositionOutOfBounds {
                row: i,
                col: j,
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let d = a[(i, j)] - b[(i, j)];
        loss += d * d;
    }
    let trace_term = if lambda == 0.0 {
        0.0
    } else {
        lambda * svd(b)?.trace_norm()
    };
    Ok(0.5 * loss + trace_term)
}

/// Singular-value soft-thresholding: rebuild with each singular value
/// shrunk to `max(sigma - t, 0)`.
pub fn soft_threshold(decomposition: &SvdResult, t: f64) -> DMatrix<f64> {
    let (matrix, _) = soft_threshold_with_norm(decomposition, t);
    matrix
}

/// As [`soft_threshold`], also returning the trace norm of the result
/// (the sum of the shrunk singular values).
fn soft_threshold_with_norm(decomposition: &SvdResult, t: f64) -> (DMatrix<f64>, f64) {
    let shrunk: Vec<f64> = decomposition
        .singular_values
        .iter()
        .map(|&s| (s - t).max(0.0))
        .collect();
    let rank = shrunk.iter().take_while(|&&s| s > 0.0).count();
    let trace_norm: f64 = shrunk[..rank].iter().sum();
    let n = decomposition.u.nrows();
    let m = decomposition.v.nrows();
    if rank == 0 {
        return (DMatrix::zeros(n, m), 0.0);
    }
    // Columns past `rank` carry zero weight and contribute exactly nothing,
    // so restrict the product to the leading block.
    let mut scaled = decomposition.u.columns(0, rank).into_owned();
    for (c, &s) in shrunk[..rank].iter().enumerate() {
        scaled.column_mut(c).scale_mut(s);
    }
    let matrix = scaled * decomposition.v.columns(0, rank).transpose();
    (matrix, trace_norm)
}

/// Complete `a` by proximal gradient descent from B = 0.
///
/// Iterates `B <- prox_{lambda * step}(B + step * (P(A) - P(B)))`, recording
/// the objective after every update, until the relative objective change
/// falls below `rel_tolerance` or `max_iterations` is reached. Clamping to
/// [0, 1] is applied to the final matrix only, never inside the iteration.
pub fn soft_impute(a: &CooccurrenceMatrix, config: &ImputeConfig) -> Result<ImputedMatrix> {
    config.validate()?;
    let omega = a.observed();
    if omega.is_empty() {
        return Err(Error::InvalidInput(
            "observed set is empty; nothing to fit".into(),
        ));
    }
    let values = a.values();
    let step = config.step_size;
    let shrink = config.lambda * step;

    let mut b = DMatrix::zeros(values.nrows(), values.ncols());
    let mut trace = Vec::with_capacity(config.max_iterations + 1);
    // Objective at B = 0: the trace norm term vanishes.
    trace.push(
        0.5 * omega
            .iter()
            .map(|&(i, j)| values[(i, j)].powi(2))
            .sum::<f64>(),
    );

    let mut converged = false;
    let mut iterations_run = 0;
    for iteration in 1..=config.max_iterations {
        // Gradient step touches only observed entries.
        let mut w = b.clone();
        for &(i, j) in omega {
            w[(i, j)] += step * (values[(i, j)] - b[(i, j)]);
        }

        let trace_norm;
        if shrink == 0.0 {
            // prox with t = 0 is the identity.
            b = w;
            trace_norm = 0.0;
        } else {
            let decomposition = svd(&w)?;
            let (next, norm) = soft_threshold_with_norm(&decomposition, shrink);
            b = next;
            trace_norm = norm;
        }

        let loss: f64 = omega
            .iter()
            .map(|&(i, j)| {
                let d = values[(i, j)] - b[(i, j)];
                d * d
            })
            .sum();
        let obj = 0.5 * loss + config.lambda * trace_norm;
        if !obj.is_finite() {
            return Err(Error::NonFiniteObjective { iteration });
        }
        let prev = *trace.last().unwrap();
        trace.push(obj);
        iterations_run = iteration;
        if (obj - prev).abs() / prev.max(1e-12) < config.rel_tolerance {
            converged = true;
            break;
        }
    }

    let final_objective = *trace.last().unwrap();
    if config.clip_to_unit {
        b.apply(|v| *v = v.clamp(0.0, 1.0));
    }
    Ok(ImputedMatrix {
        values: b,
        iterations_run,
        final_objective,
        objective_trace: trace,
        converged,
    })
}

/// Render an objective trace as CSV with an `iteration,objective` header.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,objective\n");
    for (k, obj) in trace.iter().enumerate() {
        out.push_str(&format!("{k},{obj:.12e}\n"));
    }
    out
}
