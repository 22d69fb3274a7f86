//! Dense singular value decomposition with a fixed sign convention.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

const MAX_QR_ITERATIONS: usize = 10_000;

/// Convergence tolerance for the implicit-shift QR iteration. Values at or
/// below machine epsilon can stall the iteration on a spurious fixed point,
/// so this follows the kernel's own default of five ulps.
const QR_EPSILON: f64 = 5.0 * f64::EPSILON;

/// Full SVD of a real N×M matrix with r = min(N, M) factors.
///
/// `u * diag(singular_values) * v.transpose()` reconstructs the input.
/// Columns of `u` (N×r) and `v` (M×r) are orthonormal, singular values are
/// sorted descending and non-negative, and signs are fixed so that the
/// largest-magnitude entry of each left singular vector is positive.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl SvdResult {
    /// Sum of singular values, the trace norm of the decomposed matrix.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }

    /// Rebuild the decomposed matrix.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for (c, &s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(c).scale_mut(s);
        }
        scaled * self.v.transpose()
    }
}

/// Compute the full SVD of `matrix`, deterministically.
pub fn svd(matrix: &DMatrix<f64>) -> Result<SvdResult> {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return Err(Error::InvalidInput(
            "cannot decompose an empty matrix".into(),
        ));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "matrix contains non-finite entries".into(),
        ));
    }

    let decomposition = matrix
        .clone()
        .try_svd(true, true, QR_EPSILON, MAX_QR_ITERATIONS)
        .ok_or(Error::SvdNonConvergence {
            nrows: matrix.nrows(),
            ncols: matrix.ncols(),
            iterations: MAX_QR_ITERATIONS,
        })?;
    let mut u = decomposition.u.expect("u requested");
    let mut v = decomposition.v_t.expect("v_t requested").transpose();
    let sigma: DVector<f64> = decomposition.singular_values;

    // Sort descending; stable on ties so the result is deterministic.
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap().then(a.cmp(&b)));

    let r = sigma.len();
    let mut sorted_u = DMatrix::zeros(u.nrows(), r);
    let mut sorted_v = DMatrix::zeros(v.nrows(), r);
    let mut singular_values = Vec::with_capacity(r);
    for (dst, &src) in order.iter().enumerate() {
        sorted_u.set_column(dst, &u.column(src));
        sorted_v.set_column(dst, &v.column(src));
        singular_values.push(sigma[src]);
    }
    u = sorted_u;
    v = sorted_v;

    // Sign convention: the largest-magnitude entry of each left singular
    // vector (first occurrence on ties) must be positive.
    for c in 0..r {
        let col = u.column(c);
        let mut pivot = 0usize;
        let mut best = 0.0f64;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                pivot = i;
            }
        }
        if u[(pivot, c)] < 0.0 {
            u.column_mut(c).neg_mut();
            v.column_mut(c).neg_mut();
        }
    }

    Ok(SvdResult {
        u,
        singular_values,
        v,
    })
}
