//! Dense complex linear algebra and quantum-channel primitives.
//!
//! Operators are `nalgebra` dense matrices over `Complex64`. Superoperators act
//! on column-stacked vectorizations: `vec(X)[i + j * rows] = X[(i, j)]`, which
//! is exactly the column-major storage order of `DMatrix`. The same convention
//! is used everywhere a superoperator is materialized, including Choi matrices.

mod density;
mod kraus;
pub mod random;
mod superop;

pub use density::DensityOperator;
pub use kraus::{completeness_residual, Branch, Completeness, KrausFamily};
pub use superop::{
    choi_trace_norm_bound, induced_trace_norm_estimate, InducedNormEstimate, SuperOperator,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix (elements of L(V)).
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Hermiticity tolerance for density operators.
    pub const HERM: f64 = 1e-9;
    /// Allowed negative eigenvalue for positive semidefinite checks.
    pub const PSD: f64 = 1e-9;
    /// Allowed deviation of a trace from its target.
    pub const TRACE: f64 = 1e-9;
    /// Completeness tolerance for Kraus families.
    pub const CHAN: f64 = 1e-9;
    /// Probabilities below this are treated as zero.
    pub const ZERO: f64 = 1e-12;
    /// Tolerance for optimization-based norm estimates.
    pub const NORM: f64 = 1e-6;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("Kraus family is not complete (residual {residual:.3e})")]
    Incomplete { residual: f64 },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace {trace:.12} differs from 1")]
    BadTrace { trace: f64 },
    #[error("Schatten norm order must be positive")]
    InvalidNormOrder,
    #[error("empty Kraus family")]
    Empty,
}

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> QuantumError {
    QuantumError::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `|i><j|` in dimension `dim`.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn diag(entries: &[f64]) -> ComplexMatrix {
    let n = entries.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(entries[i], 0.0) } else { c(0.0, 0.0) })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-stacked vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation of `m` from Hermiticity.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Zeroes entries below `1e-30` of the largest magnitude. The dense solvers
/// return NaN when squares of tiny entries underflow; the perturbation is far
/// below every tolerance.
fn flush_tiny(m: &ComplexMatrix) -> ComplexMatrix {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = scale * 1e-30;
    m.map(|z| if z.norm() < floor { Complex64::new(0.0, 0.0) } else { z })
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
///
/// Rows that vanish identically each contribute an eigenvalue 0 and are split
/// off first; the dense solver can return NaN on matrices with many of them.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = flush_tiny(&hermitize(m));
    let support: Vec<usize> = (0..h.nrows())
        .filter(|&i| h.row(i).iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .collect();
    let mut ev = vec![0.0; h.nrows() - support.len()];
    if !support.is_empty() {
        let sub = h.select_rows(&support).select_columns(&support);
        ev.extend(sub.symmetric_eigenvalues().iter().copied());
    }
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    flush_tiny(m).singular_values().iter().copied().collect()
}

/// Schatten p-norm `(sum_i s_i^p)^(1/p)` over singular values; `p = 1` is the trace norm.
pub fn schatten_norm(m: &ComplexMatrix, p: u32) -> Result<f64, QuantumError> {
    if p == 0 {
        return Err(QuantumError::InvalidNormOrder);
    }
    if !all_finite(m) {
        return Err(QuantumError::NonFinite);
    }
    let sv = singular_values(m);
    Ok(match p {
        1 => sv.iter().sum(),
        2 => sv.iter().map(|s| s * s).sum::<f64>().sqrt(),
        _ => {
            let p = p as f64;
            sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    })
}

/// Trace norm of a finite matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Frobenius (Schatten 2) norm, computed from entries.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Partial trace of `z` over one tensor factor.
///
/// With `drop_last = true`, `z` acts on `keep ⊗ drop` (row index `a * d_drop + b`);
/// otherwise on `drop ⊗ keep` (row index `b * d_keep + a`).
pub fn partial_trace(
    z: &ComplexMatrix,
    dims: (usize, usize),
    drop_last: bool,
) -> Result<ComplexMatrix, QuantumError> {
    let (d_keep, d_drop) = dims;
    let n = d_keep * d_drop;
    if z.nrows() != n || z.ncols() != n {
        return Err(mismatch(format!("{n}x{n}"), format!("{}x{}", z.nrows(), z.ncols())));
    }
    let idx = |a: usize, b: usize| {
        if drop_last {
            a * d_drop + b
        } else {
            b * d_keep + a
        }
    };
    Ok(ComplexMatrix::from_fn(d_keep, d_keep, |a, a2| {
        (0..d_drop).map(|b| z[(idx(a, b), idx(a2, b))]).sum()
    }))
}
