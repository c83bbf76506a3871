use super::{
    all_finite, c, hermiticity_deviation, hermitize, ket_bra, min_eigenvalue, tol, trace,
    trace_norm, ComplexMatrix, ComplexVector, QuantumError,
};

/// A positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace; stores the Hermitized matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        if !matrix.is_square() {
            return Err(QuantumError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if !all_finite(&matrix) {
            return Err(QuantumError::NonFinite);
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > tol::HERM {
            return Err(QuantumError::NotHermitian { deviation });
        }
        let matrix = hermitize(&matrix);
        let t = trace(&matrix).re;
        if (t - 1.0).abs() > tol::TRACE {
            return Err(QuantumError::BadTrace { trace: t });
        }
        let min_eigenvalue = min_eigenvalue(&matrix);
        if min_eigenvalue < -tol::PSD {
            return Err(QuantumError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// `|i><i|`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        Self {
            matrix: ket_bra(dim, i, i),
        }
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn pure(psi: &ComplexVector) -> Result<Self, QuantumError> {
        let n = psi.norm();
        if (n - 1.0).abs() > tol::TRACE {
            return Err(QuantumError::BadTrace { trace: n * n });
        }
        Self::new(psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim).map(|z| z / c(dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        trace_norm(&(&self.matrix - &other.matrix))
    }
}

impl TryFrom<ComplexMatrix> for DensityOperator {
    type Error = QuantumError;

    fn try_from(m: ComplexMatrix) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

impl From<DensityOperator> for ComplexMatrix {
    fn from(d: DensityOperator) -> Self {
        d.matrix
    }
}
