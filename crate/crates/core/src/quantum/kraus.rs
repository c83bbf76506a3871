use super::{
    all_finite, frobenius_norm, mismatch, tol, trace, ComplexMatrix, DensityOperator,
    QuantumError, SuperOperator,
};

/// Outcome of a completeness test: `residual = ||sum E†E - 1||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub complete: bool,
    pub residual: f64,
}

/// Checks `sum_i E_i† E_i = 1` for square operators of a common dimension.
pub fn completeness_residual(ops: &[ComplexMatrix]) -> Result<Completeness, QuantumError> {
    let dim = match ops.first() {
        Some(e) => e.nrows(),
        None => return Err(QuantumError::Empty),
    };
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in ops {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(mismatch(
                format!("{dim}x{dim}"),
                format!("{}x{}", e.nrows(), e.ncols()),
            ));
        }
        sum += e.adjoint() * e;
    }
    let residual = frobenius_norm(&(sum - ComplexMatrix::identity(dim, dim)));
    Ok(Completeness {
        complete: residual <= tol::CHAN,
        residual,
    })
}

/// One result branch of a selective quantum operation.
#[derive(Debug, Clone)]
pub struct Branch {
    pub result: usize,
    pub probability: f64,
    /// Normalized post-measurement state; `None` when the probability is below `tol::ZERO`.
    pub state: Option<DensityOperator>,
}

/// A selective quantum operation: Kraus operators `E_{r,j}` grouped by result `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    results: Vec<String>,
    operators: Vec<Vec<ComplexMatrix>>,
    dim: usize,
}

impl KrausFamily {
    /// Builds a validated family. `operators[r]` holds the operators for `results[r]`
    /// and may be empty.
    pub fn new(
        results: Vec<String>,
        operators: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self, QuantumError> {
        let fam = Self::new_unchecked(results, operators)?;
        let c = fam.completeness();
        if !c.complete {
            return Err(QuantumError::Incomplete {
                residual: c.residual,
            });
        }
        Ok(fam)
    }

    /// Checks shapes and finiteness but not completeness. Used to inject faults.
    pub fn new_unchecked(
        results: Vec<String>,
        operators: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self, QuantumError> {
        if results.len() != operators.len() {
            return Err(mismatch(
                format!("{} result groups", results.len()),
                format!("{} groups", operators.len()),
            ));
        }
        let dim = operators
            .iter()
            .flatten()
            .next()
            .map(|e| e.nrows())
            .ok_or(QuantumError::Empty)?;
        for e in operators.iter().flatten() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(mismatch(
                    format!("{dim}x{dim}"),
                    format!("{}x{}", e.nrows(), e.ncols()),
                ));
            }
            if !all_finite(e) {
                return Err(QuantumError::NonFinite);
            }
        }
        Ok(Self {
            results,
            operators,
            dim,
        })
    }

    /// A single unitary attached to `results[result]`.
    pub fn unitary(
        results: Vec<String>,
        result: usize,
        u: ComplexMatrix,
    ) -> Result<Self, QuantumError> {
        let mut operators = vec![Vec::new(); results.len()];
        operators[result].push(u);
        Self::new(results, operators)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn results(&self) -> &[String] {
        &self.results
    }

    pub fn operators(&self, result: usize) -> &[ComplexMatrix] {
        &self.operators[result]
    }

    pub fn all_operators(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.operators.iter().flatten()
    }

    /// Result indices with at least one operator.
    pub fn active_results(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.results.len()).filter(|&r| !self.operators[r].is_empty())
    }

    pub fn completeness(&self) -> Completeness {
        let ops: Vec<ComplexMatrix> = self.all_operators().cloned().collect();
        completeness_residual(&ops).expect("shapes validated at construction")
    }

    /// Every operator multiplied by `factor` (no completeness check).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            results: self.results.clone(),
            operators: self
                .operators
                .iter()
                .map(|g| g.iter().map(|e| e.scale(factor)).collect())
                .collect(),
            dim: self.dim,
        }
    }

    /// `Phi_r(A) = sum_j E_{r,j} A E_{r,j}†` (linear, unnormalized).
    pub fn partial_map(&self, result: usize, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.operators[result] {
            out += e * a * e.adjoint();
        }
        out
    }

    /// Applies the operation to `rho`: one [`Branch`] per result, in result order.
    pub fn apply(&self, rho: &DensityOperator) -> Result<Vec<Branch>, QuantumError> {
        if rho.dim() != self.dim {
            return Err(mismatch(self.dim, rho.dim()));
        }
        let c = self.completeness();
        if !c.complete {
            return Err(QuantumError::Incomplete {
                residual: c.residual,
            });
        }
        let mut out = Vec::with_capacity(self.results.len());
        for r in 0..self.results.len() {
            let image = self.partial_map(r, rho.matrix());
            let p = trace(&image).re;
            let state = if p > tol::ZERO {
                Some(DensityOperator::new(image.unscale(p))?)
            } else {
                None
            };
            out.push(Branch {
                result: r,
                probability: p.max(0.0),
                state,
            });
        }
        Ok(out)
    }

    /// The channel `sum_r Phi_r`.
    pub fn to_superoperator(&self) -> SuperOperator {
        let ops: Vec<ComplexMatrix> = self.all_operators().cloned().collect();
        SuperOperator::from_kraus(&ops).expect("shapes validated at construction")
    }
}
