use super::{
    c, mismatch, trace_norm, unvectorize, vectorize, ComplexMatrix, ComplexVector, QuantumError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A linear map `L(C^in_dim) -> L(C^out_dim)` stored as its action on
/// column-stacked vectorizations: `vec(Phi(X)) = action * vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    in_dim: usize,
    out_dim: usize,
    action: ComplexMatrix,
}

impl SuperOperator {
    pub fn new(in_dim: usize, out_dim: usize, action: ComplexMatrix) -> Result<Self, QuantumError> {
        if action.nrows() != out_dim * out_dim || action.ncols() != in_dim * in_dim {
            return Err(mismatch(
                format!("{}x{}", out_dim * out_dim, in_dim * in_dim),
                format!("{}x{}", action.nrows(), action.ncols()),
            ));
        }
        Ok(Self {
            in_dim,
            out_dim,
            action,
        })
    }

    /// `X -> sum_i E_i X E_i†`; the action is `sum_i conj(E_i) ⊗ E_i`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self, QuantumError> {
        let first = ops.first().ok_or(QuantumError::Empty)?;
        let (out_dim, in_dim) = (first.nrows(), first.ncols());
        let mut action = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for e in ops {
            if e.nrows() != out_dim || e.ncols() != in_dim {
                return Err(mismatch(
                    format!("{out_dim}x{in_dim}"),
                    format!("{}x{}", e.nrows(), e.ncols()),
                ));
            }
            action += e.conjugate().kronecker(e);
        }
        Self::new(in_dim, out_dim, action)
    }

    /// Materializes an arbitrary linear map by evaluating it on matrix units.
    pub fn from_fn(
        in_dim: usize,
        out_dim: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Self {
        let mut action = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for j in 0..in_dim {
            for i in 0..in_dim {
                let image = f(&super::ket_bra(in_dim, i, j));
                debug_assert_eq!(image.shape(), (out_dim, out_dim));
                action
                    .column_mut(i + j * in_dim)
                    .copy_from_slice(image.as_slice());
            }
        }
        Self {
            in_dim,
            out_dim,
            action,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            action: ComplexMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `X -> Tr(X) 1/d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        Self::from_fn(dim, dim, |x| {
            let t = super::trace(x);
            ComplexMatrix::identity(dim, dim).map(|z| z * t / c(dim as f64, 0.0))
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.in_dim, self.in_dim), "input shape");
        unvectorize(&(&self.action * vectorize(x)), self.out_dim, self.out_dim)
    }

    /// Adjoint map with respect to the Hilbert-Schmidt inner product.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(y.shape(), (self.out_dim, self.out_dim), "input shape");
        let v: ComplexVector = self.action.adjoint() * vectorize(y);
        unvectorize(&v, self.in_dim, self.in_dim)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SuperOperator) -> Result<SuperOperator, QuantumError> {
        if other.in_dim != self.out_dim {
            return Err(mismatch(self.out_dim, other.in_dim));
        }
        Self::new(self.in_dim, other.out_dim, &other.action * &self.action)
    }

    pub fn difference(&self, other: &SuperOperator) -> Result<SuperOperator, QuantumError> {
        self.check_same_shape(other)?;
        Self::new(self.in_dim, self.out_dim, &self.action - &other.action)
    }

    fn check_same_shape(&self, other: &SuperOperator) -> Result<(), QuantumError> {
        if self.in_dim != other.in_dim || self.out_dim != other.out_dim {
            return Err(mismatch(
                format!("{}->{}", self.in_dim, self.out_dim),
                format!("{}->{}", other.in_dim, other.out_dim),
            ));
        }
        Ok(())
    }

    /// Choi matrix `J = sum_{ij} |i><j| ⊗ Phi(|i><j|)`, input factor first.
    pub fn choi(&self) -> ComplexMatrix {
        let (n, m) = (self.in_dim, self.out_dim);
        ComplexMatrix::from_fn(n * m, n * m, |row, col| {
            let (i, a) = (row / m, row % m);
            let (j, b) = (col / m, col % m);
            self.action[(a + b * m, i + j * n)]
        })
    }

    /// Largest `|Tr(Phi(X)) - Tr(X)|` over the matrix units.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.in_dim {
            for i in 0..self.in_dim {
                let col = self.action.column(i + j * self.in_dim);
                let t: num_complex::Complex64 =
                    (0..self.out_dim).map(|a| col[a + a * self.out_dim]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t - c(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// `||J(Phi - Psi)||_1`, an upper bound on the induced trace norm of `Phi - Psi`.
pub fn choi_trace_norm_bound(phi: &SuperOperator, psi: &SuperOperator) -> Result<f64, QuantumError> {
    Ok(trace_norm(&phi.difference(psi)?.choi()))
}

/// A lower estimate of the induced trace norm, with the rank-one input that achieves it.
#[derive(Debug, Clone)]
pub struct InducedNormEstimate {
    pub value: f64,
    pub u: ComplexVector,
    pub v: ComplexVector,
}

fn top_singular_pair(m: &ComplexMatrix) -> (f64, ComplexVector, ComplexVector) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &s)| if s > best.1 { (i, s) } else { best });
    let left = u.column(idx).into_owned();
    let right = v_t.row(idx).adjoint();
    (s, left, right)
}

fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested V^T")
}

/// Multistart alternating ascent for `max ||(Phi - Psi)(u v†)||_1` over unit `u`, `v`.
///
/// Each round fixes the polar unitary `W` of the current image and then picks the
/// top singular pair of the adjoint image `(Phi - Psi)*(W)`; the objective never
/// decreases. Deterministic given `seed`.
pub fn induced_trace_norm_estimate(
    phi: &SuperOperator,
    psi: &SuperOperator,
    restarts: usize,
    seed: u64,
) -> Result<InducedNormEstimate, QuantumError> {
    let delta = phi.difference(psi)?;
    let n = delta.in_dim;
    let eval = |u: &ComplexVector, v: &ComplexVector| trace_norm(&delta.apply(&(u * v.adjoint())));
    let mut best: Option<InducedNormEstimate> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let mut u = super::random::unit_vector(n, &mut rng);
        let mut v = super::random::unit_vector(n, &mut rng);
        let mut value = eval(&u, &v);
        for _ in 0..500 {
            let image = delta.apply(&(&u * v.adjoint()));
            if value <= 0.0 {
                break;
            }
            let w = polar_unitary(&image);
            let (_, nu, nv) = top_singular_pair(&delta.apply_adjoint(&w));
            let next = eval(&nu, &nv);
            if next <= value + 1e-14 {
                if next > value {
                    (u, v, value) = (nu, nv, next);
                }
                break;
            }
            (u, v, value) = (nu, nv, next);
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(InducedNormEstimate { value, u, v });
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{frobenius_norm, hermitian_eigenvalues, ket_bra, random, trace};
    use rand::SeedableRng;

    fn random_channel(dim: usize, ops: usize, seed: u64) -> SuperOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SuperOperator::from_kraus(&random::kraus_blocks(dim, ops, &mut rng)).unwrap()
    }

    fn unitary_channel(u: &ComplexMatrix) -> SuperOperator {
        SuperOperator::from_kraus(std::slice::from_ref(u)).unwrap()
    }

    #[test]
    fn kraus_action_matches_direct_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ops = random::kraus_blocks(3, 2, &mut rng);
        let phi = SuperOperator::from_kraus(&ops).unwrap();
        let x = random::ginibre(3, 3, &mut rng);
        let direct = ops
            .iter()
            .fold(ComplexMatrix::zeros(3, 3), |acc, e| acc + e * &x * e.adjoint());
        assert!(frobenius_norm(&(phi.apply(&x) - direct)) < 1e-12);
        assert!(phi.trace_preservation_defect() < 1e-12);
    }

    #[test]
    fn choi_of_identity_channel() {
        let j = SuperOperator::identity(2).choi();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for k in 0..2 {
                expected += ket_bra(2, i, k).kronecker(&ket_bra(2, i, k));
            }
        }
        assert_eq!(j, expected);
        assert!((trace(&j).re - 2.0).abs() < 1e-15);
        assert!(hermitian_eigenvalues(&j)[0] > -1e-12);
    }

    #[test]
    fn choi_of_depolarizing_channel_is_product() {
        let d = 3;
        let j = SuperOperator::completely_depolarizing(d).choi();
        let expected = ComplexMatrix::identity(d * d, d * d).unscale(d as f64);
        assert!(frobenius_norm(&(j.clone() - expected)) < 1e-14);
        assert!((trace(&j).re - d as f64).abs() < 1e-12);
    }

    #[test]
    fn choi_of_random_channel_is_psd() {
        for seed in 0..5 {
            let j = random_channel(3, 3, seed).choi();
            assert!(hermitian_eigenvalues(&j)[0] >= -1e-9);
            assert!((trace(&j).re - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn choi_bound_identity_vs_depolarizing() {
        // J(id) - J(dep) = |Omega><Omega| - 1/2 with |Omega> = |00> + |11>:
        // eigenvalues 2 - 1/2 = 3/2 and -1/2 (three times), trace norm 3.
        let bound = choi_trace_norm_bound(
            &SuperOperator::identity(2),
            &SuperOperator::completely_depolarizing(2),
        )
        .unwrap();
        assert!((bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equal_channels_have_zero_distance() {
        let phi = random_channel(2, 2, 9);
        assert!(choi_trace_norm_bound(&phi, &phi).unwrap() < 1e-12);
        assert_eq!(induced_trace_norm_estimate(&phi, &phi, 3, 1).unwrap().value, 0.0);
    }

    #[test]
    fn estimate_reports_trace_norm_of_its_own_input() {
        let phi = random_channel(3, 2, 21);
        let psi = random_channel(3, 2, 22);
        let est = induced_trace_norm_estimate(&phi, &psi, 4, 3).unwrap();
        let delta = phi.difference(&psi).unwrap();
        let image = delta.apply(&(&est.u * est.v.adjoint()));
        assert_eq!(est.value, trace_norm(&image));
        assert!((est.u.norm() - 1.0).abs() < 1e-12 && (est.v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_below_choi_bound_on_random_pairs() {
        for seed in 0..10 {
            let phi = random_channel(3, 2, 100 + seed);
            let psi = random_channel(3, 3, 200 + seed);
            let est = induced_trace_norm_estimate(&phi, &psi, 5, seed).unwrap();
            let bound = choi_trace_norm_bound(&phi, &psi).unwrap();
            assert!(est.value <= bound + 1e-9, "{} > {}", est.value, bound);
            assert!(est.value > 0.0);
        }
    }

    fn bloch(theta: f64, phi: f64) -> ComplexVector {
        ComplexVector::from_vec(vec![
            c((theta / 2.0).cos(), 0.0),
            c(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
        ])
    }

    #[test]
    fn estimate_matches_bloch_grid_search_for_unitary_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let u = random::unitary(2, &mut rng);
        let v = random::unitary(2, &mut rng);
        let (pu, pv) = (unitary_channel(&u), unitary_channel(&v));
        let delta = pu.difference(&pv).unwrap();
        let steps = 24;
        let mut grid_max: f64 = 0.0;
        for a in 0..=steps {
            for b in 0..steps {
                let x = bloch(std::f64::consts::PI * a as f64 / steps as f64, 2.0 * std::f64::consts::PI * b as f64 / steps as f64);
                for cc in 0..=steps {
                    for d in 0..steps {
                        let y = bloch(std::f64::consts::PI * cc as f64 / steps as f64, 2.0 * std::f64::consts::PI * d as f64 / steps as f64);
                        grid_max = grid_max.max(trace_norm(&delta.apply(&(&x * y.adjoint()))));
                    }
                }
            }
        }
        let est = induced_trace_norm_estimate(&pu, &pv, 8, 4).unwrap().value;
        // the estimate can only beat a finite grid, and a fine grid comes close
        assert!(est >= grid_max - 1e-6, "{est} < {grid_max}");
        assert!(est - grid_max < 2e-2, "{est} vs {grid_max}");
    }
}
