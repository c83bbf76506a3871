use super::{BlockEnsemble, ClassicalBlocks, Segment, Side};
use crate::machine::{MachineError, TwoQcfaSpec};
use crate::quantum::{c, ComplexMatrix, ComplexVector, SuperOperator};
use crate::serial;
use rayon::prelude::*;
use serde_json::{json, Value};

/// An m-truncated transfer operator in the classical-diagonal basis
/// `F_{q,q',c} = |q><q'| ⊗ |c><c|`, with basis index `c * k^2 + q + q' * k`.
/// Column `b` of `action` is the image of basis element `b`, expanded in the
/// same basis. Inputs with off-diagonal classical part map to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    side: Side,
    word: String,
    m: usize,
    k: usize,
    d: usize,
    action: ComplexMatrix,
}

fn basis_index(k: usize, q: usize, q2: usize, cl: usize) -> usize {
    cl * k * k + q + q2 * k
}

fn build(seg: &Segment<'_>, m: usize) -> Result<TransferOperator, MachineError> {
    let spec = seg.spec();
    let (k, d) = (spec.k(), spec.d());
    let n = k * k * d;
    let columns: Vec<ComplexVector> = (0..n)
        .into_par_iter()
        .map(|b| {
            let cl = b / (k * k);
            let (q, q2) = ((b % (k * k)) % k, (b % (k * k)) / k);
            let mut z = vec![ComplexMatrix::zeros(k, k); d];
            z[cl][(q, q2)] = c(1.0, 0.0);
            let out = seg.run(&seg.inject(&z), m)?;
            Ok(blocks_to_vector(&out.trace_out_head()))
        })
        .collect::<Result<_, MachineError>>()?;
    let mut action = ComplexMatrix::zeros(n, n);
    for (b, col) in columns.iter().enumerate() {
        action.set_column(b, col);
    }
    Ok(TransferOperator {
        side: seg.side(),
        word: seg.word().to_string(),
        m,
        k,
        d,
        action,
    })
}

fn blocks_to_vector(z: &[ComplexMatrix]) -> ComplexVector {
    let k = z.first().map_or(0, |b| b.nrows());
    let mut v = ComplexVector::zeros(k * k * z.len());
    for (cl, b) in z.iter().enumerate() {
        v.rows_mut(cl * k * k, k * k).copy_from_slice(b.as_slice());
    }
    v
}

/// `N_{x,m} = Tr_H ∘ T_x ∘ S_x^m ∘ I_x` for the prefix `#L x`.
pub fn transfer_operator(
    spec: &TwoQcfaSpec,
    x: &str,
    m: usize,
) -> Result<TransferOperator, MachineError> {
    build(&Segment::prefix(spec, x)?, m)
}

/// The dual operator for the suffix `y #R`, injected at its leftmost cell.
pub fn dual_transfer_operator(
    spec: &TwoQcfaSpec,
    y: &str,
    m: usize,
) -> Result<TransferOperator, MachineError> {
    build(&Segment::suffix(spec, y)?, m)
}

impl TransferOperator {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(k^2 d) x (k^2 d)` matrix in the classical-diagonal basis.
    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    /// `h = k^4 d^2`, the length of the feature vector.
    pub fn feature_len(&self) -> usize {
        self.k.pow(4) * self.d * self.d
    }

    /// Basis labels `|q><q'| (x) |c><c|` in basis order.
    pub fn basis_labels(&self, spec: &TwoQcfaSpec) -> Vec<String> {
        let (k, d) = (self.k, self.d);
        let mut out = vec![String::new(); k * k * d];
        for cl in 0..d {
            for q2 in 0..k {
                for q in 0..k {
                    out[basis_index(k, q, q2, cl)] = format!(
                        "|{}><{}| (x) |{}><{}|",
                        spec.quantum_states()[q],
                        spec.quantum_states()[q2],
                        spec.classical_states()[cl],
                        spec.classical_states()[cl]
                    );
                }
            }
        }
        out
    }

    /// Applies the operator to classical-diagonal blocks.
    pub fn apply_blocks(&self, z: &[ComplexMatrix]) -> ClassicalBlocks {
        assert_eq!(z.len(), self.d, "one block per classical state");
        let v = &self.action * blocks_to_vector(z);
        (0..self.d)
            .map(|cl| {
                ComplexMatrix::from_column_slice(
                    self.k,
                    self.k,
                    v.rows(cl * self.k * self.k, self.k * self.k).as_slice(),
                )
            })
            .collect()
    }

    /// Applies the operator to a block ensemble with a single head position.
    pub fn apply_ensemble(&self, ens: &BlockEnsemble) -> ClassicalBlocks {
        self.apply_blocks(&ens.trace_out_head())
    }

    /// The zero-padded map on `L(C^Q ⊗ C^C)`, index `q * d + c`.
    pub fn to_superoperator(&self) -> SuperOperator {
        let (k, d) = (self.k, self.d);
        let dim = k * d;
        SuperOperator::from_fn(dim, dim, |x| {
            let z: Vec<ComplexMatrix> = (0..d)
                .map(|cl| ComplexMatrix::from_fn(k, k, |q, q2| x[(q * d + cl, q2 * d + cl)]))
                .collect();
            let out = self.apply_blocks(&z);
            let mut y = ComplexMatrix::zeros(dim, dim);
            for (cl, b) in out.iter().enumerate() {
                for q in 0..k {
                    for q2 in 0..k {
                        y[(q * d + cl, q2 * d + cl)] = b[(q, q2)];
                    }
                }
            }
            y
        })
    }

    pub fn choi(&self) -> ComplexMatrix {
        self.to_superoperator().choi()
    }

    /// Entry `<q2 c2| N(F_{q1,q1',c1}) |q2' c2>`.
    pub fn entry(&self, c1: usize, q1: usize, q1p: usize, c2: usize, q2: usize, q2p: usize) -> num_complex::Complex64 {
        let k = self.k;
        self.action[(basis_index(k, q2, q2p, c2), basis_index(k, q1, q1p, c1))]
    }

    /// Real embedding `g` of length `k^4 d^2`: first the `k^2 d^2` real entries
    /// with `q1 = q1'` and `q2 = q2'` in loop order `(c1, q1, c2, q2)`, then the
    /// real and imaginary parts of one representative of each conjugate pair
    /// (`q1' > q1`, or `q1' = q1` and `q2' > q2`) in loop order
    /// `(c1, c2, q1, q1', q2, q2')`.
    pub fn feature_vector(&self) -> Vec<f64> {
        let (k, d) = (self.k, self.d);
        let mut g = Vec::with_capacity(self.feature_len());
        for c1 in 0..d {
            for q1 in 0..k {
                for c2 in 0..d {
                    for q2 in 0..k {
                        g.push(self.entry(c1, q1, q1, c2, q2, q2).re);
                    }
                }
            }
        }
        for c1 in 0..d {
            for c2 in 0..d {
                for q1 in 0..k {
                    for q1p in 0..k {
                        for q2 in 0..k {
                            for q2p in 0..k {
                                if q1p > q1 || (q1p == q1 && q2p > q2) {
                                    let z = self.entry(c1, q1, q1p, c2, q2, q2p);
                                    g.push(z.re);
                                    g.push(z.im);
                                }
                            }
                        }
                    }
                }
            }
        }
        debug_assert_eq!(g.len(), self.feature_len());
        g
    }

    /// Largest magnitude among the entries the classical-diagonal structure
    /// forces to vanish, measured on the zero-padded superoperator: images of
    /// inputs with `c1 != c1'`, and output entries with `c2 != c2'`.
    pub fn structural_zero_violation(&self) -> f64 {
        let (k, d) = (self.k, self.d);
        let dim = k * d;
        let sup = self.to_superoperator();
        let mut worst: f64 = 0.0;
        for col in 0..dim * dim {
            let (i, j) = (col % dim, col / dim);
            let input_diag = i % d == j % d;
            for row in 0..dim * dim {
                let (a, b) = (row % dim, row / dim);
                let output_diag = a % d == b % d;
                if !input_diag || !output_diag {
                    worst = worst.max(sup.action()[(row, col)].norm());
                }
            }
        }
        worst
    }

    pub fn to_json(&self, spec: &TwoQcfaSpec) -> Value {
        json!({
            "side": self.side,
            "word": self.word,
            "m": self.m,
            "k": self.k,
            "d": self.d,
            "basis": self.basis_labels(spec),
            "action": serial::complex_matrix(&self.action),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{fixtures, random};
    use crate::quantum::{frobenius_norm, ket_bra, min_eigenvalue, random as qrandom, trace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn classical(spec: &TwoQcfaSpec, cl: usize) -> ClassicalBlocks {
        let mut z = vec![ComplexMatrix::zeros(spec.k(), spec.k()); spec.d()];
        z[cl] = ket_bra(spec.k(), 0, 0);
        z
    }

    fn mass(z: &[ComplexMatrix]) -> Vec<f64> {
        z.iter().map(|b| trace(b).re).collect()
    }

    #[test]
    fn zero_steps_truncates_everything_running() {
        let p = fixtures::parity().to_convenient_form();
        let op = transfer_operator(&p, "ab", 0).unwrap();
        for cl in 0..p.d() {
            let out = mass(&op.apply_blocks(&classical(&p, cl)));
            let target = if cl == p.c_acc() { p.c_acc() } else { p.c_rej() };
            for (c2, &v) in out.iter().enumerate() {
                assert_eq!(v, if c2 == target { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn parity_prefix_is_deterministic() {
        let p = fixtures::parity().to_convenient_form();
        let op = transfer_operator(&p, "a", 2 * 1 + 4).unwrap();
        let even = p.state_index("even").unwrap();
        let odd = p.state_index("odd").unwrap();
        // entering "#L a" from the right in `even` reads `a` and leaves in `odd`
        let out = mass(&op.apply_blocks(&classical(&p, even)));
        assert_eq!(out[odd], 1.0);
        let start = p.c_start();
        let out = mass(&op.apply_blocks(&classical(&p, start)));
        assert_eq!(out[start], 1.0);
        for cl in 0..p.d() {
            let out = mass(&op.apply_blocks(&classical(&p, cl)));
            assert_eq!(out.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(out.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn dual_of_empty_suffix_reads_only_right_marker() {
        let p = fixtures::parity().to_convenient_form();
        let op = dual_transfer_operator(&p, "", 5).unwrap();
        let even = p.state_index("even").unwrap();
        let odd = p.state_index("odd").unwrap();
        assert_eq!(mass(&op.apply_blocks(&classical(&p, even)))[p.c_acc()], 1.0);
        assert_eq!(mass(&op.apply_blocks(&classical(&p, odd)))[p.c_rej()], 1.0);
        // c_start' turns at #R and leaves to the left in c'
        let turn = p.d() - 1;
        assert_eq!(mass(&op.apply_blocks(&classical(&p, p.c_start())))[turn], 1.0);
    }

    #[test]
    fn parity_suffix_b() {
        let p = fixtures::parity().to_convenient_form();
        let op = dual_transfer_operator(&p, "b", 50).unwrap();
        let even = p.state_index("even").unwrap();
        let odd = p.state_index("odd").unwrap();
        assert_eq!(mass(&op.apply_blocks(&classical(&p, even)))[p.c_acc()], 1.0);
        assert_eq!(mass(&op.apply_blocks(&classical(&p, odd)))[p.c_rej()], 1.0);
    }

    #[test]
    fn channel_laws_and_structural_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut machines: Vec<TwoQcfaSpec> =
            fixtures::all().into_iter().map(|x| x.1.to_convenient_form()).collect();
        for _ in 0..4 {
            machines.push(random::any_machine(&mut rng).to_convenient_form());
        }
        for spec in &machines {
            for m in [0, 3, 11] {
                for op in [
                    transfer_operator(spec, "ab", m).unwrap(),
                    dual_transfer_operator(spec, "ba", m).unwrap(),
                ] {
                    let sup = op.to_superoperator();
                    assert!(min_eigenvalue(&op.choi()) >= -1e-9);
                    for _ in 0..3 {
                        let rho = qrandom::density(spec.k() * spec.d(), &mut rng);
                        assert!((trace(&sup.apply(rho.matrix())).re - 1.0).abs() < 1e-9);
                    }
                    assert!(op.structural_zero_violation() <= 1e-12);
                    let g = op.feature_vector();
                    assert_eq!(g.len(), op.feature_len());
                    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(norm <= (op.feature_len() as f64).sqrt() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn feature_vector_of_parity_is_binary() {
        let p = fixtures::parity().to_convenient_form();
        let op = transfer_operator(&p, "ab", 20).unwrap();
        assert!(op.feature_vector().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn feature_vector_determines_choi_frobenius_norm() {
        // ||J||_2^2 = sum of diagonal-type squares + 2 * sum of |representative|^2
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = random::machine(&random::MachineShape::default(), &mut rng).to_convenient_form();
        let op = transfer_operator(&spec, "aba", 7).unwrap();
        let g = op.feature_vector();
        let split = op.k * op.k * op.d * op.d;
        let lhs = frobenius_norm(&op.choi()).powi(2);
        let rhs = g[..split].iter().map(|v| v * v).sum::<f64>()
            + 2.0 * g[split..].iter().map(|v| v * v).sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn json_export_has_labels() {
        let r = fixtures::rotation().to_convenient_form();
        let op = transfer_operator(&r, "a", 3).unwrap();
        let v = op.to_json(&r);
        assert_eq!(v["basis"].as_array().unwrap().len(), 4 * r.d());
        assert_eq!(v["basis"][1], "|q1><q0| (x) |s_sweep><s_sweep|");
    }
}
