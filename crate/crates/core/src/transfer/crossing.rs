use super::{dual_transfer_operator, transfer_operator, TransferOperator};
use crate::machine::{MachineError, TwoQcfaSpec};
use crate::quantum::{ket_bra, trace, trace_norm, ComplexMatrix};
use crate::serial;
use serde_json::{json, Value};

/// A classical-diagonal operator on `C^Q ⊗ C^C`: one `k x k` block per classical state.
pub type ClassicalBlocks = Vec<ComplexMatrix>;

/// The m-truncated crossing sequence `Z_1, Z_2, ...` at the boundary between
/// `#L x` and `y #R`.
#[derive(Debug, Clone)]
pub struct CrossingSequence {
    pub x: String,
    pub y: String,
    pub m: usize,
    pub entries: Vec<ClassicalBlocks>,
}

impl CrossingSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Z_i` (1-based) as a dense `kd x kd` matrix with index `q * d + c`.
    pub fn dense(&self, i: usize) -> ComplexMatrix {
        blocks_to_dense(&self.entries[i - 1])
    }

    /// `||Z_i - Z'_i||_1` for each `i`, computed blockwise.
    pub fn distances(&self, other: &CrossingSequence) -> Vec<f64> {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| trace_norm(&(x - y))).sum())
            .collect()
    }

    pub fn to_json(&self, spec: &TwoQcfaSpec) -> Value {
        json!({
            "x": self.x,
            "y": self.y,
            "m": self.m,
            "classical_states": spec.classical_states(),
            "profile": accept_profile(self),
            "entries": self.entries.iter().map(|z| z.iter().map(serial::complex_matrix).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn blocks_to_dense(z: &[ComplexMatrix]) -> ComplexMatrix {
    let d = z.len();
    let k = z.first().map_or(0, |b| b.nrows());
    let mut out = ComplexMatrix::zeros(k * d, k * d);
    for (cl, b) in z.iter().enumerate() {
        for q in 0..k {
            for q2 in 0..k {
                out[(q * d + cl, q2 * d + cl)] = b[(q, q2)];
            }
        }
    }
    out
}

/// `Z_1 = |q_start><q_start| ⊗ |c_start><c_start|`.
pub fn initial_crossing(spec: &TwoQcfaSpec) -> ClassicalBlocks {
    let k = spec.k();
    let mut z = vec![ComplexMatrix::zeros(k, k); spec.d()];
    z[spec.c_start()] = ket_bra(k, spec.q_start(), spec.q_start());
    z
}

/// Crossing sequence from prebuilt operators: `Z_i = N_y(Z_{i-1})` for even
/// `i`, `N_x(Z_{i-1})` for odd `i > 1`.
pub fn crossing_sequence_from(
    spec: &TwoQcfaSpec,
    nx: &TransferOperator,
    ny: &TransferOperator,
    length: usize,
) -> CrossingSequence {
    let mut entries = Vec::with_capacity(length);
    if length > 0 {
        entries.push(initial_crossing(spec));
    }
    for i in 2..=length {
        let prev = entries.last().expect("nonempty");
        let next = if i % 2 == 0 {
            ny.apply_blocks(prev)
        } else {
            nx.apply_blocks(prev)
        };
        entries.push(next);
    }
    CrossingSequence {
        x: nx.word().to_string(),
        y: ny.word().to_string(),
        m: nx.m(),
        entries,
    }
}

/// The crossing sequence of `spec` on the partitioned input `xy`.
///
/// Only meaningful for machines in convenient form, whose first crossing is
/// the pure configuration `Z_1`; other machines get the same recursion.
pub fn crossing_sequence(
    spec: &TwoQcfaSpec,
    x: &str,
    y: &str,
    m: usize,
    length: usize,
) -> Result<CrossingSequence, MachineError> {
    if length == 0 {
        return Err(MachineError::InvalidArgument("length must be at least 1".into()));
    }
    let nx = transfer_operator(spec, x, m)?;
    let ny = dual_transfer_operator(spec, y, m)?;
    Ok(crossing_sequence_from(spec, &nx, &ny, length))
}

/// Classical-state marginals `p_{m,s}(c) = Tr(block_c(Z_s))` for each `s`.
pub fn accept_profile(cs: &CrossingSequence) -> Vec<Vec<f64>> {
    cs.entries
        .iter()
        .map(|z| z.iter().map(|b| trace(b).re).collect())
        .collect()
}
