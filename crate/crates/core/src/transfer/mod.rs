//! Ensembles on a tape segment, the single-step and truncation channels, the
//! m-truncated transfer operators of a prefix `#L x` and a suffix `y #R`, and
//! crossing sequences.
//!
//! A prefix segment has head positions `0..=|x|+1`: position 0 holds `#L`, the
//! branch is injected at `|x|` and has finished once it reaches `|x|+1`. A suffix
//! segment mirrors this: position 0 is the exit cell, the branch is injected at
//! 1 (the leftmost cell of `y #R`) and `|y|+1` holds `#R`.

mod crossing;
mod operator;

pub use crossing::{
    accept_profile, crossing_sequence, crossing_sequence_from, initial_crossing, ClassicalBlocks,
    CrossingSequence,
};
pub use operator::{dual_transfer_operator, transfer_operator, TransferOperator};

use crate::machine::{MachineError, TwoQcfaSpec};
use crate::quantum::{tol, trace, ComplexMatrix};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `#L x`, entered from the right.
    LeftPrefix,
    /// `y #R`, entered from the left.
    RightSuffix,
}

/// A machine together with one side of a partitioned input.
#[derive(Debug, Clone)]
pub struct Segment<'a> {
    spec: &'a TwoQcfaSpec,
    side: Side,
    word: String,
    /// Extended-alphabet symbol at each position; `None` on the exit cell.
    cells: Vec<Option<usize>>,
    inject: usize,
    exit: usize,
}

/// The prefix context `(N, x)` with head positions `H_x = {0, ..., |x|+1}`.
pub type PrefixContext<'a> = Segment<'a>;

impl<'a> Segment<'a> {
    pub fn prefix(spec: &'a TwoQcfaSpec, x: &str) -> Result<Self, MachineError> {
        let mut cells = vec![Some(0)];
        cells.extend(spec.encode(x)?.into_iter().map(|i| Some(i + 1)));
        cells.push(None);
        let n = cells.len();
        Ok(Self {
            spec,
            side: Side::LeftPrefix,
            word: x.to_string(),
            cells,
            inject: n - 2,
            exit: n - 1,
        })
    }

    pub fn suffix(spec: &'a TwoQcfaSpec, y: &str) -> Result<Self, MachineError> {
        let mut cells = vec![None];
        cells.extend(spec.encode(y)?.into_iter().map(|i| Some(i + 1)));
        cells.push(Some(spec.extended_len() - 1));
        Ok(Self {
            spec,
            side: Side::RightSuffix,
            word: y.to_string(),
            cells,
            inject: 1,
            exit: 0,
        })
    }

    pub fn spec(&self) -> &'a TwoQcfaSpec {
        self.spec
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    /// `|H|`
    pub fn positions(&self) -> usize {
        self.cells.len()
    }

    pub fn inject_position(&self) -> usize {
        self.inject
    }

    pub fn exit_position(&self) -> usize {
        self.exit
    }

    /// Extended-alphabet symbol under position `h`; `None` on the exit cell.
    pub fn symbol(&self, h: usize) -> Option<usize> {
        self.cells[h]
    }

    /// True on `(c, h)` in `C-hat x H-hat`, where the machine still acts.
    pub fn is_active(&self, c: usize, h: usize) -> bool {
        !self.spec.is_halting(c) && h != self.exit
    }

    pub fn zero_ensemble(&self) -> BlockEnsemble {
        BlockEnsemble::zeros(self.spec.k(), self.spec.d(), self.positions())
    }

    /// `I(Z)`: places classical-diagonal blocks (one per classical state) at the
    /// injection cell.
    pub fn inject(&self, z: &[ComplexMatrix]) -> BlockEnsemble {
        let mut ens = self.zero_ensemble();
        for (c, b) in z.iter().enumerate() {
            ens.add(c, self.inject, b.clone());
        }
        ens
    }

    /// One application of the single-step channel `S`.
    pub fn single_step(&self, ens: &BlockEnsemble) -> Result<BlockEnsemble, MachineError> {
        self.check_shape(ens)?;
        let mut out = self.zero_ensemble();
        for (c, h, block) in ens.iter() {
            if !self.is_active(c, h) {
                out.add(c, h, block.clone());
                continue;
            }
            let sym = self.cells[h].expect("active cells carry a symbol");
            let rule = self.spec.rule(c, sym).expect("validated machine");
            for r in rule.operation.active_results() {
                let t = rule.transitions[r];
                let h2 = (h as isize + t.head_move.offset()) as usize;
                out.add(t.next, h2, rule.operation.partial_map(r, block));
            }
        }
        Ok(out)
    }

    /// `T`: relabels every active block to `c_rej`.
    pub fn truncate(&self, ens: &BlockEnsemble) -> Result<BlockEnsemble, MachineError> {
        self.check_shape(ens)?;
        let mut out = self.zero_ensemble();
        for (c, h, block) in ens.iter() {
            let target = if self.is_active(c, h) { self.spec.c_rej() } else { c };
            out.add(target, h, block.clone());
        }
        Ok(out)
    }

    /// `T ∘ S^m`. Stops early once no active block remains.
    pub fn run(&self, ens: &BlockEnsemble, m: usize) -> Result<BlockEnsemble, MachineError> {
        let mut cur = ens.clone();
        for _ in 0..m {
            if cur.iter().all(|(c, h, _)| !self.is_active(c, h)) {
                break;
            }
            cur = self.single_step(&cur)?;
        }
        self.truncate(&cur)
    }

    /// Completeness of the single-step Kraus family: `sqrt(sum over active (c,h)
    /// of ||sum_{r,j} E† E - 1||_2^2)`. Inactive blocks contribute exactly zero.
    pub fn check_step_channel(&self) -> StepChannelCheck {
        let mut sq = 0.0;
        let mut worst: Option<(f64, usize, usize)> = None;
        for c in 0..self.spec.d() {
            for h in 0..self.positions() {
                if !self.is_active(c, h) {
                    continue;
                }
                let sym = self.cells[h].expect("active cells carry a symbol");
                let residual = self
                    .spec
                    .rule(c, sym)
                    .expect("validated machine")
                    .operation
                    .completeness()
                    .residual;
                sq += residual * residual;
                if worst.is_none_or(|w| residual > w.0) {
                    worst = Some((residual, c, sym));
                }
            }
        }
        let residual = sq.sqrt();
        StepChannelCheck {
            is_channel: residual <= tol::CHAN,
            residual,
            worst_transition: worst.filter(|w| w.0 > tol::CHAN).map(|(_, c, sym)| {
                (
                    self.spec.classical_states()[c].clone(),
                    self.spec.symbol_name(sym),
                )
            }),
        }
    }

    /// The literal Kraus operators of `S` on `C^Q ⊗ C^C ⊗ C^H` (index
    /// `(q * d + c) * |H| + h`). Each inactive block gets one identity, which
    /// induces the same map as `|R||J|` copies scaled by `1/sqrt(|R||J|)`.
    /// Dimension grows as `k d |H|`; meant for small cross-checks.
    pub fn step_kraus_operators(&self) -> Vec<ComplexMatrix> {
        let (k, d, n) = (self.spec.k(), self.spec.d(), self.positions());
        let dim = k * d * n;
        let idx = |q: usize, c: usize, h: usize| (q * d + c) * n + h;
        let nr = self.spec.results().len();
        let mut out = Vec::new();
        for c in 0..d {
            for h in 0..n {
                if self.is_active(c, h) {
                    let rule = self
                        .spec
                        .rule(c, self.cells[h].expect("active"))
                        .expect("validated machine");
                    for r in 0..nr {
                        let t = rule.transitions[r];
                        let h2 = (h as isize + t.head_move.offset()) as usize;
                        for e in rule.operation.operators(r) {
                            let mut big = ComplexMatrix::zeros(dim, dim);
                            for q2 in 0..k {
                                for q in 0..k {
                                    big[(idx(q2, t.next, h2), idx(q, c, h))] = e[(q2, q)];
                                }
                            }
                            out.push(big);
                        }
                    }
                } else {
                    let mut big = ComplexMatrix::zeros(dim, dim);
                    for q in 0..k {
                        big[(idx(q, c, h), idx(q, c, h))] = crate::quantum::c(1.0, 0.0);
                    }
                    out.push(big);
                }
            }
        }
        out
    }

    fn check_shape(&self, ens: &BlockEnsemble) -> Result<(), MachineError> {
        if ens.k != self.spec.k() || ens.d != self.spec.d() || ens.positions != self.positions() {
            return Err(MachineError::InvalidArgument(format!(
                "ensemble shape (k={}, d={}, |H|={}) does not match segment (k={}, d={}, |H|={})",
                ens.k,
                ens.d,
                ens.positions,
                self.spec.k(),
                self.spec.d(),
                self.positions()
            )));
        }
        Ok(())
    }
}

/// Outcome of [`Segment::check_step_channel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepChannelCheck {
    pub is_channel: bool,
    pub residual: f64,
    /// Worst offending `(state, symbol)` when the check fails.
    pub worst_transition: Option<(String, String)>,
}

/// An operator in classical-diagonal block form: one `k x k` block per
/// (classical state, head position). Absent blocks are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEnsemble {
    k: usize,
    d: usize,
    positions: usize,
    blocks: Vec<Option<ComplexMatrix>>,
}

impl BlockEnsemble {
    pub fn zeros(k: usize, d: usize, positions: usize) -> Self {
        Self {
            k,
            d,
            positions,
            blocks: vec![None; d * positions],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn add(&mut self, c: usize, h: usize, m: ComplexMatrix) {
        assert_eq!(m.shape(), (self.k, self.k), "block shape");
        match &mut self.blocks[c * self.positions + h] {
            Some(b) => *b += m,
            slot => *slot = Some(m),
        }
    }

    pub fn block(&self, c: usize, h: usize) -> Option<&ComplexMatrix> {
        self.blocks[c * self.positions + h].as_ref()
    }

    /// Present blocks as `(c, h, block)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &ComplexMatrix)> {
        let n = self.positions;
        self.blocks
            .iter()
            .enumerate()
            .filter_map(move |(i, b)| b.as_ref().map(|b| (i / n, i % n, b)))
    }

    pub fn total_trace(&self) -> f64 {
        self.iter().map(|(_, _, b)| trace(b).re).sum()
    }

    /// Partial trace over the head register: one block per classical state.
    pub fn trace_out_head(&self) -> ClassicalBlocks {
        let mut out = vec![ComplexMatrix::zeros(self.k, self.k); self.d];
        for (c, _, b) in self.iter() {
            out[c] += b;
        }
        out
    }

    /// Dense operator on `C^Q ⊗ C^C ⊗ C^H`, index `(q * d + c) * |H| + h`.
    pub fn to_dense(&self) -> ComplexMatrix {
        let (k, d, n) = (self.k, self.d, self.positions);
        let mut out = ComplexMatrix::zeros(k * d * n, k * d * n);
        for (c, h, b) in self.iter() {
            for q in 0..k {
                for q2 in 0..k {
                    out[((q * d + c) * n + h, (q2 * d + c) * n + h)] = b[(q, q2)];
                }
            }
        }
        out
    }
}
