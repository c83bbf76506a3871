//! Independent oracle for transfer operators: enumerates computation branches
//! one Kraus operator at a time on pure states, straight from the transition
//! table, without the block-ensemble machinery.

use crate::machine::{MachineError, TwoQcfaSpec};
use crate::quantum::{ComplexMatrix, ComplexVector};
use crate::transfer::{ClassicalBlocks, Side};

#[derive(Debug, Clone)]
pub struct BranchOutcome {
    /// Unnormalized output blocks, one per classical state.
    pub blocks: ClassicalBlocks,
    /// Total squared norm of branches dropped below the pruning threshold.
    pub pruned_mass: f64,
    pub branches: usize,
}

struct Walk<'a> {
    spec: &'a TwoQcfaSpec,
    /// Extended-alphabet symbol per cell; `None` marks the exit cell.
    cells: Vec<Option<usize>>,
    m: usize,
    threshold: f64,
    out: BranchOutcome,
}

impl Walk<'_> {
    fn record(&mut self, c: usize, v: &ComplexVector) {
        self.out.blocks[c] += v * v.adjoint();
        self.out.branches += 1;
    }

    fn go(&mut self, c: usize, h: usize, v: ComplexVector, steps: usize) {
        let Some(sym) = self.cells[h] else {
            return self.record(c, &v);
        };
        if self.spec.is_halting(c) {
            return self.record(c, &v);
        }
        if steps == self.m {
            return self.record(self.spec.c_rej(), &v);
        }
        let rule = self.spec.rule(c, sym).expect("running states have rules");
        for (r, t) in rule.transitions.iter().enumerate() {
            for e in rule.operation.operators(r) {
                let w = e * &v;
                let mass = w.norm_squared();
                if mass < self.threshold {
                    self.out.pruned_mass += mass;
                    continue;
                }
                let h2 = (h as isize + t.head_move.offset()) as usize;
                self.go(t.next, h2, w, steps + 1);
            }
        }
    }
}

/// Output of the m-truncated transfer map on `|psi><psi| ⊗ |c><c|`, by
/// exhaustive branch enumeration. Branches whose squared norm falls below
/// `threshold` are dropped and their mass reported.
pub fn enumerate_branches(
    spec: &TwoQcfaSpec,
    side: Side,
    word: &str,
    m: usize,
    c: usize,
    psi: &ComplexVector,
    threshold: f64,
) -> Result<BranchOutcome, MachineError> {
    let body = spec.encode(word)?.into_iter().map(|i| Some(i + 1));
    let (cells, start): (Vec<Option<usize>>, usize) = match side {
        Side::LeftPrefix => {
            let cells: Vec<_> = std::iter::once(Some(0)).chain(body).chain([None]).collect();
            let start = cells.len() - 2;
            (cells, start)
        }
        Side::RightSuffix => {
            let end = Some(spec.extended_len() - 1);
            (std::iter::once(None).chain(body).chain([end]).collect(), 1)
        }
    };
    let k = spec.k();
    let mut walk = Walk {
        spec,
        cells,
        m,
        threshold,
        out: BranchOutcome {
            blocks: vec![ComplexMatrix::zeros(k, k); spec.d()],
            pruned_mass: 0.0,
            branches: 0,
        },
    };
    walk.go(c, start, psi.clone(), 0);
    Ok(walk.out)
}
