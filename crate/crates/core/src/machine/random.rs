//! Seeded random machines. Every generated machine is valid: the Kraus operators
//! of each transition are blocks cut from one random isometry.

use super::{Move, Rule, SpecParts, Transition, TwoQcfaSpec};
use crate::quantum::{random as qrandom, KrausFamily};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Size parameters. `classical` counts all classical states, including `acc` and `rej`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineShape {
    pub quantum: usize,
    pub classical: usize,
    pub results: usize,
    /// Kraus operators per result (upper bound; each transition draws `1..=branching`).
    pub branching: usize,
    pub alphabet: Vec<char>,
}

impl Default for MachineShape {
    fn default() -> Self {
        Self {
            quantum: 2,
            classical: 4,
            results: 2,
            branching: 2,
            alphabet: vec!['a', 'b'],
        }
    }
}

impl MachineShape {
    /// `k in {1,2}`, `d in {3..=6}`, `|R| in {1,2}` over `{a, b}`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            quantum: rng.random_range(1..=2),
            classical: rng.random_range(3..=6),
            results: rng.random_range(1..=2),
            branching: 2,
            alphabet: vec!['a', 'b'],
        }
    }
}

/// Random machine with start state `0`, accept state `d-2` and reject state `d-1`.
pub fn machine<R: Rng + ?Sized>(shape: &MachineShape, rng: &mut R) -> TwoQcfaSpec {
    let (k, d, nr) = (shape.quantum, shape.classical, shape.results);
    assert!(k >= 1 && d >= 3 && nr >= 1 && shape.branching >= 1, "degenerate shape");
    let ext = shape.alphabet.len() + 2;
    let results: Vec<String> = (0..nr).map(|r| r.to_string()).collect();
    let mut rules = vec![None; d * ext];
    for c in 0..d - 2 {
        for sym in 0..ext {
            let per_result: Vec<usize> = (0..nr).map(|_| rng.random_range(1..=shape.branching)).collect();
            let mut blocks = qrandom::kraus_blocks(k, per_result.iter().sum(), rng).into_iter();
            let operators: Vec<_> = per_result
                .iter()
                .map(|&n| blocks.by_ref().take(n).collect::<Vec<_>>())
                .collect();
            let transitions = (0..nr)
                .map(|_| {
                    let moves: &[Move] = if sym == 0 {
                        &[Move::Stay, Move::Right]
                    } else if sym == ext - 1 {
                        &[Move::Left, Move::Stay]
                    } else {
                        &[Move::Left, Move::Stay, Move::Right]
                    };
                    Transition {
                        next: rng.random_range(0..d),
                        head_move: moves[rng.random_range(0..moves.len())],
                    }
                })
                .collect();
            rules[c * ext + sym] = Some(Rule {
                operation: KrausFamily::new(results.clone(), operators)
                    .expect("isometry blocks are complete"),
                transitions,
            });
        }
    }
    TwoQcfaSpec::new(SpecParts {
        quantum_states: (0..k).map(|q| format!("q{q}")).collect(),
        classical_states: (0..d)
            .map(|c| match c {
                _ if c == d - 2 => "acc".to_string(),
                _ if c == d - 1 => "rej".to_string(),
                _ => format!("c{c}"),
            })
            .collect(),
        alphabet: shape.alphabet.clone(),
        results,
        rules,
        q_start: 0,
        c_start: 0,
        c_acc: d - 2,
        c_rej: d - 1,
    })
    .expect("random machine is valid by construction")
}

/// Machine with a freshly sampled shape.
pub fn any_machine<R: Rng + ?Sized>(rng: &mut R) -> TwoQcfaSpec {
    let shape = MachineShape::sample(rng);
    machine(&shape, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_machines_round_trip_and_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = any_machine(&mut a);
            assert_eq!(m, any_machine(&mut b));
            assert!((1..=2).contains(&m.k()) && (3..=6).contains(&m.d()));
            let again = TwoQcfaSpec::from_json_str(&m.to_json_string()).unwrap();
            assert_eq!(again, m);
        }
    }
}
