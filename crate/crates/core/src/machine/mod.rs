//! The 2QCFA data model, its JSON description format, the convenient-form
//! normalization, and exact and Monte Carlo simulators.

mod convenient;
pub mod expr;
pub mod fixtures;
mod format;
pub mod random;
mod simulate;

pub use convenient::ConvenientForm;
pub use format::{MachineDocument, TransitionDocument};
pub use simulate::{exact_run, monte_carlo_run, ExactSimulator, RunStatistics};

use crate::quantum::{KrausFamily, QuantumError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("malformed machine document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cannot evaluate `{expr}`: {reason}")]
    Expression { expr: String, reason: String },
    #[error("transition ({state}, {symbol}) is not a valid selective quantum operation: {source}")]
    Transition {
        state: String,
        symbol: String,
        #[source]
        source: QuantumError,
    },
    #[error("transition ({state}, {symbol}) moves the head off the tape on result {result}")]
    EndMarkerMotion {
        state: String,
        symbol: String,
        result: String,
    },
    #[error("missing transition for ({state}, {symbol})")]
    MissingTransition { state: String, symbol: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("symbol `{0}` is not in the input alphabet")]
    UnknownSymbol(char),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A cell of the tape: an end-marker or an input symbol (index into the alphabet).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TapeSymbol {
    LeftEnd,
    Input(usize),
    RightEnd,
}

impl TapeSymbol {
    /// Position in the extended alphabet: `#L = 0`, inputs `1..=|Σ|`, `#R = |Σ| + 1`.
    pub fn index(self, alphabet_len: usize) -> usize {
        match self {
            TapeSymbol::LeftEnd => 0,
            TapeSymbol::Input(i) => i + 1,
            TapeSymbol::RightEnd => alphabet_len + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn offset(self) -> isize {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn from_offset(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Move::Left),
            0 => Some(Move::Stay),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

/// `delta(c, sigma, r) = (next, head_move)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub head_move: Move,
}

/// One `(c, sigma)` entry: the selective quantum operation and the classical
/// transition for each result.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub operation: KrausFamily,
    pub transitions: Vec<Transition>,
}

/// Raw parts of a machine, validated by [`TwoQcfaSpec::new`].
#[derive(Debug, Clone)]
pub struct SpecParts {
    pub quantum_states: Vec<String>,
    pub classical_states: Vec<String>,
    pub alphabet: Vec<char>,
    pub results: Vec<String>,
    /// Indexed by `c * (|Σ| + 2) + sigma`; `None` exactly for halting states.
    pub rules: Vec<Option<Rule>>,
    pub q_start: usize,
    pub c_start: usize,
    pub c_acc: usize,
    pub c_rej: usize,
}

/// A validated 2QCFA `(Q, C, Σ, R, θ, δ, q_start, c_start, c_acc, c_rej)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQcfaSpec {
    quantum_states: Vec<String>,
    classical_states: Vec<String>,
    alphabet: Vec<char>,
    results: Vec<String>,
    rules: Vec<Option<Rule>>,
    q_start: usize,
    c_start: usize,
    c_acc: usize,
    c_rej: usize,
    convenient: bool,
}

impl TwoQcfaSpec {
    pub fn new(parts: SpecParts) -> Result<Self, MachineError> {
        let spec = Self::assemble(parts)?;
        spec.validate()?;
        Ok(spec)
    }

    fn assemble(parts: SpecParts) -> Result<Self, MachineError> {
        let schema = |m: String| Err(MachineError::Schema(m));
        let SpecParts {
            quantum_states,
            classical_states,
            alphabet,
            results,
            rules,
            q_start,
            c_start,
            c_acc,
            c_rej,
        } = parts;
        if quantum_states.is_empty() || classical_states.is_empty() || results.is_empty() {
            return schema("quantum states, classical states and results must be nonempty".into());
        }
        if q_start >= quantum_states.len() {
            return schema("q_start out of range".into());
        }
        if [c_start, c_acc, c_rej].iter().any(|&c| c >= classical_states.len()) {
            return schema("classical state index out of range".into());
        }
        if c_acc == c_rej {
            return schema("c_acc and c_rej must differ".into());
        }
        for names in [&quantum_states, &classical_states, &results] {
            let mut sorted: Vec<&String> = names.iter().collect();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != names.len() {
                return schema("duplicate state or result name".into());
            }
        }
        let mut sorted_alpha = alphabet.clone();
        sorted_alpha.sort();
        sorted_alpha.dedup();
        if sorted_alpha.len() != alphabet.len() {
            return schema("duplicate alphabet symbol".into());
        }
        if rules.len() != classical_states.len() * (alphabet.len() + 2) {
            return schema("rule table has the wrong size".into());
        }
        Ok(Self {
            quantum_states,
            classical_states,
            alphabet,
            results,
            rules,
            q_start,
            c_start,
            c_acc,
            c_rej,
            convenient: false,
        })
    }

    fn validate(&self) -> Result<(), MachineError> {
        let k = self.k();
        for c in 0..self.d() {
            for sym in 0..self.extended_len() {
                let rule = self.rules[c * self.extended_len() + sym].as_ref();
                let (state, symbol) = (self.classical_states[c].clone(), self.symbol_name(sym));
                match (self.is_halting(c), rule) {
                    (true, None) => continue,
                    (true, Some(_)) => {
                        return Err(MachineError::Schema(format!(
                            "halting state {state} has a transition on {symbol}"
                        )))
                    }
                    (false, None) => {
                        return Err(MachineError::MissingTransition { state, symbol })
                    }
                    (false, Some(rule)) => {
                        let op = &rule.operation;
                        if op.dim() != k || op.results() != self.results.as_slice() {
                            return Err(MachineError::Transition {
                                state,
                                symbol,
                                source: crate::quantum::mismatch(
                                    format!("{k}-dim operation over the machine's results"),
                                    format!("{}-dim over {:?}", op.dim(), op.results()),
                                ),
                            });
                        }
                        let comp = op.completeness();
                        if !comp.complete {
                            return Err(MachineError::Transition {
                                state,
                                symbol,
                                source: QuantumError::Incomplete {
                                    residual: comp.residual,
                                },
                            });
                        }
                        if rule.transitions.len() != self.results.len() {
                            return Err(MachineError::Schema(format!(
                                "({state}, {symbol}) needs one classical transition per result"
                            )));
                        }
                        for (r, t) in rule.transitions.iter().enumerate() {
                            if t.next >= self.d() {
                                return Err(MachineError::Schema(format!(
                                    "({state}, {symbol}) targets an unknown state"
                                )));
                            }
                            let off_tape = (sym == 0 && t.head_move == Move::Left)
                                || (sym == self.extended_len() - 1 && t.head_move == Move::Right);
                            if off_tape {
                                return Err(MachineError::EndMarkerMotion {
                                    state,
                                    symbol,
                                    result: self.results[r].clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy with every Kraus operator of `(c, sigma)` scaled by `factor`, bypassing
    /// validation. Intended for fault injection in verification runs.
    pub fn with_scaled_kraus(&self, c: usize, sym: TapeSymbol, factor: f64) -> Self {
        let mut out = self.clone();
        let idx = c * self.extended_len() + sym.index(self.alphabet.len());
        if let Some(rule) = out.rules[idx].as_mut() {
            rule.operation = rule.operation.scaled(factor);
        }
        out
    }

    /// |Q|
    pub fn k(&self) -> usize {
        self.quantum_states.len()
    }

    /// |C|
    pub fn d(&self) -> usize {
        self.classical_states.len()
    }

    /// |Σ| + 2
    pub fn extended_len(&self) -> usize {
        self.alphabet.len() + 2
    }

    pub fn quantum_states(&self) -> &[String] {
        &self.quantum_states
    }

    pub fn classical_states(&self) -> &[String] {
        &self.classical_states
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn results(&self) -> &[String] {
        &self.results
    }

    pub fn q_start(&self) -> usize {
        self.q_start
    }

    pub fn c_start(&self) -> usize {
        self.c_start
    }

    pub fn c_acc(&self) -> usize {
        self.c_acc
    }

    pub fn c_rej(&self) -> usize {
        self.c_rej
    }

    pub fn is_halting(&self, c: usize) -> bool {
        c == self.c_acc || c == self.c_rej
    }

    /// True for machines produced by [`TwoQcfaSpec::to_convenient_form`].
    pub fn is_convenient(&self) -> bool {
        self.convenient
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.classical_states.iter().position(|s| s == name)
    }

    /// Rule for a non-halting state on an extended-alphabet index.
    pub fn rule(&self, c: usize, sym: usize) -> Option<&Rule> {
        self.rules[c * self.extended_len() + sym].as_ref()
    }

    pub fn symbol_name(&self, sym: usize) -> String {
        if sym == 0 {
            "#L".into()
        } else if sym == self.extended_len() - 1 {
            "#R".into()
        } else {
            self.alphabet[sym - 1].to_string()
        }
    }

    /// Alphabet indices of `w`.
    pub fn encode(&self, w: &str) -> Result<Vec<usize>, MachineError> {
        w.chars()
            .map(|ch| {
                self.alphabet
                    .iter()
                    .position(|&a| a == ch)
                    .ok_or(MachineError::UnknownSymbol(ch))
            })
            .collect()
    }

    /// Extended-alphabet indices of the tape `#L w #R`.
    pub fn tape(&self, w: &str) -> Result<Vec<usize>, MachineError> {
        let mut tape = vec![0];
        tape.extend(self.encode(w)?.into_iter().map(|i| i + 1));
        tape.push(self.extended_len() - 1);
        Ok(tape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tape_layout() {
        let spec = fixtures::parity();
        assert_eq!(spec.tape("ab").unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(spec.tape("ac"), Err(MachineError::UnknownSymbol('c'))));
        assert_eq!(spec.symbol_name(0), "#L");
        assert_eq!(spec.symbol_name(3), "#R");
        assert_eq!(spec.symbol_name(2), "b");
    }

    #[test]
    fn end_marker_motion_is_rejected() {
        let doc = fixtures::PARITY_JSON.replace(
            r##"{"state": "even", "symbol": "#L", "kraus": {"0": [[[1]]]}, "delta": {"0": {"next": "even", "move": 1}}}"##,
            r##"{"state": "even", "symbol": "#L", "kraus": {"0": [[[1]]]}, "delta": {"0": {"next": "even", "move": -1}}}"##,
        );
        assert_ne!(doc, fixtures::PARITY_JSON);
        let err = TwoQcfaSpec::from_json_str(&doc).unwrap_err();
        assert!(matches!(err, MachineError::EndMarkerMotion { .. }), "{err}");
    }
}
