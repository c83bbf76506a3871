//! JSON machine descriptions.
//!
//! Matrix entries are a number, an expression string, or `[re, im]` whose parts
//! are numbers or expression strings. Expressions may use the names declared in
//! the optional `parameters` object.

use super::{expr, MachineError, Move, Rule, SpecParts, Transition, TwoQcfaSpec};
use crate::quantum::{c, ComplexMatrix, KrausFamily};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDocument {
    pub quantum_states: Vec<String>,
    pub classical_states: Vec<String>,
    pub alphabet: Vec<String>,
    pub results: Vec<String>,
    pub q_start: String,
    pub c_start: String,
    pub c_acc: String,
    pub c_rej: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, Value>,
    pub transitions: Vec<TransitionDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub state: String,
    pub symbol: String,
    /// result -> list of matrices (row-major lists of entries)
    pub kraus: BTreeMap<String, Vec<Vec<Vec<Value>>>>,
    /// result -> classical transition; may be omitted for results without operators
    #[serde(default)]
    pub delta: BTreeMap<String, DeltaDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaDocument {
    pub next: String,
    #[serde(rename = "move")]
    pub head_move: i64,
}

fn schema<T>(msg: impl Into<String>) -> Result<T, MachineError> {
    Err(MachineError::Schema(msg.into()))
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize, MachineError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| MachineError::Schema(format!("unknown {what} `{name}`")))
}

fn real(v: &Value, params: &BTreeMap<String, f64>) -> Result<f64, MachineError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| MachineError::Schema(format!("number {n} out of range"))),
        Value::String(s) => expr::evaluate(s, params).map_err(|reason| MachineError::Expression {
            expr: s.clone(),
            reason,
        }),
        other => schema(format!("expected a number or expression, found {other}")),
    }
}

fn entry(v: &Value, params: &BTreeMap<String, f64>) -> Result<num_complex::Complex64, MachineError> {
    match v {
        Value::Array(parts) if parts.len() == 2 => {
            Ok(c(real(&parts[0], params)?, real(&parts[1], params)?))
        }
        Value::Array(_) => schema("complex entries must be [re, im]"),
        _ => Ok(c(real(v, params)?, 0.0)),
    }
}

fn matrix(rows: &[Vec<Value>], params: &BTreeMap<String, f64>) -> Result<ComplexMatrix, MachineError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return schema("Kraus matrices must be square and nonempty");
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = entry(v, params)?;
        }
    }
    Ok(m)
}

fn symbol_index(alphabet: &[char], s: &str) -> Result<usize, MachineError> {
    match s {
        "#L" => Ok(0),
        "#R" => Ok(alphabet.len() + 1),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(ch), None) => alphabet
                    .iter()
                    .position(|&a| a == ch)
                    .map(|i| i + 1)
                    .ok_or(MachineError::UnknownSymbol(ch)),
                _ => schema(format!("symbol `{s}` is not a single character")),
            }
        }
    }
}

impl MachineDocument {
    /// Resolves parameters: defaults from the document, replaced by `overrides`.
    fn parameters(&self, overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, MachineError> {
        let mut out = BTreeMap::new();
        for (name, v) in &self.parameters {
            let value = match overrides.get(name) {
                Some(&x) => x,
                None => real(v, &BTreeMap::new())?,
            };
            out.insert(name.clone(), value);
        }
        for name in overrides.keys() {
            if !out.contains_key(name) {
                return schema(format!("override for undeclared parameter `{name}`"));
            }
        }
        Ok(out)
    }

    /// Builds and validates the machine.
    pub fn build(&self, overrides: &BTreeMap<String, f64>) -> Result<TwoQcfaSpec, MachineError> {
        let params = self.parameters(overrides)?;
        let mut alphabet = Vec::with_capacity(self.alphabet.len());
        for s in &self.alphabet {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(ch), None) if s != "#" => alphabet.push(ch),
                _ => return schema(format!("alphabet symbol `{s}` must be one character")),
            }
        }
        let ext = alphabet.len() + 2;
        let d = self.classical_states.len();
        let mut rules: Vec<Option<Rule>> = vec![None; d * ext];
        for t in &self.transitions {
            let cs = index_of(&self.classical_states, &t.state, "classical state")?;
            let sym = symbol_index(&alphabet, &t.symbol)?;
            let slot = &mut rules[cs * ext + sym];
            if slot.is_some() {
                return schema(format!("duplicate transition ({}, {})", t.state, t.symbol));
            }
            let mut operators = vec![Vec::new(); self.results.len()];
            for (r, mats) in &t.kraus {
                let ri = index_of(&self.results, r, "result")?;
                for m in mats {
                    operators[ri].push(matrix(m, &params)?);
                }
            }
            let mut transitions = vec![
                Transition {
                    next: cs,
                    head_move: Move::Stay,
                };
                self.results.len()
            ];
            for (r, dd) in &t.delta {
                let ri = index_of(&self.results, r, "result")?;
                let head_move = Move::from_offset(dd.head_move).ok_or_else(|| {
                    MachineError::Schema(format!("move {} is not -1, 0 or 1", dd.head_move))
                })?;
                transitions[ri] = Transition {
                    next: index_of(&self.classical_states, &dd.next, "classical state")?,
                    head_move,
                };
            }
            for (ri, ops) in operators.iter().enumerate() {
                if !ops.is_empty() && !t.delta.contains_key(&self.results[ri]) {
                    return schema(format!(
                        "({}, {}) has operators but no transition for result {}",
                        t.state, t.symbol, self.results[ri]
                    ));
                }
            }
            let operation = KrausFamily::new_unchecked(self.results.clone(), operators).map_err(
                |source| MachineError::Transition {
                    state: t.state.clone(),
                    symbol: t.symbol.clone(),
                    source,
                },
            )?;
            *slot = Some(Rule {
                operation,
                transitions,
            });
        }
        TwoQcfaSpec::new(SpecParts {
            quantum_states: self.quantum_states.clone(),
            classical_states: self.classical_states.clone(),
            alphabet,
            results: self.results.clone(),
            rules,
            q_start: index_of(&self.quantum_states, &self.q_start, "quantum state")?,
            c_start: index_of(&self.classical_states, &self.c_start, "classical state")?,
            c_acc: index_of(&self.classical_states, &self.c_acc, "classical state")?,
            c_rej: index_of(&self.classical_states, &self.c_rej, "classical state")?,
        })
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

impl TwoQcfaSpec {
    pub fn from_json_str(text: &str) -> Result<Self, MachineError> {
        Self::from_json_str_with(text, &BTreeMap::new())
    }

    /// Loads a document, overriding declared parameters.
    pub fn from_json_str_with(
        text: &str,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<Self, MachineError> {
        let doc: MachineDocument = serde_json::from_str(text)?;
        doc.build(overrides)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &BTreeMap<String, f64>) -> Result<Self, MachineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MachineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str_with(&text, overrides)
    }

    /// Numeric document; entries are written as `[re, im]`.
    pub fn to_document(&self) -> MachineDocument {
        let mut transitions = Vec::new();
        for c_idx in 0..self.d() {
            for sym in 0..self.extended_len() {
                let Some(rule) = self.rule(c_idx, sym) else {
                    continue;
                };
                let mut kraus = BTreeMap::new();
                let mut delta = BTreeMap::new();
                for (r, name) in self.results().iter().enumerate() {
                    let ops = rule.operation.operators(r);
                    if ops.is_empty() {
                        continue;
                    }
                    let mats = ops
                        .iter()
                        .map(|m| {
                            (0..m.nrows())
                                .map(|i| {
                                    (0..m.ncols())
                                        .map(|j| {
                                            let z = m[(i, j)];
                                            Value::Array(vec![number(z.re), number(z.im)])
                                        })
                                        .collect()
                                })
                                .collect()
                        })
                        .collect();
                    kraus.insert(name.clone(), mats);
                    let t = rule.transitions[r];
                    delta.insert(
                        name.clone(),
                        DeltaDocument {
                            next: self.classical_states()[t.next].clone(),
                            head_move: t.head_move.offset() as i64,
                        },
                    );
                }
                transitions.push(TransitionDocument {
                    state: self.classical_states()[c_idx].clone(),
                    symbol: self.symbol_name(sym),
                    kraus,
                    delta,
                });
            }
        }
        MachineDocument {
            quantum_states: self.quantum_states().to_vec(),
            classical_states: self.classical_states().to_vec(),
            alphabet: self.alphabet().iter().map(|ch| ch.to_string()).collect(),
            results: self.results().to_vec(),
            q_start: self.quantum_states()[self.q_start()].clone(),
            c_start: self.classical_states()[self.c_start()].clone(),
            c_acc: self.classical_states()[self.c_acc()].clone(),
            c_rej: self.classical_states()[self.c_rej()].clone(),
            parameters: BTreeMap::new(),
            transitions,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document is serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::fixtures;
    use crate::quantum::frobenius_norm;

    #[test]
    fn rotation_unitary_follows_expression() {
        let spec = fixtures::rotation();
        let alpha = 2f64.sqrt() * std::f64::consts::PI;
        let s = spec.state_index("s_sweep").unwrap();
        let u = &spec.rule(s, 1).unwrap().operation.operators(0)[0];
        let (sn, cs) = alpha.sin_cos();
        let expected =
            ComplexMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]);
        assert!(frobenius_norm(&(u - expected)) < 1e-15);
    }

    #[test]
    fn parameter_override() {
        let mut ov = BTreeMap::new();
        ov.insert("alpha".to_string(), 0.25);
        let spec = TwoQcfaSpec::from_json_str_with(fixtures::ROTATION_JSON, &ov).unwrap();
        let s = spec.state_index("s_sweep").unwrap();
        let u = &spec.rule(s, 1).unwrap().operation.operators(0)[0];
        assert!((u[(1, 0)].re - 0.25f64.sin()).abs() < 1e-15);

        ov.insert("beta".to_string(), 1.0);
        assert!(TwoQcfaSpec::from_json_str_with(fixtures::ROTATION_JSON, &ov).is_err());
    }

    #[test]
    fn doubled_identity_names_the_transition() {
        let doc = fixtures::COIN_JSON.replace(
            r#""kraus": {"heads": [[["sqrt(1/2)"]]], "tails": [[["sqrt(1/2)"]]]}"#,
            r#""kraus": {"heads": [[[1]]], "tails": [[[1]]]}"#,
        );
        assert_ne!(doc, fixtures::COIN_JSON);
        match TwoQcfaSpec::from_json_str(&doc) {
            Err(MachineError::Transition { state, symbol, .. }) => {
                assert_eq!((state.as_str(), symbol.as_str()), ("flip", "#L"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_transition_is_reported() {
        let mut doc: MachineDocument = serde_json::from_str(fixtures::PARITY_JSON).unwrap();
        doc.transitions.pop();
        assert!(matches!(
            doc.build(&BTreeMap::new()),
            Err(MachineError::MissingTransition { .. })
        ));
    }

    #[test]
    fn round_trip_through_numeric_document() {
        for spec in [fixtures::parity(), fixtures::rotation(), fixtures::coin()] {
            let again = TwoQcfaSpec::from_json_str(&spec.to_json_string()).unwrap();
            assert_eq!(again, spec);
        }
    }
}
