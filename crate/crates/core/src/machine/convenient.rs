use super::{Move, Rule, SpecParts, Transition, TwoQcfaSpec};
use crate::quantum::{ComplexMatrix, KrausFamily};

/// Result of [`TwoQcfaSpec::to_convenient_form_report`].
#[derive(Debug, Clone)]
pub struct ConvenientForm {
    pub spec: TwoQcfaSpec,
    /// Name given to the new start state (sweeps right).
    pub start_name: String,
    /// Name given to the returning state (sweeps left).
    pub turn_name: String,
    /// True when a default name collided with an existing state and was primed again.
    pub renamed: bool,
}

fn fresh(names: &[String], base: &str) -> (String, bool) {
    let mut name = base.to_string();
    let mut renamed = false;
    while names.iter().any(|n| n == &name) {
        name.push('\'');
        renamed = true;
    }
    (name, renamed)
}

impl TwoQcfaSpec {
    /// Prepends a right sweep to `#R` and a left sweep back to `#L` with trivial
    /// quantum operations.
    ///
    /// The returning state applies the original start rule when it reads `#L`,
    /// so the running time grows by exactly `2(|w| + 1)`. If the original start
    /// state is halting, the returning state enters it with one extra step.
    pub fn to_convenient_form(&self) -> TwoQcfaSpec {
        self.to_convenient_form_report().spec
    }

    pub fn to_convenient_form_report(&self) -> ConvenientForm {
        let d = self.d();
        let ext = self.extended_len();
        let mut classical_states = self.classical_states().to_vec();
        let (start_name, r1) = fresh(&classical_states, "c_start'");
        classical_states.push(start_name.clone());
        let (turn_name, r2) = fresh(&classical_states, "c'");
        classical_states.push(turn_name.clone());
        let (start, turn) = (d, d + 1);

        let identity = KrausFamily::unitary(
            self.results().to_vec(),
            0,
            ComplexMatrix::identity(self.k(), self.k()),
        )
        .expect("identity is a valid operation");
        let sweep = |state: usize, next: usize, head_move: Move| {
            let mut transitions = vec![
                Transition {
                    next: state,
                    head_move: Move::Stay,
                };
                self.results().len()
            ];
            transitions[0] = Transition { next, head_move };
            Rule {
                operation: identity.clone(),
                transitions,
            }
        };

        let mut rules = self.rules.clone();
        rules.resize((d + 2) * ext, None);
        for sym in 0..ext {
            rules[start * ext + sym] = Some(if sym == ext - 1 {
                sweep(start, turn, Move::Left)
            } else {
                sweep(start, start, Move::Right)
            });
            rules[turn * ext + sym] = Some(if sym == 0 {
                match self.rule(self.c_start(), 0) {
                    Some(rule) => rule.clone(),
                    None => sweep(turn, self.c_start(), Move::Stay),
                }
            } else {
                sweep(turn, turn, Move::Left)
            });
        }

        let mut spec = TwoQcfaSpec::new(SpecParts {
            quantum_states: self.quantum_states().to_vec(),
            classical_states,
            alphabet: self.alphabet().to_vec(),
            results: self.results().to_vec(),
            rules,
            q_start: self.q_start(),
            c_start: start,
            c_acc: self.c_acc(),
            c_rej: self.c_rej(),
        })
        .expect("convenient form of a valid machine is valid");
        spec.convenient = true;
        ConvenientForm {
            spec,
            start_name,
            turn_name,
            renamed: r1 || r2,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::machine::{exact_run, fixtures};

    #[test]
    fn adds_two_states() {
        let p = fixtures::parity();
        let cf = p.to_convenient_form_report();
        assert_eq!(cf.spec.d(), p.d() + 2);
        assert!(cf.spec.is_convenient());
        assert!(!cf.renamed);
        let twice = cf.spec.to_convenient_form_report();
        assert_eq!(twice.spec.d(), p.d() + 4);
        assert!(twice.renamed);
        assert_eq!(twice.start_name, "c_start''");
    }

    #[test]
    fn preserves_parity_acceptance() {
        let p = fixtures::parity();
        let cf = p.to_convenient_form().to_convenient_form();
        for w in ["", "a", "ab", "aab", "bab"] {
            let a = exact_run(&p, w, 200).unwrap();
            let b = exact_run(&cf, w, 200).unwrap();
            assert!((a.p_accept() - b.p_accept()).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn rotation_on_ab_gains_six_steps() {
        let r = fixtures::rotation();
        let cf = r.to_convenient_form();
        let cap = 4000;
        let a = exact_run(&r, "ab", cap).unwrap();
        let b = exact_run(&cf, "ab", cap).unwrap();
        assert!(a.p_running < 1e-12 && b.p_running < 1e-12);
        assert!((b.expected_time_lower - a.expected_time_lower - 6.0).abs() < 1e-9);
        assert!((a.p_accept() - b.p_accept()).abs() < 1e-12);
    }
}
