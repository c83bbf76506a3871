//! Smallest DFA agreeing with a language on `Σ^{<=n}`, by exhaustive search.
//!
//! Words are visited in length-lex order; each undefined transition is
//! branched over existing states plus one fresh state (canonical numbering),
//! and a state's accept bit is fixed by the first word that reaches it. This
//! covers every DFA up to isomorphism and unreachable states.

use super::{ball_size, LanguageOracle};

struct Search<'a> {
    s: usize,
    member: &'a [bool],
    limit: usize,
    delta: Vec<Option<usize>>,
    accept: Vec<Option<bool>>,
    state_of: Vec<usize>,
    used: usize,
}

impl Search<'_> {
    fn run(&mut self, w: usize) -> bool {
        if w == self.member.len() {
            return true;
        }
        let parent = (w - 1) / self.s;
        let sym = (w - 1) % self.s;
        let slot = self.state_of[parent] * self.s + sym;
        match self.delta[slot] {
            Some(q) => self.enter(w, q),
            None => {
                let fresh = (self.used < self.limit) as usize;
                for q in 0..self.used + fresh {
                    let grew = q == self.used;
                    if grew {
                        self.used += 1;
                    }
                    self.delta[slot] = Some(q);
                    if self.enter(w, q) {
                        return true;
                    }
                    self.delta[slot] = None;
                    if grew {
                        self.used -= 1;
                        self.accept[q] = None;
                    }
                }
                false
            }
        }
    }

    fn enter(&mut self, w: usize, q: usize) -> bool {
        let want = self.member[w];
        let fixed_here = match self.accept[q] {
            Some(a) if a != want => return false,
            Some(_) => false,
            None => {
                self.accept[q] = Some(want);
                true
            }
        };
        self.state_of[w] = q;
        if self.run(w + 1) {
            return true;
        }
        if fixed_here {
            self.accept[q] = None;
        }
        false
    }
}

/// Number of states of the smallest DFA agreeing with `oracle` on every string
/// of length at most `n`, or `None` when more than `max_states` are needed.
pub fn exhaustive_dfa_crosscheck(oracle: &LanguageOracle, n: usize, max_states: usize) -> Option<usize> {
    let s = oracle.alphabet().len();
    let words = super::words_up_to(s, n);
    debug_assert_eq!(words.len(), ball_size(s, n));
    let member: Vec<bool> = words.iter().map(|w| oracle.contains_indices(w)).collect();
    (1..=max_states).find(|&limit| {
        let mut search = Search {
            s,
            member: &member,
            limit,
            delta: vec![None; limit * s],
            accept: vec![None; limit],
            state_of: vec![0; member.len()],
            used: 1,
        };
        search.accept[0] = Some(member[0]);
        search.run(1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_languages() {
        let parity = LanguageOracle::new("parity", vec!['a', 'b'], |w| w.iter().filter(|&&c| c == 0).count() % 2 == 0);
        let all = LanguageOracle::new("all", vec!['a', 'b'], |_| true);
        let pal = LanguageOracle::new("pal", vec!['a', 'b'], |w| w.iter().eq(w.iter().rev()));
        let ends_in_b = LanguageOracle::new("ends-b", vec!['a', 'b'], |w| w.last() == Some(&1));
        assert_eq!(exhaustive_dfa_crosscheck(&parity, 4, 3), Some(2));
        assert_eq!(exhaustive_dfa_crosscheck(&all, 4, 3), Some(1));
        assert_eq!(exhaustive_dfa_crosscheck(&pal, 4, 3), None);
        assert_eq!(exhaustive_dfa_crosscheck(&ends_in_b, 5, 3), Some(2));
    }

    #[test]
    fn at_most_mod_three_counter() {
        let mod3 = LanguageOracle::new("mod3", vec!['a'], |w| w.len() % 3 == 0);
        assert_eq!(exhaustive_dfa_crosscheck(&mod3, 6, 3), Some(3));
        assert_eq!(exhaustive_dfa_crosscheck(&mod3, 6, 2), None);
    }
}
