//! Built-in language oracles.

pub mod groups;

use crate::hardness::LanguageOracle;

pub use groups::{
    growth, growth_vs_nonregularity, word_problem_oracle, Element, GroupKind, GroupPresentation,
    GrowthReport, GrowthTable,
};

/// Words over `{a, b}` with an even number of `a`s.
pub fn parity() -> LanguageOracle {
    LanguageOracle::new("parity", vec!['a', 'b'], |w| {
        w.iter().filter(|&&c| c == 0).count() % 2 == 0
    })
}

/// `{a^m b^m : m >= 0}`.
pub fn equal() -> LanguageOracle {
    LanguageOracle::new("eq", vec!['a', 'b'], |w| {
        let m = w.iter().take_while(|&&c| c == 0).count();
        w.len() == 2 * m && w[m..].iter().all(|&c| c == 1)
    })
}

pub fn palindromes() -> LanguageOracle {
    LanguageOracle::new("pal", vec!['a', 'b'], |w| w.iter().eq(w.iter().rev()))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= p {
        if p % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// Binary numerals without leading zeros whose value is prime.
pub fn primes() -> LanguageOracle {
    LanguageOracle::new("primes", vec!['0', '1'], |w| {
        if w.first() != Some(&1) || w.len() > 63 {
            return false;
        }
        is_prime(w.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
    })
}

/// Binary strings whose `1` positions contain a 3-term arithmetic progression.
pub fn three_ap() -> LanguageOracle {
    LanguageOracle::new("3ap", vec!['0', '1'], |w| {
        let n = w.len();
        (0..n).any(|j| {
            w[j] == 1 && (1..=j.min(n - 1 - j)).any(|g| w[j - g] == 1 && w[j + g] == 1)
        })
    })
}

/// `Σ*` over `{a, b}`.
pub fn everything() -> LanguageOracle {
    LanguageOracle::new("all", vec!['a', 'b'], |_| true)
}

/// Every built-in oracle, including the word problems of the built-in groups.
pub fn builtin_oracles() -> Vec<LanguageOracle> {
    let mut out = vec![parity(), equal(), palindromes(), primes(), three_ap(), everything()];
    out.extend(GroupPresentation::builtin().iter().map(word_problem_oracle));
    out
}

pub fn oracle_by_name(name: &str) -> Option<LanguageOracle> {
    builtin_oracles().into_iter().find(|o| o.name() == name)
}
