//! Finitely generated groups with exact normal forms, their word problems and
//! Cayley-graph growth.
//!
//! The alphabet of a group with generators `s_1..s_g` is `s_1..s_g` followed by
//! their inverses, written as the uppercase letters.

use crate::hardness::{nonregularity, HardnessConfig, HardnessError, LanguageOracle, Mode};
use serde::Serialize;
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    /// `ℤ` with `S = {1}`.
    Integers,
    /// `ℤ²` with the two unit vectors.
    Lattice,
    /// The free group on two generators.
    Free,
    /// The discrete Heisenberg group with `S = {x, y, z}`, `z = [x, y]`.
    Heisenberg,
}

/// A normal form. Free-group words are reduced, letters indexed as in the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Int(i64),
    Pair(i64, i64),
    Free(Vec<u8>),
    Heis(i64, i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    name: String,
    kind: GroupKind,
    generators: Vec<char>,
}

impl GroupPresentation {
    pub fn new(kind: GroupKind) -> Self {
        let (name, generators) = match kind {
            GroupKind::Integers => ("z", vec!['a']),
            GroupKind::Lattice => ("z2", vec!['a', 'b']),
            GroupKind::Free => ("f2", vec!['a', 'b']),
            GroupKind::Heisenberg => ("heisenberg", vec!['x', 'y', 'z']),
        };
        Self {
            name: name.into(),
            kind,
            generators,
        }
    }

    pub fn builtin() -> Vec<GroupPresentation> {
        [GroupKind::Integers, GroupKind::Lattice, GroupKind::Free, GroupKind::Heisenberg]
            .into_iter()
            .map(Self::new)
            .collect()
    }

    pub fn by_name(name: &str) -> Option<GroupPresentation> {
        Self::builtin().into_iter().find(|g| g.name == name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generators(&self) -> &[char] {
        &self.generators
    }

    /// `S ⊔ S⁻¹`.
    pub fn alphabet(&self) -> Vec<char> {
        let inverses = self.generators.iter().map(|c| c.to_ascii_uppercase());
        self.generators.iter().copied().chain(inverses).collect()
    }

    fn rank(&self) -> u8 {
        self.generators.len() as u8
    }

    /// The letter naming the inverse of `letter`.
    pub fn inverse_letter(&self, letter: u8) -> u8 {
        let g = self.rank();
        if letter < g {
            letter + g
        } else {
            letter - g
        }
    }

    /// The formal inverse: reversed, each letter inverted.
    pub fn inverse_word(&self, w: &[u8]) -> Vec<u8> {
        w.iter().rev().map(|&l| self.inverse_letter(l)).collect()
    }

    pub fn identity(&self) -> Element {
        match self.kind {
            GroupKind::Integers => Element::Int(0),
            GroupKind::Lattice => Element::Pair(0, 0),
            GroupKind::Free => Element::Free(Vec::new()),
            GroupKind::Heisenberg => Element::Heis(0, 0, 0),
        }
    }

    /// `φ(letter)`.
    pub fn letter(&self, letter: u8) -> Element {
        let g = self.rank();
        assert!(letter < 2 * g, "letter outside S ⊔ S⁻¹");
        let (i, sign) = if letter < g { (letter, 1) } else { (letter - g, -1) };
        match self.kind {
            GroupKind::Integers => Element::Int(sign),
            GroupKind::Lattice if i == 0 => Element::Pair(sign, 0),
            GroupKind::Lattice => Element::Pair(0, sign),
            GroupKind::Free => Element::Free(vec![letter]),
            GroupKind::Heisenberg => match i {
                0 => Element::Heis(sign, 0, 0),
                1 => Element::Heis(0, sign, 0),
                _ => Element::Heis(0, 0, sign),
            },
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Int(x), Element::Int(y)) => Element::Int(x + y),
            (Element::Pair(a1, a2), Element::Pair(b1, b2)) => Element::Pair(a1 + b1, a2 + b2),
            (Element::Free(u), Element::Free(v)) => {
                let mut out = u.clone();
                for &l in v {
                    if out.last() == Some(&self.inverse_letter(l)) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Free(out)
            }
            (Element::Heis(a, b, c), Element::Heis(a2, b2, c2)) => {
                Element::Heis(a + a2, b + b2, c + c2 + a * b2)
            }
            _ => panic!("elements of different groups"),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match a {
            Element::Int(x) => Element::Int(-x),
            Element::Pair(x, y) => Element::Pair(-x, -y),
            Element::Free(w) => Element::Free(self.inverse_word(w)),
            Element::Heis(a, b, c) => Element::Heis(-a, -b, -c + a * b),
        }
    }

    pub fn eval(&self, w: &[u8]) -> Element {
        w.iter()
            .fold(self.identity(), |acc, &l| self.mul(&acc, &self.letter(l)))
    }
}

/// `W_G = φ⁻¹(1_G)` over `S ⊔ S⁻¹`.
pub fn word_problem_oracle(g: &GroupPresentation) -> LanguageOracle {
    let group = g.clone();
    let identity = g.identity();
    LanguageOracle::new(format!("word-{}", g.name()), g.alphabet(), move |w| {
        group.eval(w) == identity
    })
}

/// `β_{G,S}(r)` for `r = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub group: String,
    pub counts: Vec<usize>,
}

impl GrowthTable {
    pub fn beta(&self, r: usize) -> usize {
        self.counts[r]
    }

    pub fn radius(&self) -> usize {
        self.counts.len() - 1
    }

    /// Tabulated pairs `(m, n)` violating `β(m+n) <= β(m) β(n)`.
    pub fn submultiplicativity_violations(&self) -> Vec<(usize, usize)> {
        let top = self.radius();
        let mut out = Vec::new();
        for m in 0..=top {
            for n in 0..=top - m {
                if self.counts[m + n] > self.counts[m] * self.counts[n] {
                    out.push((m, n));
                }
            }
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("group,radius,count\n");
        for (r, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.group, r, c));
        }
        s
    }
}

/// Breadth-first search of the Cayley graph from `1_G`: counts per radius and
/// one geodesic word per element of `B(n)`, in discovery order.
pub fn ball(
    g: &GroupPresentation,
    n: usize,
    budget: usize,
) -> Result<(GrowthTable, Vec<Vec<u8>>), HardnessError> {
    let letters = 2 * g.rank();
    let mut seen: HashSet<Element> = HashSet::from([g.identity()]);
    let mut frontier = vec![(g.identity(), Vec::new())];
    let mut geodesics = vec![Vec::new()];
    let mut counts = vec![1];
    for _ in 0..n {
        let mut next = Vec::new();
        for (e, w) in &frontier {
            for l in 0..letters {
                let f = g.mul(e, &g.letter(l));
                if seen.insert(f.clone()) {
                    if seen.len() > budget {
                        return Err(HardnessError::BudgetExceeded {
                            what: "ball size",
                            required: seen.len() as u128,
                            budget: budget as u128,
                        });
                    }
                    let mut fw = w.clone();
                    fw.push(l);
                    geodesics.push(fw.clone());
                    next.push((f, fw));
                }
            }
        }
        counts.push(seen.len());
        frontier = next;
    }
    Ok((
        GrowthTable {
            group: g.name().to_string(),
            counts,
        },
        geodesics,
    ))
}

pub const DEFAULT_BALL_BUDGET: usize = 1 << 22;

pub fn growth(g: &GroupPresentation, n: usize) -> Result<GrowthTable, HardnessError> {
    ball(g, n, DEFAULT_BALL_BUDGET).map(|(t, _)| t)
}

/// Comparison of `β(n)` with the nonregularity of the word problem at horizon `2n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub group: String,
    pub n: usize,
    pub beta: usize,
    pub horizon: usize,
    /// Geodesic words `w_i`, one per element of `B(n)`.
    pub witnesses: Vec<String>,
    /// Every `w_i w_i⁻¹` is in `W_G` and every `w_j w_i⁻¹` with `j != i` is not.
    pub construction_verified: bool,
    /// Lower bound on `D_{W_G}(2n)` from the verified witnesses.
    pub d_lower: usize,
    /// Independent bound from the dissimilarity-graph search, when within budget.
    pub search_lower: Option<usize>,
    pub holds: bool,
}

pub fn growth_vs_nonregularity(
    g: &GroupPresentation,
    n: usize,
    config: &HardnessConfig,
) -> Result<GrowthReport, HardnessError> {
    let (table, words) = ball(g, n, DEFAULT_BALL_BUDGET)?;
    let beta = table.beta(n);
    let oracle = word_problem_oracle(g);
    let horizon = 2 * n;
    let inverses: Vec<Vec<u8>> = words.iter().map(|w| g.inverse_word(w)).collect();
    let construction_verified = words.iter().all(|w| w.len() <= n)
        && (0..words.len()).all(|i| {
            let own: Vec<u8> = words[i].iter().chain(&inverses[i]).copied().collect();
            oracle.contains_indices(&own)
                && (0..words.len()).all(|j| {
                    j == i || {
                        let cross: Vec<u8> = words[j].iter().chain(&inverses[i]).copied().collect();
                        !oracle.contains_indices(&cross)
                    }
                })
        });
    let d_lower = if construction_verified { words.len() } else { 0 };
    let search_lower = match nonregularity(&oracle, horizon, Mode::Exact, config) {
        Ok(r) => Some(r.best()),
        Err(HardnessError::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(GrowthReport {
        group: g.name().to_string(),
        n,
        beta,
        horizon,
        witnesses: words.iter().map(|w| oracle.decode(w)).collect(),
        construction_verified,
        d_lower,
        search_lower,
        holds: d_lower.max(search_lower.unwrap_or(0)) >= beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(kind: GroupKind) -> GroupPresentation {
        GroupPresentation::new(kind)
    }

    #[test]
    fn word_problem_examples() {
        let z = word_problem_oracle(&group(GroupKind::Integers));
        assert!(z.contains("aA").unwrap());
        assert!(!z.contains("aa").unwrap());
        let f2 = word_problem_oracle(&group(GroupKind::Free));
        assert!(!f2.contains("abAB").unwrap());
        assert!(f2.contains("abBA").unwrap());
        let h = word_problem_oracle(&group(GroupKind::Heisenberg));
        assert!(h.contains("xyXYZ").unwrap());
        assert!(!h.contains("xyXY").unwrap());
        assert!(z.contains("ab").is_err());
    }

    #[test]
    fn group_axioms_on_samples() {
        for g in GroupPresentation::builtin() {
            let alen = g.alphabet().len() as u8;
            let sample: Vec<Element> = (0..40u32)
                .map(|i| {
                    let w: Vec<u8> = (0..(i % 6)).map(|j| ((i * 7 + j * 3) % alen as u32) as u8).collect();
                    g.eval(&w)
                })
                .collect();
            let e = g.identity();
            for a in &sample {
                assert_eq!(g.mul(a, &g.inv(a)), e);
                assert_eq!(g.mul(&g.inv(a), a), e);
                assert_eq!(g.mul(a, &e), *a);
                for b in sample.iter().take(8) {
                    for c in sample.iter().take(8) {
                        assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn growth_closed_forms() {
        let z = growth(&group(GroupKind::Integers), 10).unwrap();
        assert!((0..=10).all(|n| z.beta(n) == 2 * n + 1));
        let f2 = growth(&group(GroupKind::Free), 7).unwrap();
        assert!((0..=7).all(|n| f2.beta(n) == 2 * 3usize.pow(n as u32) - 1));
        assert_eq!(f2.beta(1), 5);
        assert_eq!(f2.beta(2), 17);
        let z2 = growth(&group(GroupKind::Lattice), 8).unwrap();
        assert!((0..=8).all(|n| z2.beta(n) == 2 * n * n + 2 * n + 1));
    }

    #[test]
    fn heisenberg_growth_is_quartic() {
        let h = growth(&group(GroupKind::Heisenberg), 12).unwrap();
        let ratios: Vec<f64> = (4..=12).map(|n| h.beta(n) as f64 / (n as f64).powi(4)).collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(lo > 0.1 && hi / lo < 20.0, "{ratios:?}");
    }

    #[test]
    fn growth_tables_are_submultiplicative() {
        for (g, n) in GroupPresentation::builtin().into_iter().zip([12, 10, 8, 8]) {
            let t = growth(&g, n).unwrap();
            assert!(t.submultiplicativity_violations().is_empty(), "{}", g.name());
            assert!(t.counts.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(t.beta(0), 1);
        }
    }

    #[test]
    fn inequality_examples() {
        let cfg = HardnessConfig::default();
        let z = growth_vs_nonregularity(&group(GroupKind::Integers), 3, &cfg).unwrap();
        assert_eq!(z.beta, 7);
        assert!(z.holds && z.construction_verified);
        assert!(z.search_lower.unwrap() >= 7);
        let f2 = growth_vs_nonregularity(&group(GroupKind::Free), 2, &cfg).unwrap();
        assert_eq!(f2.beta, 17);
        assert!(f2.d_lower >= 17 && f2.holds);
        let z2 = growth_vs_nonregularity(&group(GroupKind::Lattice), 2, &cfg).unwrap();
        assert_eq!(z2.beta, 13);
        assert!(z2.holds);
    }

    #[test]
    fn ball_budget() {
        let err = ball(&group(GroupKind::Free), 6, 100).unwrap_err();
        assert!(matches!(err, HardnessError::BudgetExceeded { budget: 100, .. }));
    }

    /// Free reduction with an explicit stack of signed generators.
    fn stack_reduce(w: &[u8]) -> Vec<(u8, bool)> {
        let mut st: Vec<(u8, bool)> = Vec::new();
        for &l in w {
            let sym = (l % 2, l < 2);
            match st.last() {
                Some(&(g, p)) if g == sym.0 && p != sym.1 => {
                    st.pop();
                }
                _ => st.push(sym),
            }
        }
        st
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn free_reduction_matches_stack(w in proptest::collection::vec(0u8..4, 0..24)) {
            let g = group(GroupKind::Free);
            let Element::Free(r) = g.eval(&w) else { unreachable!() };
            let st = stack_reduce(&w);
            let as_letters: Vec<u8> = st.iter().map(|&(x, p)| if p { x } else { x + 2 }).collect();
            prop_assert_eq!(r, as_letters);
        }
    }
}
