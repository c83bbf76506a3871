//! Nonregularity `D_L(n)`: the largest set of strings of length at most `n`
//! that are pairwise `(L, n)`-dissimilar, where `x` and `x'` are dissimilar when
//! some `y` with `|y| <= n - max(|x|, |x'|)` puts exactly one of `xy`, `x'y` in `L`.
//! Also the one-way communication complexity `C_L(n) = log2 D_L(n)` and a
//! brute-force minimal-DFA cross-check.

mod clique;
mod dfa;

pub use dfa::exhaustive_dfa_crosscheck;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardnessError {
    #[error("budget exceeded: {what} needs {required}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(char),
    #[error("empty alphabet")]
    EmptyAlphabet,
}

type Membership = dyn Fn(&[u8]) -> bool + Send + Sync;

/// A language over a finite alphabet, queried on words of symbol indices.
#[derive(Clone)]
pub struct LanguageOracle {
    name: String,
    alphabet: Vec<char>,
    membership: Arc<Membership>,
}

impl fmt::Debug for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LanguageOracle")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .finish_non_exhaustive()
    }
}

impl LanguageOracle {
    /// `membership` must be a pure, total function of the word.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<char>,
        membership: impl Fn(&[u8]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            alphabet,
            membership: Arc::new(membership),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn contains_indices(&self, w: &[u8]) -> bool {
        (self.membership)(w)
    }

    pub fn encode(&self, w: &str) -> Result<Vec<u8>, HardnessError> {
        w.chars()
            .map(|ch| {
                self.alphabet
                    .iter()
                    .position(|&a| a == ch)
                    .map(|i| i as u8)
                    .ok_or(HardnessError::UnknownSymbol(ch))
            })
            .collect()
    }

    pub fn decode(&self, w: &[u8]) -> String {
        w.iter().map(|&i| self.alphabet[i as usize]).collect()
    }

    pub fn contains(&self, w: &str) -> Result<bool, HardnessError> {
        Ok(self.contains_indices(&self.encode(w)?))
    }
}

/// `sum_{j <= len} s^j`, the number of strings of length at most `len`.
pub fn ball_size(s: usize, len: usize) -> usize {
    (0..=len).map(|j| s.pow(j as u32)).sum()
}

/// The `index`-th string of length `len` in lexicographic order.
pub fn nth_word(s: usize, len: usize, mut index: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for slot in w.iter_mut().rev() {
        *slot = (index % s) as u8;
        index /= s;
    }
    w
}

/// All strings of length at most `len` in length-lexicographic order.
pub fn words_up_to(s: usize, len: usize) -> Vec<Vec<u8>> {
    (0..=len)
        .flat_map(|l| (0..s.pow(l as u32)).map(move |i| nth_word(s, l, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardnessConfig {
    /// Upper bound on `|Σ|^(n+1)`.
    pub budget: u128,
    /// Upper bound on branch-and-bound nodes in exact mode.
    pub clique_nodes: u64,
}

impl Default for HardnessConfig {
    fn default() -> Self {
        Self {
            budget: 8192,
            clique_nodes: 2_000_000,
        }
    }
}

fn check_budget(s: usize, n: usize, budget: u128) -> Result<(), HardnessError> {
    let required = (s as u128).saturating_pow(n as u32 + 1);
    if required > budget {
        return Err(HardnessError::BudgetExceeded {
            what: "|Σ|^(n+1)",
            required,
            budget,
        });
    }
    Ok(())
}

/// Membership signatures of every string in `Σ^{<=n}`. The signature of a
/// length-`l` vertex `x` is the bit-vector of `xy ∈ L` over `y ∈ Σ^{<=n-l}` in
/// length-lexicographic order, so the suffixes allowed for a pair form a
/// common prefix of both signatures.
#[derive(Debug, Clone)]
pub struct DissimilarityGraph {
    n: usize,
    s: usize,
    /// `layers[l]` packs the signatures of all length-`l` vertices, `words[l]` u64s each.
    layers: Vec<Vec<u64>>,
    words: Vec<usize>,
}

impl DissimilarityGraph {
    pub fn build(oracle: &LanguageOracle, n: usize, budget: u128) -> Result<Self, HardnessError> {
        let s = oracle.alphabet().len();
        if s == 0 {
            return Err(HardnessError::EmptyAlphabet);
        }
        check_budget(s, n, budget)?;
        let mut layers = Vec::with_capacity(n + 1);
        let mut words = Vec::with_capacity(n + 1);
        for l in 0..=n {
            let suffixes = words_up_to(s, n - l);
            let wps = suffixes.len().div_ceil(64);
            let count = s.pow(l as u32);
            let mut layer = vec![0u64; wps * count];
            layer
                .par_chunks_mut(wps)
                .enumerate()
                .for_each(|(i, sig)| {
                    let mut buf = nth_word(s, l, i);
                    for (j, y) in suffixes.iter().enumerate() {
                        buf.truncate(l);
                        buf.extend_from_slice(y);
                        if oracle.contains_indices(&buf) {
                            sig[j / 64] |= 1 << (j % 64);
                        }
                    }
                });
            layers.push(layer);
            words.push(wps);
        }
        Ok(Self { n, s, layers, words })
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        ball_size(self.s, self.n)
    }

    /// `(length, index within length)` of vertex `v` in length-lex order.
    pub fn locate(&self, mut v: usize) -> (usize, usize) {
        for l in 0..=self.n {
            let c = self.s.pow(l as u32);
            if v < c {
                return (l, v);
            }
            v -= c;
        }
        panic!("vertex out of range");
    }

    pub fn vertex(&self, v: usize) -> Vec<u8> {
        let (l, i) = self.locate(v);
        nth_word(self.s, l, i)
    }

    fn signature(&self, l: usize, i: usize) -> &[u64] {
        let w = self.words[l];
        &self.layers[l][i * w..(i + 1) * w]
    }

    /// Dissimilarity of `(l1, i1)` and `(l2, i2)` via the common signature window.
    pub fn dissimilar_at(&self, l1: usize, i1: usize, l2: usize, i2: usize) -> bool {
        let bits = ball_size(self.s, self.n - l1.max(l2));
        prefix_differs(self.signature(l1, i1), self.signature(l2, i2), bits)
    }

    pub fn dissimilar(&self, u: usize, v: usize) -> bool {
        let (l1, i1) = self.locate(u);
        let (l2, i2) = self.locate(v);
        self.dissimilar_at(l1, i1, l2, i2)
    }

    /// Edges as vertex-index pairs `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.dissimilar(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Distinct signatures per length: `(length, representative indices)`.
    fn classes(&self) -> Vec<Vec<usize>> {
        (0..=self.n)
            .map(|l| {
                let mut seen: HashMap<&[u64], usize> = HashMap::new();
                let mut reps = Vec::new();
                for i in 0..self.s.pow(l as u32) {
                    seen.entry(self.signature(l, i)).or_insert_with(|| {
                        reps.push(i);
                        i
                    });
                }
                reps
            })
            .collect()
    }
}

fn prefix_differs(a: &[u64], b: &[u64], bits: usize) -> bool {
    let full = bits / 64;
    if a[..full] != b[..full] {
        return true;
    }
    let rem = bits % 64;
    rem != 0 && {
        let mask = (1u64 << rem) - 1;
        (a[full] ^ b[full]) & mask != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactClique,
    SameLengthClasses,
    WitnessConstruction,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactClique => "exact-clique",
            Method::SameLengthClasses => "same-length-classes",
            Method::WitnessConstruction => "witness-construction",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessReport {
    pub language: String,
    pub n: usize,
    pub d_exact: Option<usize>,
    pub d_lower: usize,
    pub witness_set: Vec<String>,
    /// `log2` of the best reported `D`.
    pub c_bits: f64,
    pub method: Method,
    /// Exact mode exhausted its node budget and reports the lower bound.
    pub fell_back: bool,
    /// Pairwise dissimilarity of `witness_set` re-checked against the raw oracle.
    pub witnesses_verified: bool,
}

impl HardnessReport {
    pub fn best(&self) -> usize {
        self.d_exact.unwrap_or(self.d_lower)
    }

    pub fn csv_header() -> &'static str {
        "language,n,d_exact,d_lower,c_bits,method,witness_count"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.16e},{},{}",
            self.language,
            self.n,
            self.d_exact.map_or(String::new(), |d| d.to_string()),
            self.d_lower,
            self.c_bits,
            self.method,
            self.witness_set.len()
        )
    }
}

/// `C_L(n) = log2 D_L(n)` from the best available value, and whether it is only
/// a lower bound.
pub fn communication_bits(report: &HardnessReport) -> (f64, bool) {
    ((report.best() as f64).log2(), report.d_exact.is_none())
}

/// Pairwise dissimilarity of `words` at horizon `n`, searching suffixes
/// directly with the raw oracle. Independent of the signature machinery.
pub fn verify_pairwise_dissimilar(oracle: &LanguageOracle, words: &[Vec<u8>], n: usize) -> bool {
    let s = oracle.alphabet().len();
    if words.iter().any(|w| w.len() > n) {
        return false;
    }
    let pairs: Vec<(usize, usize)> = (0..words.len())
        .flat_map(|i| (i + 1..words.len()).map(move |j| (i, j)))
        .collect();
    pairs.par_iter().all(|&(i, j)| {
        let (x, z) = (&words[i], &words[j]);
        let budget = n - x.len().max(z.len());
        words_up_to(s, budget).iter().any(|y| {
            let xy: Vec<u8> = x.iter().chain(y).copied().collect();
            let zy: Vec<u8> = z.iter().chain(y).copied().collect();
            oracle.contains_indices(&xy) != oracle.contains_indices(&zy)
        })
    })
}

/// `D_L(n)` by maximum clique (exact) or by the largest set of distinct
/// same-length signatures (lower).
pub fn nonregularity(
    oracle: &LanguageOracle,
    n: usize,
    mode: Mode,
    config: &HardnessConfig,
) -> Result<HardnessReport, HardnessError> {
    let graph = DissimilarityGraph::build(oracle, n, config.budget)?;
    let classes = graph.classes();
    let (best_len, reps) = classes
        .iter()
        .enumerate()
        .max_by_key(|(l, r)| (r.len(), std::cmp::Reverse(*l)))
        .expect("n + 1 layers");
    let s = graph.s;
    let lower_witness: Vec<Vec<u8>> = reps.iter().map(|&i| nth_word(s, best_len, i)).collect();
    let d_lower = lower_witness.len();

    let (d_exact, witness, method, fell_back) = match mode {
        Mode::Lower => (None, lower_witness, Method::SameLengthClasses, false),
        Mode::Exact => {
            let verts: Vec<(usize, usize)> = classes
                .iter()
                .enumerate()
                .flat_map(|(l, r)| r.iter().map(move |&i| (l, i)))
                .collect();
            let initial: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter(|(_, v)| v.0 == best_len)
                .map(|(idx, _)| idx)
                .collect();
            let adj = |a: usize, b: usize| {
                let (l1, i1) = verts[a];
                let (l2, i2) = verts[b];
                graph.dissimilar_at(l1, i1, l2, i2)
            };
            match clique::maximum_clique(verts.len(), adj, initial, config.clique_nodes) {
                Some(c) => {
                    let w: Vec<Vec<u8>> =
                        c.iter().map(|&v| nth_word(s, verts[v].0, verts[v].1)).collect();
                    (Some(w.len()), w, Method::ExactClique, false)
                }
                None => (None, lower_witness, Method::SameLengthClasses, true),
            }
        }
    };
    let witnesses_verified = verify_pairwise_dissimilar(oracle, &witness, n);
    let best = d_exact.unwrap_or(d_lower);
    Ok(HardnessReport {
        language: oracle.name().to_string(),
        n,
        d_exact,
        d_lower,
        witness_set: witness.iter().map(|w| oracle.decode(w)).collect(),
        c_bits: (best as f64).log2(),
        method,
        fell_back,
        witnesses_verified,
    })
}

/// Report for an explicitly constructed witness set, verified with the raw oracle.
pub fn witness_report(oracle: &LanguageOracle, n: usize, witnesses: &[Vec<u8>]) -> HardnessReport {
    let witnesses_verified = verify_pairwise_dissimilar(oracle, witnesses, n);
    HardnessReport {
        language: oracle.name().to_string(),
        n,
        d_exact: None,
        d_lower: witnesses.len(),
        witness_set: witnesses.iter().map(|w| oracle.decode(w)).collect(),
        c_bits: (witnesses.len().max(1) as f64).log2(),
        method: Method::WitnessConstruction,
        fell_back: false,
        witnesses_verified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> LanguageOracle {
        LanguageOracle::new("parity", vec!['a', 'b'], |w| w.iter().filter(|&&c| c == 0).count() % 2 == 0)
    }

    fn everything() -> LanguageOracle {
        LanguageOracle::new("all", vec!['a', 'b'], |_| true)
    }

    fn palindromes() -> LanguageOracle {
        LanguageOracle::new("pal", vec!['a', 'b'], |w| w.iter().eq(w.iter().rev()))
    }

    /// Dissimilarity straight from the definition.
    fn brute_dissimilar(o: &LanguageOracle, x: &[u8], z: &[u8], n: usize) -> bool {
        verify_pairwise_dissimilar(o, &[x.to_vec(), z.to_vec()], n)
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(ball_size(2, 3), 15);
        let w = words_up_to(2, 2);
        assert_eq!(w, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn parity_edges_are_parity_mismatches() {
        let o = parity();
        let g = DissimilarityGraph::build(&o, 3, 1 << 20).unwrap();
        assert_eq!(g.vertex_count(), 15);
        let a_parity = |w: &[u8]| w.iter().filter(|&&c| c == 0).count() % 2;
        for u in 0..15 {
            for v in u + 1..15 {
                let (x, z) = (g.vertex(u), g.vertex(v));
                assert_eq!(g.dissimilar(u, v), a_parity(&x) != a_parity(&z));
                assert_eq!(g.dissimilar(u, v), brute_dissimilar(&o, &x, &z, 3));
            }
        }
    }

    #[test]
    fn graph_matches_definition_on_palindromes() {
        let o = palindromes();
        let n = 5;
        let g = DissimilarityGraph::build(&o, n, 1 << 20).unwrap();
        for u in 0..g.vertex_count() {
            for v in u + 1..g.vertex_count() {
                assert_eq!(g.dissimilar(u, v), brute_dissimilar(&o, &g.vertex(u), &g.vertex(v), n));
            }
        }
        let aa = o.encode("aa").unwrap();
        let ab = o.encode("ab").unwrap();
        assert!(brute_dissimilar(&o, &aa, &ab, 4));
        assert!(o.contains("aaaa").unwrap() && !o.contains("abaa").unwrap());
    }

    #[test]
    fn universal_language_has_no_edges() {
        let g = DissimilarityGraph::build(&everything(), 4, 1 << 20).unwrap();
        assert!(g.edges().is_empty());
        let r = nonregularity(&everything(), 4, Mode::Exact, &HardnessConfig::default()).unwrap();
        assert_eq!(r.d_exact, Some(1));
        assert_eq!(communication_bits(&r), (0.0, false));
    }

    #[test]
    fn parity_is_two() {
        for n in 1..=6 {
            let r = nonregularity(&parity(), n, Mode::Exact, &HardnessConfig::default()).unwrap();
            assert_eq!(r.d_exact, Some(2));
            assert!(r.witnesses_verified);
            assert_eq!(r.c_bits, 1.0);
        }
        let r0 = nonregularity(&parity(), 0, Mode::Exact, &HardnessConfig::default()).unwrap();
        assert_eq!(r0.d_exact, Some(1));
    }

    #[test]
    fn palindromes_at_four() {
        let r = nonregularity(&palindromes(), 4, Mode::Lower, &HardnessConfig::default()).unwrap();
        assert!(r.d_lower >= 4);
        assert!(r.witnesses_verified);
        let w2: Vec<Vec<u8>> = ["aa", "ab", "ba", "bb"].iter().map(|w| palindromes().encode(w).unwrap()).collect();
        assert!(verify_pairwise_dissimilar(&palindromes(), &w2, 4));
        let e = nonregularity(&palindromes(), 4, Mode::Exact, &HardnessConfig::default()).unwrap();
        assert!(e.d_exact.unwrap() >= e.d_lower);
    }

    #[test]
    fn exact_clique_matches_brute_force_on_small_graphs() {
        // maximum clique by subset enumeration over Σ^{<=3}
        for o in [parity(), palindromes(), everything()] {
            let n = 3;
            let words = words_up_to(2, n);
            let m = words.len();
            let mut best = 0;
            for mask in 0u32..(1 << m) {
                let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                if set.len() <= best {
                    continue;
                }
                let ok = set.iter().enumerate().all(|(a, &i)| {
                    set[a + 1..].iter().all(|&j| brute_dissimilar(&o, &words[i], &words[j], n))
                });
                if ok {
                    best = set.len();
                }
            }
            let r = nonregularity(&o, n, Mode::Exact, &HardnessConfig::default()).unwrap();
            assert_eq!(r.d_exact, Some(best), "{}", o.name());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = DissimilarityGraph::build(&parity(), 13, 8192).unwrap_err();
        assert_eq!(
            err,
            HardnessError::BudgetExceeded {
                what: "|Σ|^(n+1)",
                required: 16384,
                budget: 8192
            }
        );
        assert!(DissimilarityGraph::build(&parity(), 12, 8192).is_ok());
    }

    #[test]
    fn csv_row_shape() {
        let r = nonregularity(&parity(), 3, Mode::Exact, &HardnessConfig::default()).unwrap();
        assert_eq!(r.csv_row(), "parity,3,2,2,1.0000000000000000e0,exact-clique,2");
    }
}
