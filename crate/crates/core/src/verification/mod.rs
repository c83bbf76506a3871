//! Numerical checks of the finitely verifiable inequalities behind the
//! crossing-sequence lower bound, over the shipped fixtures and seeded random
//! machines.
//!
//! Every check reports a slack (bound minus measured value, positive when the
//! inequality holds) and passes iff its worst slack is at least `-tolerance`.

mod branch;
mod checks;

pub use branch::{enumerate_branches, BranchOutcome};
pub use checks::{
    check_bridge, check_channel_laws, check_crossing_distance, check_equivalence,
    check_feature_bounds, check_growth, check_hardness_monotonicity, check_packing,
    check_structural_zeros, check_theorem_constant, packing_bound, ChannelLawParams,
};

use crate::machine::{fixtures, random, TapeSymbol, TwoQcfaSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Preconditions of the inequality were not met; nothing was asserted.
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "n/a",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub instances: usize,
    /// Most violated margin; positive means satisfied.
    pub worst_slack: f64,
    pub tolerance: f64,
    /// Inputs of the worst instance, enough to replay it.
    pub witnesses: Value,
    pub passed: bool,
    pub status: Status,
}

impl CheckResult {
    pub fn not_applicable(check_id: impl Into<String>, witnesses: Value) -> Self {
        Self {
            check_id: check_id.into(),
            instances: 0,
            worst_slack: f64::INFINITY,
            tolerance: 0.0,
            witnesses,
            passed: true,
            status: Status::NotApplicable,
        }
    }

    pub fn error(check_id: impl Into<String>, message: impl fmt::Display, witnesses: Value) -> Self {
        Self {
            check_id: check_id.into(),
            instances: 0,
            worst_slack: f64::NEG_INFINITY,
            tolerance: 0.0,
            witnesses: json!({ "error": message.to_string(), "inputs": witnesses }),
            passed: false,
            status: Status::Fail,
        }
    }
}

/// Tracks the worst slack over the instances of one check.
#[derive(Debug, Clone)]
pub struct SlackTracker {
    check_id: String,
    tolerance: f64,
    instances: usize,
    worst: Option<(f64, Value)>,
}

impl SlackTracker {
    pub fn new(check_id: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check_id: check_id.into(),
            tolerance,
            instances: 0,
            worst: None,
        }
    }

    /// `witness` is only built when this instance becomes the worst one.
    pub fn record(&mut self, slack: f64, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        // NaN slack counts as a violation
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if self.worst.as_ref().is_none_or(|(w, _)| slack < *w) {
            self.worst = Some((slack, witness()));
        }
    }

    pub fn finish(self) -> CheckResult {
        let (worst_slack, witnesses) = self.worst.unwrap_or((f64::INFINITY, Value::Null));
        let passed = worst_slack >= -self.tolerance;
        CheckResult {
            check_id: self.check_id,
            instances: self.instances,
            worst_slack,
            tolerance: self.tolerance,
            witnesses,
            passed,
            status: if passed { Status::Pass } else { Status::Fail },
        }
    }
}

/// A machine under test and how to rebuild it.
#[derive(Debug, Clone)]
pub struct MachineCase {
    pub label: String,
    pub spec: TwoQcfaSpec,
    pub origin: Value,
}

impl MachineCase {
    pub fn fixture(name: &str, spec: TwoQcfaSpec) -> Self {
        Self {
            label: name.to_string(),
            spec,
            origin: json!({ "fixture": name }),
        }
    }

    /// Machine `index` of the random family for `seed`.
    pub fn random(seed: u64, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        Self {
            label: format!("random-{index:03}"),
            spec: random::any_machine(&mut rng),
            origin: json!({ "random_seed": seed, "stream": index }),
        }
    }

    /// Same machine with one transition's Kraus operators scaled by `1.1`.
    pub fn corrupted_rotation() -> Self {
        let spec = fixtures::rotation();
        let c = spec.state_index("s_sweep").expect("rotation has s_sweep");
        Self {
            label: "corrupted-rotation".into(),
            spec: spec.with_scaled_kraus(c, TapeSymbol::Input(0), 1.1),
            origin: json!({ "fixture": "rotation", "scaled": { "state": "s_sweep", "symbol": "a", "factor": 1.1 } }),
        }
    }

    pub fn witness(&self, extra: Value) -> Value {
        let mut w = json!({ "machine": self.label, "origin": self.origin });
        if let (Value::Object(a), Value::Object(b)) = (&mut w, extra) {
            a.extend(b);
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub random_machines: usize,
    /// Longest prefix/suffix in the channel-law sweep.
    pub channel_word_len: usize,
    pub channel_ms: Vec<usize>,
    pub density_inputs: usize,
    pub equivalence_word_len: usize,
    pub equivalence_ms: Vec<usize>,
    pub branch_threshold: f64,
    pub crossing_i_max: usize,
    pub crossing_m: usize,
    pub crossing_random_instances: usize,
    pub packing_word_len: usize,
    pub packing_m: usize,
    pub bridge_word_len: usize,
    pub bridge_m: usize,
    pub theorem_n: usize,
    pub theorem_cap: usize,
    pub hardness_max_n: usize,
    pub hardness_budget: u128,
    pub growth_max_n: usize,
    /// Adds the corrupted-Kraus machine to the channel-law sweep.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            random_machines: 50,
            channel_word_len: 4,
            channel_ms: vec![0, 5, 20],
            density_inputs: 20,
            equivalence_word_len: 4,
            equivalence_ms: vec![0, 1, 4, 12],
            branch_threshold: 1e-14,
            crossing_i_max: 10,
            crossing_m: 20,
            crossing_random_instances: 20,
            packing_word_len: 3,
            packing_m: 30,
            bridge_word_len: 6,
            bridge_m: 50,
            theorem_n: 4,
            theorem_cap: 400,
            hardness_max_n: 8,
            hardness_budget: 1 << 24,
            growth_max_n: 3,
            inject_fault: false,
        }
    }
}

impl VerifyConfig {
    /// A reduced configuration for smoke runs.
    pub fn quick() -> Self {
        Self {
            random_machines: 4,
            channel_word_len: 2,
            density_inputs: 4,
            equivalence_word_len: 2,
            crossing_random_instances: 4,
            bridge_word_len: 3,
            hardness_max_n: 5,
            hardness_budget: 1 << 16,
            ..Self::default()
        }
    }
}

type Job = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync>;

/// Runs every check. Results are sorted by `check_id`; failures are reported,
/// never raised.
pub fn run_all(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut cases: Vec<MachineCase> = fixtures::all()
        .into_iter()
        .map(|(n, s)| MachineCase::fixture(n, s))
        .collect();
    let n_fixtures = cases.len();
    cases.extend((0..config.random_machines).map(|i| MachineCase::random(config.seed, i)));

    let mut jobs: Vec<Job> = Vec::new();
    let mut channel_cases = cases.clone();
    if config.inject_fault {
        channel_cases.push(MachineCase::corrupted_rotation());
    }
    for (i, case) in channel_cases.into_iter().enumerate() {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            let params = ChannelLawParams {
                word_len: cfg.channel_word_len,
                ms: cfg.channel_ms.clone(),
                density_inputs: cfg.density_inputs,
                seed: cfg.seed.wrapping_add(i as u64),
            };
            vec![check_channel_laws(&case, &params), check_structural_zeros(&case, &params)]
        }));
    }
    for case in cases.iter().take(n_fixtures).cloned() {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            vec![check_equivalence(
                &case,
                cfg.equivalence_word_len,
                &cfg.equivalence_ms,
                cfg.branch_threshold,
                cfg.seed,
            )]
        }));
    }
    for case in cases.iter().take(n_fixtures).cloned() {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            let conv = convenient(&case);
            let words = all_words(conv.spec.alphabet(), 2);
            let mut out = Vec::new();
            for (a, x) in words.iter().enumerate() {
                for xp in &words[a + 1..] {
                    for y in all_words(conv.spec.alphabet(), 1) {
                        out.push(check_crossing_distance(&conv, x, xp, &y, cfg.crossing_m, cfg.crossing_i_max));
                    }
                }
            }
            vec![merge(format!("crossing-distance/{}", case.label), out)]
        }));
    }
    {
        let cfg = config.clone();
        let randoms: Vec<MachineCase> = cases[n_fixtures..].to_vec();
        jobs.push(Box::new(move || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(u64::MAX);
            let out: Vec<CheckResult> = (0..cfg.crossing_random_instances)
                .filter_map(|i| {
                    let case = randoms.get(i % randoms.len().max(1))?;
                    let conv = convenient(case);
                    let (x, xp, y) = random_triple(conv.spec.alphabet(), &mut rng);
                    Some(check_crossing_distance(&conv, &x, &xp, &y, cfg.crossing_m, cfg.crossing_i_max))
                })
                .collect();
            vec![merge("crossing-distance/random".into(), out)]
        }));
    }
    for case in cases.iter().take(n_fixtures).cloned() {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            let conv = convenient(&case);
            let words = all_words(conv.spec.alphabet(), cfg.packing_word_len);
            vec![
                check_packing(&conv, &words, cfg.packing_m),
                check_feature_bounds(&conv, &words, cfg.packing_m),
            ]
        }));
    }
    for case in cases.iter().take(n_fixtures).cloned() {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            let conv = convenient(&case);
            let mut out = Vec::new();
            for w in all_words(conv.spec.alphabet(), cfg.bridge_word_len) {
                for split in 0..=w.len() {
                    out.push(check_bridge(&conv, &w[..split], &w[split..], cfg.bridge_m));
                }
            }
            vec![merge(format!("bridge/{}", case.label), out)]
        }));
    }
    for (machine, language) in [("parity", "parity"), ("rotation", "eq"), ("coin", "all")] {
        let cfg = config.clone();
        jobs.push(Box::new(move || {
            let case = MachineCase::fixture(machine, fixtures::by_name(machine).expect("fixture"));
            let oracle = crate::langs::oracle_by_name(language).expect("built-in oracle");
            vec![check_theorem_constant(&case, &oracle, cfg.theorem_n, cfg.theorem_cap)]
        }));
    }
    {
        let cfg = config.clone();
        jobs.push(Box::new(move || check_hardness_monotonicity(cfg.hardness_max_n, cfg.hardness_budget)));
    }
    {
        let cfg = config.clone();
        jobs.push(Box::new(move || check_growth(cfg.growth_max_n)));
    }

    let mut results: Vec<CheckResult> = jobs.par_iter().flat_map(|job| job()).collect();
    results.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    results
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Combines instance-level results into one check.
pub fn merge(check_id: String, parts: Vec<CheckResult>) -> CheckResult {
    let instances = parts.iter().map(|p| p.instances).sum();
    let tolerance = parts.iter().map(|p| p.tolerance).fold(0.0, f64::max);
    let applicable: Vec<&CheckResult> = parts.iter().filter(|p| p.status != Status::NotApplicable).collect();
    let Some(worst) = applicable
        .iter()
        .min_by(|a, b| a.worst_slack.total_cmp(&b.worst_slack))
    else {
        return CheckResult::not_applicable(check_id, Value::Null);
    };
    let passed = applicable.iter().all(|p| p.passed);
    CheckResult {
        check_id,
        instances,
        worst_slack: worst.worst_slack,
        tolerance,
        witnesses: worst.witnesses.clone(),
        passed,
        status: if passed { Status::Pass } else { Status::Fail },
    }
}

fn convenient(case: &MachineCase) -> MachineCase {
    MachineCase {
        label: case.label.clone(),
        spec: case.spec.to_convenient_form(),
        origin: json!({ "convenient_form_of": case.origin }),
    }
}

/// Strings over `alphabet` of length at most `len`, length-lex order.
pub fn all_words(alphabet: &[char], len: usize) -> Vec<String> {
    crate::hardness::words_up_to(alphabet.len(), len)
        .into_iter()
        .map(|w| w.iter().map(|&i| alphabet[i as usize]).collect())
        .collect()
}

fn random_triple(alphabet: &[char], rng: &mut ChaCha8Rng) -> (String, String, String) {
    use rand::Rng;
    let word = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.random_range(0..=3);
        (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
    };
    let x = word(rng);
    let mut xp = word(rng);
    while xp == x {
        xp = word(rng);
    }
    let y = word(rng);
    (x, xp, y)
}

/// Human-readable summary table.
pub fn summary_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
    let mut s = format!("{:<width$}  {:>9}  {:>24}  status\n", "check", "instances", "worst_slack");
    for r in results {
        s.push_str(&format!(
            "{:<width$}  {:>9}  {:>24.16e}  {}\n",
            r.check_id, r.instances, r.worst_slack, r.status
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_keeps_worst_instance() {
        let mut t = SlackTracker::new("demo", 1e-9);
        t.record(0.5, || json!(1));
        t.record(-1e-10, || json!(2));
        t.record(0.1, || json!(3));
        let r = t.finish();
        assert_eq!(r.instances, 3);
        assert_eq!(r.witnesses, json!(2));
        assert!(r.passed);
        let mut t = SlackTracker::new("demo", 1e-9);
        t.record(f64::NAN, || json!("nan"));
        assert!(!t.finish().passed);
    }

    #[test]
    fn random_cases_are_reproducible() {
        let a = MachineCase::random(7, 3);
        let b = MachineCase::random(7, 3);
        assert_eq!(a.spec.to_json_string(), b.spec.to_json_string());
        assert_ne!(a.spec.to_json_string(), MachineCase::random(7, 4).spec.to_json_string());
    }

    #[test]
    fn quick_suite_passes_and_fault_is_caught() {
        let cfg = VerifyConfig {
            inject_fault: true,
            ..VerifyConfig::quick()
        };
        let results = run_all(&cfg);
        let failed: Vec<&CheckResult> = results.iter().filter(|r| !r.passed).collect();
        assert_eq!(failed.len(), 1, "{}", summary_table(&results));
        assert_eq!(failed[0].check_id, "channel-laws/corrupted-rotation");
        assert_eq!(failed[0].witnesses["transition"], json!(["s_sweep", "a"]));
        let mut ids: Vec<&str> = results.iter().map(|r| r.check_id.as_str()).collect();
        let sorted = ids.clone();
        ids.sort();
        assert_eq!(ids, sorted);
    }
}
