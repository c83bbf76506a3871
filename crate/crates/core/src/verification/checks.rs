use super::{all_words, enumerate_branches, CheckResult, MachineCase, SlackTracker};
use crate::hardness::{
    exhaustive_dfa_crosscheck, nonregularity, witness_report, HardnessConfig, HardnessError,
    LanguageOracle, Mode,
};
use crate::langs::{self, growth, growth_vs_nonregularity, GroupPresentation};
use crate::machine::{exact_run, TwoQcfaSpec};
use crate::quantum::{
    c, choi_trace_norm_bound, min_eigenvalue, random as qrandom, tol, trace, trace_norm,
    ComplexMatrix, ComplexVector,
};
use crate::transfer::{
    accept_profile, crossing_sequence, dual_transfer_operator, transfer_operator, ClassicalBlocks,
    Segment, Side, TransferOperator,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelLawParams {
    pub word_len: usize,
    pub ms: Vec<usize>,
    pub density_inputs: usize,
    pub seed: u64,
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::LeftPrefix => "prefix",
        Side::RightSuffix => "suffix",
    }
}

fn operator(spec: &TwoQcfaSpec, side: Side, w: &str, m: usize) -> Result<TransferOperator, crate::machine::MachineError> {
    match side {
        Side::LeftPrefix => transfer_operator(spec, w, m),
        Side::RightSuffix => dual_transfer_operator(spec, w, m),
    }
}

/// First transition whose Kraus family is not complete, as `[state, symbol]`.
fn incomplete_transition(spec: &TwoQcfaSpec) -> Value {
    for cl in 0..spec.d() {
        for sym in 0..spec.extended_len() {
            if let Some(rule) = spec.rule(cl, sym) {
                if rule.operation.completeness().residual > tol::CHAN {
                    return json!([spec.classical_states()[cl], spec.symbol_name(sym)]);
                }
            }
        }
    }
    Value::Null
}

fn classical_diagonal_blocks(rho: &ComplexMatrix, k: usize, d: usize) -> ClassicalBlocks {
    (0..d)
        .map(|cl| ComplexMatrix::from_fn(k, k, |q, q2| rho[(q * d + cl, q2 * d + cl)]))
        .collect()
}

fn blocks_trace(z: &[ComplexMatrix]) -> f64 {
    z.iter().map(|b| trace(b).re).sum()
}

/// Completeness of the single-step channel, complete positivity of every
/// transfer operator (Choi spectrum) and trace preservation on random
/// classical-diagonal density inputs, for prefixes and suffixes of length at
/// most `word_len` and each truncation `m`.
pub fn check_channel_laws(case: &MachineCase, params: &ChannelLawParams) -> CheckResult {
    let spec = &case.spec;
    let id = format!("channel-laws/{}", case.label);
    let bad = incomplete_transition(spec);
    let mut t = SlackTracker::new(id, tol::CHAN);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (k, d) = (spec.k(), spec.d());
    for side in [Side::LeftPrefix, Side::RightSuffix] {
        for w in all_words(spec.alphabet(), params.word_len) {
            let seg = match side {
                Side::LeftPrefix => Segment::prefix(spec, &w),
                Side::RightSuffix => Segment::suffix(spec, &w),
            };
            let seg = match seg {
                Ok(s) => s,
                Err(e) => return CheckResult::error(t.finish().check_id, e, case.witness(json!({ "word": w }))),
            };
            let step = seg.check_step_channel();
            let witness = |law: &str, value: f64, m: Option<usize>| {
                case.witness(json!({
                    "law": law, "side": side_name(side), "word": w, "m": m,
                    "value": value, "transition": bad,
                }))
            };
            t.record(-step.residual, || witness("step-completeness", step.residual, None));
            for &m in &params.ms {
                let op = match operator(spec, side, &w, m) {
                    Ok(op) => op,
                    Err(e) => return CheckResult::error(t.finish().check_id, e, witness("build", 0.0, Some(m))),
                };
                let lam = min_eigenvalue(&op.choi());
                t.record(lam, || witness("choi-psd", lam, Some(m)));
                let mut worst = 0.0f64;
                for _ in 0..params.density_inputs {
                    let rho = qrandom::density(k * d, &mut rng);
                    let z = classical_diagonal_blocks(rho.matrix(), k, d);
                    let defect = (blocks_trace(&op.apply_blocks(&z)) - blocks_trace(&z)).abs();
                    worst = worst.max(defect);
                }
                t.record(-worst, || witness("trace-preservation", worst, Some(m)));
            }
        }
    }
    t.finish()
}

/// Entries of every transfer operator that the classical-diagonal structure
/// forces to vanish.
pub fn check_structural_zeros(case: &MachineCase, params: &ChannelLawParams) -> CheckResult {
    let spec = &case.spec;
    let mut t = SlackTracker::new(format!("structural-zeros/{}", case.label), tol::ZERO);
    for side in [Side::LeftPrefix, Side::RightSuffix] {
        for w in all_words(spec.alphabet(), params.word_len) {
            for &m in &params.ms {
                match operator(spec, side, &w, m) {
                    Ok(op) => {
                        let v = op.structural_zero_violation();
                        t.record(-v, || case.witness(json!({ "side": side_name(side), "word": w, "m": m, "value": v })));
                    }
                    Err(e) => return CheckResult::error(t.finish().check_id, e, case.witness(json!({ "word": w }))),
                }
            }
        }
    }
    t.finish()
}

/// Transfer operators against exhaustive branch enumeration on pure inputs:
/// `||N(Z) - N_branches(Z)||_1 <= pruned mass`.
pub fn check_equivalence(case: &MachineCase, word_len: usize, ms: &[usize], threshold: f64, seed: u64) -> CheckResult {
    let spec = &case.spec;
    let (k, d) = (spec.k(), spec.d());
    let mut t = SlackTracker::new(format!("equivalence/{}", case.label), tol::CHAN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states: Vec<ComplexVector> = (0..k)
        .map(|q| ComplexVector::from_fn(k, |i, _| if i == q { c(1.0, 0.0) } else { c(0.0, 0.0) }))
        .collect();
    states.push(qrandom::unit_vector(k, &mut rng));
    for side in [Side::LeftPrefix, Side::RightSuffix] {
        for w in all_words(spec.alphabet(), word_len) {
            for &m in ms {
                let op = match operator(spec, side, &w, m) {
                    Ok(op) => op,
                    Err(e) => return CheckResult::error(t.finish().check_id, e, case.witness(json!({ "word": w }))),
                };
                for cl in 0..d {
                    for (si, psi) in states.iter().enumerate() {
                        let mut z = vec![ComplexMatrix::zeros(k, k); d];
                        z[cl] = psi * psi.adjoint();
                        let fast = op.apply_blocks(&z);
                        let slow = match enumerate_branches(spec, side, &w, m, cl, psi, threshold) {
                            Ok(o) => o,
                            Err(e) => return CheckResult::error(t.finish().check_id, e, case.witness(json!({ "word": w }))),
                        };
                        let dist: f64 = fast.iter().zip(&slow.blocks).map(|(a, b)| trace_norm(&(a - b))).sum();
                        t.record(slow.pruned_mass - dist, || {
                            case.witness(json!({
                                "side": side_name(side), "word": w, "m": m,
                                "classical": spec.classical_states()[cl], "input_state": si,
                                "distance": dist, "pruned_mass": slow.pruned_mass,
                            }))
                        });
                    }
                }
            }
        }
    }
    t.finish()
}

fn ensure_convenient(case: &MachineCase) -> TwoQcfaSpec {
    if case.spec.is_convenient() {
        case.spec.clone()
    } else {
        case.spec.to_convenient_form()
    }
}

/// `||Z_i - Z'_i||_1 <= floor((i-1)/2) B` for `i <= i_max`, where `B` is the
/// Choi trace-norm bound on `N_{x,m} - N_{x',m}`.
pub fn check_crossing_distance(case: &MachineCase, x: &str, xp: &str, y: &str, m: usize, i_max: usize) -> CheckResult {
    let id = "crossing-distance";
    let inputs = case.witness(json!({ "x": x, "x_prime": xp, "y": y, "m": m, "i_max": i_max }));
    let spec = ensure_convenient(case);
    let built = (|| {
        let nx = transfer_operator(&spec, x, m)?;
        let nxp = transfer_operator(&spec, xp, m)?;
        let ny = dual_transfer_operator(&spec, y, m)?;
        Ok::<_, crate::machine::MachineError>((nx, nxp, ny))
    })();
    let (nx, nxp, ny) = match built {
        Ok(v) => v,
        Err(e) => return CheckResult::error(id, e, inputs),
    };
    let b = match choi_trace_norm_bound(&nx.to_superoperator(), &nxp.to_superoperator()) {
        Ok(b) => b,
        Err(e) => return CheckResult::error(id, e, inputs),
    };
    let zs = crate::transfer::crossing_sequence_from(&spec, &nx, &ny, i_max);
    let zps = crate::transfer::crossing_sequence_from(&spec, &nxp, &ny, i_max);
    let mut t = SlackTracker::new(id, tol::CHAN);
    for (idx, dist) in zs.distances(&zps).into_iter().enumerate() {
        let i = idx + 1;
        let bound = ((i - 1) / 2) as f64 * b;
        t.record(bound - dist, || {
            let mut w = inputs.clone();
            w["i"] = json!(i);
            w["distance"] = json!(dist);
            w["choi_bound"] = json!(b);
            w
        });
    }
    t.finish()
}

/// `4 sqrt(2) h (|X|^(1/h) - 1)^(-1)`.
pub fn packing_bound(h: usize, set_size: usize) -> f64 {
    let h = h as f64;
    4.0 * 2f64.sqrt() * h / ((set_size as f64).powf(1.0 / h) - 1.0)
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn prefix_operators(spec: &TwoQcfaSpec, words: &[String], m: usize) -> Result<Vec<TransferOperator>, crate::machine::MachineError> {
    words.par_iter().map(|w| transfer_operator(spec, w, m)).collect()
}

/// Packing along the feature-vector route: the closest pair of `X` under
/// `sqrt(2h) ||g(x) - g(x')||` is within `4 sqrt(2) h (|X|^(1/h) - 1)^(-1)`.
pub fn check_packing(case: &MachineCase, words: &[String], m: usize) -> CheckResult {
    let id = format!("packing/{}", case.label);
    let inputs = case.witness(json!({ "set": words, "m": m }));
    if words.len() < 2 {
        return CheckResult::error(id, "|X| < 2", inputs);
    }
    let spec = ensure_convenient(case);
    let ops = match prefix_operators(&spec, words, m) {
        Ok(o) => o,
        Err(e) => return CheckResult::error(id, e, inputs),
    };
    let h = ops[0].feature_len();
    let scale = (2.0 * h as f64).sqrt();
    let g: Vec<Vec<f64>> = ops.iter().map(|o| o.feature_vector()).collect();
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let v = scale * l2_distance(&g[i], &g[j]);
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    let bound = packing_bound(h, words.len());
    let mut t = SlackTracker::new(id, tol::CHAN);
    t.record(bound - best.0, || {
        case.witness(json!({
            "m": m, "set_size": words.len(), "h": h, "closest_pair": [words[best.1], words[best.2]],
            "scaled_distance": best.0, "bound": bound,
        }))
    });
    t.finish()
}

/// `||g(x)|| <= sqrt(h)` for every `x`, and `||J(N_x - N_x')||_1 <= sqrt(2h) ||g(x) - g(x')||`
/// for every pair.
pub fn check_feature_bounds(case: &MachineCase, words: &[String], m: usize) -> CheckResult {
    let id = format!("feature-bounds/{}", case.label);
    let spec = ensure_convenient(case);
    let ops = match prefix_operators(&spec, words, m) {
        Ok(o) => o,
        Err(e) => return CheckResult::error(id, e, case.witness(json!({ "set": words, "m": m }))),
    };
    let mut t = SlackTracker::new(id, tol::CHAN);
    let Some(first) = ops.first() else {
        return t.finish();
    };
    let h = first.feature_len();
    let g: Vec<Vec<f64>> = ops.iter().map(|o| o.feature_vector()).collect();
    let sups: Vec<_> = ops.iter().map(|o| o.to_superoperator()).collect();
    for (w, gx) in words.iter().zip(&g) {
        let norm = gx.iter().map(|v| v * v).sum::<f64>().sqrt();
        t.record((h as f64).sqrt() - norm, || case.witness(json!({ "x": w, "m": m, "norm": norm, "h": h })));
    }
    let pairs: Vec<(usize, usize)> = (0..words.len())
        .flat_map(|i| (i + 1..words.len()).map(move |j| (i, j)))
        .collect();
    let slacks: Vec<(usize, usize, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let choi = choi_trace_norm_bound(&sups[i], &sups[j]).unwrap_or(f64::NAN);
            let rhs = (2.0 * h as f64).sqrt() * l2_distance(&g[i], &g[j]);
            (i, j, choi, rhs)
        })
        .collect();
    for (i, j, choi, rhs) in slacks {
        t.record(rhs - choi, || {
            case.witness(json!({ "x": words[i], "x_prime": words[j], "m": m, "choi_distance": choi, "feature_bound": rhs }))
        });
    }
    t.finish()
}

/// `p_N(xy, s) <= p_{m,s}(c_acc)` and `1 - h_N(xy, s) <= T/s` for `1 <= s <= m`,
/// with `T` the measured expected-time lower bound at step cap `m`.
pub fn check_bridge(case: &MachineCase, x: &str, y: &str, m: usize) -> CheckResult {
    let id = "bridge";
    let inputs = case.witness(json!({ "x": x, "y": y, "m": m }));
    if m == 0 {
        return CheckResult::error(id, "m must be at least 1", inputs);
    }
    let spec = ensure_convenient(case);
    let xy = format!("{x}{y}");
    let (cs, run) = match (crossing_sequence(&spec, x, y, m, m), exact_run(&spec, &xy, m)) {
        (Ok(cs), Ok(run)) => (cs, run),
        (Err(e), _) | (_, Err(e)) => return CheckResult::error(id, e, inputs),
    };
    let profile = accept_profile(&cs);
    let t_hat = run.expected_time_lower;
    let mut t = SlackTracker::new(id, tol::CHAN);
    for s in 1..=m {
        let p_time = run.p_accept_at(s);
        let p_cross = profile[s - 1][spec.c_acc()];
        t.record(p_cross - p_time, || {
            let mut w = inputs.clone();
            w["s"] = json!(s);
            w["inequality"] = json!("accept-within-steps <= accept-within-crossings");
            w["p_steps"] = json!(p_time);
            w["p_crossings"] = json!(p_cross);
            w
        });
        let not_halted = run.p_running_by_step[s - 1];
        t.record(t_hat / s as f64 - not_halted, || {
            let mut w = inputs.clone();
            w["s"] = json!(s);
            w["inequality"] = json!("markov");
            w["not_halted"] = json!(not_halted);
            w["expected_time_lower"] = json!(t_hat);
            w
        });
    }
    t.finish()
}

/// Both sides of `T(n) >= (1 - 2 eps)^2 / (16 sqrt(2) h) D_L(n)^(1/h)` with
/// measured `eps` and `T(n)`, reported as not applicable when `eps >= 1/2`.
pub fn check_theorem_constant(case: &MachineCase, oracle: &LanguageOracle, n: usize, cap: usize) -> CheckResult {
    let id = format!("theorem-constant/{}-vs-{}", case.label, oracle.name());
    let spec = &case.spec;
    let inputs = case.witness(json!({ "language": oracle.name(), "n": n, "step_cap": cap }));
    if spec.alphabet() != oracle.alphabet() {
        return CheckResult::error(id, "machine and language alphabets differ", inputs);
    }
    let words = all_words(spec.alphabet(), n);
    let runs: Result<Vec<_>, _> = words.par_iter().map(|w| exact_run(spec, w, cap)).collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return CheckResult::error(id, e, inputs),
    };
    let mut eps = 0.0f64;
    let mut worst_word = String::new();
    let mut t_hat = 0.0f64;
    for (w, r) in words.iter().zip(&runs) {
        let member = oracle.contains(w).unwrap_or(false);
        let err = 1.0 - if member { r.p_accept() } else { r.p_reject() };
        if err > eps {
            eps = err;
            worst_word = w.clone();
        }
        t_hat = t_hat.max(r.expected_time_lower);
    }
    let report = match nonregularity(oracle, n, Mode::Exact, &HardnessConfig::default()) {
        Ok(r) => r,
        Err(e) => return CheckResult::error(id, e, inputs),
    };
    let d_value = report.best();
    let h = spec.k().pow(4) * spec.d() * spec.d();
    let rhs = (1.0 - 2.0 * eps).powi(2) / (16.0 * 2f64.sqrt() * h as f64) * (d_value as f64).powf(1.0 / h as f64);
    let detail = case.witness(json!({
        "language": oracle.name(), "n": n, "step_cap": cap, "eps_hat": eps, "worst_word": worst_word,
        "t_hat": t_hat, "rhs": rhs, "d": d_value, "d_is_exact": report.d_exact.is_some(), "h": h,
    }));
    if eps >= 0.5 {
        return CheckResult::not_applicable(id, detail);
    }
    let mut t = SlackTracker::new(id, tol::CHAN);
    t.record(t_hat - rhs, || detail);
    t.finish()
}

fn hardness_error(id: String, e: HardnessError, n: usize) -> CheckResult {
    CheckResult::error(id, e, json!({ "n": n }))
}

/// `D(n) <= D(n+1)` on every built-in oracle for `n < max_n` (lower mode
/// everywhere, exact mode on binary alphabets when the search completes), the
/// `C = log2 D` identity, parity's exact value, the palindrome witness sets and
/// the minimal-DFA cross-check.
pub fn check_hardness_monotonicity(max_n: usize, budget: u128) -> Vec<CheckResult> {
    let oracles = langs::builtin_oracles();
    let mut out: Vec<CheckResult> = oracles
        .par_iter()
        .map(|o| {
            let id = format!("hardness-monotonicity/{}", o.name());
            let mut t = SlackTracker::new(id.clone(), 0.0);
            let binary = o.alphabet().len() == 2;
            let cfg = HardnessConfig { budget, clique_nodes: 200_000 };
            let mut prev: Option<(usize, Option<usize>)> = None;
            for n in 0..=max_n {
                let mode = if binary { Mode::Exact } else { Mode::Lower };
                let r = match nonregularity(o, n, mode, &cfg) {
                    Ok(r) => r,
                    Err(e) => return hardness_error(id, e, n),
                };
                let bits_err = (r.c_bits - (r.best() as f64).log2()).abs();
                t.record(-bits_err, || json!({ "n": n, "identity": "c_bits = log2 D", "error": bits_err }));
                t.record(if r.witnesses_verified { 0.0 } else { -1.0 }, || {
                    json!({ "n": n, "witnesses_verified": r.witnesses_verified, "witnesses": r.witness_set })
                });
                if let Some((pl, pe)) = prev {
                    t.record(r.d_lower as f64 - pl as f64, || json!({ "n": n, "mode": "lower", "d_prev": pl, "d": r.d_lower }));
                    if let (Some(a), Some(b)) = (pe, r.d_exact) {
                        t.record(b as f64 - a as f64, || json!({ "n": n, "mode": "exact", "d_prev": a, "d": b }));
                    }
                }
                prev = Some((r.d_lower, r.d_exact));
            }
            t.finish()
        })
        .collect();

    let parity = langs::parity();
    let mut t = SlackTracker::new("hardness-parity-exact", 0.0);
    for n in 1..=6 {
        match nonregularity(&parity, n, Mode::Exact, &HardnessConfig::default()) {
            Ok(r) => t.record(if r.d_exact == Some(2) { 0.0 } else { -1.0 }, || json!({ "n": n, "d_exact": r.d_exact })),
            Err(e) => return vec![hardness_error("hardness-parity-exact".into(), e, n)],
        }
    }
    out.push(t.finish());

    let pal = langs::palindromes();
    let mut t = SlackTracker::new("hardness-palindrome-witnesses", 0.0);
    for n in 1..=5 {
        let witnesses = crate::hardness::words_up_to(2, n)
            .into_iter()
            .filter(|w| w.len() == n)
            .collect::<Vec<_>>();
        let r = witness_report(&pal, 2 * n, &witnesses);
        let ok = r.witnesses_verified && r.d_lower >= 1 << n;
        t.record(if ok { 0.0 } else { -1.0 }, || json!({ "n": n, "horizon": 2 * n, "d_lower": r.d_lower, "verified": r.witnesses_verified }));
        if 2 * n <= 12 {
            if let Ok(s) = nonregularity(&pal, 2 * n, Mode::Lower, &HardnessConfig::default()) {
                t.record(s.d_lower as f64 - (1u64 << n) as f64, || json!({ "n": n, "search_lower": s.d_lower }));
            }
        }
    }
    out.push(t.finish());

    let mut t = SlackTracker::new("hardness-dfa-crosscheck", 0.0);
    for o in oracles.iter().filter(|o| o.alphabet().len() == 2) {
        for n in 0..=max_n.min(6) {
            let Some(states) = exhaustive_dfa_crosscheck(o, n, 3) else {
                continue;
            };
            match nonregularity(o, n, Mode::Exact, &HardnessConfig::default()) {
                Ok(r) => {
                    if let Some(d) = r.d_exact {
                        t.record(-(states as f64 - d as f64).abs(), || {
                            json!({ "language": o.name(), "n": n, "dfa_states": states, "d_exact": d })
                        });
                    }
                }
                Err(e) => return vec![hardness_error("hardness-dfa-crosscheck".into(), e, n)],
            }
        }
    }
    out.push(t.finish());
    out
}

/// Closed-form growth of `ℤ`, `ℤ²` and `F₂`, submultiplicativity of every
/// table, and `D_{W_G}(2n) >= β(n)` through verified witness sets.
pub fn check_growth(max_n: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let groups = GroupPresentation::builtin();

    let mut t = SlackTracker::new("growth-closed-form", 0.0);
    for g in &groups {
        let (radius, formula): (usize, fn(usize) -> usize) = match g.name() {
            "z" => (10, |n| 2 * n + 1),
            "z2" => (8, |n| 2 * n * n + 2 * n + 1),
            "f2" => (6, |n| 2 * 3usize.pow(n as u32) - 1),
            _ => continue,
        };
        match growth(g, radius) {
            Ok(table) => {
                for n in 0..=radius {
                    let (got, want) = (table.beta(n), formula(n));
                    t.record(-(got as f64 - want as f64).abs(), || json!({ "group": g.name(), "n": n, "beta": got, "expected": want }));
                }
            }
            Err(e) => return vec![hardness_error("growth-closed-form".into(), e, radius)],
        }
    }
    out.push(t.finish());

    let mut t = SlackTracker::new("growth-submultiplicative", 0.0);
    for g in &groups {
        let radius = match g.name() {
            "z" => 10,
            "z2" | "heisenberg" => 8,
            _ => 6,
        };
        match growth(g, radius) {
            Ok(table) => {
                let top = table.radius();
                for m in 0..=top {
                    for n in 0..=top - m {
                        let (lhs, rhs) = (table.beta(m + n), table.beta(m) * table.beta(n));
                        t.record(rhs as f64 - lhs as f64, || json!({ "group": g.name(), "m": m, "n": n, "beta_sum": lhs, "product": rhs }));
                    }
                }
                t.record(if table.beta(0) == 1 { 0.0 } else { -1.0 }, || json!({ "group": g.name(), "beta0": table.beta(0) }));
            }
            Err(e) => return vec![hardness_error("growth-submultiplicative".into(), e, radius)],
        }
    }
    out.push(t.finish());

    for g in &groups {
        let id = format!("growth-lemma/{}", g.name());
        let top = if matches!(g.name(), "z" | "z2") { max_n + 1 } else { max_n };
        let mut t = SlackTracker::new(id.clone(), 0.0);
        for n in 0..=top {
            match growth_vs_nonregularity(g, n, &HardnessConfig::default()) {
                Ok(r) => {
                    let best = r.d_lower.max(r.search_lower.unwrap_or(0));
                    t.record(best as f64 - r.beta as f64, || {
                        json!({ "group": g.name(), "n": n, "beta": r.beta, "d_lower": r.d_lower,
                                "search_lower": r.search_lower, "verified": r.construction_verified })
                    });
                }
                Err(e) => {
                    out.push(hardness_error(id, e, n));
                    break;
                }
            }
        }
        if out.last().is_none_or(|r| r.check_id != format!("growth-lemma/{}", g.name())) {
            out.push(t.finish());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::fixtures;

    fn fixture(name: &str) -> MachineCase {
        MachineCase::fixture(name, fixtures::by_name(name).unwrap())
    }

    #[test]
    fn identical_prefixes_have_zero_distance() {
        let r = check_crossing_distance(&fixture("rotation"), "ab", "ab", "a", 20, 10);
        assert!(r.passed);
        assert_eq!(r.worst_slack, 0.0);
    }

    #[test]
    fn parity_crossing_distance_holds() {
        let r = check_crossing_distance(&fixture("parity"), "a", "b", "a", 20, 10);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.instances, 10);
    }

    #[test]
    fn packing_needs_two_strings() {
        let r = check_packing(&fixture("rotation"), &["a".to_string()], 5);
        assert!(!r.passed);
        assert_eq!(r.witnesses["error"], "|X| < 2");
    }

    #[test]
    fn packing_bound_shape() {
        assert!((packing_bound(1, 2) - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(packing_bound(576, 15) > 1e5);
    }

    #[test]
    fn parity_theorem_constant_has_slack() {
        let r = check_theorem_constant(&fixture("parity"), &langs::parity(), 4, 200);
        assert!(r.passed);
        assert_eq!(r.witnesses["eps_hat"], 0.0);
        assert_eq!(r.witnesses["d"], 2);
        assert!(r.worst_slack > 1.0);
    }

    #[test]
    fn bridge_on_deterministic_input() {
        let r = check_bridge(&fixture("parity"), "a", "ba", 50);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn equivalence_on_coin() {
        let r = check_equivalence(&fixture("coin"), 2, &[0, 3, 12], 1e-14, 1);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn corrupted_machine_names_transition() {
        let case = MachineCase::corrupted_rotation();
        let params = ChannelLawParams { word_len: 1, ms: vec![0, 5], density_inputs: 3, seed: 0 };
        let r = check_channel_laws(&case, &params);
        assert!(!r.passed);
        assert_eq!(r.witnesses["transition"], json!(["s_sweep", "a"]));
    }
}
