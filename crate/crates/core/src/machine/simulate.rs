use super::{MachineError, TwoQcfaSpec};
use crate::quantum::{ket_bra, trace, ComplexMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Per-step acceptance statistics of one input. Index `t - 1` holds the value
/// after step `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStatistics {
    pub input: String,
    pub p_accept_by_step: Vec<f64>,
    pub p_reject_by_step: Vec<f64>,
    pub p_running_by_step: Vec<f64>,
    pub p_running: f64,
    /// `sum_t t * (halting mass at t) + step_cap * p_running`
    pub expected_time_lower: f64,
    pub step_cap: usize,
}

impl RunStatistics {
    pub fn p_accept(&self) -> f64 {
        self.p_accept_by_step.last().copied().unwrap_or(0.0)
    }

    pub fn p_reject(&self) -> f64 {
        self.p_reject_by_step.last().copied().unwrap_or(0.0)
    }

    /// Accept probability after `t` steps (`t = 0` gives 0).
    pub fn p_accept_at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.p_accept_by_step[t.min(self.step_cap) - 1]
        }
    }

    fn from_series(input: &str, acc: Vec<f64>, rej: Vec<f64>, run: Vec<f64>) -> Self {
        let step_cap = acc.len();
        let mut expected = 0.0;
        let mut prev = 1.0;
        for (t, &r) in run.iter().enumerate() {
            expected += (t + 1) as f64 * (prev - r);
            prev = r;
        }
        expected += step_cap as f64 * prev;
        Self {
            input: input.to_string(),
            p_accept_by_step: acc,
            p_reject_by_step: rej,
            p_running: prev,
            p_running_by_step: run,
            expected_time_lower: expected,
            step_cap,
        }
    }
}

/// Full-tape evolution in classical-diagonal block form: one `k x k` block per
/// (classical state, head position). Halting blocks are absorbing.
#[derive(Debug, Clone)]
pub struct ExactSimulator<'a> {
    spec: &'a TwoQcfaSpec,
    tape: Vec<usize>,
    blocks: Vec<Option<ComplexMatrix>>,
    time: usize,
}

impl<'a> ExactSimulator<'a> {
    pub fn new(spec: &'a TwoQcfaSpec, w: &str) -> Result<Self, MachineError> {
        let tape = spec.tape(w)?;
        let mut blocks = vec![None; spec.d() * tape.len()];
        let k = spec.k();
        blocks[spec.c_start() * tape.len()] = Some(ket_bra(k, spec.q_start(), spec.q_start()));
        Ok(Self {
            spec,
            tape,
            blocks,
            time: 0,
        })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn tape_len(&self) -> usize {
        self.tape.len()
    }

    /// Nonzero blocks as `(c, h, block)`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &ComplexMatrix)> {
        let n = self.tape.len();
        self.blocks
            .iter()
            .enumerate()
            .filter_map(move |(i, b)| b.as_ref().map(|b| (i / n, i % n, b)))
    }

    fn mass_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.blocks()
            .filter(|(c, _, _)| pred(*c))
            .map(|(_, _, b)| trace(b).re)
            .sum()
    }

    pub fn accept_mass(&self) -> f64 {
        self.mass_where(|c| c == self.spec.c_acc())
    }

    pub fn reject_mass(&self) -> f64 {
        self.mass_where(|c| c == self.spec.c_rej())
    }

    pub fn running_mass(&self) -> f64 {
        self.mass_where(|c| !self.spec.is_halting(c))
    }

    pub fn is_finished(&self) -> bool {
        self.blocks().all(|(c, _, _)| self.spec.is_halting(c))
    }

    pub fn step(&mut self) {
        let n = self.tape.len();
        let mut next: Vec<Option<ComplexMatrix>> = vec![None; self.blocks.len()];
        for (i, slot) in self.blocks.iter().enumerate() {
            let Some(block) = slot else { continue };
            let (c, h) = (i / n, i % n);
            if self.spec.is_halting(c) {
                add_block(&mut next[i], block.clone());
                continue;
            }
            let rule = self.spec.rule(c, self.tape[h]).expect("validated machine");
            for r in rule.operation.active_results() {
                let image = rule.operation.partial_map(r, block);
                let t = rule.transitions[r];
                let h2 = (h as isize + t.head_move.offset()) as usize;
                add_block(&mut next[t.next * n + h2], image);
            }
        }
        self.blocks = next;
        self.time += 1;
    }
}

fn add_block(slot: &mut Option<ComplexMatrix>, m: ComplexMatrix) {
    match slot {
        Some(b) => *b += m,
        None => *slot = Some(m),
    }
}

fn check_cap(step_cap: usize) -> Result<(), MachineError> {
    if step_cap == 0 {
        return Err(MachineError::InvalidArgument("step_cap must be at least 1".into()));
    }
    Ok(())
}

/// Exact cumulative accept/reject probabilities for `step_cap` steps.
pub fn exact_run(spec: &TwoQcfaSpec, w: &str, step_cap: usize) -> Result<RunStatistics, MachineError> {
    check_cap(step_cap)?;
    let mut sim = ExactSimulator::new(spec, w)?;
    let (mut acc, mut rej, mut run) = (Vec::new(), Vec::new(), Vec::new());
    while sim.time() < step_cap {
        sim.step();
        acc.push(sim.accept_mass());
        rej.push(sim.reject_mass());
        run.push(sim.running_mass());
        if sim.is_finished() {
            break;
        }
    }
    let pad = |v: &mut Vec<f64>| {
        let last = *v.last().expect("at least one step");
        v.resize(step_cap, last);
    };
    pad(&mut acc);
    pad(&mut rej);
    pad(&mut run);
    Ok(RunStatistics::from_series(w, acc, rej, run))
}

/// Outcome of one sampled run: `Some((accepted, step))` or `None` if still running at the cap.
fn sample_run(spec: &TwoQcfaSpec, tape: &[usize], step_cap: usize, rng: &mut ChaCha8Rng) -> Option<(bool, usize)> {
    let k = spec.k();
    let mut rho = ket_bra(k, spec.q_start(), spec.q_start());
    let (mut c, mut h) = (spec.c_start(), 0usize);
    for t in 1..=step_cap {
        let rule = spec.rule(c, tape[h]).expect("validated machine");
        let images: Vec<(usize, ComplexMatrix, f64)> = rule
            .operation
            .active_results()
            .map(|r| {
                let img = rule.operation.partial_map(r, &rho);
                let p = trace(&img).re.max(0.0);
                (r, img, p)
            })
            .collect();
        let total: f64 = images.iter().map(|x| x.2).sum();
        let mut u = rng.random::<f64>() * total;
        let mut pick = images.len() - 1;
        for (i, x) in images.iter().enumerate() {
            if u < x.2 {
                pick = i;
                break;
            }
            u -= x.2;
        }
        let (r, img, p) = &images[pick];
        rho = img.unscale(*p);
        let tr = rule.transitions[*r];
        c = tr.next;
        h = (h as isize + tr.head_move.offset()) as usize;
        if spec.is_halting(c) {
            return Some((c == spec.c_acc(), t));
        }
    }
    None
}

/// Empirical statistics from `trials` sampled runs. Trial `i` draws from the
/// ChaCha8 stream `i` of `seed`, so results do not depend on thread scheduling.
pub fn monte_carlo_run(
    spec: &TwoQcfaSpec,
    w: &str,
    trials: usize,
    step_cap: usize,
    seed: u64,
) -> Result<RunStatistics, MachineError> {
    check_cap(step_cap)?;
    if trials == 0 {
        return Err(MachineError::InvalidArgument("trials must be at least 1".into()));
    }
    let tape = spec.tape(w)?;
    let outcomes: Vec<Option<(bool, usize)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            sample_run(spec, &tape, step_cap, &mut rng)
        })
        .collect();
    let mut acc_at = vec![0usize; step_cap + 1];
    let mut rej_at = vec![0usize; step_cap + 1];
    for (accepted, t) in outcomes.into_iter().flatten() {
        if accepted {
            acc_at[t] += 1;
        } else {
            rej_at[t] += 1;
        }
    }
    let n = trials as f64;
    let (mut a, mut r) = (0usize, 0usize);
    let (mut acc, mut rej, mut run) = (Vec::new(), Vec::new(), Vec::new());
    for t in 1..=step_cap {
        a += acc_at[t];
        r += rej_at[t];
        acc.push(a as f64 / n);
        rej.push(r as f64 / n);
        run.push((trials - a - r) as f64 / n);
    }
    Ok(RunStatistics::from_series(w, acc, rej, run))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{fixtures, random};
    use crate::quantum::min_eigenvalue;
    use rand::SeedableRng;

    #[test]
    fn parity_is_deterministic() {
        let p = fixtures::parity();
        for (w, accept) in [("", true), ("a", false), ("aa", true), ("ab", false), ("bab", false), ("abab", true)] {
            let s = exact_run(&p, w, 100).unwrap();
            assert_eq!(s.p_accept(), if accept { 1.0 } else { 0.0 }, "{w}");
            assert_eq!(s.p_running, 0.0);
            assert_eq!(s.expected_time_lower, (w.len() + 2) as f64);
        }
    }

    #[test]
    fn rotation_balanced_input_never_rejects_at_first_measurement() {
        let r = fixtures::rotation();
        let s = exact_run(&r, "ab", 4).unwrap();
        assert!(s.p_reject() < 1e-12);
        assert!(s.p_running > 1.0 - 1e-12);
    }

    #[test]
    fn rotation_first_sweep_reject_is_sin_squared() {
        let r = fixtures::rotation();
        // #L, a, #R: the measurement happens on step 3
        let s = exact_run(&r, "a", 3).unwrap();
        let alpha = 2f64.sqrt() * std::f64::consts::PI;
        assert!((s.p_reject() - alpha.sin().powi(2)).abs() < 1e-12);
        assert_eq!(exact_run(&r, "a", 2).unwrap().p_reject(), 0.0);
    }

    #[test]
    fn mass_is_conserved_and_blocks_stay_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut machines: Vec<TwoQcfaSpec> = fixtures::all().into_iter().map(|x| x.1).collect();
        machines.extend((0..10).map(|_| random::machine(&random::MachineShape::default(), &mut rng)));
        for spec in &machines {
            let w: String = spec.alphabet().iter().cycle().take(4).collect();
            let mut sim = ExactSimulator::new(spec, &w).unwrap();
            for _ in 0..40 {
                sim.step();
                let total = sim.accept_mass() + sim.reject_mass() + sim.running_mass();
                assert!((total - 1.0).abs() < 1e-9);
                for (_, _, b) in sim.blocks() {
                    assert!(min_eigenvalue(b) >= -1e-9);
                }
            }
        }
    }

    #[test]
    fn monte_carlo_parity_is_exact() {
        let p = fixtures::parity();
        for w in ["ab", "aab"] {
            let s = monte_carlo_run(&p, w, 200, 50, 1).unwrap();
            let e = exact_run(&p, w, 50).unwrap();
            assert_eq!(s.p_accept(), e.p_accept());
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let r = fixtures::rotation();
        let a = monte_carlo_run(&r, "a", 500, 200, 9).unwrap();
        let b = monte_carlo_run(&r, "a", 500, 200, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_cap() {
        assert!(exact_run(&fixtures::coin(), "", 0).is_err());
        assert!(monte_carlo_run(&fixtures::coin(), "", 0, 5, 0).is_err());
    }
}
