use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use twoqcfa::hardness::{exhaustive_dfa_crosscheck, nonregularity, HardnessConfig, Mode};
use twoqcfa::langs::{self, growth, growth_vs_nonregularity, GroupPresentation};
use twoqcfa::machine::{exact_run, fixtures, monte_carlo_run, TwoQcfaSpec};
use twoqcfa::report::{self, Csv};
use twoqcfa::transfer::{crossing_sequence, dual_transfer_operator, transfer_operator};
use twoqcfa::verification::{all_passed, run_all, summary_table, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "twoqcfa", version, about = "Experiments on two-way finite automata with quantum and classical states")]
struct Cli {
    /// Seed for every random choice; runs are deterministic given it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Upper bound on |Σ|^(n+1) for nonregularity searches.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// JSON file with defaults for the global flags and a `verify` section.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Omit the `# generated_unix=` line from CSV output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Prefix,
    Suffix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Lower,
}

#[derive(clap::Args, Debug)]
struct MachineArgs {
    /// Machine JSON file, or `fixture:<name>` for a shipped example.
    #[arg(long)]
    machine: String,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact (and optionally sampled) acceptance probabilities per step.
    Simulate {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Also sample this many runs.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Classical marginals of the m-truncated crossing sequence on `x | y`.
    Crossing {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long)]
        x: String,
        /// Second prefix; adds the per-index trace distance.
        #[arg(long)]
        x_prime: Option<String>,
        #[arg(long)]
        y: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        length: usize,
    },
    /// The m-truncated transfer operator of a prefix or suffix.
    Transfer {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long)]
        word: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "prefix")]
        side: SideArg,
        /// Convert the machine to convenient form first.
        #[arg(long)]
        convenient: bool,
    },
    /// Nonregularity D_L(n) and C_L(n) of a built-in language.
    Hardness {
        #[arg(long)]
        language: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Also search for the smallest agreeing DFA with at most this many states.
        #[arg(long)]
        dfa_states: Option<usize>,
    },
    /// Cayley-graph growth of a built-in group.
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        /// Compare β(r) with D_{W_G}(2r) for r = 0..=n instead.
        #[arg(long)]
        lemma: bool,
    },
    /// Run the verification suite; exits nonzero if any check fails.
    Verify {
        /// Reduced sweep sizes.
        #[arg(long)]
        quick: bool,
        /// Add a machine with one corrupted Kraus family.
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    budget: Option<u128>,
    no_timestamp: Option<bool>,
    verify: Option<VerifyConfig>,
}

struct Settings {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
    budget: u128,
    timestamp: bool,
    verify: Option<VerifyConfig>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=value")?;
    let value: f64 = value.trim().parse().map_err(|e| format!("{value}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let budget = cli.budget.or(file.budget).unwrap_or(HardnessConfig::default().budget);
    if budget == 0 {
        bail!("budget must be positive");
    }
    Ok(Settings {
        seed: cli.seed.or(file.seed),
        out: cli.out.clone().or(file.out),
        format: cli.format.or(file.format).unwrap_or(Format::Csv),
        budget,
        timestamp: !(cli.no_timestamp || file.no_timestamp.unwrap_or(false)),
        verify: file.verify,
    })
}

fn load_machine(args: &MachineArgs) -> Result<TwoQcfaSpec> {
    let overrides: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    if let Some(name) = args.machine.strip_prefix("fixture:") {
        let text = match name {
            "parity" => fixtures::PARITY_JSON,
            "rotation" => fixtures::ROTATION_JSON,
            "coin" => fixtures::COIN_JSON,
            _ => bail!("unknown fixture `{name}` (expected parity, rotation or coin)"),
        };
        return TwoQcfaSpec::from_json_str_with(text, &overrides).with_context(|| format!("loading fixture {name}"));
    }
    TwoQcfaSpec::load(&args.machine, &overrides).with_context(|| format!("loading machine {}", args.machine))
}

enum Output {
    Table(Csv, Value),
}

fn emit(settings: &Settings, output: Output) -> Result<()> {
    let Output::Table(csv, json) = output;
    let text = match settings.format {
        Format::Csv => csv.render(settings.timestamp),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json)?),
    };
    match &settings.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn transfer_csv(op: &twoqcfa::transfer::TransferOperator, spec: &TwoQcfaSpec) -> Csv {
    let labels = op.basis_labels(spec);
    let mut csv = Csv::new(&["word", "m", "output", "input", "re", "im"]);
    let a = op.action();
    for col in 0..a.ncols() {
        for row in 0..a.nrows() {
            csv.push(vec![
                op.word().to_string(),
                op.m().to_string(),
                labels[row].clone(),
                labels[col].clone(),
                report::float(a[(row, col)].re),
                report::float(a[(row, col)].im),
            ]);
        }
    }
    csv
}

fn run(cli: &Cli) -> Result<bool> {
    let s = settings(cli)?;
    match &cli.command {
        Command::Simulate { machine, input, cap, trials } => {
            let spec = load_machine(machine)?;
            let exact = exact_run(&spec, input, *cap)?;
            let seed = s.seed.unwrap_or(0);
            let sampled = trials.map(|t| monte_carlo_run(&spec, input, t, *cap, seed)).transpose()?;
            let json = json!({ "exact": exact, "sampled": sampled, "seed": seed });
            emit(&s, Output::Table(report::simulation_csv(&exact, sampled.as_ref()), json))?;
        }
        Command::Crossing { machine, x, x_prime, y, m, length } => {
            let spec = load_machine(machine)?;
            let spec = if spec.is_convenient() { spec } else { spec.to_convenient_form() };
            let cs = crossing_sequence(&spec, x, y, *m, *length)?;
            let other = x_prime.as_deref().map(|xp| crossing_sequence(&spec, xp, y, *m, *length)).transpose()?;
            let mut json = cs.to_json(&spec);
            if let Some(o) = &other {
                json["x_prime"] = json!(o.x);
                json["distances"] = json!(cs.distances(o));
            }
            let csv = report::crossing_csv(&cs, spec.classical_states(), other.as_ref());
            emit(&s, Output::Table(csv, json))?;
        }
        Command::Transfer { machine, word, m, side, convenient } => {
            let spec = load_machine(machine)?;
            let spec = if *convenient { spec.to_convenient_form() } else { spec };
            let op = match side {
                SideArg::Prefix => transfer_operator(&spec, word, *m)?,
                SideArg::Suffix => dual_transfer_operator(&spec, word, *m)?,
            };
            let mut json = op.to_json(&spec);
            json["feature_vector"] = json!(op.feature_vector());
            emit(&s, Output::Table(transfer_csv(&op, &spec), json))?;
        }
        Command::Hardness { language, n, mode, dfa_states } => {
            let oracle = langs::oracle_by_name(language).ok_or_else(|| {
                let names: Vec<String> = langs::builtin_oracles().iter().map(|o| o.name().to_string()).collect();
                anyhow!("unknown language `{language}` (expected one of {})", names.join(", "))
            })?;
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Lower => Mode::Lower,
            };
            let cfg = HardnessConfig { budget: s.budget, ..HardnessConfig::default() };
            let r = nonregularity(&oracle, *n, mode, &cfg)?;
            let dfa = dfa_states.map(|k| exhaustive_dfa_crosscheck(&oracle, *n, k));
            let (bits, lower_only) = twoqcfa::hardness::communication_bits(&r);
            let json = json!({ "report": r, "c_bits": bits, "c_is_lower_bound": lower_only, "dfa_states": dfa });
            emit(&s, Output::Table(report::hardness_csv(std::slice::from_ref(&r)), json))?;
        }
        Command::Growth { group, n, lemma } => {
            let g = GroupPresentation::by_name(group)
                .ok_or_else(|| anyhow!("unknown group `{group}` (expected z, z2, f2 or heisenberg)"))?;
            if *lemma {
                let cfg = HardnessConfig { budget: s.budget, ..HardnessConfig::default() };
                let reports = (0..=*n)
                    .map(|r| growth_vs_nonregularity(&g, r, &cfg))
                    .collect::<Result<Vec<_>, _>>()?;
                let json = json!(reports);
                emit(&s, Output::Table(report::growth_lemma_csv(&reports), json))?;
            } else {
                let table = growth(&g, *n)?;
                let json = json!({ "table": table, "submultiplicativity_violations": table.submultiplicativity_violations() });
                emit(&s, Output::Table(report::growth_csv(&table), json))?;
            }
        }
        Command::Verify { quick, inject_fault } => {
            let base = s.verify.clone().unwrap_or_else(|| if *quick { VerifyConfig::quick() } else { VerifyConfig::default() });
            let config = VerifyConfig {
                seed: s.seed.unwrap_or(base.seed),
                inject_fault: *inject_fault || base.inject_fault,
                ..base
            };
            let results = run_all(&config);
            eprint!("{}", summary_table(&results));
            let json = json!({ "config": config, "results": results, "passed": all_passed(&results) });
            emit(&s, Output::Table(report::checks_csv(&results), json))?;
            return Ok(all_passed(&results));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
