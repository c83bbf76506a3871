use std::path::PathBuf;
use std::process::{Command, Output};

fn twoqcfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoqcfa"))
        .args(args)
        .output()
        .expect("spawn twoqcfa")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twoqcfa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture_path(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn parity_accepts_even_input_with_certainty() {
    let out = stdout(&twoqcfa(&["--format", "json", "simulate", "--machine", &fixture_path("parity"), "--input", "aa", "--cap", "50"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let acc = v["exact"]["p_accept_by_step"].as_array().unwrap();
    assert_eq!(acc.last().unwrap().as_f64(), Some(1.0));
    assert!(v["sampled"].is_null());
}

#[test]
fn sampled_run_is_seeded() {
    let args = ["--no-timestamp", "--seed", "9", "simulate", "--machine", "fixture:coin", "--input", "ab", "--cap", "40", "--trials", "300"];
    let a = stdout(&twoqcfa(&args));
    assert_eq!(a, stdout(&twoqcfa(&args)));
    assert!(a.starts_with("schema_version,input,t,"));
}

#[test]
fn missing_machine_file_is_reported() {
    let out = twoqcfa(&["simulate", "--machine", "/definitely/not/here.json", "--input", "a"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/definitely/not/here.json"), "{err}");
}

#[test]
fn malformed_machine_reports_line() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\n  \"quantum_states\": [\"q0\"],\n  oops\n}\n").unwrap();
    let out = twoqcfa(&["simulate", "--machine", path.to_str().unwrap(), "--input", "a"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_parameter_override_is_rejected() {
    let out = twoqcfa(&["simulate", "--machine", "fixture:rotation", "--param", "nonsense=1", "--input", "a"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn palindrome_lower_bound() {
    let out = stdout(&twoqcfa(&["--no-timestamp", "hardness", "--language", "pal", "--n", "6", "--mode", "lower"]));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "pal");
    let d_lower: usize = row[4].parse().unwrap();
    assert!(d_lower >= 8, "{out}");
    assert_eq!(row[9], "true", "witnesses verified");
}

#[test]
fn hardness_budget_is_enforced() {
    let out = twoqcfa(&["--budget", "100", "hardness", "--language", "pal", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn hardness_dfa_crosscheck() {
    let out = stdout(&twoqcfa(&["--format", "json", "hardness", "--language", "parity", "--n", "4", "--dfa-states", "3"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["d_exact"], 2);
    assert_eq!(v["dfa_states"], 2);
}

#[test]
fn free_group_growth() {
    let out = stdout(&twoqcfa(&["--no-timestamp", "growth", "--group", "f2", "--n", "3"]));
    let counts: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(counts, ["1", "5", "17", "53"]);
}

#[test]
fn growth_lemma_rows_hold() {
    let out = stdout(&twoqcfa(&["--no-timestamp", "growth", "--group", "z2", "--n", "2", "--lemma"]));
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",true,true")), "{out}");
}

#[test]
fn unknown_names_are_errors() {
    assert_eq!(twoqcfa(&["growth", "--group", "sl2", "--n", "1"]).status.code(), Some(2));
    assert_eq!(twoqcfa(&["hardness", "--language", "dyck", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn crossing_distances_of_identical_prefixes_vanish() {
    let out = stdout(&twoqcfa(&[
        "--format", "json", "crossing", "--machine", "fixture:rotation", "--x", "ab", "--x-prime", "ab", "--y", "a", "--m", "8", "--length", "3",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let d = v["distances"].as_array().unwrap();
    assert_eq!(d.len(), 3);
    assert!(d.iter().all(|x| x.as_f64().unwrap().abs() < 1e-12));
}

#[test]
fn transfer_writes_to_file() {
    let path = scratch("transfer.csv");
    stdout(&twoqcfa(&["--out", path.to_str().unwrap(), "transfer", "--machine", "fixture:parity", "--word", "ab", "--m", "4", "--side", "suffix"]));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# generated_unix="));
    assert_eq!(lines.next().unwrap(), "schema_version,word,m,output,input,re,im");
    // k = 1, d = 5: a 5 x 5 action matrix
    assert_eq!(lines.count(), 25);
}

#[test]
fn verify_is_reproducible_and_detects_faults() {
    let config = scratch("verify.json");
    std::fs::write(
        &config,
        r#"{"verify": {"random_machines": 2, "channel_ms": [0, 3], "density_inputs": 3, "equivalence_ms": [0, 2],
            "crossing_random_instances": 2, "packing_m": 6, "bridge_m": 6, "bridge_word_len": 3,
            "theorem_n": 2, "theorem_cap": 60, "hardness_max_n": 4, "growth_max_n": 2}}"#,
    )
    .unwrap();
    let cfg = config.to_str().unwrap();
    let a = stdout(&twoqcfa(&["--config", cfg, "--no-timestamp", "verify"]));
    let b = stdout(&twoqcfa(&["--config", cfg, "--no-timestamp", "verify"]));
    assert_eq!(a, b);
    assert!(a.lines().skip(1).all(|l| !l.ends_with(",false")), "{a}");

    let bad = twoqcfa(&["--config", cfg, "--no-timestamp", "verify", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let failed: Vec<&str> = text.lines().filter(|l| l.ends_with(",false")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("channel-laws/corrupted-rotation"));
}

#[test]
fn config_rejects_unknown_keys() {
    let config = scratch("typo.json");
    std::fs::write(&config, r#"{"sed": 3}"#).unwrap();
    let out = twoqcfa(&["--config", config.to_str().unwrap(), "growth", "--group", "z", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo.json"));
}
