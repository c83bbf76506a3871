//! CSV and JSON renderings of experiment results. Floats are printed with 17
//! significant digits, which round-trips every `f64`; each row starts with the
//! schema version.

use crate::hardness::HardnessReport;
use crate::langs::{GrowthReport, GrowthTable};
use crate::machine::RunStatistics;
use crate::transfer::{accept_profile, CrossingSequence};
use crate::verification::CheckResult;
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

/// `{:.16e}` with explicit spellings for non-finite values.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // `+ 0.0` maps -0.0 to 0.0
        format!("{:.16e}", x + 0.0)
    }
}

/// A CSV table; the optional first line `# generated_unix=<seconds>` is the
/// only content that varies between reruns.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(columns: &[&'static str]) -> Self {
        let mut all = vec!["schema_version"];
        all.extend_from_slice(columns);
        Self {
            columns: all,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, fields: Vec<String>) {
        assert_eq!(fields.len() + 1, self.columns.len(), "row width");
        let mut row = vec![SCHEMA_VERSION.to_string()];
        row.extend(fields);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header and rows without the timestamp line.
    pub fn body(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|f| escape(f)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, timestamp: bool) -> String {
        if !timestamp {
            return self.body();
        }
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        format!("# generated_unix={secs}\n{}", self.body())
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn checks_csv(results: &[CheckResult]) -> Csv {
    let mut csv = Csv::new(&["check_id", "instances", "worst_slack", "tolerance", "status", "passed"]);
    for r in results {
        csv.push(vec![
            r.check_id.clone(),
            r.instances.to_string(),
            float(r.worst_slack),
            float(r.tolerance),
            r.status.to_string(),
            r.passed.to_string(),
        ]);
    }
    csv
}

/// One row per step; the empirical columns are empty without a sampled run.
pub fn simulation_csv(exact: &RunStatistics, sampled: Option<&RunStatistics>) -> Csv {
    let mut csv = Csv::new(&["input", "t", "p_acc", "p_rej", "p_run", "emp_acc", "emp_rej", "emp_run"]);
    for t in 0..exact.step_cap {
        let emp = |f: fn(&RunStatistics) -> &Vec<f64>| sampled.map_or(String::new(), |s| float(f(s)[t]));
        csv.push(vec![
            exact.input.clone(),
            (t + 1).to_string(),
            float(exact.p_accept_by_step[t]),
            float(exact.p_reject_by_step[t]),
            float(exact.p_running_by_step[t]),
            emp(|s| &s.p_accept_by_step),
            emp(|s| &s.p_reject_by_step),
            emp(|s| &s.p_running_by_step),
        ]);
    }
    csv
}

/// Classical marginals of each crossing, with the distance to a second
/// sequence when one is given.
pub fn crossing_csv(cs: &CrossingSequence, states: &[String], other: Option<&CrossingSequence>) -> Csv {
    let mut csv = Csv::new(&["x", "x_prime", "y", "m", "index", "state", "mass", "distance"]);
    let dist = other.map(|o| cs.distances(o));
    for (i, prof) in accept_profile(cs).iter().enumerate() {
        for (c, mass) in prof.iter().enumerate() {
            csv.push(vec![
                cs.x.clone(),
                other.map_or(String::new(), |o| o.x.clone()),
                cs.y.clone(),
                cs.m.to_string(),
                (i + 1).to_string(),
                states[c].clone(),
                float(*mass),
                dist.as_ref().map_or(String::new(), |d| float(d[i])),
            ]);
        }
    }
    csv
}

pub fn hardness_csv(reports: &[HardnessReport]) -> Csv {
    let mut csv = Csv::new(&["language", "n", "d_exact", "d_lower", "c_bits", "c_is_lower_bound", "method", "fell_back", "witnesses_verified", "witness_set"]);
    for r in reports {
        csv.push(vec![
            r.language.clone(),
            r.n.to_string(),
            r.d_exact.map_or(String::new(), |d| d.to_string()),
            r.d_lower.to_string(),
            float(r.c_bits),
            r.d_exact.is_none().to_string(),
            r.method.to_string(),
            r.fell_back.to_string(),
            r.witnesses_verified.to_string(),
            r.witness_set.join(" "),
        ]);
    }
    csv
}

pub fn growth_csv(table: &GrowthTable) -> Csv {
    let mut csv = Csv::new(&["group", "radius", "count"]);
    for (r, c) in table.counts.iter().enumerate() {
        csv.push(vec![table.group.clone(), r.to_string(), c.to_string()]);
    }
    csv
}

pub fn growth_lemma_csv(reports: &[GrowthReport]) -> Csv {
    let mut csv = Csv::new(&["group", "n", "beta", "horizon", "d_lower", "search_lower", "construction_verified", "holds"]);
    for r in reports {
        csv.push(vec![
            r.group.clone(),
            r.n.to_string(),
            r.beta.to_string(),
            r.horizon.to_string(),
            r.d_lower.to_string(),
            r.search_lower.map_or(String::new(), |d| d.to_string()),
            r.construction_verified.to_string(),
            r.holds.to_string(),
        ]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), -1e-300, 6.02214076e23, 5e-324] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn timestamp_is_the_only_difference() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.push(vec!["x,y".into(), float(0.5)]);
        let with = csv.render(true);
        assert!(with.starts_with("# generated_unix="));
        assert_eq!(with.split_once('\n').unwrap().1, csv.render(false));
        assert_eq!(csv.body(), "schema_version,a,b\n1,\"x,y\",5.0000000000000000e-1\n");
    }
}
