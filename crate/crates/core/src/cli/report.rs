//! Report tree, rendered as indented text or as JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::operators::Reading;
use crate::trend::Budget;
use crate::verdict::ser_opt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub index: usize,
    pub id: String,
    pub kind: &'static str,
    /// Config names of the inputs, e.g. `u = "u"`, `phi1 = "phi"`.
    pub inputs: BTreeMap<&'static str, String>,
    /// Stable string: `certified`, `refuted`, `inconclusive`, `finite_rank`,
    /// `not_closed_range`, `holds`, `fails`, `computed`, `diverged` or `error`.
    pub outcome: String,
    #[serde(serialize_with = "ser_opt_f64", skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time, only when requested: it would break byte-for-byte
    /// reproducibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationCheck {
    pub id: String,
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_rank: Option<usize>,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual_rank: Option<usize>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub budget: Budget,
    pub tol: f64,
    pub reading: Reading,
    pub seed: u64,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<ExpectationCheck>,
}

impl Report {
    pub fn mismatches(&self) -> impl Iterator<Item = &ExpectationCheck> {
        self.expectations.iter().filter(|e| !e.ok)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(s, "== {n}");
        }
        if let Some(d) = &self.description {
            let _ = writeln!(s, "{}", d.trim());
        }
        let _ = writeln!(
            s,
            "budget n={} threshold={:e} tol={:e} reading={:?} seed={}",
            self.budget.n, self.budget.threshold, self.tol, self.reading, self.seed
        );
        for e in &self.entries {
            let inputs: Vec<String> = e.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(s, "[{}] {} {} ({}): {}", e.index + 1, e.id, e.kind, inputs.join(" "), e.outcome);
            if let Some(r) = e.rank {
                let _ = write!(s, " rank={r}");
            }
            if let Some(b) = e.bound {
                let _ = write!(s, " bound={b:.6e}");
            }
            if let Some(ms) = e.elapsed_ms {
                let _ = write!(s, " ({ms:.1} ms)");
            }
            s.push('\n');
            if let Some(err) = &e.error {
                let _ = writeln!(s, "    error: {err}");
            }
            text_detail(&mut s, &e.detail);
        }
        if !self.expectations.is_empty() {
            let _ = writeln!(s, "expectations:");
            for x in &self.expectations {
                let rank = |r: Option<usize>| r.map(|r| format!(" (rank {r})")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "    {} {}: expected {}{}, got {}{}",
                    if x.ok { "ok  " } else { "FAIL" },
                    x.id,
                    x.expected,
                    rank(x.expected_rank),
                    x.actual,
                    rank(x.actual_rank)
                );
            }
        }
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Reason, witness summary and criteria log, whichever the detail carries.
fn text_detail(s: &mut String, d: &Value) {
    for key in ["reason", "value", "max_rel_error", "counterexample"] {
        if let Some(v) = d.get(key).filter(|v| !v.is_null()) {
            let _ = writeln!(s, "    {key}: {}", scalar(v));
        }
    }
    if let Some(w) = d.get("witness").filter(|v| !v.is_null()) {
        let kind = w.get("kind").map(scalar).unwrap_or_default();
        let _ = writeln!(s, "    witness: {kind}");
    }
    if let Some(c) = d.get("class") {
        if let Some(r) = c.get("reason") {
            let _ = writeln!(s, "    reason: {}", scalar(r));
        }
        if let Some(w) = c.get("witness") {
            let sets = w.get("sets").and_then(Value::as_array).map_or(0, Vec::len);
            let _ = writeln!(s, "    witness: {sets} shrinking sets, ratios {}", w.get("ratios").map(scalar).unwrap_or_default());
        }
    }
    let log = d.get("criteria_log").or_else(|| d.get("log")).and_then(Value::as_array);
    for l in log.into_iter().flatten() {
        let crit = l.get("criterion").map(scalar).unwrap_or_default();
        let out = l.get("outcome").map(scalar).unwrap_or_default();
        match l.get("value").filter(|v| !v.is_null()) {
            Some(v) => {
                let _ = writeln!(s, "      - {crit}: {out} [{}]", scalar(v));
            }
            None => {
                let _ = writeln!(s, "      - {crit}: {out}");
            }
        }
    }
}
