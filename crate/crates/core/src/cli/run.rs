//! Executes validated requests. Requests run in parallel; the report keeps
//! request order.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{AnalysisConfig, Expectation, Kind, Operator, Request, RequestEntry};
use super::report::{Entry, ExpectationCheck, Report};
use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::operators::{check_comp, check_mult, empirical_comp_norm, empirical_mult_norm, Setting};
use crate::orlicz::luxemburg_norm;
use crate::range::{classify_comp, classify_mult, RangeClass};
use crate::verdict::{Status, Verdict};
use crate::young::{check_split_inequality, check_triple_inequality, conjugate, CertVerdict, GrowthCertificate, YoungKind};

/// Random inputs tried against a certified bound on purely atomic spaces.
pub const EMPIRICAL_SAMPLES: usize = 200;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record wall time per request.
    pub timing: bool,
    /// Only run requests of these kinds.
    pub only: Option<Vec<Kind>>,
}

/// Runs every (selected) request and checks the config's expectations.
pub fn run(cfg: &AnalysisConfig, opts: &RunOptions) -> Report {
    let selected: Vec<(usize, &RequestEntry)> = cfg
        .requests
        .iter()
        .enumerate()
        .filter(|(_, r)| opts.only.as_ref().is_none_or(|k| k.contains(&r.request.kind())))
        .collect();
    let entries: Vec<Entry> = selected
        .par_iter()
        .map(|&(i, r)| {
            let start = Instant::now();
            let mut e = execute(cfg, i, r);
            if opts.timing {
                e.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            e
        })
        .collect();
    let expectations = entries
        .iter()
        .filter_map(|e| cfg.expect.get(&e.id).map(|x| check(x, e)))
        .collect();
    Report {
        name: None,
        description: cfg.description.clone(),
        budget: cfg.setting.budget,
        tol: cfg.setting.tol,
        reading: cfg.setting.reading,
        seed: cfg.seed,
        entries,
        expectations,
    }
}

fn check(x: &Expectation, e: &Entry) -> ExpectationCheck {
    let ok = x.outcome == e.outcome && x.rank.is_none_or(|r| e.rank == Some(r));
    ExpectationCheck {
        id: e.id.clone(),
        expected: x.outcome.clone(),
        expected_rank: x.rank,
        actual: e.outcome.clone(),
        actual_rank: e.rank,
        ok,
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Refuted => "refuted",
        Status::Inconclusive => "inconclusive",
    }
}

struct Outcome {
    outcome: String,
    bound: Option<f64>,
    rank: Option<usize>,
    detail: Value,
}

fn execute(cfg: &AnalysisConfig, index: usize, r: &RequestEntry) -> Entry {
    let (outcome, error) = match dispatch(cfg, &r.request) {
        Ok(o) => (o, None),
        Err(e) => (
            Outcome {
                outcome: "error".into(),
                bound: None,
                rank: None,
                detail: Value::Null,
            },
            Some(e.to_string()),
        ),
    };
    Entry {
        index,
        id: r.id.clone(),
        kind: r.request.kind().as_str(),
        inputs: inputs(&r.request),
        outcome: outcome.outcome,
        bound: outcome.bound,
        rank: outcome.rank,
        detail: outcome.detail,
        error,
        elapsed_ms: None,
    }
}

fn inputs(r: &Request) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &'static str, v: &str| {
        m.insert(k, v.to_string());
    };
    match r {
        Request::Norm { f, phi } => {
            put("f", &f.name);
            put("phi", &phi.name);
        }
        Request::Conjugate { phi, .. } => put("phi", &phi.name),
        Request::CheckMult {
            u,
            phi1,
            phi2,
            phi3,
            test_function,
        } => {
            put("u", &u.name);
            put("phi1", &phi1.name);
            put("phi2", &phi2.name);
            if let Some(p) = phi3 {
                put("phi3", &p.name);
            }
            if let Some(f) = test_function {
                put("test_function", &f.name);
            }
        }
        Request::CheckComp { t, phi1, phi2, phi3 } => {
            put("t", &t.name);
            put("phi1", &phi1.name);
            put("phi2", &phi2.name);
            if let Some(p) = phi3 {
                put("phi3", &p.name);
            }
        }
        Request::ClassifyRange { op, phi1, phi2, phi3 } => {
            match op {
                Operator::Mult(u) => put("u", &u.name),
                Operator::Comp(t) => put("t", &t.name),
            }
            put("phi1", &phi1.name);
            put("phi2", &phi2.name);
            if let Some(p) = phi3 {
                put("phi3", &p.name);
            }
        }
        Request::Split { phi, psi, p } => {
            put("phi", &phi.name);
            put("psi", &psi.name);
            put("p", &p.to_string());
        }
        Request::Triple { phi1, phi2, phi3 } => {
            put("phi1", &phi1.name);
            put("phi2", &phi2.name);
            put("phi3", &phi3.name);
        }
    }
    m
}

fn space(cfg: &AnalysisConfig) -> Result<&MeasureSpace> {
    cfg.space
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("request needs a [space] section".into()))
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn verdict_outcome(v: Verdict, empirical: Option<Value>) -> Outcome {
    let mut detail = serde_json::to_value(&v).expect("verdict serializes");
    if let Some(e) = empirical {
        detail["empirical"] = e;
    }
    Outcome {
        outcome: status_str(v.status).into(),
        bound: v.bound,
        rank: None,
        detail,
    }
}

/// Empirical norm against a certified bound, on purely atomic spaces.
fn empirical(bound: Option<f64>, est: impl FnOnce() -> Result<crate::operators::EmpiricalNorm>) -> Option<Value> {
    let b = bound?;
    match est() {
        Ok(e) => Some(json!({
            "samples": e.samples,
            "max_ratio": num(e.max_ratio),
            "within_bound": e.max_ratio <= b * (1.0 + 1e-6),
        })),
        Err(err) => Some(json!({ "error": err.to_string() })),
    }
}

fn cert_outcome(c: &GrowthCertificate) -> Outcome {
    let (outcome, counterexample) = match &c.verdict {
        CertVerdict::HoldsEmpirically => ("holds", Value::Null),
        CertVerdict::Counterexample { x, y } => (
            "fails",
            match y {
                Some(y) => json!(format!("x={x}, y={y}")),
                None => json!(format!("x={x}")),
            },
        ),
    };
    Outcome {
        outcome: outcome.into(),
        bound: None,
        rank: None,
        detail: json!({
            "condition": c.condition,
            "grid": c.grid,
            "counterexample": counterexample,
        }),
    }
}

fn dispatch(cfg: &AnalysisConfig, req: &Request) -> Result<Outcome> {
    let st: &Setting = &cfg.setting;
    match req {
        Request::Norm { f, phi } => {
            let n = luxemburg_norm(space(cfg)?, &f.value, &phi.value, st.tol, &st.budget)?;
            Ok(Outcome {
                outcome: if n.diverged { "diverged" } else { "computed" }.into(),
                bound: None,
                rank: None,
                detail: json!({
                    "value": num(n.value),
                    "iterations": n.iterations,
                    "bracket": [num(n.bracket.0), num(n.bracket.1)],
                }),
            })
        }
        Request::Conjugate { phi, points } => {
            let closed = phi.value.complementary();
            let closed = (closed.kind() != YoungKind::Conjugate).then_some(closed);
            let mut rows = Vec::with_capacity(points.len());
            let mut worst: Option<f64> = None;
            for &y in points {
                let v = conjugate(&phi.value, y, st.tol)?;
                let mut row = json!({ "y": y, "value": num(v) });
                if let Some(c) = &closed {
                    let exact = c.evaluate(y);
                    let rel = if exact == 0.0 { v.abs() } else { ((v - exact) / exact).abs() };
                    worst = Some(worst.map_or(rel, |w: f64| w.max(rel)));
                    row["closed_form"] = num(exact);
                }
                rows.push(row);
            }
            Ok(Outcome {
                outcome: "computed".into(),
                bound: None,
                rank: None,
                detail: json!({
                    "function": phi.value.name(),
                    "closed_form": closed.map(|c| c.name()),
                    "max_rel_error": worst.map(num),
                    "points": rows,
                }),
            })
        }
        Request::CheckMult {
            u,
            phi1,
            phi2,
            phi3,
            test_function,
        } => {
            let sp = space(cfg)?;
            let v = check_mult(
                sp,
                &u.value,
                &phi1.value,
                &phi2.value,
                phi3.as_ref().map(|p| &p.value),
                test_function.as_ref().map(|f| &f.value),
                st,
            )?;
            let emp = if sp.is_purely_atomic() && sp.family().is_none() {
                empirical(v.bound, || {
                    empirical_mult_norm(sp, &u.value, &phi1.value, &phi2.value, EMPIRICAL_SAMPLES, cfg.seed, st)
                })
            } else {
                None
            };
            Ok(verdict_outcome(v, emp))
        }
        Request::CheckComp { t, phi1, phi2, phi3 } => {
            let sp = space(cfg)?;
            let v = check_comp(sp, &t.value, &phi1.value, &phi2.value, phi3.as_ref().map(|p| &p.value), st)?;
            let emp = if sp.is_purely_atomic() && sp.family().is_none() {
                empirical(v.bound, || {
                    empirical_comp_norm(sp, &t.value, &phi1.value, &phi2.value, EMPIRICAL_SAMPLES, cfg.seed, st)
                })
            } else {
                None
            };
            Ok(verdict_outcome(v, emp))
        }
        Request::ClassifyRange { op, phi1, phi2, phi3 } => {
            let sp = space(cfg)?;
            let p3 = phi3.as_ref().map(|p| &p.value);
            let rep = match op {
                Operator::Mult(u) => classify_mult(sp, &u.value, &phi1.value, &phi2.value, p3, st)?,
                Operator::Comp(t) => classify_comp(sp, &t.value, &phi1.value, &phi2.value, p3, st)?,
            };
            let (outcome, rank) = match &rep.class {
                RangeClass::FiniteRank { rank } => ("finite_rank", Some(*rank)),
                RangeClass::NotClosedRange { .. } => ("not_closed_range", None),
                RangeClass::Inconclusive { .. } => ("inconclusive", None),
            };
            Ok(Outcome {
                outcome: outcome.into(),
                bound: None,
                rank,
                detail: serde_json::to_value(&rep).expect("range report serializes"),
            })
        }
        Request::Split { phi, psi, p } => Ok(cert_outcome(&check_split_inequality(&phi.value, &psi.value, *p, st.grid))),
        Request::Triple { phi1, phi2, phi3 } => Ok(cert_outcome(&check_triple_inequality(
            &phi1.value,
            &phi2.value,
            &phi3.value,
            st.grid,
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_config;
    use crate::cli::report::Format;

    const CFG: &str = r#"
[young]
p2 = { kind = "power", p = 2 }
p3 = { kind = "power", p = 3 }
p6 = { kind = "power", p = 6 }

[space]
atoms = [{ mass = 1.0 }, { mass = 0.5 }, { mass = 0.25 }]

[functions]
f = { values = [1, 2, 3] }
u = { values = [1, 0, 2] }

[transform]
T = { map = ["A2", "A2", "A1"] }

[run]
seed = 3
requests = [
  { id = "n", kind = "norm", f = "f", phi = "p2" },
  { id = "c", kind = "conjugate", phi = "p3", points = [0.5, 1, 2] },
  { id = "m", kind = "check-mult", u = "u", phi1 = "p2", phi2 = "p2", phi3 = "p6" },
  { id = "t", kind = "check-comp", t = "T", phi1 = "p2", phi2 = "p3" },
  { id = "r", kind = "classify-range", u = "u", phi1 = "p2", phi2 = "p3" },
  { id = "y", kind = "inequality", form = "triple", phi1 = "p2", phi2 = "p3", phi3 = "p6" },
]

[expect]
m = "certified"
r = { outcome = "finite_rank", rank = 2 }
"#;

    #[test]
    fn runs_every_request_in_order() {
        let cfg = parse_config(CFG).unwrap();
        let rep = run(&cfg, &RunOptions::default());
        let ids: Vec<&str> = rep.entries.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["n", "c", "m", "t", "r", "y"]);
        assert_eq!(rep.entries[0].outcome, "computed");
        assert!(rep.entries[1].detail["max_rel_error"].as_f64().unwrap() < 1e-6);
        assert_eq!(rep.entries[3].outcome, "certified");
        assert_eq!(rep.entries[5].outcome, "holds");
        assert_eq!(rep.mismatches().count(), 0, "{}", rep.render(Format::Text));
        let emp = &rep.entries[2].detail["empirical"];
        assert_eq!(emp["within_bound"], json!(true), "{emp}");
    }

    #[test]
    fn identical_config_gives_identical_bytes() {
        let cfg = parse_config(CFG).unwrap();
        let a = run(&cfg, &RunOptions::default()).render(Format::Machine);
        let b = run(&cfg, &RunOptions::default()).render(Format::Machine);
        assert_eq!(a, b);
    }

    #[test]
    fn kind_filter_and_timing() {
        let text = CFG.replace("atoms = [{ mass = 1.0 }, { mass = 0.5 }, { mass = 0.25 }]", "atoms = [{ mass = 1.0 }, { mass = 0.5 }, { mass = 0.25 }]\ncontinuum = { a = 0, b = 1 }");
        let cfg = parse_config(&text).unwrap();
        let rep = run(
            &cfg,
            &RunOptions {
                timing: true,
                only: Some(vec![Kind::CheckComp]),
            },
        );
        assert_eq!(rep.entries.len(), 1);
        assert!(rep.entries[0].elapsed_ms.is_some());
    }
}
