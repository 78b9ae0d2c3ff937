//! Three-state verdicts with evidence.

use serde::{Serialize, Serializer};

use crate::trend::Trend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Refuted,
    Inconclusive,
}

/// Serializes non-finite floats as strings so JSON output stays lossless.
pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_f64(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    pub criterion: String,
    pub outcome: String,
    #[serde(serialize_with = "ser_opt_f64")]
    pub value: Option<f64>,
}

/// One step of a constructed witness sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessStep {
    pub n: usize,
    /// The chosen level (`y_n` or `x_n`).
    #[serde(serialize_with = "ser_f64")]
    pub level: f64,
    /// `ln μ` of the piece carrying the level.
    #[serde(serialize_with = "ser_f64")]
    pub ln_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An atom where a criterion quantity is evaluated.
    Atom {
        index: usize,
        #[serde(serialize_with = "ser_f64")]
        value: f64,
    },
    /// A sub-interval of the continuum where the symbol is not a.e. zero.
    Interval { a: f64, b: f64 },
    /// A partial sum or partial maximum still growing at the budget boundary.
    Divergence { criterion: String, trend: Trend },
    /// A function in the domain space whose image leaves the target space.
    TestFunction {
        function: String,
        #[serde(serialize_with = "ser_f64")]
        domain_modular: f64,
        #[serde(serialize_with = "ser_f64")]
        image_modular: f64,
    },
    /// A constructed sequence with its partial sums.
    Construction {
        steps: Vec<WitnessStep>,
        domain_partial_sums: Vec<(usize, f64)>,
        image_partial_sums: Vec<(usize, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(serialize_with = "ser_opt_f64")]
    pub bound: Option<f64>,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
    pub criteria_log: Vec<LogEntry>,
}

impl Verdict {
    pub fn certified(bound: f64) -> Self {
        Self {
            status: Status::Certified,
            bound: Some(bound),
            witness: None,
            reason: None,
            criteria_log: Vec::new(),
        }
    }

    pub fn refuted(witness: Witness) -> Self {
        Self {
            status: Status::Refuted,
            bound: None,
            witness: Some(witness),
            reason: None,
            criteria_log: Vec::new(),
        }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Self {
            status: Status::Inconclusive,
            bound: None,
            witness: None,
            reason: Some(reason.into()),
            criteria_log: Vec::new(),
        }
    }

    pub fn log(mut self, criterion: &str, outcome: impl Into<String>, value: Option<f64>) -> Self {
        self.push(criterion, outcome, value);
        self
    }

    pub fn push(&mut self, criterion: &str, outcome: impl Into<String>, value: Option<f64>) {
        self.criteria_log.push(LogEntry {
            criterion: criterion.to_string(),
            outcome: outcome.into(),
            value,
        });
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    /// Merges verdicts of independent criteria for the same operator.
    /// A refutation wins over silence, the smallest certified bound wins
    /// among certifications; certification and refutation together mean a
    /// criterion is misapplied, which is reported rather than resolved.
    pub fn combine(parts: Vec<(String, Verdict)>) -> Verdict {
        let mut log = Vec::new();
        let mut refuted: Option<Verdict> = None;
        let mut certified: Option<Verdict> = None;
        let mut reasons = Vec::new();
        for (name, v) in parts {
            log.push(LogEntry {
                criterion: name.clone(),
                outcome: format!("{:?}", v.status).to_lowercase(),
                value: v.bound,
            });
            log.extend(v.criteria_log.iter().cloned());
            match v.status {
                Status::Refuted => {
                    if refuted.is_none() {
                        refuted = Some(v);
                    }
                }
                Status::Certified => {
                    if certified.as_ref().is_none_or(|c| v.bound < c.bound) {
                        certified = Some(v);
                    }
                }
                Status::Inconclusive => {
                    if let Some(r) = v.reason {
                        reasons.push(format!("{name}: {r}"));
                    }
                }
            }
        }
        let mut out = match (refuted, certified) {
            (Some(_), Some(_)) => Verdict::inconclusive("criteria disagree: both certified and refuted"),
            (Some(r), None) => Verdict {
                criteria_log: Vec::new(),
                ..r
            },
            (None, Some(c)) => Verdict {
                criteria_log: Vec::new(),
                ..c
            },
            (None, None) => Verdict::inconclusive(if reasons.is_empty() {
                "no criterion applied".to_string()
            } else {
                reasons.join("; ")
            }),
        };
        out.criteria_log = log;
        out
    }
}
