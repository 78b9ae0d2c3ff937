//! Declarative analysis configs in TOML.
//!
//! Sections: `[params]` (named constants usable in formulas), `[young]`,
//! `[space]`, `[functions]`, `[transform]`, `[run]` and, in fixtures,
//! `[expect]`. Validation reports every problem found, each with a line and
//! column.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use super::expr::{Expr, ExprError};
use crate::measure::{Atom, AtomFamily, AtomRef, Continuum, Formula, MeasurableFunction, MeasureSpace, Transformation};
use crate::operators::{Reading, Setting};
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Every error found, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

// ---------------------------------------------------------------------------
// Raw document

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    description: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default)]
    young: BTreeMap<String, Spanned<RawYoung>>,
    space: Option<RawSpace>,
    #[serde(default)]
    functions: BTreeMap<String, Spanned<RawFunction>>,
    #[serde(default)]
    transform: BTreeMap<String, Spanned<RawTransform>>,
    run: Option<Spanned<RawRun>>,
    #[serde(default)]
    expect: BTreeMap<String, Spanned<RawExpect>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawYoung {
    kind: Option<Spanned<String>>,
    p: Option<Spanned<Num>>,
    conjugate: Option<Spanned<String>>,
    complementary: Option<Spanned<String>>,
}

/// A number, or a constant formula over `[params]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Num {
    Lit(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    #[serde(default)]
    atoms: Vec<Spanned<RawAtom>>,
    range: Option<Spanned<RawRange>>,
    family: Option<Spanned<RawFamily>>,
    continuum: Option<Spanned<RawContinuum>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    id: Option<String>,
    mass: Spanned<Num>,
    point: Option<Spanned<Num>>,
}

/// Finitely many atoms `prefix{n}`, `n = from..=to`, expanded into explicit
/// atoms. Their point defaults to `n`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    #[serde(default = "default_range_prefix")]
    prefix: String,
    from: Spanned<Num>,
    to: Spanned<Num>,
    mass: Spanned<String>,
    point: Option<Spanned<String>>,
}

fn default_range_prefix() -> String {
    "n".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(default = "default_family_prefix")]
    prefix: String,
    start: Spanned<Num>,
    mass: Spanned<String>,
    point: Option<Spanned<String>>,
}

fn default_family_prefix() -> String {
    "A".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContinuum {
    a: Spanned<Num>,
    b: Spanned<Num>,
    density: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    formula: Option<Spanned<String>>,
    values: Option<Vec<Spanned<Num>>>,
    atoms: Option<Spanned<String>>,
    continuum: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransform {
    map: Option<Vec<Spanned<String>>>,
    family: Option<Spanned<String>>,
    weight: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    budget_n: Option<Spanned<i64>>,
    threshold: Option<Spanned<f64>>,
    tol: Option<Spanned<f64>>,
    seed: Option<u64>,
    out: Option<String>,
    reading: Option<Spanned<String>>,
    #[serde(default)]
    requests: Vec<Spanned<RawRequest>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequest {
    id: Option<String>,
    kind: Spanned<String>,
    f: Option<Spanned<String>>,
    u: Option<Spanned<String>>,
    t: Option<Spanned<String>>,
    phi: Option<Spanned<String>>,
    psi: Option<Spanned<String>>,
    phi1: Option<Spanned<String>>,
    phi2: Option<Spanned<String>>,
    phi3: Option<Spanned<String>>,
    test_function: Option<Spanned<String>>,
    operator: Option<Spanned<String>>,
    form: Option<Spanned<String>>,
    p: Option<Spanned<Num>>,
    points: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawExpect {
    Outcome(String),
    Detailed { outcome: String, rank: Option<usize> },
}

// ---------------------------------------------------------------------------
// Validated config

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Norm,
    Conjugate,
    CheckMult,
    CheckComp,
    ClassifyRange,
    Inequality,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Norm,
        Kind::Conjugate,
        Kind::CheckMult,
        Kind::CheckComp,
        Kind::ClassifyRange,
        Kind::Inequality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Norm => "norm",
            Kind::Conjugate => "conjugate",
            Kind::CheckMult => "check-mult",
            Kind::CheckComp => "check-comp",
            Kind::ClassifyRange => "classify-range",
            Kind::Inequality => "inequality",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// A resolved reference with its config name.
#[derive(Debug, Clone)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

#[derive(Debug, Clone)]
pub enum Operator {
    Mult(Named<MeasurableFunction>),
    Comp(Named<Transformation>),
}

#[derive(Debug, Clone)]
pub enum Request {
    Norm {
        f: Named<MeasurableFunction>,
        phi: Named<YoungFunction>,
    },
    Conjugate {
        phi: Named<YoungFunction>,
        points: Vec<f64>,
    },
    CheckMult {
        u: Named<MeasurableFunction>,
        phi1: Named<YoungFunction>,
        phi2: Named<YoungFunction>,
        phi3: Option<Named<YoungFunction>>,
        test_function: Option<Named<MeasurableFunction>>,
    },
    CheckComp {
        t: Named<Transformation>,
        phi1: Named<YoungFunction>,
        phi2: Named<YoungFunction>,
        phi3: Option<Named<YoungFunction>>,
    },
    ClassifyRange {
        op: Operator,
        phi1: Named<YoungFunction>,
        phi2: Named<YoungFunction>,
        phi3: Option<Named<YoungFunction>>,
    },
    /// `x^p ≤ Φ(x) + Ψ(x^{p-1})` and its mirror.
    Split {
        phi: Named<YoungFunction>,
        psi: Named<YoungFunction>,
        p: f64,
    },
    /// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)`.
    Triple {
        phi1: Named<YoungFunction>,
        phi2: Named<YoungFunction>,
        phi3: Named<YoungFunction>,
    },
}

impl Request {
    pub fn kind(&self) -> Kind {
        match self {
            Request::Norm { .. } => Kind::Norm,
            Request::Conjugate { .. } => Kind::Conjugate,
            Request::CheckMult { .. } => Kind::CheckMult,
            Request::CheckComp { .. } => Kind::CheckComp,
            Request::ClassifyRange { .. } => Kind::ClassifyRange,
            Request::Split { .. } | Request::Triple { .. } => Kind::Inequality,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RequestEntry {
    pub id: String,
    pub request: Request,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub outcome: String,
    pub rank: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub description: Option<String>,
    pub space: Option<MeasureSpace>,
    pub setting: Setting,
    pub seed: u64,
    pub out: Option<String>,
    pub requests: Vec<RequestEntry>,
    pub expect: BTreeMap<String, Expectation>,
}

/// Default grid for `conjugate` requests: 64 log-spaced points in `[0.01, 100]`.
pub fn default_conjugate_points() -> Vec<f64> {
    (0..64)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 63.0))
        .collect()
}

// ---------------------------------------------------------------------------
// Validation

struct Ctx<'a> {
    text: &'a str,
    params: BTreeMap<String, f64>,
    errors: Vec<(usize, String)>,
}

impl Ctx<'_> {
    fn error(&mut self, at: usize, message: impl Into<String>) {
        self.errors.push((at, message.into()));
    }

    fn position(&self, at: usize) -> (usize, usize) {
        let at = at.min(self.text.len());
        let before = &self.text[..at];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(at, |i| at - i - 1) + 1;
        (line, column)
    }

    /// Parses a formula string; offsets inside the string map back to the file
    /// (exact for strings without escapes).
    fn expr(&mut self, s: &Spanned<String>, what: &str) -> Option<Expr> {
        match Expr::parse(s.get_ref(), &self.params) {
            Ok(e) => Some(e),
            Err(ExprError { offset, message }) => {
                self.error(s.span().start + 1 + offset, format!("malformed {what} formula: {message}"));
                None
            }
        }
    }

    fn num(&mut self, v: &Spanned<Num>, what: &str) -> Option<f64> {
        match v.get_ref() {
            Num::Lit(x) => Some(*x),
            Num::Text(t) => {
                let s = Spanned::new(v.span(), t.clone());
                let e = self.expr(&s, what)?;
                if e.uses_x() || e.uses_n() {
                    self.error(v.span().start, format!("{what} must be a constant"));
                    return None;
                }
                Some(e.eval(f64::NAN, f64::NAN))
            }
        }
    }
}

fn span_start<T>(s: &Spanned<T>) -> usize {
    s.span().start
}

pub fn parse_config(text: &str) -> Result<AnalysisConfig, ConfigErrors> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let at = e.span().map_or(0, |r: Range<usize>| r.start);
        let mut ctx = Ctx {
            text,
            params: BTreeMap::new(),
            errors: vec![],
        };
        ctx.error(at, e.message().trim().to_string());
        finish_errors(ctx)
    })?;
    let mut ctx = Ctx {
        text,
        params: raw.params.clone(),
        errors: vec![],
    };
    let young = resolve_young(&mut ctx, &raw.young);
    let space = raw.space.as_ref().and_then(|s| build_space(&mut ctx, s));
    let mut functions = BTreeMap::new();
    for (name, f) in &raw.functions {
        match &space {
            Some((sp, ns)) => {
                if let Some(v) = build_function(&mut ctx, name, f, sp, ns) {
                    functions.insert(name.clone(), v);
                }
            }
            None => ctx.error(span_start(f), format!("function '{name}' needs a [space] section")),
        }
    }
    let mut transforms = BTreeMap::new();
    for (name, t) in &raw.transform {
        match &space {
            Some((sp, _)) => {
                if let Some(v) = build_transform(&mut ctx, name, t, sp) {
                    transforms.insert(name.clone(), v);
                }
            }
            None => ctx.error(span_start(t), format!("transform '{name}' needs a [space] section")),
        }
    }
    let lookups = Lookups {
        young: &young,
        functions: &functions,
        transforms: &transforms,
        declared_functions: &raw.functions,
        declared_transforms: &raw.transform,
        declared_young: &raw.young,
    };
    let (setting, seed, out, requests) = match &raw.run {
        Some(run) => build_run(&mut ctx, run, &lookups),
        None => {
            ctx.error(0, "missing [run] section");
            (Setting::default(), 0, None, vec![])
        }
    };
    let ids: Vec<&str> = requests.iter().map(|r| r.id.as_str()).collect();
    let mut expect = BTreeMap::new();
    for (id, e) in &raw.expect {
        if !ids.contains(&id.as_str()) {
            ctx.error(span_start(e), format!("expectation for unknown request '{id}'"));
        }
        let (outcome, rank) = match e.get_ref() {
            RawExpect::Outcome(o) => (o.clone(), None),
            RawExpect::Detailed { outcome, rank } => (outcome.clone(), *rank),
        };
        expect.insert(id.clone(), Expectation { outcome, rank });
    }
    if !ctx.errors.is_empty() {
        return Err(finish_errors(ctx));
    }
    Ok(AnalysisConfig {
        description: raw.description,
        space: space.map(|(s, _)| s),
        setting,
        seed,
        out,
        requests,
        expect,
    })
}

fn finish_errors(mut ctx: Ctx<'_>) -> ConfigErrors {
    ctx.errors.sort_by_key(|e| e.0);
    ConfigErrors(
        ctx.errors
            .iter()
            .map(|(at, m)| {
                let (line, column) = ctx.position(*at);
                ConfigError {
                    line,
                    column,
                    message: m.clone(),
                }
            })
            .collect(),
    )
}

fn resolve_young(ctx: &mut Ctx<'_>, raw: &BTreeMap<String, Spanned<RawYoung>>) -> BTreeMap<String, YoungFunction> {
    let mut done: BTreeMap<String, YoungFunction> = BTreeMap::new();
    let mut failed: Vec<String> = Vec::new();
    // Definitions may refer to each other; resolve in passes.
    loop {
        let mut progress = false;
        for (name, y) in raw {
            if done.contains_key(name) || failed.contains(name) {
                continue;
            }
            let at = span_start(y);
            let y = y.get_ref();
            let base = y.conjugate.as_ref().or(y.complementary.as_ref());
            let set = [y.kind.is_some(), y.conjugate.is_some(), y.complementary.is_some()];
            if set.iter().filter(|&&b| b).count() != 1 {
                ctx.error(at, format!("young '{name}' needs exactly one of kind, conjugate, complementary"));
                failed.push(name.clone());
                continue;
            }
            if let Some(kind) = &y.kind {
                let p = match &y.p {
                    Some(p) => ctx.num(p, "p"),
                    None if kind.get_ref() == "power" => {
                        ctx.error(span_start(kind), format!("young '{name}': power needs p"));
                        None
                    }
                    None => Some(1.0),
                };
                let Some(p) = p else {
                    failed.push(name.clone());
                    continue;
                };
                let made = match kind.get_ref().as_str() {
                    "power" => YoungFunction::power(p),
                    "exp_power" => YoungFunction::exp_power(p),
                    "l_log_l" => YoungFunction::l_log_l(p),
                    other => {
                        ctx.error(
                            span_start(kind),
                            format!("unknown catalog name '{other}' (expected power, exp_power, l_log_l)"),
                        );
                        failed.push(name.clone());
                        continue;
                    }
                };
                match made {
                    Ok(f) => {
                        done.insert(name.clone(), f);
                        progress = true;
                    }
                    Err(e) => {
                        ctx.error(at, format!("young '{name}': {e}"));
                        failed.push(name.clone());
                    }
                }
            } else if let Some(b) = base {
                let target = b.get_ref();
                if let Some(f) = done.get(target) {
                    let g = if y.conjugate.is_some() {
                        f.conjugate_fn()
                    } else {
                        f.complementary()
                    };
                    done.insert(name.clone(), g);
                    progress = true;
                } else if !raw.contains_key(target) {
                    ctx.error(span_start(b), format!("young '{name}' refers to undefined young function '{target}'"));
                    failed.push(name.clone());
                } else if failed.contains(target) {
                    failed.push(name.clone());
                }
            }
        }
        if !progress {
            break;
        }
    }
    for (name, y) in raw {
        if !done.contains_key(name) && !failed.contains(name) {
            ctx.error(span_start(y), format!("young '{name}' is defined in a cycle"));
        }
    }
    done
}

/// Index `n` of each explicit atom generated from a `range` (NaN for listed atoms).
type AtomIndices = Vec<f64>;

fn build_space(ctx: &mut Ctx<'_>, s: &RawSpace) -> Option<(MeasureSpace, AtomIndices)> {
    let before = ctx.errors.len();
    let mut atoms = Vec::new();
    let mut ns = Vec::new();
    for (i, a) in s.atoms.iter().enumerate() {
        let r = a.get_ref();
        let mass = ctx.num(&r.mass, "mass");
        let point = r.point.as_ref().map(|p| ctx.num(p, "point"));
        let id = r.id.clone().unwrap_or_else(|| format!("A{}", i + 1));
        if let (Some(m), Some(pt)) = (mass, point.unwrap_or(Some(f64::NAN))) {
            atoms.push(if pt.is_nan() { Atom::new(id, m) } else { Atom::at(id, m, pt) });
            ns.push(f64::NAN);
        }
    }
    if let Some(rg) = &s.range {
        let r = rg.get_ref();
        let from = ctx.num(&r.from, "from");
        let to = ctx.num(&r.to, "to");
        let mass = ctx.expr(&r.mass, "mass");
        let point = match &r.point {
            Some(p) => ctx.expr(p, "point").map(Some),
            None => Some(None),
        };
        if let (Some(from), Some(to), Some(mass), Some(point)) = (from, to, mass, point) {
            let (lo, hi) = (from.ceil() as i64, to.floor() as i64);
            if hi < lo || hi - lo > 1_000_000 {
                ctx.error(span_start(rg), format!("range {from}..={to} is empty or too large"));
            }
            for n in lo..=hi.min(lo + 1_000_000) {
                let nf = n as f64;
                let x = point.as_ref().map_or(nf, |p: &Expr| p.eval(f64::NAN, nf));
                atoms.push(Atom::at(format!("{}{n}", r.prefix), mass.eval(x, nf), x));
                ns.push(nf);
            }
        }
    }
    let family = s.family.as_ref().and_then(|f| {
        let r = f.get_ref();
        let start = ctx.num(&r.start, "start");
        let mass = ctx.expr(&r.mass, "mass");
        let point = match &r.point {
            Some(p) => Some(ctx.expr(p, "point")?),
            None => None,
        };
        let start = start?;
        if start < 0.0 || start.fract() != 0.0 {
            ctx.error(span_start(&r.start), "family start must be a nonnegative integer");
            return None;
        }
        Some(AtomFamily {
            prefix: r.prefix.clone(),
            start: start as u64,
            mass: mass?.to_formula(),
            point: point.map(|p| p.to_formula()),
        })
    });
    let continuum = s.continuum.as_ref().and_then(|c| {
        let r = c.get_ref();
        let a = ctx.num(&r.a, "a");
        let b = ctx.num(&r.b, "b");
        let density = match &r.density {
            Some(d) => Some(ctx.expr(d, "density")?.to_formula()),
            None => None,
        };
        Some(Continuum { a: a?, b: b?, density })
    });
    if ctx.errors.len() > before {
        return None;
    }
    let at = s
        .continuum
        .as_ref()
        .map(span_start)
        .or(s.family.as_ref().map(span_start))
        .unwrap_or(0);
    match MeasureSpace::new(atoms, family, continuum) {
        Ok(sp) if sp.atoms().is_empty() && sp.family().is_none() && sp.continuum().is_none() => {
            ctx.error(at, "space is empty");
            None
        }
        Ok(sp) => Some((sp, ns)),
        Err(e) => {
            ctx.error(at, format!("space: {e}"));
            None
        }
    }
}

fn build_function(
    ctx: &mut Ctx<'_>,
    name: &str,
    f: &Spanned<RawFunction>,
    space: &MeasureSpace,
    ns: &AtomIndices,
) -> Option<MeasurableFunction> {
    let at = span_start(f);
    let r = f.get_ref();
    if let Some(fm) = &r.formula {
        if r.values.is_some() || r.atoms.is_some() || r.continuum.is_some() {
            ctx.error(at, format!("function '{name}': formula excludes values, atoms and continuum"));
            return None;
        }
        let e = ctx.expr(fm, "function")?;
        let explicit = explicit_values(ctx, name, span_start(fm), &e, space, ns)?;
        let family = space.family().map(|fam| family_formula(fam, &e));
        return Some(MeasurableFunction::new(explicit, family, space.continuum().map(|_| e.to_formula())));
    }
    let atoms_expr = match &r.atoms {
        Some(a) => Some(ctx.expr(a, "atoms")?),
        None => None,
    };
    let explicit = match (&r.values, &atoms_expr) {
        (Some(vs), _) => {
            if vs.len() != space.atoms().len() {
                ctx.error(
                    at,
                    format!(
                        "function '{name}' lists {} values for {} atoms",
                        vs.len(),
                        space.atoms().len()
                    ),
                );
                return None;
            }
            let mut out = Vec::with_capacity(vs.len());
            for v in vs {
                out.push(ctx.num(v, "value")?);
            }
            out
        }
        (None, Some(e)) => explicit_values(ctx, name, at, e, space, ns)?,
        (None, None) => vec![0.0; space.atoms().len()],
    };
    let family = space.family().map(|fam| match &atoms_expr {
        Some(e) => family_formula(fam, e),
        None => Formula::constant(0.0),
    });
    let continuum = match (&r.continuum, space.continuum()) {
        (Some(c), Some(_)) => Some(ctx.expr(c, "continuum")?.to_formula()),
        (Some(c), None) => {
            ctx.error(span_start(c), format!("function '{name}' has a continuum part but the space has none"));
            return None;
        }
        (None, Some(_)) => Some(Formula::constant(0.0)),
        (None, None) => None,
    };
    Some(MeasurableFunction::new(explicit, family, continuum))
}

/// A formula on explicit atoms, evaluated at each atom's point and, for
/// range atoms, its index.
fn explicit_values(
    ctx: &mut Ctx<'_>,
    name: &str,
    at: usize,
    e: &Expr,
    space: &MeasureSpace,
    ns: &AtomIndices,
) -> Option<Vec<f64>> {
    let vals: Vec<f64> = space
        .atoms()
        .iter()
        .zip(ns)
        .map(|(a, &n)| e.eval(a.point.unwrap_or(f64::NAN), n))
        .collect();
    if let Some(i) = vals.iter().position(|v| v.is_nan()) {
        ctx.error(at, format!("function '{name}' is undefined on atom {}", space.atoms()[i].id));
        return None;
    }
    Some(vals)
}

/// The formula on generated atoms, with `x` bound to the member's point.
fn family_formula(fam: &AtomFamily, e: &Expr) -> Formula {
    let point = fam.point.clone();
    let g = e.to_formula();
    Formula::new(e.text().to_string(), move |_, n| {
        let x = point.as_ref().map_or(f64::NAN, |p| p.eval(f64::NAN, n));
        g.eval(x, n)
    })
}

fn build_transform(ctx: &mut Ctx<'_>, name: &str, t: &Spanned<RawTransform>, space: &MeasureSpace) -> Option<Transformation> {
    let r = t.get_ref();
    let before = ctx.errors.len();
    let explicit: Vec<AtomRef> = match &r.map {
        Some(m) => {
            if m.len() != space.atoms().len() {
                ctx.error(
                    span_start(t),
                    format!("transform '{name}' maps {} atoms, space has {}", m.len(), space.atoms().len()),
                );
            }
            m.iter()
                .filter_map(|id| {
                    let s = id.get_ref();
                    if let Some(i) = space.atom_index(s) {
                        return Some(AtomRef::Explicit(i));
                    }
                    let member = space.family().and_then(|f| {
                        s.strip_prefix(f.prefix.as_str())
                            .and_then(|k| k.parse::<u64>().ok())
                            .filter(|&k| k >= f.start)
                    });
                    if member.is_none() {
                        ctx.error(span_start(id), format!("transform '{name}' maps to unknown atom '{s}'"));
                    }
                    member.map(AtomRef::Member)
                })
                .collect()
        }
        None => (0..space.atoms().len()).map(AtomRef::Explicit).collect(),
    };
    let mut out = Transformation::new(explicit);
    if let Some(fam) = space.family() {
        let start = fam.start;
        out = match &r.family {
            Some(e) => {
                let e = ctx.expr(e, "family map")?;
                let label = e.text().to_string();
                out.with_family_map(label, move |n| {
                    let v = e.eval(f64::NAN, n as f64);
                    AtomRef::Member(if v.is_finite() && v >= start as f64 { v.round() as u64 } else { start })
                })
            }
            None => out.with_family_map("n", AtomRef::Member),
        };
    } else if let Some(f) = &r.family {
        ctx.error(span_start(f), format!("transform '{name}' has a family map but the space has no family"));
    }
    if let Some(w) = &r.weight {
        if space.continuum().is_none() {
            ctx.error(span_start(w), format!("transform '{name}' has a weight but the space has no continuum"));
        } else if let Some(e) = ctx.expr(w, "weight") {
            out = out.with_continuum_weight(e.to_formula());
        }
    }
    if ctx.errors.len() > before {
        return None;
    }
    if let Err(e) = out.check(space) {
        ctx.error(span_start(t), format!("transform '{name}': {e}"));
        return None;
    }
    Some(out)
}

struct Lookups<'a> {
    young: &'a BTreeMap<String, YoungFunction>,
    functions: &'a BTreeMap<String, MeasurableFunction>,
    transforms: &'a BTreeMap<String, Transformation>,
    declared_young: &'a BTreeMap<String, Spanned<RawYoung>>,
    declared_functions: &'a BTreeMap<String, Spanned<RawFunction>>,
    declared_transforms: &'a BTreeMap<String, Spanned<RawTransform>>,
}

impl Lookups<'_> {
    /// Resolves a reference. Names that are declared but failed to build were
    /// already reported, so they fail silently here.
    fn get<T: Clone, R>(
        ctx: &mut Ctx<'_>,
        built: &BTreeMap<String, T>,
        declared: &BTreeMap<String, R>,
        what: &str,
        r: &Spanned<String>,
    ) -> Option<Named<T>> {
        let name = r.get_ref();
        match built.get(name) {
            Some(v) => Some(Named {
                name: name.clone(),
                value: v.clone(),
            }),
            None => {
                if !declared.contains_key(name) {
                    ctx.error(span_start(r), format!("undefined {what} '{name}'"));
                }
                None
            }
        }
    }

    fn young(&self, ctx: &mut Ctx<'_>, r: &Spanned<String>) -> Option<Named<YoungFunction>> {
        Self::get(ctx, self.young, self.declared_young, "young function", r)
    }

    fn function(&self, ctx: &mut Ctx<'_>, r: &Spanned<String>) -> Option<Named<MeasurableFunction>> {
        Self::get(ctx, self.functions, self.declared_functions, "function", r)
    }

    fn transform(&self, ctx: &mut Ctx<'_>, r: &Spanned<String>) -> Option<Named<Transformation>> {
        Self::get(ctx, self.transforms, self.declared_transforms, "transform", r)
    }
}

type RunParts = (Setting, u64, Option<String>, Vec<RequestEntry>);

fn build_run(ctx: &mut Ctx<'_>, run: &Spanned<RawRun>, l: &Lookups<'_>) -> RunParts {
    let r = run.get_ref();
    let mut setting = Setting::default();
    if let Some(n) = &r.budget_n {
        if *n.get_ref() <= 0 {
            ctx.error(span_start(n), "budget_n must be positive");
        } else {
            setting.budget.n = *n.get_ref() as usize;
        }
    }
    if let Some(t) = &r.threshold {
        if !(*t.get_ref() > 0.0) {
            ctx.error(span_start(t), "threshold must be positive");
        } else {
            setting.budget.threshold = *t.get_ref();
        }
    }
    if let Some(t) = &r.tol {
        if !(*t.get_ref() > 0.0) {
            ctx.error(span_start(t), "tol must be positive");
        } else {
            setting.tol = *t.get_ref();
        }
    }
    if let Some(rd) = &r.reading {
        match rd.get_ref().as_str() {
            "hypothesis" => setting.reading = Reading::Hypothesis,
            "proof" => setting.reading = Reading::Proof,
            other => ctx.error(span_start(rd), format!("unknown reading '{other}' (expected hypothesis or proof)")),
        }
    }
    if r.requests.is_empty() {
        ctx.error(span_start(run), "[run] has no requests");
    }
    let mut requests = Vec::new();
    let mut seen = Vec::new();
    for (i, q) in r.requests.iter().enumerate() {
        let id = q.get_ref().id.clone().unwrap_or_else(|| format!("r{}", i + 1));
        if seen.contains(&id) {
            ctx.error(span_start(q), format!("duplicate request id '{id}'"));
        }
        seen.push(id.clone());
        if let Some(request) = build_request(ctx, q, l) {
            requests.push(RequestEntry { id, request });
        }
    }
    (setting, r.seed.unwrap_or(0), r.out.clone(), requests)
}

fn build_request(ctx: &mut Ctx<'_>, q: &Spanned<RawRequest>, l: &Lookups<'_>) -> Option<Request> {
    let at = span_start(q);
    let r = q.get_ref();
    let Some(kind) = Kind::parse(r.kind.get_ref()) else {
        let names: Vec<&str> = Kind::ALL.iter().map(|k| k.as_str()).collect();
        ctx.error(
            span_start(&r.kind),
            format!("unknown request kind '{}' (expected one of {})", r.kind.get_ref(), names.join(", ")),
        );
        return None;
    };
    let need = |field: &Option<Spanned<String>>, name: &str, ctx: &mut Ctx<'_>| -> Option<Spanned<String>> {
        if field.is_none() {
            ctx.error(at, format!("{} request needs '{name}'", kind.as_str()));
        }
        field.clone()
    };
    let young = |ctx: &mut Ctx<'_>, f: &Option<Spanned<String>>, name: &str| {
        let s = need(f, name, ctx)?;
        l.young(ctx, &s)
    };
    let opt_young = |ctx: &mut Ctx<'_>, f: &Option<Spanned<String>>| -> Option<Option<Named<YoungFunction>>> {
        match f {
            Some(s) => l.young(ctx, s).map(Some),
            None => Some(None),
        }
    };
    match kind {
        Kind::Norm => {
            let f = need(&r.f, "f", ctx).and_then(|s| l.function(ctx, &s));
            let phi = young(ctx, &r.phi, "phi");
            Some(Request::Norm { f: f?, phi: phi? })
        }
        Kind::Conjugate => {
            let phi = young(ctx, &r.phi, "phi");
            let points = r.points.clone().unwrap_or_else(default_conjugate_points);
            if points.iter().any(|y| !(*y >= 0.0 && y.is_finite())) {
                ctx.error(at, "conjugate points must be finite and nonnegative");
                return None;
            }
            Some(Request::Conjugate { phi: phi?, points })
        }
        Kind::CheckMult => {
            let u = need(&r.u, "u", ctx).and_then(|s| l.function(ctx, &s));
            let phi1 = young(ctx, &r.phi1, "phi1");
            let phi2 = young(ctx, &r.phi2, "phi2");
            let phi3 = opt_young(ctx, &r.phi3);
            let test_function = match &r.test_function {
                Some(s) => l.function(ctx, s).map(Some),
                None => Some(None),
            };
            Some(Request::CheckMult {
                u: u?,
                phi1: phi1?,
                phi2: phi2?,
                phi3: phi3?,
                test_function: test_function?,
            })
        }
        Kind::CheckComp => {
            let t = need(&r.t, "t", ctx).and_then(|s| l.transform(ctx, &s));
            let phi1 = young(ctx, &r.phi1, "phi1");
            let phi2 = young(ctx, &r.phi2, "phi2");
            let phi3 = opt_young(ctx, &r.phi3);
            Some(Request::CheckComp {
                t: t?,
                phi1: phi1?,
                phi2: phi2?,
                phi3: phi3?,
            })
        }
        Kind::ClassifyRange => {
            let op = match r.operator.as_ref().map(|o| o.get_ref().as_str()) {
                Some("mult") | None if r.t.is_none() => {
                    need(&r.u, "u", ctx).and_then(|s| l.function(ctx, &s)).map(Operator::Mult)
                }
                Some("comp") | None => need(&r.t, "t", ctx).and_then(|s| l.transform(ctx, &s)).map(Operator::Comp),
                Some(other) => {
                    let o = r.operator.as_ref().expect("matched Some");
                    ctx.error(span_start(o), format!("unknown operator '{other}' (expected mult or comp)"));
                    None
                }
            };
            let phi1 = young(ctx, &r.phi1, "phi1");
            let phi2 = young(ctx, &r.phi2, "phi2");
            let phi3 = opt_young(ctx, &r.phi3);
            Some(Request::ClassifyRange {
                op: op?,
                phi1: phi1?,
                phi2: phi2?,
                phi3: phi3?,
            })
        }
        Kind::Inequality => match r.form.as_ref().map(|f| f.get_ref().as_str()) {
            Some("split") => {
                let phi = young(ctx, &r.phi, "phi");
                let psi = young(ctx, &r.psi, "psi");
                let p = match &r.p {
                    Some(p) => ctx.num(p, "p"),
                    None => {
                        ctx.error(at, "split inequality needs 'p'");
                        None
                    }
                };
                Some(Request::Split {
                    phi: phi?,
                    psi: psi?,
                    p: p?,
                })
            }
            Some("triple") => {
                let phi1 = young(ctx, &r.phi1, "phi1");
                let phi2 = young(ctx, &r.phi2, "phi2");
                let phi3 = young(ctx, &r.phi3, "phi3");
                Some(Request::Triple {
                    phi1: phi1?,
                    phi2: phi2?,
                    phi3: phi3?,
                })
            }
            _ => {
                ctx.error(at, "inequality request needs form = \"split\" or \"triple\"");
                None
            }
        },
    }
}

/// Budget and tolerance after command-line overrides.
pub fn with_overrides(mut s: Setting, n: Option<usize>, threshold: Option<f64>, tol: Option<f64>) -> Setting {
    if let Some(n) = n {
        s.budget.n = n;
    }
    if let Some(t) = threshold {
        s.budget.threshold = t;
    }
    if let Some(t) = tol {
        s.tol = t;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trend::Budget;

    const MINIMAL: &str = r#"
[young]
phi = { kind = "power", p = 2 }

[space]
atoms = [{ mass = 1.0 }]

[functions]
f = { values = [3.0] }

[run]
requests = [{ kind = "norm", f = "f", phi = "phi" }]
"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.requests.len(), 1);
        assert_eq!(c.requests[0].id, "r1");
        assert!(matches!(c.requests[0].request, Request::Norm { .. }));
        assert_eq!(c.setting.budget, Budget::default());
    }

    #[test]
    fn dangling_reference_is_named() {
        let text = MINIMAL.replace("f = \"f\"", "f = \"g\"");
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.0.len(), 1, "{e}");
        assert!(e.0[0].message.contains("'g'"), "{e}");
        assert_eq!(e.0[0].line, 12);
    }

    #[test]
    fn all_errors_reported_with_positions() {
        let text = r#"
[young]
phi = { kind = "powr", p = 2 }
psi = { conjugate = "nope" }

[space]
atoms = [{ mass = 1.0 }]

[functions]
f = { atoms = "x +* 2" }

[run]
budget_n = 0
requests = [{ kind = "norm", f = "f", phi = "zeta" }]
"#;
        let e = parse_config(text).unwrap_err();
        let lines: Vec<usize> = e.0.iter().map(|x| x.line).collect();
        assert_eq!(lines, vec![3, 4, 10, 13, 14], "{e}");
        assert!(e.0[0].message.contains("unknown catalog name 'powr'"));
        assert!(e.0[2].message.contains("malformed"));
        assert_eq!(e.0[2].column, 19);
        assert!(e.0[4].message.contains("'zeta'"));
    }

    #[test]
    fn toml_syntax_error_has_position() {
        let e = parse_config("[run\n").unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].line, 1);
    }

    #[test]
    fn generators_and_references() {
        let text = r#"
[params]
a = 2

[young]
phi = { kind = "exp_power" }
psi = { complementary = "phi" }

[space]
range = { prefix = "n", from = "a + 1", to = "10 * a", mass = "1" }
family = { prefix = "B", start = 3, mass = "n^-3", point = "ln(n)" }
continuum = { a = 1, b = "a" }

[functions]
u = { atoms = "1/x^2", continuum = "x" }

[transform]
T = { family = "n + 1" }

[run]
requests = [
  { id = "m", kind = "check-mult", u = "u", phi1 = "phi", phi2 = "psi" },
  { id = "c", kind = "classify-range", operator = "comp", t = "T", phi1 = "phi", phi2 = "psi" },
]

[expect]
m = "refuted"
c = { outcome = "finite_rank", rank = 18 }
"#;
        let c = parse_config(text).unwrap();
        let s = c.space.as_ref().unwrap();
        assert_eq!(s.atoms().len(), 18);
        assert_eq!(s.atoms()[0].id, "n3");
        let Request::CheckMult { u, phi2, .. } = &c.requests[0].request else {
            panic!()
        };
        assert_eq!(u.value.explicit_values()[0], 1.0 / 9.0);
        assert_eq!(phi2.value.name(), "l_log_l{p=1}");
        let fam = u.value.family_formula().unwrap();
        assert!((fam.eval(f64::NAN, 3.0) - 3f64.ln().powi(-2)).abs() < 1e-15);
        assert_eq!(c.expect["c"].rank, Some(18));
    }

    #[test]
    fn young_cycle_detected() {
        let text = r#"
[young]
a = { conjugate = "b" }
b = { conjugate = "a" }
[run]
requests = [{ kind = "conjugate", phi = "a" }]
"#;
        let e = parse_config(text).unwrap_err();
        assert!(e.0.iter().any(|x| x.message.contains("cycle")), "{e}");
    }
}
