//! Young functions: evaluation, numerical convex conjugation, inversion and
//! composition.
//!
//! A [`YoungFunction`] is a cheap-to-clone handle. Catalog entries evaluate in
//! closed form; conjugates, composites and custom evaluators are built on top
//! of them and evaluated numerically.

mod growth;

pub use growth::{
    check_growth, check_split_inequality, check_triple_inequality, check_young, dominates,
    CertVerdict, Condition, GridSpec, GrowthCertificate, DEFAULT_CAP,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default absolute tolerance for conjugation and inversion.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Maximum number of doublings while bracketing a maximizer or a preimage.
const MAX_DOUBLINGS: usize = 1100;

/// Catalog tag of a Young function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YoungKind {
    Power,
    ExpPower,
    LLogL,
    Conjugate,
    Composite,
    Custom,
}

/// One stage of a composite `outer ∘ ... ∘ inner`.
#[derive(Clone, Debug)]
pub enum Stage {
    Apply(YoungFunction),
    Invert(YoungFunction),
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

enum Repr {
    Power(f64),
    ExpPower(f64),
    LLogL(f64),
    Conjugate { base: YoungFunction, tol: f64 },
    /// `c x^r`: composites and complements of powers folded to closed form.
    /// `label` and `kind` describe how it was built.
    Monomial {
        c: f64,
        r: f64,
        label: String,
        kind: YoungKind,
    },
    /// Stages listed outermost first.
    Composite(Vec<Stage>),
    Custom { name: String, eval: Evaluator },
}

/// An even, convex, superlinear gauge function `Φ` with `Φ(0) = 0`.
#[derive(Clone)]
pub struct YoungFunction {
    repr: Arc<Repr>,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({})", self.name())
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_param(name: &str, p: f64, min: f64, strict: bool) -> Result<()> {
    let ok = p.is_finite() && if strict { p > min } else { p >= min };
    if ok {
        Ok(())
    } else {
        let rel = if strict { ">" } else { ">=" };
        Err(Error::InvalidParameter(format!(
            "{name} requires p {rel} {min}, got {p}"
        )))
    }
}

impl YoungFunction {
    fn from_repr(repr: Repr) -> Self {
        Self {
            repr: Arc::new(repr),
        }
    }

    /// `Φ(x) = x^p / p`, `p > 1`.
    pub fn power(p: f64) -> Result<Self> {
        check_param("power", p, 1.0, true)?;
        Ok(Self::from_repr(Repr::Power(p)))
    }

    /// `Φ(x) = exp(x^p) - x^p - 1`, `p >= 1`.
    pub fn exp_power(p: f64) -> Result<Self> {
        check_param("exp_power", p, 1.0, false)?;
        Ok(Self::from_repr(Repr::ExpPower(p)))
    }

    /// `Φ(x) = (1 + x^p) ln(1 + x^p) - x^p`, `p >= 1`.
    pub fn l_log_l(p: f64) -> Result<Self> {
        check_param("l_log_l", p, 1.0, false)?;
        Ok(Self::from_repr(Repr::LLogL(p)))
    }

    /// Wraps an arbitrary evaluator. The caller is responsible for the Young
    /// axioms; [`check_young`] tests them on a grid.
    pub fn custom<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_repr(Repr::Custom {
            name: name.into(),
            eval: Arc::new(eval),
        })
    }

    /// The numerically conjugated function `Ψ(y) = sup{x y - Φ(x)}`.
    pub fn conjugate_fn(&self) -> Self {
        self.conjugate_fn_with_tol(DEFAULT_TOL)
    }

    pub fn conjugate_fn_with_tol(&self, tol: f64) -> Self {
        Self::from_repr(Repr::Conjugate {
            base: self.clone(),
            tol,
        })
    }

    /// The complementary function, in closed form where the catalog knows it
    /// (power `p` ↔ power `p'`, `exp_power{1}` ↔ `l_log_l{1}`, `c x^r` ↔
    /// `c' x^{r'}`), numerical otherwise.
    pub fn complementary(&self) -> Self {
        match &*self.repr {
            Repr::Power(p) => Self::from_repr(Repr::Power(p / (p - 1.0))),
            Repr::ExpPower(p) if *p == 1.0 => Self::from_repr(Repr::LLogL(1.0)),
            Repr::LLogL(p) if *p == 1.0 => Self::from_repr(Repr::ExpPower(1.0)),
            Repr::Conjugate { base, .. } => base.clone(),
            Repr::Monomial { c, r, .. } if *r > 1.0 => {
                let c2 = (r - 1.0) / r * (c * r).powf(-1.0 / (r - 1.0));
                Self::monomial(c2, r / (r - 1.0), format!("conjugate({})", self.name()), YoungKind::Conjugate)
            }
            // Linear or sublinear: the supremum is 0 up to the slope, then infinite.
            Repr::Monomial { c, r, .. } => {
                let slope = if *r == 1.0 { *c } else { 0.0 };
                Self::custom(format!("conjugate({})", self.name()), move |y| {
                    if y <= slope {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
            }
            _ => self.conjugate_fn(),
        }
    }

    fn monomial(c: f64, r: f64, label: String, kind: YoungKind) -> Self {
        Self::from_repr(Repr::Monomial { c, r, label, kind })
    }

    /// `(c, r)` with `Φ(x) = c x^r`, for powers and folded monomials.
    fn as_monomial(&self) -> Option<(f64, f64)> {
        match &*self.repr {
            Repr::Power(p) => Some((1.0 / p, *p)),
            Repr::Monomial { c, r, .. } => Some((*c, *r)),
            _ => None,
        }
    }

    /// Composite from stages listed outermost first.
    pub fn composite(stages: Vec<Stage>) -> Self {
        // Monomials are closed under composition and inversion.
        let folded = stages.iter().rev().try_fold((1.0, 1.0), |(c, r), stage| {
            let (c1, r1) = match stage {
                Stage::Apply(f) => f.as_monomial()?,
                Stage::Invert(f) => {
                    let (c1, r1) = f.as_monomial()?;
                    (c1.powf(-1.0 / r1), 1.0 / r1)
                }
            };
            Some((c1 * f64::powf(c, r1), r * r1))
        });
        let made = Self::from_repr(Repr::Composite(stages));
        match folded {
            Some((c, r)) if c.is_finite() && c > 0.0 => Self::monomial(c, r, made.name(), YoungKind::Composite),
            _ => made,
        }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Self {
        Self::composite(vec![Stage::Apply(outer.clone()), Stage::Apply(inner.clone())])
    }

    /// `outer ∘ inner⁻¹`.
    pub fn compose_inverse(outer: &Self, inner: &Self) -> Self {
        Self::composite(vec![
            Stage::Apply(outer.clone()),
            Stage::Invert(inner.clone()),
        ])
    }

    pub fn kind(&self) -> YoungKind {
        match &*self.repr {
            Repr::Power(_) => YoungKind::Power,
            Repr::ExpPower(_) => YoungKind::ExpPower,
            Repr::LLogL(_) => YoungKind::LLogL,
            Repr::Conjugate { .. } => YoungKind::Conjugate,
            Repr::Monomial { kind, .. } => *kind,
            Repr::Composite(_) => YoungKind::Composite,
            Repr::Custom { .. } => YoungKind::Custom,
        }
    }

    /// Catalog parameters (`[p]` for catalog entries, empty otherwise).
    pub fn params(&self) -> Vec<f64> {
        match &*self.repr {
            Repr::Power(p) | Repr::ExpPower(p) | Repr::LLogL(p) => vec![*p],
            _ => Vec::new(),
        }
    }

    /// Exponent of a power-catalog entry.
    pub fn power_exponent(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Power(p) => Some(*p),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match &*self.repr {
            Repr::Power(p) => format!("power{{p={p}}}"),
            Repr::ExpPower(p) => format!("exp_power{{p={p}}}"),
            Repr::LLogL(p) => format!("l_log_l{{p={p}}}"),
            Repr::Conjugate { base, .. } => format!("conjugate({})", base.name()),
            Repr::Composite(stages) => stages
                .iter()
                .map(|s| match s {
                    Stage::Apply(f) => f.name(),
                    Stage::Invert(f) => format!("{}^-1", f.name()),
                })
                .collect::<Vec<_>>()
                .join(" o "),
            Repr::Monomial { label, .. } => label.clone(),
            Repr::Custom { name, .. } => name.clone(),
        }
    }

    /// `Φ(|x|)`. Overflow yields `+inf`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let x = x.abs();
        if x == 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return f64::INFINITY;
        }
        match &*self.repr {
            Repr::Power(p) => x.powf(*p) / p,
            Repr::ExpPower(p) => exp_excess(x.powf(*p)),
            Repr::LLogL(p) => llogl_excess(x.powf(*p)),
            Repr::Conjugate { base, tol } => conjugate(base, x, *tol).unwrap_or(f64::INFINITY),
            Repr::Monomial { c, r, .. } => c * x.powf(*r),
            Repr::Composite(stages) => {
                let mut v = x;
                for stage in stages.iter().rev() {
                    v = match stage {
                        Stage::Apply(f) => f.evaluate(v),
                        Stage::Invert(f) => f.inverse(v, DEFAULT_TOL),
                    };
                }
                v
            }
            Repr::Custom { eval, .. } => {
                let v = eval(x);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }

    /// `ln Φ(|x|)`, accurate where `Φ` itself overflows or underflows.
    pub fn ln_evaluate(&self, x: f64) -> f64 {
        let x = x.abs();
        if x == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.ln_evaluate_at_ln(x.ln())
    }

    /// `ln Φ(e^lx)`.
    pub fn ln_evaluate_at_ln(&self, lx: f64) -> f64 {
        if lx == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if lx == f64::INFINITY {
            return f64::INFINITY;
        }
        match &*self.repr {
            Repr::Power(p) => p * lx - p.ln(),
            Repr::Monomial { c, r, .. } => r * lx + c.ln(),
            Repr::ExpPower(p) => {
                let lt = p * lx;
                let t = lt.exp();
                if t < 1e-4 {
                    // t^2/2 (1 + t/3 + t^2/12)
                    2.0 * lt - std::f64::consts::LN_2 + (t / 3.0 + t * t / 12.0).ln_1p()
                } else if t < 700.0 {
                    exp_excess(t).ln()
                } else {
                    t + (-(t + 1.0) * (-t).exp()).ln_1p()
                }
            }
            Repr::LLogL(p) => {
                let lt = p * lx;
                let t = lt.exp();
                if t < 1e-4 {
                    // t^2/2 (1 - t/3 + t^2/6)
                    2.0 * lt - std::f64::consts::LN_2 + (-t / 3.0 + t * t / 6.0).ln_1p()
                } else if t.is_finite() {
                    let l = t.ln_1p();
                    l + (l - t / (1.0 + t)).ln()
                } else {
                    lt + (lt - 1.0).ln()
                }
            }
            _ => {
                let x = lx.exp();
                if x.is_infinite() {
                    return f64::INFINITY;
                }
                self.evaluate(x).ln()
            }
        }
    }

    /// `Ψ(y)` for this function, see [`conjugate`].
    pub fn conjugate(&self, y: f64, tol: f64) -> Result<f64> {
        conjugate(self, y, tol)
    }

    /// `Φ⁻¹(y)` by bisection on a doubling bracket. `inverse(0) = 0`.
    pub fn inverse(&self, y: f64, tol: f64) -> f64 {
        let _ = tol;
        let y = y.abs();
        if y == 0.0 {
            return 0.0;
        }
        if y.is_infinite() {
            return f64::INFINITY;
        }
        if let Some((c, r)) = self.as_monomial() {
            // Closed form keeps the hot paths (norm brackets, witnesses) cheap.
            return (y / c).powf(1.0 / r);
        }
        monotone_preimage(|x| self.evaluate(x), y)
    }

    /// The `x` with `ln Φ(x) = ln_y`; usable where `y` itself overflows.
    pub fn inverse_ln(&self, ln_y: f64) -> f64 {
        if ln_y == f64::NEG_INFINITY {
            return 0.0;
        }
        if ln_y == f64::INFINITY {
            return f64::INFINITY;
        }
        if let Some((c, r)) = self.as_monomial() {
            return ((ln_y - c.ln()) / r).exp();
        }
        monotone_preimage(|x| self.ln_evaluate(x), ln_y)
    }
}

/// `exp(t) - t - 1` without cancellation for small `t`.
fn exp_excess(t: f64) -> f64 {
    if t < 1e-4 {
        t * t * (0.5 + t / 6.0 + t * t / 24.0)
    } else {
        t.exp_m1() - t
    }
}

/// `(1 + t) ln(1 + t) - t` without cancellation for small `t`.
fn llogl_excess(t: f64) -> f64 {
    if t < 1e-4 {
        t * t * (0.5 - t / 6.0 + t * t / 12.0)
    } else {
        (1.0 + t) * t.ln_1p() - t
    }
}

/// Smallest `x >= 0` with `g(x) >= target` for nondecreasing `g`, located by
/// bisection after bracketing by doubling/halving from 1.
fn monotone_preimage<G: Fn(f64) -> f64>(g: G, target: f64) -> f64 {
    let (mut lo, mut hi);
    if g(1.0) < target {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while g(hi) < target {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_DOUBLINGS || hi.is_infinite() {
                return f64::INFINITY;
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while g(lo) >= target {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_DOUBLINGS || lo == 0.0 {
                lo = 0.0;
                break;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `hi` satisfies g(hi) >= target; pick whichever endpoint is closer.
    if (g(lo) - target).abs() < (g(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Numerical convex conjugate `Ψ(y) = sup_{x >= 0} (x|y| - Φ(x))`.
///
/// The maximizer is bracketed by doubling from `x = 1` until the objective
/// has fallen on three consecutive doublings (or `Φ` overflows), then located
/// by golden-section search down to a bracket of relative width `tol`. The
/// objective is concave, so the bracket `[x_{j-1}, x_{j+1}]` around the best
/// sample contains the maximizer.
pub fn conjugate(phi: &YoungFunction, y: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let y = y.abs();
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let g = |x: f64| {
        let v = phi.evaluate(x);
        if v.is_infinite() {
            f64::NEG_INFINITY
        } else {
            x * y - v
        }
    };

    // Sample powers of two, upward from 1 when g(1) > 0 and downward
    // otherwise (concavity with g(0) = 0 puts the maximizer below 1 then).
    let up = g(1.0) > 0.0;
    let step = if up { 2.0 } else { 0.5 };
    let mut best_x = 0.0f64;
    let mut best_val = 0.0f64;
    let mut prev = if up { 0.0 } else { f64::NEG_INFINITY };
    let mut falls = 0;
    let mut x = 1.0f64;
    for _ in 0..=MAX_DOUBLINGS {
        let v = g(x);
        if v > best_val {
            best_val = v;
            best_x = x;
        }
        if v < prev {
            falls += 1;
        } else {
            falls = 0;
        }
        // Going up, an infinite Φ means the maximizer is already behind us.
        if falls >= 3 || v == f64::NEG_INFINITY && up {
            break;
        }
        prev = v;
        x *= step;
        if x.is_infinite() {
            return Err(Error::ConjugateBracket {
                y,
                partial: best_val,
            });
        }
        if x == 0.0 {
            break;
        }
    }
    if best_x == 0.0 {
        // Ψ(y) underflows.
        return Ok(best_val);
    }
    // Upward from 1 the best sample may be 1 itself with the maximizer
    // anywhere below it.
    let mut lo = if up && best_x == 1.0 { 0.0 } else { 0.5 * best_x };
    let mut hi = 2.0 * best_x;

    // Golden section: a wrong step needs the two probes to tie within
    // rounding, which only happens once the bracket is already tiny.
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut best = best_val;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..300 {
        best = best.max(gc).max(gd);
        // The value error is quadratic in the bracket width.
        if hi - lo <= tol.max(4.0 * f64::EPSILON) * hi {
            break;
        }
        if gc < gd {
            lo = c;
            c = d;
            gc = gd;
            d = lo + INV_PHI * (hi - lo);
            gd = g(d);
        } else {
            hi = d;
            d = c;
            gd = gc;
            c = hi - INV_PHI * (hi - lo);
            gc = g(c);
        }
    }
    let val = [g(lo), g(hi), best].into_iter().fold(0.0f64, f64::max);
    Ok(val)
}
