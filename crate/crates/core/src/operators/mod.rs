//! Multiplication and composition operators between Orlicz spaces, with
//! sufficient and necessary boundedness criteria and witness constructions.

mod comp;
mod empirical;
mod mult;
mod witness;

pub use comp::{
    check_comp, comp_bounded_via_mult, comp_condition_chain, comp_dual_membership, comp_mult_sandwich, comp_necessary,
    comp_sufficient_atomic, ChainReport, Sandwich,
};
pub use empirical::{empirical_comp_norm, empirical_mult_norm, EmpiricalNorm};
pub use mult::{
    check_mult, mult_bounded_sufficient, mult_bounded_sufficient_atomic, mult_dual_membership, mult_necessary,
    mult_test_function,
};
pub use witness::{escape_witness, nonatomic_nonexistence, WitnessTrace};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Formula, MeasurableFunction, MeasureSpace, Realized, Transformation, CONTINUUM_GRID};
use crate::trend::{sup_trend, Budget, Trend};
use crate::young::{check_growth, check_triple_inequality, CertVerdict, Condition, GridSpec, GrowthCertificate, YoungFunction, DEFAULT_CAP};

/// Values at or below this count as zero when scanning the continuum.
pub const SUPPORT_EPS: f64 = 1e-12;
/// Shortest continuum run, relative to the interval, that counts as a set of
/// positive measure.
pub const MIN_RUN: f64 = 1e-6;

/// Which triple inequality gates the necessary condition for `M_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)`.
    #[default]
    Hypothesis,
    /// `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)`.
    Proof,
}

/// Numerical settings shared by the criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Setting {
    pub budget: Budget,
    pub tol: f64,
    pub grid: GridSpec,
    pub reading: Reading,
}

impl Default for Setting {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            tol: 1e-9,
            grid: GridSpec::default(),
            reading: Reading::Hypothesis,
        }
    }
}

/// `M_u f = u·f`.
pub fn apply_mult(space: &MeasureSpace, u: &MeasurableFunction, f: &MeasurableFunction) -> Result<MeasurableFunction> {
    u.check(space)?;
    f.check(space)?;
    u.product(f)
}

/// `C_T f = f∘T` on a purely atomic space. Atoms whose image lies beyond the
/// realized budget make the result undefined and are reported.
pub fn apply_comp(
    space: &MeasureSpace,
    r: &Realized,
    t: &Transformation,
    f: &MeasurableFunction,
) -> Result<MeasurableFunction> {
    if !space.is_purely_atomic() {
        return Err(Error::Refused(
            "f∘T needs T on the continuum; only f₀ is modelled there".into(),
        ));
    }
    t.check(space)?;
    let vals = f.atom_values(r)?;
    let out = t
        .images(r)
        .into_iter()
        .enumerate()
        .map(|(i, img)| {
            img.map(|j| vals[j])
                .ok_or_else(|| Error::Precondition(format!("image of atom {i} lies beyond the budget")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurableFunction::from_realized(space, r, out, None))
}

/// A growth certificate that must hold on the whole grid.
pub(crate) fn global_cert(phi: &YoungFunction, c: Condition, grid: GridSpec) -> Result<GrowthCertificate> {
    let cert = check_growth(phi, c, grid, DEFAULT_CAP);
    if cert.is_global() {
        Ok(cert)
    } else {
        Err(Error::Precondition(format!(
            "{phi} has no global {c:?} certificate (threshold {}, constant {})",
            cert.threshold, cert.constant
        )))
    }
}

pub(crate) fn require_triple(
    left: &YoungFunction,
    first: &YoungFunction,
    second: &YoungFunction,
    grid: GridSpec,
) -> Result<()> {
    let cert = check_triple_inequality(left, first, second, grid);
    match cert.verdict {
        CertVerdict::HoldsEmpirically => Ok(()),
        CertVerdict::Counterexample { x, y } => Err(Error::Precondition(format!(
            "{left}(xy) <= {first}(x) + {second}(y) fails at x={x}, y={}",
            y.unwrap_or(x)
        ))),
    }
}

/// `Φ₂ ⊀ Φ₁`, established by a domination counterexample.
pub(crate) fn not_dominated(phi1: &YoungFunction, phi2: &YoungFunction, grid: GridSpec) -> bool {
    !crate::young::dominates(phi1, phi2, grid).holds()
}

/// Longest grid run of the continuum where `|g| > SUPPORT_EPS`, if it is long
/// enough to have positive measure.
pub fn continuum_support(space: &MeasureSpace, g: Option<&Formula>) -> Option<(f64, f64)> {
    let c = space.continuum()?;
    let g = g?;
    let xs = c.grid(CONTINUUM_GRID);
    let (mut best, mut start): (Option<(f64, f64)>, Option<usize>) = (None, None);
    for i in 0..=xs.len() {
        let on = i < xs.len() && {
            let v = g.eval(xs[i], f64::NAN).abs();
            v > SUPPORT_EPS && !v.is_nan()
        };
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let run = (xs[s], xs[i - 1]);
                if best.is_none_or(|b| run.1 - run.0 > b.1 - b.0) {
                    best = Some(run);
                }
                start = None;
            }
            _ => {}
        }
    }
    best.filter(|(a, b)| b - a >= MIN_RUN * (c.b - c.a))
}

/// Partial-maximum trend of per-atom values.
pub(crate) fn atom_sup(r: &Realized, vals: &[f64], budget: &Budget) -> Trend {
    let (h, t) = r.split(vals);
    sup_trend(h, t, budget.threshold)
}

/// `(Φ₂∘Φ₁⁻¹)` as a Young function, checked on the grid.
pub(crate) fn valid_composite(outer: &YoungFunction, inner: &YoungFunction, grid: GridSpec) -> Result<YoungFunction> {
    let g = YoungFunction::compose_inverse(outer, inner);
    crate::young::check_young(&g, grid).map_err(Error::Precondition)?;
    Ok(g)
}

/// Coarser grid for checks that evaluate numerically conjugated functions.
pub(crate) fn coarse(grid: GridSpec) -> GridSpec {
    GridSpec::new(grid.lo, grid.hi.min(2f64.powi(12)), grid.points.min(48))
}

/// Runs a criterion; precondition failures and refusals become inconclusive
/// verdicts so combined checks can report them.
pub fn soften(r: Result<crate::verdict::Verdict>) -> Result<crate::verdict::Verdict> {
    match r {
        Err(Error::Precondition(m)) | Err(Error::Refused(m)) => {
            Ok(crate::verdict::Verdict::inconclusive(format!("not applicable: {m}")))
        }
        other => other,
    }
}
