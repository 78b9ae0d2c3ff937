//! Explicit witness sequences for `Φ₂ ⊀ Φ₁` on a nonatomic part.

use std::sync::Arc;

use serde::Serialize;

use super::{not_dominated, Setting};
use crate::error::{Error, Result};
use crate::measure::{Formula, MeasurableFunction, MeasureSpace};
use crate::quadrature;
use crate::verdict::{Verdict, Witness, WitnessStep};
use crate::young::{check_growth, Condition, YoungFunction, DEFAULT_CAP};

/// Step of the geometric level search, in `ln` units (`2^{1/8}` per step).
const LN_STEP: f64 = std::f64::consts::LN_2 / 8.0;
const LN_LEVEL_MAX: f64 = 700.0;
/// Steps kept verbatim when a trace is turned into a verdict witness.
const SHOWN_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessTrace {
    pub steps: Vec<WitnessStep>,
    /// Domain modular partial sums at `n = 1, 10, 100, …` and the last `n`.
    pub domain_partial_sums: Vec<(usize, f64)>,
    /// Image (lower-bound) modular partial sums at the same `n`.
    pub image_partial_sums: Vec<(usize, f64)>,
    /// False when the level search ran out of range before `n_max`.
    pub complete: bool,
}

impl WitnessTrace {
    pub fn domain_total(&self) -> f64 {
        self.domain_partial_sums.last().map_or(0.0, |x| x.1)
    }

    pub fn image_total(&self) -> f64 {
        self.image_partial_sums.last().map_or(0.0, |x| x.1)
    }

    /// Partial sum at checkpoint `n`.
    pub fn domain_at(&self, n: usize) -> Option<f64> {
        self.domain_partial_sums.iter().find(|x| x.0 == n).map(|x| x.1)
    }

    pub fn image_at(&self, n: usize) -> Option<f64> {
        self.image_partial_sums.iter().find(|x| x.0 == n).map(|x| x.1)
    }

    pub fn to_witness(&self) -> Witness {
        Witness::Construction {
            steps: self.steps.iter().take(SHOWN_STEPS).cloned().collect(),
            domain_partial_sums: self.domain_partial_sums.clone(),
            image_partial_sums: self.image_partial_sums.clone(),
        }
    }

    /// Refuted when the image sums outgrow the bounded domain sums tenfold.
    pub fn verdict(&self) -> Verdict {
        let (d, i) = (self.domain_total(), self.image_total());
        let v = if self.complete && i > 10.0 * d {
            Verdict::refuted(self.to_witness())
        } else {
            Verdict::inconclusive("witness sums did not separate within the budget")
        };
        v.log("witness_domain_sum", "partial", Some(d))
            .log("witness_image_sum", "partial", Some(i))
    }
}

fn is_checkpoint(n: usize, last: usize) -> bool {
    n == last || (n as f64).log10().fract() == 0.0
}

/// Smallest grid level `ln y ≥ start` with `pred(ln y)`.
fn search(start: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    let mut ly = start;
    while ly <= LN_LEVEL_MAX {
        if pred(ly) {
            return Some(ly);
        }
        ly += LN_STEP;
    }
    None
}

/// Continuum mass `μ(B)`.
fn continuum_mass(space: &MeasureSpace) -> Result<f64> {
    let c = space
        .continuum()
        .ok_or_else(|| Error::Precondition("the space has no nonatomic part".into()))?;
    let m = quadrature::adaptive(&|x| c.density_at(x), c.a, c.b, 1e-12)?;
    if !(m > 0.0) {
        return Err(Error::Precondition("the nonatomic part has zero mass".into()));
    }
    Ok(m)
}

/// Levels `y_n` with `Φ₂(y_n) > Φ₁(2ⁿ n³ y_n)` and pieces
/// `μ(F_n) = Φ₁(y₁) μ(F) / (2ⁿ Φ₁(n³ y_n))` of the nonatomic part `F`.
/// `f = Σ n² y_n χ_{F_n}` has bounded `Φ₁`-modular while
/// `Σ (1/n) Φ₂(y_n) μ(F_n)` grows like the harmonic series, so no nonzero
/// weighted composition maps `L^{Φ₁}` into `L^{Φ₂}` on `F`.
pub fn nonatomic_nonexistence(
    space: &MeasureSpace,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    n_max: usize,
    s: &Setting,
) -> Result<WitnessTrace> {
    if !not_dominated(phi1, phi2, s.grid) {
        return Err(Error::Precondition(format!("{phi2} is dominated by {phi1}")));
    }
    let ln_mf = continuum_mass(space)?.ln();
    let ln2 = std::f64::consts::LN_2;
    let mut steps = Vec::new();
    let (mut dom, mut img) = (0.0, 0.0);
    let (mut dsum, mut isum) = (Vec::new(), Vec::new());
    let mut start = -40.0 * LN_STEP * 8.0;
    let mut ln_phi1_y1 = f64::NAN;
    let mut complete = true;
    for n in 1..=n_max {
        let nf = n as f64;
        let shift = nf * ln2 + 3.0 * nf.ln();
        let Some(ly) = search(start, |ly| phi2.ln_evaluate_at_ln(ly) > phi1.ln_evaluate_at_ln(ly + shift) + 1e-12)
        else {
            complete = false;
            break;
        };
        start = ly;
        if n == 1 {
            ln_phi1_y1 = phi1.ln_evaluate_at_ln(ly);
        }
        let ln_mass = ln_phi1_y1 + ln_mf - nf * ln2 - phi1.ln_evaluate_at_ln(ly + 3.0 * nf.ln());
        dom += (phi1.ln_evaluate_at_ln(ly + 2.0 * nf.ln()) + ln_mass).exp();
        img += (phi2.ln_evaluate_at_ln(ly) + ln_mass - nf.ln()).exp();
        steps.push(WitnessStep {
            n,
            level: ly.exp(),
            ln_mass,
        });
        if is_checkpoint(n, n_max) {
            dsum.push((n, dom));
            isum.push((n, img));
        }
    }
    if !complete {
        let n = steps.len();
        if dsum.last().is_none_or(|x| x.0 != n) && n > 0 {
            dsum.push((n, dom));
            isum.push((n, img));
        }
    }
    Ok(WitnessTrace {
        steps,
        domain_partial_sums: dsum,
        image_partial_sums: isum,
        complete,
    })
}

/// Inside the interval `E` of Lebesgue measure `α`: levels `x_n` with
/// `Φ₂(x_n) > Φ₁(n x_n)`, `Φ₁(x_n) ≥ 1`, pieces `μ(F_n) = (n₀+n+1)⁻²` where
/// `Σ_{n≥n₀} n⁻² < α`, and `E_n ⊂ F_n` with `μ(E_n) = μ(F_n)/Φ₁(x_n)`.
/// Returns the trace and `f = Σ x_n χ_{E_n}`, which lies in `L^{Φ₁}` but not
/// in `L^{Φ₂}`.
pub fn escape_witness(
    space: &MeasureSpace,
    e: (f64, f64),
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    n_max: usize,
    s: &Setting,
) -> Result<(WitnessTrace, MeasurableFunction)> {
    let c = space
        .continuum()
        .ok_or_else(|| Error::Precondition("the space has no nonatomic part".into()))?;
    if c.density.is_some() {
        return Err(Error::Precondition("piece placement assumes Lebesgue density".into()));
    }
    let (e0, e1) = e;
    if !(c.a <= e0 && e0 < e1 && e1 <= c.b) {
        return Err(Error::InvalidParameter(format!(
            "[{e0}, {e1}] is not a subinterval of [{}, {}]",
            c.a, c.b
        )));
    }
    if !not_dominated(phi1, phi2, s.grid) {
        return Err(Error::Precondition(format!("{phi2} is dominated by {phi1}")));
    }
    if !check_growth(phi2, Condition::Delta2, s.grid, DEFAULT_CAP).holds() {
        return Err(Error::Precondition(format!("{phi2} fails Delta2")));
    }
    let alpha = e1 - e0;
    let mut n0 = 1usize;
    while zeta2_tail(n0) >= alpha {
        n0 += 1;
    }
    let mut steps = Vec::new();
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    let (mut dom, mut img, mut pos) = (0.0, 0.0, e0);
    let (mut dsum, mut isum) = (Vec::new(), Vec::new());
    let mut start = phi1.inverse(1.0, 1e-12).ln();
    let mut complete = true;
    for n in 1..=n_max {
        let ln_n = (n as f64).ln();
        let Some(lx) = search(start, |lx| {
            phi1.ln_evaluate_at_ln(lx) >= 0.0 && phi2.ln_evaluate_at_ln(lx) > phi1.ln_evaluate_at_ln(lx + ln_n) + 1e-12
        }) else {
            complete = false;
            break;
        };
        start = lx;
        let mf = ((n0 + n + 1) as f64).powi(-2);
        let ln_me = mf.ln() - phi1.ln_evaluate_at_ln(lx);
        dom += mf;
        img += (phi2.ln_evaluate_at_ln(lx) + ln_me).exp();
        let x = lx.exp();
        pieces.push((pos, ln_me.exp(), x));
        pos += mf;
        steps.push(WitnessStep {
            n,
            level: x,
            ln_mass: ln_me,
        });
        if is_checkpoint(n, n_max) {
            dsum.push((n, dom));
            isum.push((n, img));
        }
    }
    if !complete && !steps.is_empty() {
        dsum.push((steps.len(), dom));
        isum.push((steps.len(), img));
    }
    let table = Arc::new(pieces);
    let f = Formula::of_x("escape_witness", move |x| {
        let i = table.partition_point(|p| p.0 <= x);
        if i == 0 {
            return 0.0;
        }
        let (s0, len, v) = table[i - 1];
        if x < s0 + len {
            v
        } else {
            0.0
        }
    });
    let func = MeasurableFunction::new(
        vec![0.0; space.atoms().len()],
        space.family().map(|_| Formula::constant(0.0)),
        Some(f),
    );
    Ok((
        WitnessTrace {
            steps,
            domain_partial_sums: dsum,
            image_partial_sums: isum,
            complete,
        },
        func,
    ))
}

/// `Σ_{n≥m} n⁻²`.
fn zeta2_tail(m: usize) -> f64 {
    if m < 1_000 {
        let head: f64 = (1..m).map(|k| (k as f64).powi(-2)).sum();
        std::f64::consts::PI.powi(2) / 6.0 - head
    } else {
        let x = m as f64;
        1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Continuum;

    fn unit() -> MeasureSpace {
        MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 1.0))).unwrap()
    }

    #[test]
    fn tail_sums() {
        assert!((zeta2_tail(1) - 1.644_934_066_848_226_4).abs() < 1e-12);
        assert!((zeta2_tail(2) - 0.644_934_066_848_226_4).abs() < 1e-12);
        let direct: f64 = 1.0 / 999.0f64.powi(2) + zeta2_tail(1000);
        assert!((direct - zeta2_tail(999)).abs() < 1e-12);
    }

    #[test]
    fn escape_power_two_four() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let p4 = YoungFunction::power(4.0).unwrap();
        let (tr, f) = escape_witness(&unit(), (0.0, 1.0), &p2, &p4, 10_000, &Setting::default()).unwrap();
        assert!(tr.complete);
        let (d3, d4) = (tr.domain_at(1000).unwrap(), tr.domain_at(10_000).unwrap());
        assert!((d4 - d3) / d4 < 0.01, "{d3} {d4}");
        assert!(tr.image_at(10_000).unwrap() > 10.0 * d4);
        // The first piece carries x_1.
        let x1 = tr.steps[0].level;
        assert_eq!(f.at(1e-9), x1);
        for st in &tr.steps[..50] {
            assert!(p4.evaluate(st.level) > p2.evaluate(st.n as f64 * st.level));
        }
    }

    #[test]
    fn nonexistence_power_exp() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let e = YoungFunction::exp_power(1.0).unwrap();
        let tr = nonatomic_nonexistence(&unit(), &p2, &e, 10_000, &Setting::default()).unwrap();
        assert!(tr.complete);
        let d = [100, 1000, 10_000].map(|n| tr.domain_at(n).unwrap());
        assert!(d[2] < 2.0 * d[0] + 1e-12, "{d:?}");
        assert!(tr.image_at(10_000).unwrap() > 10.0 * d[2]);
        assert!(tr.verdict().is_refuted());
    }

    #[test]
    fn dominated_pair_refused() {
        let p2 = YoungFunction::power(2.0).unwrap();
        let p4 = YoungFunction::power(4.0).unwrap();
        assert!(escape_witness(&unit(), (0.0, 1.0), &p4, &p2, 10, &Setting::default()).is_err());
        assert!(nonatomic_nonexistence(&unit(), &p4, &p2, 10, &Setting::default()).is_err());
    }
}
