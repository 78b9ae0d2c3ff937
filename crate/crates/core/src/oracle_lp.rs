//! Closed-form answers for `Φᵢ(x) = x^{pᵢ}/pᵢ`, used to cross-check the
//! general criteria.
//!
//! With `L^p → L^q`:
//! * `M_u`, `p < q`: `u = 0` on the continuum and `sup |u|^r / μ < ∞`, `1/q + 1/r = 1/p`.
//! * `M_u`, `q < p`: `u ∈ L^r`, `1/p + 1/r = 1/q`.
//! * `C_T`, `p < q`: `f₀ = 0` on the continuum and `sup μT⁻¹(A)^p / μ(A)^q < ∞`.
//! * `C_T`, `q < p`: `f₀ ∈ L^{p/(p−q)}`.
//! * `p = q`: the symbol (`u` or `f₀`) is essentially bounded.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{integrate_realized, radon_nikodym, Formula, MeasurableFunction, MeasureSpace, Realized, Transformation, CONTINUUM_GRID};
use crate::operators::continuum_support;
use crate::trend::{sup_trend, Budget, Trend};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PqConfig {
    pub p: f64,
    pub q: f64,
    pub budget: Budget,
}

impl PqConfig {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be a finite number > 1, got {v}")));
            }
        }
        Ok(Self {
            p,
            q,
            budget: Budget::default(),
        })
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Answer {
    Bounded,
    Unbounded,
    Undecided { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum RangeAnswer {
    FiniteRank { rank: usize },
    NotClosedRange,
    /// The operator is unbounded or the case is not covered.
    NotApplicable { reason: String },
}

fn from_sup(t: &Trend) -> Answer {
    match t {
        Trend::Stable { .. } => Answer::Bounded,
        Trend::Diverging { .. } => Answer::Unbounded,
        Trend::Undecided { partial, .. } => Answer::Undecided {
            reason: format!("supremum still moving at {partial}"),
        },
    }
}

fn sup_over(r: &Realized, vals: &[f64], budget: &Budget) -> Trend {
    let (h, t) = r.split(vals);
    sup_trend(h, t, budget.threshold)
}

/// Grid supremum of `|g|` on the continuum (0 without one).
fn continuum_sup(space: &MeasureSpace, g: Option<&Formula>) -> f64 {
    match (space.continuum(), g) {
        (Some(c), Some(g)) => c
            .grid(CONTINUUM_GRID)
            .into_iter()
            .map(|x| g.eval(x, f64::NAN).abs())
            .filter(|v| !v.is_nan())
            .fold(0.0, f64::max),
        _ => 0.0,
    }
}

fn integral_answer(space: &MeasureSpace, r: &Realized, g: &MeasurableFunction, budget: &Budget) -> Result<Answer> {
    let i = integrate_realized(space, r, g, budget)?;
    Ok(if i.diverged() {
        Answer::Unbounded
    } else if matches!(i.atoms.trend, Trend::Undecided { .. }) {
        Answer::Undecided {
            reason: "series did not settle".into(),
        }
    } else {
        Answer::Bounded
    })
}

fn ess_bounded(space: &MeasureSpace, r: &Realized, vals: &[f64], cont: Option<&Formula>, budget: &Budget) -> Answer {
    if continuum_sup(space, cont).is_infinite() {
        return Answer::Unbounded;
    }
    from_sup(&sup_over(r, vals, budget))
}

/// The `r` with `1/r = |1/p − 1/q|`, infinite when `p = q`.
pub fn pair_exponent(p: f64, q: f64) -> f64 {
    1.0 / (1.0 / p - 1.0 / q).abs()
}

/// Boundedness of `M_u: L^p → L^q`.
pub fn mult_pq(space: &MeasureSpace, u: &MeasurableFunction, cfg: &PqConfig) -> Result<Answer> {
    u.check(space)?;
    let r = space.realize(&cfg.budget)?;
    let vals: Vec<f64> = u.atom_values(&r)?.into_iter().map(f64::abs).collect();
    let (p, q) = (cfg.p, cfg.q);
    if p == q {
        return Ok(ess_bounded(space, &r, &vals, u.continuum_formula(), &cfg.budget));
    }
    if p < q {
        if continuum_support(space, u.continuum_formula()).is_some() {
            return Ok(Answer::Unbounded);
        }
        let inv_r = 1.0 / pair_exponent(p, q);
        let s: Vec<f64> = vals
            .iter()
            .zip(&r.masses)
            .map(|(v, m)| if *v == 0.0 { 0.0 } else { v * m.powf(-inv_r) })
            .collect();
        return Ok(from_sup(&sup_over(&r, &s, &cfg.budget)));
    }
    let rr = pair_exponent(p, q);
    integral_answer(space, &r, &u.abs().map("pow r", move |v| v.powf(rr)), &cfg.budget)
}

/// Boundedness of `C_T: L^p → L^q`.
pub fn comp_pq(space: &MeasureSpace, t: &Transformation, cfg: &PqConfig) -> Result<Answer> {
    let (r, f0) = radon_nikodym(space, t, &cfg.budget)?;
    let push = t.pushforward(&r);
    let (p, q) = (cfg.p, cfg.q);
    if p == q {
        let f0v = f0.atom_values(&r)?;
        return Ok(ess_bounded(space, &r, &f0v, t.continuum_weight(), &cfg.budget));
    }
    if p < q {
        if continuum_support(space, t.continuum_weight()).is_some() {
            return Ok(Answer::Unbounded);
        }
        // (μT⁻¹)^{1/q} / μ^{1/p}, the p·q-th root of the stated ratio.
        let s: Vec<f64> = push
            .iter()
            .zip(&r.masses)
            .map(|(a, m)| if *a == 0.0 { 0.0 } else { a.powf(1.0 / q) * m.powf(-1.0 / p) })
            .collect();
        return Ok(from_sup(&sup_over(&r, &s, &cfg.budget)));
    }
    let e = p / (p - q);
    integral_answer(space, &r, &f0.map("pow", move |v| v.powf(e)), &cfg.budget)
}

/// Finite atom support and whether it keeps growing along the family.
fn atom_support(r: &Realized, vals: &[f64]) -> (usize, bool) {
    let n = vals.iter().filter(|v| **v != 0.0).count();
    let fam = r.family_len();
    let split = r.explicit + fam.div_ceil(10);
    let growing = fam >= 20 && !r.underflow && vals[split.min(vals.len())..].iter().any(|v| *v != 0.0);
    (n, growing)
}

/// Closed range of a bounded `M_u: L^p → L^q`, `p ≠ q`: finite atom support,
/// plus `u = 0` on the continuum when `q < p`.
pub fn range_mult_pq(space: &MeasureSpace, u: &MeasurableFunction, cfg: &PqConfig) -> Result<RangeAnswer> {
    if cfg.p == cfg.q {
        return Ok(RangeAnswer::NotApplicable {
            reason: "p = q is not covered".into(),
        });
    }
    match mult_pq(space, u, cfg)? {
        Answer::Bounded => {}
        other => {
            return Ok(RangeAnswer::NotApplicable {
                reason: format!("operator is {other:?}"),
            })
        }
    }
    let r = space.realize(&cfg.budget)?;
    let vals = u.atom_values(&r)?;
    let (n, growing) = atom_support(&r, &vals);
    let on_b = continuum_support(space, u.continuum_formula()).is_some();
    Ok(if growing || on_b {
        RangeAnswer::NotClosedRange
    } else {
        RangeAnswer::FiniteRank { rank: n }
    })
}

/// Closed range of a bounded `C_T: L^p → L^q`, `p ≠ q`: finite
/// `{n : μT⁻¹(A_n) ≠ 0}`, plus `f₀ = 0` on the continuum when `q < p`.
pub fn range_comp_pq(space: &MeasureSpace, t: &Transformation, cfg: &PqConfig) -> Result<RangeAnswer> {
    if cfg.p == cfg.q {
        return Ok(RangeAnswer::NotApplicable {
            reason: "p = q is not covered".into(),
        });
    }
    match comp_pq(space, t, cfg)? {
        Answer::Bounded => {}
        other => {
            return Ok(RangeAnswer::NotApplicable {
                reason: format!("operator is {other:?}"),
            })
        }
    }
    let (r, _) = radon_nikodym(space, t, &cfg.budget)?;
    let push = t.pushforward(&r);
    let (n, growing) = atom_support(&r, &push);
    let on_b = continuum_support(space, t.continuum_weight()).is_some();
    Ok(if growing || on_b {
        RangeAnswer::NotClosedRange
    } else {
        RangeAnswer::FiniteRank { rank: n }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{AtomFamily, AtomRef, Continuum};

    fn fam(mass: fn(f64) -> f64) -> MeasureSpace {
        MeasureSpace::new(
            vec![],
            Some(AtomFamily {
                prefix: "B".into(),
                start: 1,
                mass: Formula::of_n("m", move |n| mass(n)),
                point: None,
            }),
            None,
        )
        .unwrap()
    }

    #[test]
    fn mult_cases() {
        let s = fam(|n| n.powi(-2));
        let cfg = PqConfig::new(2.0, 3.0).unwrap().with_budget(Budget {
            n: 10_000,
            threshold: 10.0,
        });
        // r = 6: sup u^6 n^2 finite iff u ≲ n^{-1/3}.
        let small = MeasurableFunction::new(vec![], Some(Formula::of_n("n^-0.5", |n| n.powf(-0.5))), None);
        let big = MeasurableFunction::new(vec![], Some(Formula::constant(1.0)), None);
        assert_eq!(mult_pq(&s, &small, &cfg).unwrap(), Answer::Bounded);
        assert_eq!(mult_pq(&s, &big, &cfg).unwrap(), Answer::Unbounded);
        // q < p, r = 6: Σ u^6 n^-2.
        let cfg = PqConfig::new(3.0, 2.0).unwrap().with_budget(cfg.budget);
        assert_eq!(mult_pq(&s, &big, &cfg).unwrap(), Answer::Bounded);
        let grow = MeasurableFunction::new(vec![], Some(Formula::of_n("n^0.5", |n| n.powf(0.5))), None);
        assert_eq!(mult_pq(&s, &grow, &cfg).unwrap(), Answer::Unbounded);
    }

    #[test]
    fn continuum_cases() {
        let s = MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 1.0))).unwrap();
        let one = MeasurableFunction::new(vec![], None, Some(Formula::constant(1.0)));
        let up = PqConfig::new(2.0, 3.0).unwrap();
        let down = PqConfig::new(3.0, 2.0).unwrap();
        assert_eq!(mult_pq(&s, &one, &up).unwrap(), Answer::Unbounded);
        assert_eq!(mult_pq(&s, &one, &down).unwrap(), Answer::Bounded);
        assert_eq!(range_mult_pq(&s, &one, &down).unwrap(), RangeAnswer::NotClosedRange);
    }

    #[test]
    fn comp_cases() {
        let s = MeasureSpace::atomic(&[1.0, 0.5, 0.25]).unwrap();
        let t = Transformation::atomic(&[0, 0, 1]);
        let cfg = PqConfig::new(2.0, 3.0).unwrap();
        assert_eq!(comp_pq(&s, &t, &cfg).unwrap(), Answer::Bounded);
        assert_eq!(range_comp_pq(&s, &t, &cfg).unwrap(), RangeAnswer::FiniteRank { rank: 2 });
        let s = fam(|n| 2f64.powf(-n));
        let t = Transformation::new(vec![]).with_family_map("n+1", |n| AtomRef::Member(n + 1));
        let cfg = cfg.with_budget(Budget { n: 200, threshold: 1e6 });
        assert_eq!(comp_pq(&s, &t, &cfg).unwrap(), Answer::Unbounded);
    }

    #[test]
    fn large_finite_sums_are_finite() {
        // Σ|u|^12 μ ≈ 6e6, well above the threshold, but two atoms are always bounded.
        let s = MeasureSpace::atomic(&[0.6, 4.0 / 3.0]).unwrap();
        let u = MeasurableFunction::atomic(vec![-3.97, 2.48]);
        let cfg = PqConfig::new(6.0, 4.0).unwrap().with_budget(Budget { n: 100, threshold: 1e3 });
        assert_eq!(mult_pq(&s, &u, &cfg).unwrap(), Answer::Bounded);
        let cfg = PqConfig::new(4.0, 6.0).unwrap().with_budget(cfg.budget);
        assert_eq!(mult_pq(&s, &u.scale(1e6), &cfg).unwrap(), Answer::Bounded);
    }
}
