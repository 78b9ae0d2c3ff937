use serde::Serialize;

use super::mult::dual_membership;
use super::{
    atom_sup, coarse, continuum_support, global_cert, not_dominated, require_triple, soften, valid_composite, Setting,
};
use crate::error::{Error, Result};
use crate::measure::{radon_nikodym, MeasurableFunction, MeasureSpace, Transformation};
use crate::orlicz::{luxemburg_norm_realized, pointwise_inverse};
use crate::trend::Trend;
use crate::verdict::{Verdict, Witness};
use crate::young::{check_growth, Condition, Stage, YoungFunction, DEFAULT_CAP};

/// Necessary conditions for `C_T` when `Φ₂ ⊀ Φ₁`: `f₀ = 0` a.e. on the
/// continuum and `sup Φ₁⁻¹(1/μ(A_n)) / Φ₂⁻¹(1/μT⁻¹(A_n)) < ∞`.
pub fn comp_necessary(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    if !not_dominated(phi1, phi2, s.grid) {
        return Err(Error::Precondition(format!("{phi2} is dominated by {phi1}")));
    }
    let (r, _) = radon_nikodym(space, t, &s.budget)?;
    let mut log = Verdict::inconclusive("necessary conditions hold");
    if let Some((a, b)) = continuum_support(space, t.continuum_weight()) {
        log.push("f0_zero_on_continuum", "violated", Some(b - a));
        if check_growth(phi2, Condition::Delta2, s.grid, DEFAULT_CAP).holds() {
            return Ok(Verdict {
                criteria_log: log.criteria_log,
                ..Verdict::refuted(Witness::Interval { a, b })
            });
        }
        log.push("f0_zero_on_continuum", format!("not decisive: {phi2} fails Delta2"), None);
    }
    let push = t.pushforward(&r);
    let q: Vec<f64> = r
        .masses
        .iter()
        .zip(&push)
        .map(|(m, p)| {
            if *p == 0.0 {
                0.0
            } else {
                phi1.inverse_ln(-m.ln()) / phi2.inverse_ln(-p.ln())
            }
        })
        .collect();
    let trend = atom_sup(&r, &q, &s.budget);
    log.push("sup_ratio", format!("{:?}", trend).to_lowercase(), Some(trend.value()));
    if trend.is_diverging() {
        return Ok(Verdict {
            criteria_log: log.criteria_log,
            ..Verdict::refuted(Witness::Divergence {
                criterion: "sup phi1^-1(1/mu) / phi2^-1(1/mu T^-1)".into(),
                trend,
            })
        });
    }
    Ok(log)
}

/// On atoms with `Φ₁, Φ₂ ∈ Δ′` (constants `c`, `b`) and
/// `M = sup Φ₂(1/Φ₁⁻¹(μ)) μT⁻¹ < ∞`: `‖C_T‖ ≤ b M (Φ₂∘Φ₁⁻¹)(c) + 1`.
pub fn comp_sufficient_atomic(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    if let Some((a, b)) = continuum_support(space, t.continuum_weight()) {
        return Err(Error::Precondition(format!("f0 is not zero on [{a}, {b}]")));
    }
    let c = global_cert(phi1, Condition::DeltaPrime, s.grid)?.constant;
    let b = global_cert(phi2, Condition::DeltaPrime, s.grid)?.constant;
    let g = valid_composite(phi2, phi1, s.grid)?;
    let (r, _) = radon_nikodym(space, t, &s.budget)?;
    let push = t.pushforward(&r);
    let terms: Vec<f64> = r
        .masses
        .iter()
        .zip(&push)
        .map(|(m, p)| {
            if *p == 0.0 {
                return 0.0;
            }
            let l = -phi1.inverse_ln(m.ln()).ln();
            (phi2.ln_evaluate_at_ln(l) + p.ln()).exp()
        })
        .collect();
    let trend = atom_sup(&r, &terms, &s.budget);
    let m = trend.value();
    let v = Verdict::inconclusive("M is not finite within the budget")
        .log("delta_prime_phi1", "holds", Some(c))
        .log("delta_prime_phi2", "holds", Some(b))
        .log("sup_phi2_inv_mu_push", format!("{:?}", trend).to_lowercase(), Some(m));
    if !trend.is_stable() {
        return Ok(v);
    }
    Ok(Verdict {
        criteria_log: v.criteria_log,
        ..Verdict::certified(b * m * g.evaluate(c) + 1.0)
    })
}

/// The two conditions of the equivalence chain, each `Some(holds)` or `None`
/// when the budget could not decide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub ii: Option<bool>,
    pub iii: Option<bool>,
    pub ii_sup: Trend,
    pub iii_sup: Trend,
}

fn decided(zero_on_continuum: bool, t: &Trend) -> Option<bool> {
    if !zero_on_continuum || t.is_diverging() {
        Some(false)
    } else if t.is_stable() {
        Some(true)
    } else {
        None
    }
}

/// Evaluates (ii) `μT⁻¹(B) = 0` and `sup Φ₁⁻¹(1/μ)/Φ₂⁻¹(1/μT⁻¹) < ∞`, and
/// (iii) `f₀ = 0` on `B` and `sup f₀ Φ₂(Φ₃⁻¹(1/μ)) < ∞`, given
/// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)` and `Φ₂ ∈ Δ′`.
pub fn comp_condition_chain(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    s: &Setting,
) -> Result<ChainReport> {
    require_triple(phi1, phi2, phi3, s.grid)?;
    global_cert(phi2, Condition::DeltaPrime, s.grid)?;
    let (r, f0) = radon_nikodym(space, t, &s.budget)?;
    let zero_b = continuum_support(space, t.continuum_weight()).is_none();
    let push = t.pushforward(&r);
    let f0v = f0.atom_values(&r)?;
    let ii: Vec<f64> = r
        .masses
        .iter()
        .zip(&push)
        .map(|(m, p)| {
            if *p == 0.0 {
                0.0
            } else {
                phi1.inverse_ln(-m.ln()) / phi2.inverse_ln(-p.ln())
            }
        })
        .collect();
    let iii: Vec<f64> = r
        .masses
        .iter()
        .zip(&f0v)
        .map(|(m, w)| {
            if *w == 0.0 {
                0.0
            } else {
                (w.ln() + phi2.ln_evaluate(phi3.inverse_ln(-m.ln()))).exp()
            }
        })
        .collect();
    let ii_sup = atom_sup(&r, &ii, &s.budget);
    let iii_sup = atom_sup(&r, &iii, &s.budget);
    Ok(ChainReport {
        ii: decided(zero_b, &ii_sup),
        iii: decided(zero_b, &iii_sup),
        ii_sup,
        iii_sup,
    })
}

/// `‖C_T f‖` against `‖Φ₂⁻¹(f₀) f‖`, both in `L^{Φ₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sandwich {
    pub comp_norm: f64,
    pub mult_norm: f64,
    /// ∇′ constant of Φ₂.
    pub b: f64,
    /// Δ′ constant of Φ₂ (at least 1).
    pub c: f64,
    /// `‖C_T f‖ ≤ b ‖Φ₂⁻¹(f₀) f‖`.
    pub upper: bool,
    /// `‖Φ₂⁻¹(f₀) f‖ ≤ c ‖C_T f‖`.
    pub lower: bool,
}

/// Compares `‖C_T f‖_{Φ₂}` with `‖M_{Φ₂⁻¹(f₀)} f‖_{Φ₂}`. Needs `Φ₂ ∈ ∇′ ∩ Δ′`.
pub fn comp_mult_sandwich(
    space: &MeasureSpace,
    t: &Transformation,
    f: &MeasurableFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Sandwich> {
    let b = global_cert(phi2, Condition::NablaPrime, s.grid)?.constant;
    let c = global_cert(phi2, Condition::DeltaPrime, s.grid)?.constant.max(1.0);
    let (r, f0) = radon_nikodym(space, t, &s.budget)?;
    // ∫Φ₂(|f∘T|/k) dμ = ∫Φ₂(|f|/k) f₀ dμ.
    let comp_norm = luxemburg_norm_realized(space, &r, f, Some(&f0), phi2, s.tol, &s.budget)?.value;
    let w = pointwise_inverse(&f0, phi2).product(f)?;
    let mult_norm = luxemburg_norm_realized(space, &r, &w, None, phi2, s.tol, &s.budget)?.value;
    let slack = |x: f64| 4.0 * s.tol * x.max(1.0);
    Ok(Sandwich {
        comp_norm,
        mult_norm,
        b,
        c,
        upper: comp_norm <= b * mult_norm + slack(b * mult_norm),
        lower: mult_norm <= c * comp_norm + slack(c * comp_norm),
    })
}

/// `f₀ ∈ L^{Ψ₃∘Ψ₁∘Φ₂⁻¹}` with `Φ₃ = Ψ₂∘Ψ₁⁻¹`; necessary for boundedness when
/// `Φ₁, Φ₂ ∈ Δ′`. Failure refutes.
pub fn comp_dual_membership(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    global_cert(phi1, Condition::DeltaPrime, s.grid)?;
    global_cert(phi2, Condition::DeltaPrime, s.grid)?;
    let psi1 = phi1.complementary();
    let psi2 = phi2.complementary();
    let phi3 = valid_composite(&psi2, &psi1, coarse(s.grid))?;
    let g = YoungFunction::composite(vec![
        Stage::Apply(phi3.complementary()),
        Stage::Apply(psi1),
        Stage::Invert(phi2.clone()),
    ]);
    let (_, f0) = radon_nikodym(space, t, &s.budget)?;
    dual_membership(space, &f0, &g, s)
}

/// `‖C_T‖ ≤ 2b ‖Φ₂⁻¹(f₀)‖_{Φ₃}` from `Φ₂ ∈ ∇′` (constant `b`) and
/// `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)`.
pub fn comp_bounded_via_mult(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    require_triple(phi2, phi1, phi3, s.grid)?;
    let b = global_cert(phi2, Condition::NablaPrime, s.grid)?.constant;
    let (r, f0) = radon_nikodym(space, t, &s.budget)?;
    let w = pointwise_inverse(&f0, phi2);
    let norm = luxemburg_norm_realized(space, &r, &w, None, phi3, s.tol, &s.budget)?;
    if norm.diverged {
        return Ok(Verdict::inconclusive(format!("phi2^-1(f0) is not in L^{phi3} within the budget"))
            .log("nabla_prime_phi2", "holds", Some(b))
            .log("norm_phi2inv_f0", "diverged", Some(f64::INFINITY)));
    }
    Ok(Verdict::certified(2.0 * b * norm.value)
        .log("nabla_prime_phi2", "holds", Some(b))
        .log("norm_phi2inv_f0", "finite", Some(norm.value)))
}

/// Every applicable criterion for `C_T: L^{Φ₁} → L^{Φ₂}`, merged.
pub fn check_comp(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: Option<&YoungFunction>,
    s: &Setting,
) -> Result<Verdict> {
    t.check(space)?;
    let mut parts = vec![
        (
            "comp_sufficient_atomic".to_string(),
            soften(comp_sufficient_atomic(space, t, phi1, phi2, s))?,
        ),
        ("comp_necessary".to_string(), soften(comp_necessary(space, t, phi1, phi2, s))?),
    ];
    if let Some(p3) = phi3 {
        parts.push((
            "comp_bounded_via_mult".to_string(),
            soften(comp_bounded_via_mult(space, t, phi1, phi2, p3, s))?,
        ));
    }
    parts.push((
        "comp_dual_membership".to_string(),
        soften(comp_dual_membership(space, t, phi1, phi2, s))?,
    ));
    Ok(Verdict::combine(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{AtomFamily, AtomRef, Continuum, Formula};

    fn p(x: f64) -> YoungFunction {
        YoungFunction::power(x).unwrap()
    }

    #[test]
    fn finite_space_certified_both_ways() {
        let s = MeasureSpace::atomic(&[0.5, 1.0, 2.0]).unwrap();
        let t = Transformation::atomic(&[1, 1, 0]);
        let st = Setting::default();
        assert!(comp_sufficient_atomic(&s, &t, &p(2.0), &p(3.0), &st).unwrap().is_certified());
        let v = comp_necessary(&s, &t, &p(2.0), &p(3.0), &st).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn continuum_weight_refutes_when_escaping() {
        let s = MeasureSpace::atomic(&[1.0])
            .unwrap()
            .with_continuum(Continuum::lebesgue(0.0, 1.0))
            .unwrap();
        let t = Transformation::atomic(&[0]).with_continuum_weight(Formula::constant(1.0));
        let v = comp_necessary(&s, &t, &p(2.0), &p(3.0), &Setting::default()).unwrap();
        assert!(v.is_refuted());
        assert!(comp_sufficient_atomic(&s, &t, &p(2.0), &p(3.0), &Setting::default()).is_err());
    }

    #[test]
    fn sandwich_holds_on_power() {
        let s = MeasureSpace::atomic(&[0.5, 1.0, 2.0, 0.1]).unwrap();
        let t = Transformation::atomic(&[1, 1, 3, 0]);
        let f = MeasurableFunction::atomic(vec![1.0, -2.0, 0.5, 4.0]);
        let w = comp_mult_sandwich(&s, &t, &f, &p(2.5), &Setting::default()).unwrap();
        assert!(w.upper && w.lower, "{w:?}");
        // The weighted norm equals the norm of f∘T computed directly.
        let r = s.realize(&Setting::default().budget).unwrap();
        let g = super::super::apply_comp(&s, &r, &t, &f).unwrap();
        let direct = luxemburg_norm_realized(&s, &r, &g, None, &p(2.5), 1e-10, &Setting::default().budget)
            .unwrap()
            .value;
        assert!((direct - w.comp_norm).abs() < 1e-8, "{direct} {}", w.comp_norm);
    }

    #[test]
    fn family_shift_refuted_for_p_below_q() {
        let fam = AtomFamily {
            prefix: "B".into(),
            start: 1,
            mass: Formula::of_n("2^-n", |n| 2f64.powf(-n)),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        // B_n -> B_{n+1}: μT⁻¹(B_{n+1}) = 2μ(B_{n+1}); ratio μ^{-1/2}(2μ)^{1/3} diverges.
        let t = Transformation::new(vec![]).with_family_map("n+1", |n| AtomRef::Member(n + 1));
        let st = Setting {
            budget: crate::trend::Budget { n: 200, threshold: 1e6 },
            ..Setting::default()
        };
        let v = comp_necessary(&s, &t, &p(2.0), &p(3.0), &st).unwrap();
        assert!(v.is_refuted(), "{v:?}");
    }

    #[test]
    fn via_mult_matches_lr() {
        // q < p: C_T: L^4 -> L^2 bounded iff f₀ ∈ L^2 (r/q = 4/2).
        let s = MeasureSpace::atomic(&[1.0, 1.0, 1.0]).unwrap();
        let t = Transformation::atomic(&[0, 0, 1]);
        let v = comp_bounded_via_mult(&s, &t, &p(4.0), &p(2.0), &p(4.0), &Setting::default()).unwrap();
        assert!(v.is_certified(), "{v:?}");
    }
}
