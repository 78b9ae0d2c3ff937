use super::{
    atom_sup, coarse, continuum_support, global_cert, not_dominated, require_triple, soften, valid_composite, Reading,
    Setting,
};
use crate::error::{Error, Result};
use crate::measure::{MeasurableFunction, MeasureSpace};
use crate::orlicz::{luxemburg_norm_realized, member_realized, modular_realized};
use crate::trend::Trend;
use crate::verdict::{Verdict, Witness};
use crate::young::{check_growth, Condition, YoungFunction, DEFAULT_CAP};

/// `‖M_u‖ ≤ 2‖u‖_{Φ₃}` when `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)`.
pub fn mult_bounded_sufficient(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    require_triple(phi2, phi1, phi3, s.grid)?;
    u.check(space)?;
    let r = space.realize(&s.budget)?;
    let norm = luxemburg_norm_realized(space, &r, u, None, phi3, s.tol, &s.budget)?;
    if norm.diverged {
        return Ok(Verdict::inconclusive(format!("u is not in L^{phi3} within the budget"))
            .log("norm_u_phi3", "diverged", Some(f64::INFINITY)));
    }
    if norm.value > 0.0 {
        let at = modular_realized(space, &r, &u.scale(1.0 / norm.value), phi3, &s.budget)?;
        if matches!(at.atoms.trend, Trend::Undecided { .. }) {
            return Ok(Verdict::inconclusive("modular of u did not settle within the budget")
                .log("norm_u_phi3", "undecided", Some(norm.value)));
        }
    }
    Ok(Verdict::certified(2.0 * norm.value).log("norm_u_phi3", "finite", Some(norm.value)))
}

/// Necessary conditions for `M_u`: `u = 0` a.e. on the continuum and
/// `sup |u(A_n)| Φ₃⁻¹(1/μ(A_n)) < ∞`.
pub fn mult_necessary(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    let hypothesis = require_triple(phi1, phi2, phi3, s.grid);
    match s.reading {
        Reading::Hypothesis => hypothesis.clone()?,
        Reading::Proof => require_triple(phi2, phi1, phi3, s.grid)?,
    }
    u.check(space)?;
    let mut log = Verdict::inconclusive("necessary conditions hold");

    if let Some((a, b)) = continuum_support(space, u.continuum_formula()) {
        let escapes = not_dominated(phi1, phi2, s.grid);
        let d2 = check_growth(phi2, Condition::Delta2, s.grid, DEFAULT_CAP).holds();
        log.push("u_zero_on_continuum", "violated", Some(b - a));
        if escapes && d2 {
            return Ok(Verdict {
                criteria_log: log.criteria_log,
                ..Verdict::refuted(Witness::Interval { a, b })
            });
        }
        log.push(
            "u_zero_on_continuum",
            format!("not decisive: escape needs {phi2} not dominated by {phi1} and Delta2"),
            None,
        );
    }

    let r = space.realize(&s.budget)?;
    let vals = u.atom_values(&r)?;
    let q: Vec<f64> = vals
        .iter()
        .zip(&r.masses)
        .map(|(v, m)| if *v == 0.0 { 0.0 } else { v.abs() * phi3.inverse_ln(-m.ln()) })
        .collect();
    let trend = atom_sup(&r, &q, &s.budget);
    log.push("sup_u_phi3inv", format!("{:?}", trend).to_lowercase(), Some(trend.value()));
    if trend.is_diverging() {
        if hypothesis.is_err() {
            log.push("sup_u_phi3inv", "not decisive: hypothesis triple fails under this reading", None);
            return Ok(log);
        }
        return Ok(Verdict {
            criteria_log: log.criteria_log,
            ..Verdict::refuted(Witness::Divergence {
                criterion: "sup |u| phi3^-1(1/mu)".into(),
                trend,
            })
        });
    }
    if !trend.is_stable() {
        log.reason = Some("supremum did not settle within the budget".into());
    }
    Ok(log)
}

/// On atoms with `Φ₁, Φ₂ ∈ Δ′` (constants `c`, `b`) and
/// `M = sup Φ₂(|u|/Φ₁⁻¹(μ)) μ < ∞`: `‖M_u‖ ≤ b M (Φ₂∘Φ₁⁻¹)(c) + 1`.
pub fn mult_bounded_sufficient_atomic(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    u.check(space)?;
    if let Some((a, b)) = continuum_support(space, u.continuum_formula()) {
        return Err(Error::Precondition(format!("u is not zero on [{a}, {b}]")));
    }
    let c = global_cert(phi1, Condition::DeltaPrime, s.grid)?.constant;
    let b = global_cert(phi2, Condition::DeltaPrime, s.grid)?.constant;
    let g = valid_composite(phi2, phi1, s.grid)?;
    let r = space.realize(&s.budget)?;
    let vals = u.atom_values(&r)?;
    let terms: Vec<f64> = vals
        .iter()
        .zip(&r.masses)
        .map(|(v, m)| {
            if *v == 0.0 {
                return 0.0;
            }
            let l = v.abs().ln() - phi1.inverse_ln(m.ln()).ln();
            (phi2.ln_evaluate_at_ln(l) + m.ln()).exp()
        })
        .collect();
    let trend = atom_sup(&r, &terms, &s.budget);
    let m = trend.value();
    let v = Verdict::inconclusive("");
    let v = v
        .log("delta_prime_phi1", "holds", Some(c))
        .log("delta_prime_phi2", "holds", Some(b))
        .log("sup_phi2_u_over_phi1inv_mu", format!("{:?}", trend).to_lowercase(), Some(m));
    if !trend.is_stable() {
        return Ok(Verdict {
            reason: Some("M is not finite within the budget".into()),
            ..v
        });
    }
    let bound = b * m * g.evaluate(c) + 1.0;
    Ok(Verdict {
        criteria_log: v.criteria_log,
        ..Verdict::certified(bound)
    })
}

/// `u ∈ L^{Ψ₃∘Ψ₁}` where `Ψ` are complements and `Φ₃ = Ψ₂∘Ψ₁⁻¹`; necessary
/// for boundedness when `Φ₁ ∈ Δ′`. Failure refutes.
pub fn mult_dual_membership(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    u.check(space)?;
    global_cert(phi1, Condition::DeltaPrime, s.grid)?;
    let psi1 = phi1.complementary();
    let psi2 = phi2.complementary();
    let phi3 = valid_composite(&psi2, &psi1, coarse(s.grid))?;
    let g = YoungFunction::compose(&phi3.complementary(), &psi1);
    dual_membership(space, u, &g, s)
}

pub(crate) fn dual_membership(
    space: &MeasureSpace,
    w: &MeasurableFunction,
    g: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    let r = space.realize(&s.budget)?;
    let m = member_realized(space, &r, w, g, &s.budget)?;
    if m.member {
        return Ok(Verdict::inconclusive("necessary condition holds").log(
            "dual_membership",
            format!("member of L^{g}"),
            Some(m.modular),
        ));
    }
    let sample = modular_realized(space, &r, &w.scale(2f64.powi(-20)), g, &s.budget)?;
    let trend = if sample.continuum_diverged {
        Trend::Diverging {
            partial: sample.continuum.unwrap_or(f64::INFINITY),
            at: 0,
        }
    } else {
        sample.atoms.trend
    };
    Ok(Verdict::refuted(Witness::Divergence {
        criterion: format!("modular in L^{g}"),
        trend,
    })
    .log("dual_membership", "not a member", Some(m.modular)))
}

/// Refutes boundedness with a concrete `f ∈ L^{Φ₁}` whose image `u f` is not
/// in `L^{Φ₂}`.
pub fn mult_test_function(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    f: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Result<Verdict> {
    f.check(space)?;
    let r = space.realize(&s.budget)?;
    let dom = member_realized(space, &r, f, phi1, &s.budget)?;
    if !dom.member {
        return Err(Error::Precondition(format!("test function is not in L^{phi1}")));
    }
    let img = super::apply_mult(space, u, f)?;
    let im = member_realized(space, &r, &img, phi2, &s.budget)?;
    let v = Verdict::inconclusive("image of the test function stays in the target space")
        .log("test_function_domain_modular", "finite", Some(dom.modular))
        .log("test_function_image_modular", if im.member { "finite" } else { "diverged" }, Some(im.modular));
    if im.member {
        return Ok(v);
    }
    Ok(Verdict {
        criteria_log: v.criteria_log,
        ..Verdict::refuted(Witness::TestFunction {
            function: f
                .continuum_formula()
                .or(f.family_formula())
                .map_or("atomic".to_string(), |x| x.label().to_string()),
            domain_modular: dom.modular,
            image_modular: im.modular,
        })
    })
}

/// Every applicable criterion for `M_u: L^{Φ₁} → L^{Φ₂}`, merged.
pub fn check_mult(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: Option<&YoungFunction>,
    test_function: Option<&MeasurableFunction>,
    s: &Setting,
) -> Result<Verdict> {
    u.check(space)?;
    let mut parts = Vec::new();
    if let Some(p3) = phi3 {
        parts.push((
            "mult_bounded_sufficient".to_string(),
            soften(mult_bounded_sufficient(space, u, phi1, phi2, p3, s))?,
        ));
        parts.push((
            "mult_necessary".to_string(),
            soften(mult_necessary(space, u, phi1, phi2, p3, s))?,
        ));
    } else {
        parts.push(("continuum_escape".to_string(), continuum_escape(space, u, phi1, phi2, s)));
    }
    parts.push((
        "mult_bounded_sufficient_atomic".to_string(),
        soften(mult_bounded_sufficient_atomic(space, u, phi1, phi2, s))?,
    ));
    parts.push((
        "mult_dual_membership".to_string(),
        soften(mult_dual_membership(space, u, phi1, phi2, s))?,
    ));
    if let Some(f) = test_function {
        parts.push((
            "mult_test_function".to_string(),
            soften(mult_test_function(space, u, f, phi1, phi2, s))?,
        ));
    }
    Ok(Verdict::combine(parts))
}

/// `u ≠ 0` on a continuum interval with `Φ₂ ⊀ Φ₁` and `Φ₂ ∈ Δ₂` admits an
/// `f ∈ L^{Φ₁}` there with `u f ∉ L^{Φ₂}`.
fn continuum_escape(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    s: &Setting,
) -> Verdict {
    let Some((a, b)) = continuum_support(space, u.continuum_formula()) else {
        return Verdict::inconclusive("u vanishes on the continuum");
    };
    if !not_dominated(phi1, phi2, s.grid) {
        return Verdict::inconclusive(format!("{phi2} is dominated by {phi1}"));
    }
    if !check_growth(phi2, Condition::Delta2, s.grid, DEFAULT_CAP).holds() {
        return Verdict::inconclusive(format!("{phi2} fails Delta2"));
    }
    Verdict::refuted(Witness::Interval { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Continuum, Formula};
    use crate::verdict::Status;

    fn p(x: f64) -> YoungFunction {
        YoungFunction::power(x).unwrap()
    }

    fn small() -> Setting {
        Setting {
            budget: crate::trend::Budget {
                n: 2000,
                threshold: 1e12,
            },
            ..Setting::default()
        }
    }

    #[test]
    fn lp_young_triple_certifies() {
        // 1/q = 1/p + 1/r with p = 4, q = 2, r = 4.
        let s = MeasureSpace::atomic(&[0.5, 0.25, 2.0]).unwrap();
        let u = MeasurableFunction::atomic(vec![1.0, -3.0, 0.5]);
        let v = mult_bounded_sufficient(&s, &u, &p(4.0), &p(2.0), &p(4.0), &small()).unwrap();
        assert_eq!(v.status, Status::Certified);
        let n = luxemburg_norm_realized(
            &s,
            &s.realize(&small().budget).unwrap(),
            &u,
            None,
            &p(4.0),
            1e-9,
            &small().budget,
        )
        .unwrap()
        .value;
        assert!((v.bound.unwrap() - 2.0 * n).abs() < 1e-12);
    }

    #[test]
    fn triple_failure_is_a_precondition() {
        let s = MeasureSpace::atomic(&[1.0]).unwrap();
        let u = MeasurableFunction::atomic(vec![1.0]);
        let e = mult_bounded_sufficient(&s, &u, &p(2.0), &p(4.0), &p(2.0), &small()).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn atomic_sufficient_finite_space() {
        let s = MeasureSpace::atomic(&[0.5, 2.0]).unwrap();
        let u = MeasurableFunction::atomic(vec![3.0, 1.0]);
        let v = mult_bounded_sufficient_atomic(&s, &u, &p(2.0), &p(3.0), &small()).unwrap();
        assert!(v.is_certified(), "{v:?}");
        assert!(v.bound.unwrap() >= 1.0);
    }

    #[test]
    fn necessary_refutes_nonzero_continuum() {
        // L^2 -> L^3 on a space with a continuum: u = 1 there is unbounded.
        let s = MeasureSpace::atomic(&[1.0])
            .unwrap()
            .with_continuum(Continuum::lebesgue(0.0, 1.0))
            .unwrap();
        let u = MeasurableFunction::new(vec![1.0], None, Some(Formula::constant(1.0)));
        // 1/2 = 1/3 + 1/6.
        let v = mult_necessary(&s, &u, &p(2.0), &p(3.0), &p(6.0), &small()).unwrap();
        assert!(v.is_refuted(), "{v:?}");
        assert!(matches!(v.witness, Some(Witness::Interval { .. })));
    }

    #[test]
    fn necessary_refutes_growing_family() {
        // sup |u|^6 / μ diverges for u = 1, μ = 1/n².
        let fam = crate::measure::AtomFamily {
            prefix: "B".into(),
            start: 1,
            mass: Formula::of_n("n^-2", |n| n.powi(-2)),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        let u = MeasurableFunction::new(vec![], Some(Formula::constant(1.0)), None);
        let st = Setting {
            budget: crate::trend::Budget {
                n: 100_000,
                threshold: 10.0,
            },
            ..small()
        };
        let v = mult_necessary(&s, &u, &p(2.0), &p(3.0), &p(6.0), &st).unwrap();
        assert!(v.is_refuted(), "{v:?}");
    }

    #[test]
    fn dual_membership_matches_lr() {
        // q < p: M_u: L^4 -> L^2 bounded iff u in L^4.
        let fam = crate::measure::AtomFamily {
            prefix: "B".into(),
            start: 1,
            mass: Formula::of_n("n^-2", |n| n.powi(-2)),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        let inside = MeasurableFunction::new(vec![], Some(Formula::of_n("n^0.2", |n| n.powf(0.2))), None);
        let outside = MeasurableFunction::new(vec![], Some(Formula::of_n("n^0.5", |n| n.powf(0.5))), None);
        let st = small();
        let v = mult_dual_membership(&s, &inside, &p(4.0), &p(2.0), &st).unwrap();
        assert_eq!(v.status, Status::Inconclusive, "{v:?}");
        let v = mult_dual_membership(&s, &outside, &p(4.0), &p(2.0), &st).unwrap();
        assert!(v.is_refuted(), "{v:?}");
    }
}
