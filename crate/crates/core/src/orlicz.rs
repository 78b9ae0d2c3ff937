//! Modulars, Luxemburg norms, membership and the product bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{integrate_realized, Formula, Integration, MeasurableFunction, MeasureSpace, Realized, CONTINUUM_GRID};
use crate::trend::Budget;
use crate::young::{check_triple_inequality, CertVerdict, GridSpec, YoungFunction};

/// Maximum bisection steps for the norm.
const MAX_ITER: usize = 200;
/// Doublings of the upper bracket before declaring the norm infinite.
const MAX_GROW: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    /// `+inf` when diverged.
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub diverged: bool,
}

/// `∫ Φ(|f|) dμ`.
pub fn modular(space: &MeasureSpace, f: &MeasurableFunction, phi: &YoungFunction, budget: &Budget) -> Result<Integration> {
    let r = space.realize(budget)?;
    modular_realized(space, &r, f, phi, budget)
}

pub fn modular_realized(
    space: &MeasureSpace,
    r: &Realized,
    f: &MeasurableFunction,
    phi: &YoungFunction,
    budget: &Budget,
) -> Result<Integration> {
    let p = phi.clone();
    let g = f.map("Phi", move |v| p.evaluate(v));
    integrate_realized(space, r, &g, budget)
}

/// `∫ Φ(|f|) w dμ` where `w` is a weight on the same space.
pub fn weighted_modular(
    space: &MeasureSpace,
    r: &Realized,
    f: &MeasurableFunction,
    weight: &MeasurableFunction,
    phi: &YoungFunction,
    budget: &Budget,
) -> Result<Integration> {
    let p = phi.clone();
    let g = f.map("Phi", move |v| p.evaluate(v)).product(weight)?;
    integrate_realized(space, r, &g, budget)
}

/// `k ↦ ∫ Φ(|f|/k) w dμ` with the atom values sampled once.
struct ScaledModular<'a> {
    space: &'a MeasureSpace,
    r: &'a Realized,
    f: MeasurableFunction,
    weight: Option<&'a MeasurableFunction>,
    phi: &'a YoungFunction,
    budget: &'a Budget,
}

impl ScaledModular<'_> {
    fn at(&self, k: f64) -> Result<f64> {
        let g = self.f.scale(1.0 / k);
        let m = match self.weight {
            Some(w) => weighted_modular(self.space, self.r, &g, w, self.phi, self.budget)?,
            None => modular_realized(self.space, self.r, &g, self.phi, self.budget)?,
        };
        Ok(m.value)
    }

    /// Pointwise sup of |f| over atoms and the continuum grid, and whether f vanishes there.
    fn sup_abs(&self) -> Result<f64> {
        let mut vals = self.f.atom_values(self.r)?;
        if let Some(w) = self.weight {
            let wv = w.atom_values(self.r)?;
            for (v, w) in vals.iter_mut().zip(wv) {
                if w == 0.0 {
                    *v = 0.0;
                }
            }
        }
        let mut m = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if let Some(c) = self.space.continuum() {
            for x in c.grid(CONTINUUM_GRID) {
                let w = self.weight.map_or(1.0, |w| w.at(x));
                let v = self.f.at(x).abs();
                if w != 0.0 && !v.is_nan() {
                    m = m.max(v);
                }
            }
        }
        Ok(m)
    }
}

/// Luxemburg norm `inf{k > 0 : ∫Φ(|f|/k) dμ ≤ 1}` by bisection.
pub fn luxemburg_norm(space: &MeasureSpace, f: &MeasurableFunction, phi: &YoungFunction, tol: f64, budget: &Budget) -> Result<NormResult> {
    let r = space.realize(budget)?;
    luxemburg_norm_realized(space, &r, f, None, phi, tol, budget)
}

/// Luxemburg norm, optionally with respect to the weighted measure `w dμ`.
pub fn luxemburg_norm_realized(
    space: &MeasureSpace,
    r: &Realized,
    f: &MeasurableFunction,
    weight: Option<&MeasurableFunction>,
    phi: &YoungFunction,
    tol: f64,
    budget: &Budget,
) -> Result<NormResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    f.check(space)?;
    let m = ScaledModular {
        space,
        r,
        f: f.abs(),
        weight,
        phi,
        budget,
    };
    let sup = m.sup_abs()?;
    let zero = NormResult {
        value: 0.0,
        iterations: 0,
        bracket: (0.0, 0.0),
        diverged: false,
    };
    if sup == 0.0 && m.at(1.0)? == 0.0 {
        return Ok(zero);
    }
    let mut hi = if sup.is_finite() { sup.max(1.0) } else { 1.0 };
    let mut grown = 0;
    while m.at(hi)? > 1.0 {
        hi *= 2.0;
        grown += 1;
        if grown > MAX_GROW || hi.is_infinite() {
            return Ok(NormResult {
                value: f64::INFINITY,
                iterations: grown,
                bracket: (hi, f64::INFINITY),
                diverged: true,
            });
        }
    }
    let mut lo = hi * 0.5;
    let mut shrunk = 0;
    while m.at(lo)? <= 1.0 {
        hi = lo;
        lo *= 0.5;
        shrunk += 1;
        if shrunk > 1100 || !(1.0 / lo).is_finite() {
            return Ok(zero);
        }
    }
    let mut it = 0;
    while it < MAX_ITER && hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m.at(mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        it += 1;
    }
    Ok(NormResult {
        value: hi,
        iterations: it,
        bracket: (lo, hi),
        diverged: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// The scale `k` at which `∫Φ(k|f|) dμ` was found finite.
    pub scale: Option<f64>,
    pub modular: f64,
}

/// Whether `∫Φ(k|f|) dμ < ∞` for some `k ∈ {2⁻²⁰, …, 2⁰}`.
pub fn member(space: &MeasureSpace, f: &MeasurableFunction, phi: &YoungFunction, budget: &Budget) -> Result<Membership> {
    let r = space.realize(budget)?;
    member_realized(space, &r, f, phi, budget)
}

pub fn member_realized(
    space: &MeasureSpace,
    r: &Realized,
    f: &MeasurableFunction,
    phi: &YoungFunction,
    budget: &Budget,
) -> Result<Membership> {
    let mut last = f64::INFINITY;
    for j in 0..=20 {
        let k = 2f64.powi(-j);
        let v = modular_realized(space, r, &f.scale(k), phi, budget)?.value;
        if v.is_finite() {
            return Ok(Membership {
                member: true,
                scale: Some(k),
                modular: v,
            });
        }
        last = v;
    }
    Ok(Membership {
        member: false,
        scale: None,
        modular: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖f₁f₂‖_{Φ₃} ≤ 2‖f₁‖_{Φ₁}‖f₂‖_{Φ₂}`, given `Φ₃(xy) ≤ Φ₁(x) + Φ₂(y)`.
#[allow(clippy::too_many_arguments)]
pub fn holder_product_bound(
    space: &MeasureSpace,
    f1: &MeasurableFunction,
    f2: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    tol: f64,
    budget: &Budget,
) -> Result<ProductBound> {
    let cert = check_triple_inequality(phi3, phi1, phi2, GridSpec::default());
    if let CertVerdict::Counterexample { x, y } = cert.verdict {
        return Err(Error::Refused(format!(
            "{phi3}(xy) <= {phi1}(x) + {phi2}(y) fails at x={x}, y={}",
            y.unwrap_or(x)
        )));
    }
    holder_product_bound_unchecked(space, f1, f2, phi1, phi2, phi3, tol, budget)
}

/// As [`holder_product_bound`] without re-running the triple check.
#[allow(clippy::too_many_arguments)]
pub fn holder_product_bound_unchecked(
    space: &MeasureSpace,
    f1: &MeasurableFunction,
    f2: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    tol: f64,
    budget: &Budget,
) -> Result<ProductBound> {
    let r = space.realize(budget)?;
    let prod = f1.product(f2)?;
    let lhs = luxemburg_norm_realized(space, &r, &prod, None, phi3, tol, budget)?.value;
    let n1 = luxemburg_norm_realized(space, &r, f1, None, phi1, tol, budget)?.value;
    let n2 = luxemburg_norm_realized(space, &r, f2, None, phi2, tol, budget)?.value;
    let rhs = if n1 == 0.0 || n2 == 0.0 { 0.0 } else { 2.0 * n1 * n2 };
    Ok(ProductBound {
        lhs,
        rhs,
        holds: lhs <= rhs + tol * rhs.max(1.0),
    })
}

/// A formula for `Φ⁻¹(|g|)` and similar pointwise transforms is handy in the
/// operator criteria.
pub fn pointwise_inverse(f: &MeasurableFunction, phi: &YoungFunction) -> MeasurableFunction {
    let p = phi.clone();
    f.map("inv", move |v| p.inverse(v, crate::young::DEFAULT_TOL))
}

/// Formula variant of [`pointwise_inverse`].
pub fn formula_inverse(f: &Formula, phi: &YoungFunction) -> Formula {
    let p = phi.clone();
    f.map("inv", move |v| p.inverse(v, crate::young::DEFAULT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Continuum;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn modular_examples() {
        let s = MeasureSpace::atomic(&[1.0]).unwrap();
        let p2 = YoungFunction::power(2.0).unwrap();
        let f = MeasurableFunction::atomic(vec![1.0]);
        assert_eq!(modular(&s, &f, &p2, &b()).unwrap().value, 0.5);
        let z = MeasurableFunction::atomic(vec![0.0]);
        assert_eq!(modular(&s, &z, &p2, &b()).unwrap().value, 0.0);
    }

    #[test]
    fn norm_examples() {
        let s = MeasureSpace::atomic(&[1.0]).unwrap();
        let p2 = YoungFunction::power(2.0).unwrap();
        let n = luxemburg_norm(&s, &MeasurableFunction::atomic(vec![1.0]), &p2, 1e-12, &b()).unwrap();
        assert!((n.value - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(n.bracket.1 - n.bracket.0 <= 1e-12);
        let z = luxemburg_norm(&s, &MeasurableFunction::atomic(vec![0.0]), &p2, 1e-12, &b()).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn indicator_identity() {
        let e = YoungFunction::exp_power(1.0).unwrap();
        for m in [1e-6, 0.3, 1.0, 40.0] {
            let s = MeasureSpace::atomic(&[m, 1.0]).unwrap();
            let f = MeasurableFunction::atomic(vec![1.0, 0.0]);
            let n = luxemburg_norm(&s, &f, &e, 1e-13, &b()).unwrap().value;
            assert!((n * e.inverse(1.0 / m, 1e-12) - 1.0).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn continuum_norm_l2() {
        // ‖x‖ on [0,1] for x^2/2: ∫ x^2/(2k^2) = 1/(6k^2) = 1 ⇒ k = 1/√6
        let s = MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 1.0))).unwrap();
        let f = MeasurableFunction::from_formula(&s, &Formula::of_x("x", |x| x)).unwrap();
        let n = luxemburg_norm(&s, &f, &YoungFunction::power(2.0).unwrap(), 1e-12, &b()).unwrap();
        assert!((n.value - 6f64.sqrt().recip()).abs() < 1e-10, "{n:?}");
    }

    #[test]
    fn singular_function_not_member() {
        let s = MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 2.0))).unwrap();
        let f = MeasurableFunction::from_formula(&s, &Formula::of_x("1/x", |x| 1.0 / x)).unwrap();
        let l = YoungFunction::l_log_l(1.0).unwrap();
        assert!(!member(&s, &f, &l, &b()).unwrap().member);
        let n = luxemburg_norm(&s, &f, &l, 1e-9, &b()).unwrap();
        assert!(n.diverged && n.value.is_infinite());
        let g = MeasurableFunction::from_formula(&s, &Formula::of_x("x", |x| x)).unwrap();
        assert!(member(&s, &g, &YoungFunction::exp_power(1.0).unwrap(), &b()).unwrap().member);
    }

    #[test]
    fn product_bound_refuses_without_triple() {
        let s = MeasureSpace::atomic(&[1.0]).unwrap();
        let f = MeasurableFunction::atomic(vec![1.0]);
        let e = YoungFunction::exp_power(1.0).unwrap();
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!(matches!(
            holder_product_bound(&s, &f, &f, &p2, &p2, &e, 1e-10, &b()),
            Err(Error::Refused(_))
        ));
        // (xy)^2/2 <= x^3/3 + y^6/6
        let r = holder_product_bound(
            &s,
            &f,
            &f,
            &YoungFunction::power(3.0).unwrap(),
            &YoungFunction::power(6.0).unwrap(),
            &p2,
            1e-10,
            &b(),
        )
        .unwrap();
        assert!(r.holds);
        // single-atom closed forms: 1/Φ⁻¹(1)
        assert!((r.lhs - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        assert!((r.rhs - 2.0 / 3f64.powf(1.0 / 3.0) / 6f64.powf(1.0 / 6.0)).abs() < 1e-9);
    }
}
