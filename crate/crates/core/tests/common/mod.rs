//! Seeded random instances shared by the acceptance and property suites.
#![allow(dead_code)]

use orlicz_core::measure::{Atom, AtomFamily, AtomRef, Formula, MeasurableFunction, MeasureSpace, Transformation};
use orlicz_core::operators::Setting;
use orlicz_core::oracle_lp::{comp_pq, mult_pq, Answer, PqConfig};
use orlicz_core::trend::Budget;
use orlicz_core::YoungFunction;
use rand::seq::SliceRandom;
use rand::Rng;

pub const EXPONENTS: [f64; 5] = [1.5, 2.0, 3.0, 4.0, 6.0];

/// Family budget for the randomized suites: small enough to run hundreds of
/// instances, with a threshold the generated growth rates clear decisively.
pub const SUITE_BUDGET: Budget = Budget { n: 2000, threshold: 1e3 };

/// Instances whose oracle answer changes when the threshold moves by this
/// factor either way are dropped as truncation-sensitive.
pub const MARGIN: f64 = 30.0;

pub fn power(p: f64) -> YoungFunction {
    YoungFunction::power(p).unwrap()
}

pub fn suite_setting() -> Setting {
    Setting {
        budget: SUITE_BUDGET,
        ..Setting::default()
    }
}

/// `Φ₃ = power r` with `1/r = |1/p − 1/q|`, the third function of the
/// Young triple for the pair; `None` when `p = q`.
pub fn triple_exponent(p: f64, q: f64) -> Option<f64> {
    (p != q).then(|| 1.0 / (1.0 / p - 1.0 / q).abs())
}

pub fn pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let p = *EXPONENTS.choose(rng).unwrap();
    let q = *EXPONENTS.choose(rng).unwrap();
    (p, q)
}

fn small_rational_mass<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(1..=12) as f64 / rng.gen_range(1..=8) as f64
}

pub struct Instance {
    pub space: MeasureSpace,
    pub u: MeasurableFunction,
    pub t: Transformation,
    pub label: String,
}

/// 1 to 8 explicit atoms, `u` with about a third zeros, `T` a random self-map.
pub fn finite_instance<R: Rng>(rng: &mut R) -> Instance {
    let k = rng.gen_range(1..=8);
    let masses: Vec<f64> = (0..k).map(|_| small_rational_mass(rng)).collect();
    let u: Vec<f64> = (0..k)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-4.0..4.0) })
        .collect();
    let map: Vec<usize> = (0..k).map(|_| rng.gen_range(0..k)).collect();
    Instance {
        space: MeasureSpace::atomic(&masses).unwrap(),
        label: format!("finite masses={masses:?} u={u:?} T={map:?}"),
        u: MeasurableFunction::atomic(u),
        t: Transformation::atomic(&map),
    }
}

/// Up to 3 explicit atoms plus a family `μ(A_n) = n^{-a}`, `n ≥ 1`, with
/// `u = n^b` (optionally cut off after `K`) and `T` one of: shift down,
/// doubling, or collapse onto the first member.
pub fn family_instance<R: Rng>(rng: &mut R) -> Instance {
    let k = rng.gen_range(0..=3);
    let atoms: Vec<Atom> = (0..k).map(|i| Atom::new(format!("E{i}"), small_rational_mass(rng))).collect();
    let a: f64 = rng.gen_range(1.5..4.0);
    let b: f64 = rng.gen_range(-3.0..3.0);
    let cutoff: Option<f64> = rng.gen_bool(0.3).then(|| rng.gen_range(1..=40) as f64);
    let fam = AtomFamily {
        prefix: "A".into(),
        start: 1,
        mass: Formula::of_n(format!("n^-{a}"), move |n| n.powf(-a)),
        point: None,
    };
    let space = MeasureSpace::new(atoms, Some(fam), None).unwrap();
    let explicit_u: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let u_f = Formula::of_n(format!("n^{b} cut {cutoff:?}"), move |n| match cutoff {
        Some(c) if n > c => 0.0,
        _ => n.powf(b),
    });
    let u = MeasurableFunction::new(explicit_u, Some(u_f), None);
    let map: Vec<AtomRef> = (0..k).map(|_| AtomRef::Explicit(rng.gen_range(0..k))).collect();
    let which = rng.gen_range(0..3);
    let t = match which {
        0 => Transformation::new(map).with_family_map("max(n-1,1)", |n| AtomRef::Member(n.saturating_sub(1).max(1))),
        1 => Transformation::new(map).with_family_map("2n", |n| AtomRef::Member(2 * n)),
        _ => Transformation::new(map).with_family_map("1", |_| AtomRef::Member(1)),
    };
    Instance {
        space,
        u,
        t,
        label: format!("family k={k} a={a:.3} b={b:.3} cutoff={cutoff:?} T#{which}"),
    }
}

pub fn with_threshold(cfg: PqConfig, factor: f64) -> PqConfig {
    cfg.with_budget(Budget {
        n: cfg.budget.n,
        threshold: cfg.budget.threshold * factor,
    })
}

/// The oracle answer if it is the same at `threshold / MARGIN` and
/// `threshold · MARGIN`.
pub fn clear_mult(inst: &Instance, cfg: PqConfig) -> Option<Answer> {
    let lo = mult_pq(&inst.space, &inst.u, &with_threshold(cfg, 1.0 / MARGIN)).ok()?;
    let hi = mult_pq(&inst.space, &inst.u, &with_threshold(cfg, MARGIN)).ok()?;
    (lo == hi && !matches!(lo, Answer::Undecided { .. })).then_some(lo)
}

pub fn clear_comp(inst: &Instance, cfg: PqConfig) -> Option<Answer> {
    let lo = comp_pq(&inst.space, &inst.t, &with_threshold(cfg, 1.0 / MARGIN)).ok()?;
    let hi = comp_pq(&inst.space, &inst.t, &with_threshold(cfg, MARGIN)).ok()?;
    (lo == hi && !matches!(lo, Answer::Undecided { .. })).then_some(lo)
}
