//! Property tests for the invariants each module promises.

mod common;

use common::*;
use num_rational::Ratio;
use orlicz_core::cli::examples::FIXTURES;
use orlicz_core::cli::run::RunOptions;
use orlicz_core::cli::Format;
use orlicz_core::measure::{
    integrate, q_t, radon_nikodym, Continuum, Formula, MeasurableFunction, MeasureSpace, Region, Transformation,
};
use orlicz_core::operators::{
    check_comp, check_mult, comp_condition_chain, comp_mult_sandwich, empirical_comp_norm, empirical_mult_norm, Setting,
};
use orlicz_core::oracle_lp::{pair_exponent, Answer, PqConfig};
use orlicz_core::orlicz::{luxemburg_norm, modular};
use orlicz_core::partition::{exhaustive_infimum, partition_infimum, singleton_value, Strategy as Split};
use orlicz_core::range::{classify_comp, classify_mult, comp_range_span, mult_range_span, RangeClass};
use orlicz_core::trend::Budget;
use orlicz_core::young::{
    check_split_inequality, check_triple_inequality, conjugate, dominates, GridSpec, DEFAULT_TOL,
};
use orlicz_core::YoungFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn catalog() -> Vec<YoungFunction> {
    let mut v: Vec<YoungFunction> = [1.5, 2.0, 3.0, 4.0].into_iter().map(power).collect();
    for p in [1.0, 2.0] {
        v.push(YoungFunction::exp_power(p).unwrap());
        v.push(YoungFunction::l_log_l(p).unwrap());
    }
    v
}

fn any_catalog() -> impl Strategy<Value = YoungFunction> {
    (0..8usize).prop_map(|i| catalog()[i].clone())
}

/// Log-uniform in `[10^lo, 10^hi]`.
fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e| 10f64.powf(e))
}

/// 1 to `max` atoms with masses in `[0.05, 5]` and values in `[-5, 5]`.
fn atomic(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max).prop_flat_map(|k| (prop::collection::vec(0.05f64..5.0, k), prop::collection::vec(-5.0f64..5.0, k)))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Rank over the rationals of an integer matrix by fraction-free elimination.
fn integer_rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[rank][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// Young functions

proptest! {
    #[test]
    fn young_inequality(phi in any_catalog(), x in log_uniform(-2.0, 2.0), y in log_uniform(-2.0, 2.0)) {
        let psi = conjugate(&phi, y, DEFAULT_TOL).unwrap();
        prop_assert!(x * y <= phi.evaluate(x) + psi + DEFAULT_TOL * (x * y).max(1.0), "{phi} x={x} y={y}");
    }

    #[test]
    fn inverse_undoes_evaluate(phi in any_catalog(), x in 0.01f64..50.0) {
        let v = phi.evaluate(x);
        prop_assume!(v.is_finite() && v > 0.0);
        prop_assert!(close(phi.inverse(v, DEFAULT_TOL), x, 1e-9), "{phi} at {x}");
    }

    #[test]
    fn power_conjugate_is_closed_form(p in 1.1f64..8.0, y in 0.0f64..100.0) {
        let psi = conjugate(&power(p), y, 1e-12).unwrap();
        let closed = power(p / (p - 1.0)).evaluate(y);
        prop_assert!((psi - closed).abs() <= 1e-9 * closed.max(1.0), "p={p} y={y}: {psi} vs {closed}");
    }

    /// A certified triple `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)` rules out `Φ₁ ≺ Φ₂`.
    #[test]
    fn triple_excludes_domination(f1 in any_catalog(), f2 in any_catalog(), f3 in any_catalog()) {
        let g = GridSpec::default();
        let triple = check_triple_inequality(&f2, &f1, &f3, g);
        if triple.is_global() {
            prop_assert!(!dominates(&f2, &f1, g).holds(), "{f1} < {f2} despite the triple");
        }
    }

    /// `Φ_q(xy) ≤ Φ_p(x) + Φ_r(y)` pointwise when `1/q = 1/p + 1/r`.
    #[test]
    fn power_triple_pointwise(i in 0..5usize, j in 0..5usize, x in log_uniform(-2.0, 2.0), y in log_uniform(-2.0, 2.0)) {
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(q < p);
        let r = triple_exponent(p, q).unwrap();
        let lhs = power(q).evaluate(x * y);
        let rhs = power(p).evaluate(x) + power(r).evaluate(y);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        prop_assert!(check_triple_inequality(&power(q), &power(p), &power(r), GridSpec::default()).is_global());
    }

    #[test]
    fn split_inequality_for_complementary_pairs(p in 2.01f64..8.0, a in 1.1f64..6.0, exp_pair in any::<bool>()) {
        let (phi, psi) = if exp_pair {
            (YoungFunction::exp_power(1.0).unwrap(), YoungFunction::l_log_l(1.0).unwrap())
        } else {
            (power(a), power(a).complementary())
        };
        prop_assert!(check_split_inequality(&phi, &psi, p, GridSpec::default()).holds(), "{phi} / {psi}, p={p}");
    }
}

// Measure spaces

proptest! {
    /// With dyadic masses the pushforward density integrates back exactly.
    #[test]
    fn radon_nikodym_conserves_mass(exps in prop::collection::vec(-3i32..4, 1..8), seed in any::<u64>()) {
        let masses: Vec<f64> = exps.iter().map(|&e| 2f64.powi(e)).collect();
        let k = masses.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map: Vec<usize> = (0..k).map(|_| rand::Rng::gen_range(&mut rng, 0..k)).collect();
        let s = MeasureSpace::atomic(&masses).unwrap();
        let t = Transformation::atomic(&map);
        let (_, f0) = radon_nikodym(&s, &t, &Budget::default()).unwrap();
        let total = integrate(&s, &f0, &Budget::default()).unwrap().value;
        prop_assert_eq!(total, masses.iter().sum::<f64>());
    }

    #[test]
    fn partition_infimum_is_the_singleton_sum(
        nums in prop::collection::vec((1i128..10, 1i128..7), 1..7),
        seed in any::<u64>(),
        e in 1u32..4,
    ) {
        type Q = Ratio<i128>;
        let k = nums.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map: Vec<usize> = (0..k).map(|_| rand::Rng::gen_range(&mut rng, 0..k)).collect();
        let masses: Vec<Q> = nums.iter().map(|&(a, b)| Q::new(a, b)).collect();
        let mut push = vec![Q::from_integer(0); k];
        for (j, &t) in map.iter().enumerate() {
            push[t] += masses[j];
        }
        let f0: Vec<Q> = push.iter().zip(&masses).map(|(p, m)| p / m).collect();
        let phi = |y: &Q| y.pow(e as i32);
        let (best, _) = exhaustive_infimum(&masses, &f0, phi, Q::from_integer(0)).unwrap();
        prop_assert_eq!(best, singleton_value(&masses, &f0, phi, Q::from_integer(0)));

        let fm: Vec<f64> = nums.iter().map(|&(a, b)| a as f64 / b as f64).collect();
        let s = MeasureSpace::atomic(&fm).unwrap();
        let (r, f0m) = radon_nikodym(&s, &Transformation::atomic(&map), &Budget::default()).unwrap();
        let comp = YoungFunction::compose_inverse(&power(2.0 * e as f64), &power(2.0));
        let inf = partition_infimum(&s, &r, &f0m, &comp, Split::Exhaustive).unwrap();
        let modular_sum = modular(&s, &f0m, &comp, &Budget::default()).unwrap().value;
        prop_assert!(close(inf, modular_sum, 1e-12), "{inf} vs {modular_sum}");
    }

    #[test]
    fn q_t_is_monotone((masses, vals) in atomic(8), picks in prop::collection::vec(any::<bool>(), 8), extra in 0..8usize) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let r = s.realize(&Budget::default()).unwrap();
        let f0 = MeasurableFunction::atomic(vals.iter().map(|v| v.abs()).collect());
        let small: Vec<usize> = (0..masses.len()).filter(|&i| picks[i]).collect();
        prop_assume!(!small.is_empty());
        let mut big = small.clone();
        big.push(extra % masses.len());
        let a = q_t(&s, &r, &f0, &Region { atoms: small, continuum: false }).unwrap();
        let b = q_t(&s, &r, &f0, &Region { atoms: big, continuum: false }).unwrap();
        prop_assert!(a <= b);
    }

    /// `∫(a χ_S + b χ_T) = a μ(S) + b μ(T)` for disjoint `S`, `T`.
    #[test]
    fn integrate_is_additive((masses, _) in atomic(8), labels in prop::collection::vec(0..3u8, 8), a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let k = masses.len();
        let g: Vec<f64> = (0..k).map(|i| match labels[i] { 1 => a, 2 => b, _ => 0.0 }).collect();
        let mu = |l: u8| (0..k).filter(|&i| labels[i] == l).map(|i| masses[i]).sum::<f64>();
        let v = integrate(&s, &MeasurableFunction::atomic(g), &Budget::default()).unwrap().value;
        prop_assert!(close(v, a * mu(1) + b * mu(2), 1e-12));
    }
}

// Luxemburg norms

const NORM_TOL: f64 = 1e-12;

fn norm(s: &MeasureSpace, f: Vec<f64>, phi: &YoungFunction) -> f64 {
    luxemburg_norm(s, &MeasurableFunction::atomic(f), phi, NORM_TOL, &Budget::default())
        .unwrap()
        .value
}

proptest! {
    #[test]
    fn norm_is_homogeneous(phi in any_catalog(), (masses, f) in atomic(6), c in -20.0f64..20.0) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let n = norm(&s, f.clone(), &phi);
        let nc = norm(&s, f.iter().map(|v| c * v).collect(), &phi);
        prop_assert!((nc - c.abs() * n).abs() <= 1e-9 * nc.max(1.0), "{nc} vs {}", c.abs() * n);
    }

    #[test]
    fn norm_is_monotone(phi in any_catalog(), (masses, f) in atomic(6), shrink in prop::collection::vec(0.0f64..1.0, 6)) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let g: Vec<f64> = f.iter().zip(&shrink).map(|(v, t)| v * t).collect();
        prop_assert!(norm(&s, g, &phi) <= norm(&s, f, &phi) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn normalized_modular_is_at_most_one(phi in any_catalog(), (masses, f) in atomic(6)) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let n = norm(&s, f.clone(), &phi);
        prop_assume!(n > 0.0 && n.is_finite());
        let unit = MeasurableFunction::atomic(f.iter().map(|v| v / n).collect());
        let m = modular(&s, &unit, &phi, &Budget::default()).unwrap().value;
        prop_assert!(m <= 1.0 + 1e-9, "{m}");
    }

    #[test]
    fn power_norm_matches_closed_form(p in 1.1f64..8.0, (masses, f) in atomic(10)) {
        let s = MeasureSpace::atomic(&masses).unwrap();
        let closed = (f.iter().zip(&masses).map(|(v, m)| v.abs().powf(p) * m).sum::<f64>() / p).powf(1.0 / p);
        prop_assert!(close(norm(&s, f, &power(p)), closed, 1e-9));
    }

    #[test]
    fn indicator_norm(phi in any_catalog(), m in log_uniform(-3.0, 3.0)) {
        let s = MeasureSpace::atomic(&[m]).unwrap();
        let n = norm(&s, vec![1.0], &phi);
        prop_assert!((n * phi.inverse(1.0 / m, DEFAULT_TOL) - 1.0).abs() <= 1e-9);
    }
}

// Operators

fn finite_from_seed(seed: u64) -> Instance {
    finite_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn family_from_seed(seed: u64) -> Instance {
    family_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Empirical estimates use functions on the first members only; they stay
/// lower bounds for the full space.
fn sampled_setting() -> Setting {
    Setting {
        budget: Budget { n: 64, ..SUITE_BUDGET },
        ..suite_setting()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certified_mult_bound_dominates_samples(seed in any::<u64>(), family in any::<bool>(), i in 0..5usize, j in 0..5usize) {
        let inst = if family { family_from_seed(seed) } else { finite_from_seed(seed) };
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        let (p1, p2) = (power(p), power(q));
        let p3 = triple_exponent(p, q).map(power);
        let v = check_mult(&inst.space, &inst.u, &p1, &p2, p3.as_ref(), None, &suite_setting()).unwrap();
        if let Some(b) = v.bound {
            let e = empirical_mult_norm(&inst.space, &inst.u, &p1, &p2, 200, seed, &sampled_setting()).unwrap();
            prop_assert!(e.max_ratio <= b * (1.0 + 1e-6), "{}: {} > {b}", inst.label, e.max_ratio);
        }
    }

    #[test]
    fn certified_comp_bound_dominates_samples(seed in any::<u64>(), family in any::<bool>(), i in 0..5usize, j in 0..5usize) {
        let inst = if family { family_from_seed(seed) } else { finite_from_seed(seed) };
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        let (p1, p2) = (power(p), power(q));
        let p3 = triple_exponent(p, q).map(power);
        let v = check_comp(&inst.space, &inst.t, &p1, &p2, p3.as_ref(), &suite_setting()).unwrap();
        if let Some(b) = v.bound {
            if let Ok(e) = empirical_comp_norm(&inst.space, &inst.t, &p1, &p2, 200, seed, &sampled_setting()) {
                prop_assert!(e.max_ratio <= b * (1.0 + 1e-6), "{}: {} > {b}", inst.label, e.max_ratio);
            }
        }
    }

    /// Every operator on a finite atomic space is bounded, so nothing may refute.
    #[test]
    fn finite_spaces_are_never_refuted(seed in any::<u64>(), a in any_catalog(), b in any_catalog()) {
        let inst = finite_from_seed(seed);
        let st = suite_setting();
        let m = check_mult(&inst.space, &inst.u, &a, &b, None, None, &st).unwrap();
        prop_assert!(!m.is_refuted(), "{}: {m:?}", inst.label);
        let c = check_comp(&inst.space, &inst.t, &a, &b, None, &st).unwrap();
        prop_assert!(!c.is_refuted(), "{}: {c:?}", inst.label);
    }

    /// The two sup conditions of the composition chain agree whenever both decide.
    #[test]
    fn chain_conditions_agree(seed in any::<u64>(), family in any::<bool>(), i in 0..5usize, j in 0..5usize) {
        let inst = if family { family_from_seed(seed) } else { finite_from_seed(seed) };
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(p < q);
        let r = triple_exponent(p, q).unwrap();
        let c = comp_condition_chain(&inst.space, &inst.t, &power(p), &power(q), &power(r), &suite_setting()).unwrap();
        if let (Some(ii), Some(iii)) = (c.ii, c.iii) {
            prop_assert_eq!(ii, iii, "{}", inst.label);
        }
        if !family {
            prop_assert_eq!(c.ii, Some(true));
        }
    }

    #[test]
    fn comp_mult_sandwich_holds(seed in any::<u64>(), q in 1.2f64..6.0, f in prop::collection::vec(-3.0f64..3.0, 8)) {
        let inst = finite_from_seed(seed);
        let k = inst.space.atoms().len();
        let g = MeasurableFunction::atomic(f[..k].to_vec());
        let w = comp_mult_sandwich(&inst.space, &inst.t, &g, &power(q), &suite_setting()).unwrap();
        prop_assert!(w.upper && w.lower, "{}: {w:?}", inst.label);
    }

    #[test]
    fn engine_agrees_with_oracle(seed in any::<u64>(), family in any::<bool>(), i in 0..5usize, j in 0..5usize) {
        let inst = if family { family_from_seed(seed) } else { finite_from_seed(seed) };
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        let cfg = PqConfig::new(p, q).unwrap().with_budget(SUITE_BUDGET);
        let p3 = triple_exponent(p, q).map(power);
        let st = suite_setting();
        let m = check_mult(&inst.space, &inst.u, &power(p), &power(q), p3.as_ref(), None, &st).unwrap();
        match clear_mult(&inst, cfg) {
            Some(Answer::Bounded) => prop_assert!(!m.is_refuted(), "{}", inst.label),
            Some(Answer::Unbounded) => prop_assert!(!m.is_certified(), "{}", inst.label),
            _ => {}
        }
        let c = check_comp(&inst.space, &inst.t, &power(p), &power(q), p3.as_ref(), &st).unwrap();
        match clear_comp(&inst, cfg) {
            Some(Answer::Bounded) => prop_assert!(!c.is_refuted(), "{}", inst.label),
            Some(Answer::Unbounded) => prop_assert!(!c.is_certified(), "{}", inst.label),
            _ => {}
        }
    }
}

// Range

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// On finite spaces the range is spanned by the indicators of `supp u`:
    /// the class, the span's integer rank and the image of random `f` agree.
    #[test]
    fn finite_mult_range_rank(seed in any::<u64>(), i in 0..5usize, j in 0..5usize, f in prop::collection::vec(-3.0f64..3.0, 8)) {
        let inst = finite_from_seed(seed);
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(p != q);
        let st = suite_setting();
        let rep = classify_mult(&inst.space, &inst.u, &power(p), &power(q), triple_exponent(p, q).map(power).as_ref(), &st).unwrap();
        let u = inst.u.explicit_values().to_vec();
        let support = u.iter().filter(|v| **v != 0.0).count();
        let span = mult_range_span(&inst.space, &inst.u, &st).unwrap();
        let rows: Vec<Vec<i128>> = span.iter().map(|v| v.iter().map(|x| *x as i128).collect()).collect();
        prop_assert_eq!(integer_rank(&rows), support);
        // u f vanishes off the support, so it lies in the span.
        for (uv, fv) in u.iter().zip(&f) {
            prop_assert!(*uv != 0.0 || uv * fv == 0.0);
        }
        match rep.class {
            RangeClass::FiniteRank { rank } => prop_assert_eq!(rank, support),
            RangeClass::Inconclusive { .. } => {}
            other => prop_assert!(false, "{}: {other:?}", inst.label),
        }
    }

    #[test]
    fn comp_rank_bounds_the_span(seed in any::<u64>(), i in 0..5usize, j in 0..5usize) {
        let inst = finite_from_seed(seed);
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(p != q);
        let st = suite_setting();
        let rep = classify_comp(&inst.space, &inst.t, &power(p), &power(q), triple_exponent(p, q).map(power).as_ref(), &st).unwrap();
        let span = comp_range_span(&inst.space, &inst.t, &st).unwrap();
        let rows: Vec<Vec<i128>> = span.iter().map(|v| v.iter().map(|x| *x as i128).collect()).collect();
        if let RangeClass::FiniteRank { rank } = rep.class {
            prop_assert!(rank >= integer_rank(&rows), "{}", inst.label);
        }
    }

    /// A symbol that is nonzero on a piece of the continuum never has finite rank,
    /// and on a pure continuum it has non-closed range once the hypotheses hold.
    #[test]
    fn continuum_support_is_never_finite_rank(c in 0.1f64..5.0, k in 0u32..3, with_atoms in any::<bool>(), i in 0..5usize, j in 0..5usize) {
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(q < p);
        let atoms = if with_atoms { vec![0.5, 2.0] } else { vec![] };
        let mut s = MeasureSpace::atomic(&atoms).unwrap_or_else(|_| MeasureSpace::new(vec![], None, None).unwrap());
        s = s.with_continuum(Continuum::lebesgue(0.0, 1.0)).unwrap();
        let u = MeasurableFunction::new(vec![1.0; atoms.len()], None, Some(Formula::of_x("c x^k", move |x| c * x.powi(k as i32))));
        let rep = classify_mult(&s, &u, &power(p), &power(q), triple_exponent(p, q).map(power).as_ref(), &suite_setting()).unwrap();
        prop_assert!(!rep.is_finite_rank(), "{rep:?}");
        if !with_atoms {
            prop_assert!(rep.is_not_closed(), "{rep:?}");
        }
    }
}

// Power oracle

proptest! {
    #[test]
    fn pair_exponent_identity(i in 0..5usize, j in 0..5usize) {
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(p != q);
        let r = pair_exponent(p, q);
        prop_assert!(((1.0 / p).min(1.0 / q) + 1.0 / r - (1.0 / p).max(1.0 / q)).abs() <= 1e-12);
    }

    /// For `q < p` the singleton partition sum of `Φ₃∘Φ₂⁻¹(f₀)` is the
    /// `f₀^{p/(p−q)}` modular up to the power normalization.
    #[test]
    fn singleton_sum_is_the_oracle_modular(seed in any::<u64>(), i in 0..5usize, j in 0..5usize) {
        let (p, q) = (EXPONENTS[i], EXPONENTS[j]);
        prop_assume!(q < p);
        let inst = finite_from_seed(seed);
        let r = pair_exponent(p, q);
        let (real, f0) = radon_nikodym(&inst.space, &inst.t, &Budget::default()).unwrap();
        let comp = YoungFunction::compose_inverse(&power(r), &power(q));
        let sum = partition_infimum(&inst.space, &real, &f0, &comp, Split::Refinement).unwrap();
        let e = p / (p - q);
        prop_assert!((e - r / q).abs() < 1e-12);
        let direct: f64 = f0
            .atom_values(&real)
            .unwrap()
            .iter()
            .zip(&real.masses)
            .map(|(w, m)| (q * w).powf(e) / r * m)
            .sum();
        prop_assert!(close(sum, direct, 1e-12), "{sum} vs {direct}");
    }
}

// Reports

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), which in 0..FIXTURES.len()) {
        let f = &FIXTURES[which];
        let run = || {
            let mut cfg = f.config().unwrap();
            cfg.seed = seed;
            orlicz_core::cli::run(&cfg, &RunOptions::default()).render(Format::Machine)
        };
        prop_assert_eq!(run(), run());
    }
}
