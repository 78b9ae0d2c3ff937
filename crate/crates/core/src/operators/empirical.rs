//! Seeded lower estimates of operator norms on atomic spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{apply_comp, apply_mult, Setting};
use crate::error::{Error, Result};
use crate::measure::{MeasurableFunction, MeasureSpace, Realized, Transformation};
use crate::orlicz::luxemburg_norm_realized;
use crate::young::YoungFunction;

/// Indicator test functions are tried for at most this many atoms.
const MAX_INDICATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalNorm {
    /// Largest observed `‖Tf‖/‖f‖`.
    pub max_ratio: f64,
    pub samples: usize,
    /// Atom values of the maximizing `f`.
    pub best: Vec<f64>,
}

fn candidates(r: &Realized, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = r.len();
    let mut out: Vec<Vec<f64>> = (0..n.min(MAX_INDICATORS))
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        out.push(
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        let m = rng.gen_range(-3.0f64..3.0).exp();
                        if rng.gen_bool(0.5) {
                            m
                        } else {
                            -m
                        }
                    }
                })
                .collect(),
        );
    }
    out
}

fn estimate(
    space: &MeasureSpace,
    r: &Realized,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    samples: usize,
    seed: u64,
    s: &Setting,
    op: impl Fn(&MeasurableFunction) -> Result<MeasurableFunction>,
) -> Result<EmpiricalNorm> {
    if !space.is_purely_atomic() {
        return Err(Error::Precondition("empirical norms need a purely atomic space".into()));
    }
    let mut best = EmpiricalNorm {
        max_ratio: 0.0,
        samples: 0,
        best: Vec::new(),
    };
    for v in candidates(r, samples, seed) {
        let f = MeasurableFunction::from_realized(space, r, v.clone(), None);
        let nf = luxemburg_norm_realized(space, r, &f, None, phi1, s.tol, &s.budget)?.value;
        if nf == 0.0 || !nf.is_finite() {
            continue;
        }
        let g = op(&f)?;
        let ng = luxemburg_norm_realized(space, r, &g, None, phi2, s.tol, &s.budget)?.value;
        best.samples += 1;
        if ng / nf > best.max_ratio {
            best.max_ratio = ng / nf;
            best.best = v;
        }
    }
    Ok(best)
}

/// `max ‖u f‖_{Φ₂} / ‖f‖_{Φ₁}` over atom indicators and seeded random `f`.
pub fn empirical_mult_norm(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    samples: usize,
    seed: u64,
    s: &Setting,
) -> Result<EmpiricalNorm> {
    let r = space.realize(&s.budget)?;
    estimate(space, &r, phi1, phi2, samples, seed, s, |f| apply_mult(space, u, f))
}

/// `max ‖f∘T‖_{Φ₂} / ‖f‖_{Φ₁}` over atom indicators and seeded random `f`.
pub fn empirical_comp_norm(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    samples: usize,
    seed: u64,
    s: &Setting,
) -> Result<EmpiricalNorm> {
    let r = space.realize(&s.budget)?;
    estimate(space, &r, phi1, phi2, samples, seed, s, |f| apply_comp(space, &r, t, f))
}
