//! Adaptive Gauss–Kronrod quadrature with geometric refinement toward both
//! endpoints, so integrable endpoint singularities converge and
//! non-integrable ones are reported as divergent.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Shrink factor between consecutive endpoint shells.
const SHELL_RATIO: f64 = 0.125;
const MAX_SHELLS: usize = 100;
const MAX_INTERVALS: usize = 4000;

/// Result of a (possibly improper) integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    Finite(f64),
    Divergent { partial: f64 },
}

impl Integral {
    pub fn value(self) -> f64 {
        match self {
            Integral::Finite(v) => v,
            Integral::Divergent { .. } => f64::INFINITY,
        }
    }
}

/// One 15-point Kronrod panel: (Kronrod estimate, Gauss estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, g * h)
}

/// Adaptive GK15 on a proper interval. Errors when the panel budget runs out
/// before the error estimate meets the tolerance.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (k, g) = gk15(f, a, b);
    let mut panels = vec![(a, b, k, (k - g).abs())];
    let mut previous = g;
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Ok(total);
        }
        if err <= rel_tol * total.abs() || err <= 1e-300 {
            return Ok(total);
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                a,
                b,
                last: total,
                previous,
            });
        }
        previous = total;
        // Split the worst panel.
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(i);
        let m = 0.5 * (pa + pb);
        if m <= pa || m >= pb {
            return Ok(total);
        }
        for (x, y) in [(pa, m), (m, pb)] {
            let (k, g) = gk15(f, x, y);
            panels.push((x, y, k, (k - g).abs()));
        }
    }
}

/// Integrates over `[a, b]`, refining toward each endpoint by geometric
/// shells and watching the shell contributions: geometric decay means
/// convergence; non-decaying contributions or a partial sum past
/// `threshold` mean divergence.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, threshold: f64) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral::Finite(0.0));
    }
    let m = 0.5 * (a + b);
    let left = shells(f, a, m, threshold)?;
    if let Integral::Divergent { partial } = left {
        return Ok(Integral::Divergent { partial });
    }
    let right = shells(f, b, m, threshold)?;
    Ok(match right {
        Integral::Divergent { partial } => Integral::Divergent {
            partial: partial + left.value(),
        },
        Integral::Finite(v) => {
            let total = v + left.value();
            if total > threshold {
                Integral::Divergent { partial: total }
            } else {
                Integral::Finite(total)
            }
        }
    })
}

/// Sum over shells `[e + h r^{k+1}, e + h r^k]` (oriented away from the
/// endpoint `e`), where `h = inner − e`.
fn shells<F: Fn(f64) -> f64>(f: &F, e: f64, inner: f64, threshold: f64) -> Result<Integral> {
    let h = inner - e;
    let mut total = 0.0;
    let mut contrib: Vec<f64> = Vec::new();
    let mut outer = 1.0;
    for _ in 0..MAX_SHELLS {
        let inner_frac = outer * SHELL_RATIO;
        let (x0, x1) = (e + h * inner_frac, e + h * outer);
        let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
        let c = adaptive(f, lo, hi, 1e-12)?;
        if c.is_nan() {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                last: c,
                previous: total,
            });
        }
        if c.is_infinite() {
            return Ok(Integral::Divergent { partial: c });
        }
        total += c;
        contrib.push(c.abs());
        outer = inner_frac;
        if total.abs() > threshold {
            return Ok(Integral::Divergent { partial: total });
        }
        let n = contrib.len();
        if n >= 6 {
            let last = contrib[n - 1];
            if last <= 1e-15 * total.abs().max(1e-300) || last == 0.0 && contrib[n - 2] == 0.0 {
                return Ok(Integral::Finite(total));
            }
            let rising = (n - 3..n).all(|i| contrib[i] >= 0.98 * contrib[i - 1] && contrib[i] > 0.0);
            if rising {
                return Ok(Integral::Divergent { partial: total });
            }
        }
        // The shell is below the representable resolution around `e`.
        if (e + h * outer) == e {
            return Ok(Integral::Finite(total));
        }
    }
    let n = contrib.len();
    Err(Error::Quadrature {
        a: e,
        b: inner,
        last: total,
        previous: total - contrib[n - 1],
    })
}
