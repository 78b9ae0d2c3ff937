//! Semi-decision rules for suprema and sums over truncated atom families.

use serde::Serialize;

/// Truncation and divergence budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    /// Number of generated family members to realize.
    pub n: usize,
    /// Partial sums or maxima above this are treated as divergent.
    pub threshold: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            n: 100_000,
            threshold: 1e12,
        }
    }
}

/// Relative change under which a partial maximum counts as stabilized.
pub const SUP_STABLE_REL: f64 = 1e-9;

/// Families shorter than this are treated as finite lists.
const MIN_TREND_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "trend", rename_all = "snake_case")]
pub enum Trend {
    /// The quantity settled at `value`.
    Stable { value: f64 },
    /// Still growing past the threshold at the budget boundary.
    Diverging { partial: f64, at: usize },
    /// Neither rule fired.
    Undecided { partial: f64, previous: f64 },
}

impl Trend {
    pub fn value(&self) -> f64 {
        match *self {
            Trend::Stable { value } => value,
            Trend::Diverging { .. } => f64::INFINITY,
            Trend::Undecided { partial, .. } => partial,
        }
    }

    pub fn is_diverging(&self) -> bool {
        matches!(self, Trend::Diverging { .. })
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Trend::Stable { .. })
    }
}

/// Partial-maximum rule over `finite` (explicit atoms) and `family` (generated
/// members in order). `family_complete` says the family was cut off by mass
/// underflow rather than by the budget; the tail is then still growing only if
/// the maximum was reached at the very end.
pub fn sup_trend(finite: &[f64], family: &[f64], threshold: f64) -> Trend {
    let base = finite.iter().copied().fold(0.0f64, f64::max);
    if finite.iter().any(|v| v.is_infinite()) {
        return Trend::Diverging {
            partial: f64::INFINITY,
            at: finite.iter().position(|v| v.is_infinite()).unwrap(),
        };
    }
    if family.len() < MIN_TREND_LEN {
        let m = family.iter().copied().fold(base, f64::max);
        if m.is_infinite() {
            return Trend::Diverging {
                partial: m,
                at: finite.len() + family.iter().position(|v| v.is_infinite()).unwrap(),
            };
        }
        return Trend::Stable { value: m };
    }
    let n = family.len();
    let split = n.div_ceil(10);
    let prev = family[..split].iter().copied().fold(base, f64::max);
    let (mut last, mut arg) = (prev, 0);
    for (i, &v) in family.iter().enumerate().skip(split) {
        if v > last {
            last = v;
            arg = i;
        }
    }
    if last > threshold && last > prev {
        return Trend::Diverging {
            partial: last,
            at: finite.len() + arg,
        };
    }
    if last - prev <= SUP_STABLE_REL * last.abs() {
        Trend::Stable { value: last }
    } else {
        Trend::Undecided {
            partial: last,
            previous: prev,
        }
    }
}

/// Outcome of summing a nonnegative series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSum {
    pub partial: f64,
    pub trend: Trend,
    /// Sums of terms over decade blocks `[10^k, 10^{k+1})` of the family.
    pub blocks: Vec<f64>,
}

/// Ratio of consecutive decade blocks at or above which a series is declared
/// divergent. Harmonic-type tails sit at 1, `n^{-1-ε}` tails at `10^{-ε}`.
pub const DIVERGENT_BLOCK_RATIO: f64 = 0.97;
/// At or below this block ratio the tail is treated as geometric-summable.
pub const CONVERGENT_BLOCK_RATIO: f64 = 0.9;

/// Sums `finite` plus `family` terms (all ≥ 0) with decade-block tail
/// detection. A total past `threshold` diverges only while the last tenth of
/// the family still adds to it.
pub fn series_trend(finite: &[f64], family: &[f64], threshold: f64) -> SeriesSum {
    let head: f64 = finite.iter().sum();
    let mut blocks = Vec::new();
    let mut lo = 0usize;
    let mut width = 10usize;
    while lo < family.len() {
        let hi = (lo + width).min(family.len());
        blocks.push(family[lo..hi].iter().sum::<f64>());
        lo = hi;
        width = if blocks.len() == 1 { 90 } else { width * 10 };
    }
    let total = head + blocks.iter().sum::<f64>();
    let at = finite.len() + family.len();
    // Past the threshold only counts while the tail still contributes: a
    // finite list, or a family whose terms have stopped, sums to what it sums.
    let m = family.len();
    let still_adding = family[m - m / 10..].iter().sum::<f64>() > 1e-12 * total;
    let trend = if !total.is_finite() || total > threshold && still_adding {
        Trend::Diverging { partial: total, at }
    } else if family.len() < 100 || blocks.len() < 3 {
        Trend::Stable { value: total }
    } else {
        // Compare the (possibly partial) last block [L, m) with the matching
        // stretch [L/10, m/10) one decade earlier, which is scale-invariant.
        let k = blocks.len() - 1;
        let l = 10usize.pow(k as u32);
        let m = family.len();
        let last = blocks[k];
        let prev: f64 = family[l / 10..m.div_ceil(10)].iter().sum();
        if last <= 1e-12 * total {
            Trend::Stable { value: total }
        } else {
            let rho = if prev > 0.0 { last / prev } else { f64::INFINITY };
            if rho >= DIVERGENT_BLOCK_RATIO {
                Trend::Diverging { partial: total, at }
            } else if rho <= CONVERGENT_BLOCK_RATIO {
                // Geometric decades from the current one on, minus what is
                // already summed of it.
                let tail = (blocks[k - 1] * rho / (1.0 - rho) - last).max(0.0);
                if total + tail > threshold {
                    Trend::Diverging { partial: total, at }
                } else {
                    Trend::Stable { value: total }
                }
            } else {
                Trend::Undecided {
                    partial: total,
                    previous: total - blocks[k],
                }
            }
        }
    };
    SeriesSum {
        partial: total,
        trend,
        blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_finite_sums_stay_finite() {
        assert!(series_trend(&[1e20, 3.0], &[], 1e12).trend.is_stable());
        let mut cut = vec![1e15; 5];
        cut.resize(2000, 0.0);
        assert!(series_trend(&[], &cut, 1e12).trend.is_stable());
        let flat = vec![1e10; 2000];
        assert!(series_trend(&[], &flat, 1e12).trend.is_diverging());
    }

    #[test]
    fn sup_of_finite_list_is_max() {
        assert_eq!(sup_trend(&[1.0, 3.0, 2.0], &[], 1e12), Trend::Stable { value: 3.0 });
    }

    #[test]
    fn sup_growing_past_threshold_diverges() {
        let fam: Vec<f64> = (1..=1000).map(|n| (n as f64).powi(5)).collect();
        assert!(sup_trend(&[], &fam, 1e12).is_diverging());
        // Same growth below the threshold is only undecided.
        assert!(matches!(sup_trend(&[], &fam, 1e20), Trend::Undecided { .. }));
    }

    #[test]
    fn sup_converging_is_stable() {
        let fam: Vec<f64> = (1..=100_000).map(|n| 1.0 - (-(n as f64)).exp()).collect();
        assert!(sup_trend(&[], &fam, 1e12).is_stable());
    }

    #[test]
    fn harmonic_diverges_below_threshold() {
        let fam: Vec<f64> = (1..=100_000).map(|n| 1.0 / n as f64).collect();
        let s = series_trend(&[], &fam, 1e12);
        assert!(s.trend.is_diverging(), "{s:?}");
        assert!(s.partial < 13.0);
    }

    #[test]
    fn inverse_squares_converge() {
        let fam: Vec<f64> = (1..=100_000).map(|n| 1.0 / (n as f64).powi(2)).collect();
        let s = series_trend(&[0.5], &fam, 1e12);
        assert!(s.trend.is_stable(), "{s:?}");
        let direct: f64 = 0.5 + fam.iter().sum::<f64>();
        assert!((s.partial - direct).abs() < 1e-12);
    }

    #[test]
    fn separated_exponents_decided() {
        for (e, div) in [(0.95, true), (1.0, true), (1.05, false), (1.5, false)] {
            let fam: Vec<f64> = (1..=100_000).map(|n| (n as f64).powf(-e)).collect();
            let s = series_trend(&[], &fam, 1e12);
            assert_eq!(s.trend.is_diverging(), div, "exponent {e}: {s:?}");
            if !div {
                assert!(s.trend.is_stable(), "exponent {e}: {s:?}");
            }
        }
    }
}
