//! Infimum of `Σ_j Φ(Q_T(F_j)) μ(F_j)` over partitions of a finite atom set.
//!
//! Generic over the number type so tests can run in exact rationals.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::measure::{MeasurableFunction, MeasureSpace, Realized};
use crate::young::YoungFunction;

/// Largest atom count accepted by the exhaustive search (B₁₂ ≈ 4.2 million).
pub const EXHAUSTIVE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    /// The finest (singleton) partition.
    Refinement,
}

/// Calls `visit` with every restricted-growth string of length `n`, i.e. every
/// set partition of `{0..n}` given as block labels.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize], usize)) {
    if n == 0 {
        visit(&[], 0);
        return;
    }
    let mut a = vec![0usize; n];
    // b[i] = 1 + max(a[0..i]); labels at i may range over 0..=b[i]-1 plus a new one.
    let mut maxes = vec![0usize; n];
    loop {
        let blocks = maxes[n - 1] + 1;
        visit(&a, blocks);
        // Increment from the right.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let cap = maxes[i - 1] + 1;
            if a[i] < cap {
                a[i] += 1;
                maxes[i] = maxes[i - 1].max(a[i]);
                for j in i + 1..n {
                    a[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Value of one partition.
fn partition_value<T>(labels: &[usize], blocks: usize, masses: &[T], f0: &[T], phi: &impl Fn(&T) -> T, zero: &T) -> T
where
    T: Clone + PartialOrd + Add<Output = T> + Mul<Output = T>,
{
    let mut q: Vec<Option<T>> = vec![None; blocks];
    let mut m: Vec<T> = vec![zero.clone(); blocks];
    for (i, &l) in labels.iter().enumerate() {
        q[l] = match q[l].take() {
            Some(cur) if cur >= f0[i] => Some(cur),
            _ => Some(f0[i].clone()),
        };
        m[l] = m[l].clone() + masses[i].clone();
    }
    q.into_iter()
        .zip(m)
        .fold(zero.clone(), |acc, (qv, mv)| acc + phi(&qv.expect("nonempty block")) * mv)
}

/// Minimum over all set partitions, returned with the minimizing labels.
pub fn exhaustive_infimum<T>(masses: &[T], f0: &[T], phi: impl Fn(&T) -> T, zero: T) -> Result<(T, Vec<usize>)>
where
    T: Clone + PartialOrd + Add<Output = T> + Mul<Output = T>,
{
    let n = masses.len();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::PartitionCap {
            cap: EXHAUSTIVE_CAP,
            atoms: n,
        });
    }
    let mut best: Option<(T, Vec<usize>)> = None;
    for_each_partition(n, |labels, blocks| {
        let v = partition_value(labels, blocks, masses, f0, &phi, &zero);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, labels.to_vec()));
        }
    });
    Ok(best.unwrap_or((zero, Vec::new())))
}

/// Value at the singleton partition.
pub fn singleton_value<T>(masses: &[T], f0: &[T], phi: impl Fn(&T) -> T, zero: T) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    masses
        .iter()
        .zip(f0)
        .fold(zero, |acc, (m, f)| acc + phi(f) * m.clone())
}

/// Partition infimum for `composite = Φ₃∘Φ₂⁻¹` and `f₀` on a purely atomic
/// realized space.
pub fn partition_infimum(
    space: &MeasureSpace,
    r: &Realized,
    f0: &MeasurableFunction,
    composite: &YoungFunction,
    strategy: Strategy,
) -> Result<f64> {
    if !space.is_purely_atomic() {
        return Err(Error::Precondition("partition infimum needs a purely atomic space".into()));
    }
    let vals = f0.atom_values(r)?;
    let phi = |x: &f64| composite.evaluate(*x);
    match strategy {
        Strategy::Exhaustive => Ok(exhaustive_infimum(&r.masses, &vals, phi, 0.0)?.0),
        Strategy::Refinement => Ok(singleton_value(&r.masses, &vals, phi, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            let mut count = 0;
            let mut seen = std::collections::HashSet::new();
            for_each_partition(n, |l, _| {
                count += 1;
                assert!(seen.insert(l.to_vec()));
            });
            assert_eq!(count, b, "n={n}");
        }
    }

    #[test]
    fn three_atoms_singleton_is_optimal() {
        let masses = [0.5, 1.5, 2.0];
        let f0 = [3.0, 0.0, 1.25];
        let phi = |x: &f64| x * x;
        let (best, labels) = exhaustive_infimum(&masses, &f0, phi, 0.0).unwrap();
        let single = singleton_value(&masses, &f0, phi, 0.0);
        assert_eq!(best, single);
        assert_eq!(labels, vec![0, 1, 2]);
    }

    #[test]
    fn single_atom_and_zero() {
        let (v, _) = exhaustive_infimum(&[2.0], &[3.0], |x: &f64| x * x, 0.0).unwrap();
        assert_eq!(v, 18.0);
        let (v, _) = exhaustive_infimum(&[1.0, 2.0], &[0.0, 0.0], |x: &f64| x * x, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn cap_enforced() {
        let m = vec![1.0; 13];
        assert_eq!(
            exhaustive_infimum(&m, &m, |x: &f64| *x, 0.0).unwrap_err(),
            Error::PartitionCap { cap: 12, atoms: 13 }
        );
    }
}
