//! Hausdorff pseudometrics `H_i` on the hyperspace of nonempty subsets.
//!
//! [`hausdorff`] and [`hausdorff_via_envelope`] compute the same quantity by two
//! unrelated routes and deliberately share no helper code, so comparing them
//! is a real check of the identity
//!
//! ```text
//! max { sup_{a in A} d_i(a, B), sup_{b in B} d_i(A, b) } = sup_{x in X} |d_i(x, A) - d_i(x, B)|
//! ```

use alloc::vec::Vec;

use crate::space::{CompactSet, PseudometricFamily};

/// `H_i(A, B)` tagged with the index it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffValue {
    pub index: usize,
    pub value: f64,
}

/// `H_i(A, B)` as the larger of the two directed excesses.
pub fn hausdorff(family: &PseudometricFamily, i: usize, a: &CompactSet, b: &CompactSet) -> f64 {
    let mut a_into_b = 0.0_f64;
    for x in a.iter() {
        let mut nearest = f64::INFINITY;
        for y in b.iter() {
            nearest = nearest.min(family.distance(i, x, y));
        }
        a_into_b = a_into_b.max(nearest);
    }
    let mut b_into_a = 0.0_f64;
    for y in b.iter() {
        let mut nearest = f64::INFINITY;
        for x in a.iter() {
            nearest = nearest.min(family.distance(i, x, y));
        }
        b_into_a = b_into_a.max(nearest);
    }
    a_into_b.max(b_into_a)
}

/// `H_i(A, B)` as the sup over the whole space of `|d_i(x, A) - d_i(x, B)|`.
pub fn hausdorff_via_envelope(
    family: &PseudometricFamily,
    i: usize,
    a: &CompactSet,
    b: &CompactSet,
) -> f64 {
    let table = family.table(i);
    let n = family.point_count();
    let gap_to = |x: usize, set: &CompactSet| {
        set.members()
            .iter()
            .map(|m| table[x * n + m.index()])
            .reduce(f64::min)
            .unwrap_or(f64::INFINITY)
    };
    (0..n)
        .map(|x| (gap_to(x, a) - gap_to(x, b)).abs())
        .fold(0.0, f64::max)
}

/// `H_i(A, B)` for every index of the family.
pub fn hausdorff_all(
    family: &PseudometricFamily,
    a: &CompactSet,
    b: &CompactSet,
) -> Vec<HausdorffValue> {
    (0..family.index_count())
        .map(|index| HausdorffValue {
            index,
            value: hausdorff(family, index, a, b),
        })
        .collect()
}
