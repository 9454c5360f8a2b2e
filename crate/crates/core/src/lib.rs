//! Fixed points of multivalued mappings on finite uniform spaces.
//!
//! A uniform space is modeled concretely as a finite point set `X` together
//! with a finite indexed family of pseudometrics `{d_i}`. Elements of the
//! hyperspace are nonempty subsets ([`CompactSet`]); a multivalued map
//! `F: X -> 2^X` is a total table of such subsets ([`MultiMap`]).
//!
//! In a finite space every subset is compact, closed and bounded, every orbit
//! is trivially complete and every map is continuous, so the only hypotheses
//! left to verify computationally are the pseudometric axioms, separation of
//! points, and the contraction inequality itself. This crate provides:
//!
//! * [`space`]: the pseudometric family, axiom validation, point-to-set
//!   distances and the augmented diameter.
//! * [`hyperspace`]: the Hausdorff pseudometrics `H_i`, computed by two
//!   independent formulas.
//! * [`contraction`]: evaluation and exhaustive verification of the
//!   contraction condition for multivalued and single-valued maps.
//! * [`orbit`]: nearest-point orbit generation, step contraction and tail
//!   bound monitoring, and the end-to-end [`solve`](orbit::solve) pipeline.
//! * [`oracle`]: brute-force fixed point enumeration, uniqueness
//!   certification and seeded instance generation.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use setfix_core::{CompactSet, MultiMap, PointId, PseudometricFamily};
//! use setfix_core::contraction::{check_condition_global, Coefficients, ContractionParams};
//! use setfix_core::orbit::{solve, SolveOptions};
//!
//! let family = PseudometricFamily::new(2, vec![vec![0.0, 1.0, 1.0, 0.0]]).unwrap();
//! let p = PointId(0);
//! let map = MultiMap::new(&family, vec![CompactSet::singleton(p), CompactSet::singleton(p)]).unwrap();
//! let params = ContractionParams::uniform(1, Coefficients::new(0.0, 0.4, 0.5), 1).unwrap();
//!
//! assert!(check_condition_global(&family, &map, &params, 1e-9).satisfied);
//! let result = solve(&family, &map, &params, PointId(1), &SolveOptions::default()).unwrap();
//! assert_eq!(result.point, p);
//! assert_eq!(result.steps, 1);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod contraction;
mod error;
pub mod hyperspace;
pub mod oracle;
pub mod orbit;
pub mod space;

pub use contraction::{ContractionParams, MultiMap, SingleValuedMap};
pub use error::Error;
pub use space::{CompactSet, PointId, PseudometricFamily};

/// Absolute tolerance used for every floating point comparison unless the
/// caller passes their own.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `base^exp` by repeated multiplication, with `0^0 = 1`.
///
/// Kept local (instead of `powi`) so the `r = 1` specialization of the
/// contraction inequality is bit-exact: `x^0 = 1.0` and `x^1 = x`.
pub(crate) fn pow_u32(base: f64, exp: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
