//! The contraction condition for multivalued maps and its specializations.
//!
//! For an integer `r >= 1` and coefficients `(a_i, b_i, c_i)` with
//! `0 < b_i + c_i < 1`, the general condition at `(x, y, i)` reads
//!
//! ```text
//! min{ H_i(Fx,Fy)^r, d_i(x,Fx) d_i(y,Fy)^(r-1), d_i(y,Fy)^r } + a_i min{ d_i(x,Fy), d_i(y,Fx) }
//!     <= [ b_i d_i(x,Fx) + c_i d_i(x,y) ] d_i(y,Fy)^(r-1)
//! ```
//!
//! Powers use `0^0 = 1`, so `r = 1` gives exactly the exponent-free form
//! evaluated by [`condition2_sides`]. For single-valued maps `T` the Hausdorff
//! term collapses to `d_i(Tx, Ty)`; that form is [`condition3_terms`], and
//! `a_i = -1` there is the subtractive variant.
//!
//! The condition is directional: `(x, y)` and `(y, x)` are separate tuples and
//! both are checked.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::hyperspace::hausdorff;
use crate::space::{CompactSet, PointId, PseudometricFamily};
use crate::{pow_u32, Error};

/// Per-index coefficients `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coefficients {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Coefficients { a, b, c }
    }

    /// Step contraction constant `k = b + c`.
    #[inline]
    pub fn k(&self) -> f64 {
        self.b + self.c
    }
}

/// Exponent `r` and one coefficient triple per pseudometric index.
///
/// Only the sum `b + c` is constrained; `a`, `b`, `c` may individually be any
/// real numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionParams {
    r: u32,
    coeffs: Vec<Coefficients>,
}

impl ContractionParams {
    pub fn new(r: u32, coeffs: Vec<Coefficients>) -> Result<Self, Error> {
        if r < 1 {
            return Err(Error::ExponentTooSmall);
        }
        if coeffs.is_empty() {
            return Err(Error::CoefficientCount {
                expected: 1,
                found: 0,
            });
        }
        for (index, co) in coeffs.iter().enumerate() {
            let sum = co.k();
            if !(sum > 0.0 && sum < 1.0) {
                return Err(Error::ContractionOutOfRange { index, sum });
            }
        }
        Ok(ContractionParams { r, coeffs })
    }

    /// The same triple for each of `index_count` indices.
    pub fn uniform(r: u32, coeffs: Coefficients, index_count: usize) -> Result<Self, Error> {
        Self::new(r, alloc::vec![coeffs; index_count])
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn coefficients(&self, i: usize) -> Coefficients {
        self.coeffs[i]
    }

    pub fn all_coefficients(&self) -> &[Coefficients] {
        &self.coeffs
    }

    pub fn index_count(&self) -> usize {
        self.coeffs.len()
    }

    /// `k_i = b_i + c_i`, guaranteed in `(0, 1)`.
    #[inline]
    pub fn k(&self, i: usize) -> f64 {
        self.coeffs[i].k()
    }

    /// Copy with every `a_i` replaced.
    pub fn with_a(&self, a: f64) -> Self {
        ContractionParams {
            r: self.r,
            coeffs: self
                .coeffs
                .iter()
                .map(|co| Coefficients { a, ..*co })
                .collect(),
        }
    }

    /// Copy with a different exponent.
    pub fn with_r(&self, r: u32) -> Result<Self, Error> {
        Self::new(r, self.coeffs.clone())
    }

    /// Errors unless there is exactly one triple per index of `family`.
    pub fn check_family(&self, family: &PseudometricFamily) -> Result<(), Error> {
        if self.coeffs.len() == family.index_count() {
            Ok(())
        } else {
            Err(Error::CoefficientCount {
                expected: family.index_count(),
                found: self.coeffs.len(),
            })
        }
    }
}

/// A multivalued map `F: X -> 2^X`, stored as one image per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMap {
    images: Vec<CompactSet>,
}

impl MultiMap {
    pub fn new(family: &PseudometricFamily, images: Vec<CompactSet>) -> Result<Self, Error> {
        if images.len() != family.point_count() {
            return Err(Error::MapNotTotal {
                expected: family.point_count(),
                found: images.len(),
            });
        }
        for image in &images {
            family.check_point(image.max_point())?;
        }
        Ok(MultiMap { images })
    }

    #[inline]
    pub fn image(&self, x: PointId) -> &CompactSet {
        &self.images[x.index()]
    }

    pub fn images(&self) -> &[CompactSet] {
        &self.images
    }

    pub fn point_count(&self) -> usize {
        self.images.len()
    }

    /// The underlying single-valued map when every image is a singleton.
    pub fn as_single_valued(&self) -> Option<SingleValuedMap> {
        self.images
            .iter()
            .map(|image| (image.len() == 1).then(|| image.members()[0]))
            .collect::<Option<Vec<_>>>()
            .map(|targets| SingleValuedMap { targets })
    }
}

/// A self-map `T: X -> X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleValuedMap {
    targets: Vec<PointId>,
}

impl SingleValuedMap {
    pub fn new(family: &PseudometricFamily, targets: Vec<PointId>) -> Result<Self, Error> {
        if targets.len() != family.point_count() {
            return Err(Error::MapNotTotal {
                expected: family.point_count(),
                found: targets.len(),
            });
        }
        for &t in &targets {
            family.check_point(t)?;
        }
        Ok(SingleValuedMap { targets })
    }

    #[inline]
    pub fn apply(&self, x: PointId) -> PointId {
        self.targets[x.index()]
    }

    pub fn targets(&self) -> &[PointId] {
        &self.targets
    }

    pub fn lift(&self) -> MultiMap {
        lift_single_valued(self)
    }
}

/// `Fx = {Tx}` for every `x`.
pub fn lift_single_valued(map: &SingleValuedMap) -> MultiMap {
    MultiMap {
        images: map
            .targets
            .iter()
            .map(|&t| CompactSet::singleton(t))
            .collect(),
    }
}

/// Every intermediate quantity of one evaluation of the condition.
///
/// `lhs = min{image_gap, mixed_residual, target_residual} + a * cross_gap` and
/// `rhs = (b * source_residual + c * separation) * weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionTerms {
    pub coefficients: Coefficients,
    /// `H_i(Fx, Fy)^r`, or `d_i(Tx, Ty)` for a single-valued map.
    pub image_gap: f64,
    /// `d_i(x, Fx) * d_i(y, Fy)^(r-1)`.
    pub mixed_residual: f64,
    /// `d_i(y, Fy)^r`.
    pub target_residual: f64,
    /// `min{ d_i(x, Fy), d_i(y, Fx) }`.
    pub cross_gap: f64,
    /// `d_i(x, Fx)`.
    pub source_residual: f64,
    /// `d_i(x, y)`.
    pub separation: f64,
    /// `d_i(y, Fy)^(r-1)`.
    pub weight: f64,
}

impl ConditionTerms {
    pub fn min_term(&self) -> f64 {
        self.image_gap
            .min(self.mixed_residual)
            .min(self.target_residual)
    }

    pub fn lhs(&self) -> f64 {
        self.min_term() + self.coefficients.a * self.cross_gap
    }

    pub fn rhs(&self) -> f64 {
        (self.coefficients.b * self.source_residual + self.coefficients.c * self.separation)
            * self.weight
    }
}

/// Intermediate terms of the general condition at `(x, y, i)`.
pub fn condition1_terms(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    x: PointId,
    y: PointId,
    i: usize,
) -> ConditionTerms {
    let r = params.r();
    let (fx, fy) = (map.image(x), map.image(y));
    let d_x_fx = family.point_to_set_distance(i, x, fx);
    let d_y_fy = family.point_to_set_distance(i, y, fy);
    let weight = pow_u32(d_y_fy, r - 1);
    ConditionTerms {
        coefficients: params.coefficients(i),
        image_gap: pow_u32(hausdorff(family, i, fx, fy), r),
        mixed_residual: d_x_fx * weight,
        target_residual: pow_u32(d_y_fy, r),
        cross_gap: family
            .point_to_set_distance(i, x, fy)
            .min(family.point_to_set_distance(i, y, fx)),
        source_residual: d_x_fx,
        separation: family.distance(i, x, y),
        weight,
    }
}

/// `(lhs, rhs)` of the general condition at `(x, y, i)`.
pub fn condition1_sides(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    x: PointId,
    y: PointId,
    i: usize,
) -> (f64, f64) {
    let terms = condition1_terms(family, map, params, x, y, i);
    (terms.lhs(), terms.rhs())
}

/// `(lhs, rhs)` of the exponent-free condition
/// `min{H_i(Fx,Fy), d_i(x,Fx), d_i(y,Fy)} + a min{d_i(x,Fy), d_i(y,Fx)} <= b d_i(x,Fx) + c d_i(x,y)`.
pub fn condition2_sides(
    family: &PseudometricFamily,
    map: &MultiMap,
    coefficients: Coefficients,
    x: PointId,
    y: PointId,
    i: usize,
) -> (f64, f64) {
    let (fx, fy) = (map.image(x), map.image(y));
    let d_x_fx = family.point_to_set_distance(i, x, fx);
    let d_y_fy = family.point_to_set_distance(i, y, fy);
    let d_x_fy = family.point_to_set_distance(i, x, fy);
    let d_y_fx = family.point_to_set_distance(i, y, fx);
    let lhs =
        hausdorff(family, i, fx, fy).min(d_x_fx).min(d_y_fy) + coefficients.a * d_x_fy.min(d_y_fx);
    let rhs = coefficients.b * d_x_fx + coefficients.c * family.distance(i, x, y);
    (lhs, rhs)
}

/// Intermediate terms of the single-valued condition
/// `min{d_i(Tx,Ty), d_i(x,Tx), d_i(y,Ty)} + a min{d_i(x,Ty), d_i(y,Tx)} <= b d_i(x,Tx) + c d_i(x,y)`.
///
/// Has no exponent: `mixed_residual` is `d_i(x, Tx)`, `target_residual` is
/// `d_i(y, Ty)` and `weight` is `1`.
pub fn condition3_terms(
    family: &PseudometricFamily,
    map: &SingleValuedMap,
    coefficients: Coefficients,
    x: PointId,
    y: PointId,
    i: usize,
) -> ConditionTerms {
    let (tx, ty) = (map.apply(x), map.apply(y));
    let d_x_tx = family.distance(i, x, tx);
    ConditionTerms {
        coefficients,
        image_gap: family.distance(i, tx, ty),
        mixed_residual: d_x_tx,
        target_residual: family.distance(i, y, ty),
        cross_gap: family.distance(i, x, ty).min(family.distance(i, y, tx)),
        source_residual: d_x_tx,
        separation: family.distance(i, x, y),
        weight: 1.0,
    }
}

/// Which form of the condition a report was produced for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionForm {
    /// The general multivalued condition with exponent `r`.
    Multivalued { r: u32 },
    /// The single-valued form, evaluated on `T` directly.
    SingleValued,
}

/// One tuple where `lhs > rhs + tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionViolation {
    pub x: PointId,
    pub y: PointId,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub form: ConditionForm,
    pub satisfied: bool,
    /// Smallest `rhs - lhs` seen; `+inf` if nothing was checked.
    pub worst_margin: f64,
    /// Sorted by `(x, y, index)`.
    pub violations: Vec<ConditionViolation>,
    pub tuples_checked: usize,
    /// `false` for sampled reports, which cannot certify anything.
    pub exhaustive: bool,
}

impl ConditionReport {
    fn empty(form: ConditionForm, exhaustive: bool) -> Self {
        ConditionReport {
            form,
            satisfied: true,
            worst_margin: f64::INFINITY,
            violations: Vec::new(),
            tuples_checked: 0,
            exhaustive,
        }
    }

    fn record(&mut self, x: PointId, y: PointId, index: usize, lhs: f64, rhs: f64, tol: f64) {
        self.tuples_checked += 1;
        self.worst_margin = self.worst_margin.min(rhs - lhs);
        if lhs > rhs + tol {
            self.satisfied = false;
            self.violations.push(ConditionViolation {
                x,
                y,
                index,
                lhs,
                rhs,
            });
        }
    }

    /// Combines reports over disjoint tuple ranges. Associative, and the
    /// result does not depend on argument order.
    pub fn merge(mut self, other: ConditionReport) -> ConditionReport {
        debug_assert_eq!(self.form, other.form);
        self.satisfied &= other.satisfied;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        self.tuples_checked += other.tuples_checked;
        self.exhaustive &= other.exhaustive;
        self.violations.extend(other.violations);
        self.violations.sort_by_key(|v| (v.x, v.y, v.index));
        self
    }

    /// Whether this report certifies the condition over the whole space.
    pub fn certifies(&self) -> bool {
        self.satisfied && self.exhaustive
    }
}

/// Checks the general condition for `x` in `rows` and every `y`, `i`.
///
/// Reports for a partition of `0..N` merge into the global report.
pub fn check_condition_rows(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    tol: f64,
    rows: Range<usize>,
) -> ConditionReport {
    let mut report = ConditionReport::empty(ConditionForm::Multivalued { r: params.r() }, true);
    for x in rows.map(PointId) {
        for y in family.points() {
            for i in 0..family.index_count() {
                let (lhs, rhs) = condition1_sides(family, map, params, x, y, i);
                report.record(x, y, i, lhs, rhs, tol);
            }
        }
    }
    report
}

/// Exhaustive check of the general condition over all `N^2 M` tuples.
pub fn check_condition_global(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    tol: f64,
) -> ConditionReport {
    check_condition_rows(family, map, params, tol, 0..family.point_count())
}

/// Exhaustive check of the single-valued condition, ignoring `params.r()`.
pub fn check_single_valued_global(
    family: &PseudometricFamily,
    map: &SingleValuedMap,
    params: &ContractionParams,
    tol: f64,
) -> ConditionReport {
    let mut report = ConditionReport::empty(ConditionForm::SingleValued, true);
    for x in family.points() {
        for y in family.points() {
            for i in 0..family.index_count() {
                let terms = condition3_terms(family, map, params.coefficients(i), x, y, i);
                report.record(x, y, i, terms.lhs(), terms.rhs(), tol);
            }
        }
    }
    report
}

/// Checks `samples` random tuples of the general condition.
///
/// Meant for spaces too large for the exhaustive check. The result is never
/// certifying, even when no violation turns up.
pub fn check_condition_sampled<R: Rng + ?Sized>(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    tol: f64,
    samples: usize,
    rng: &mut R,
) -> ConditionReport {
    let n = family.point_count();
    let m = family.index_count();
    let mut report = ConditionReport::empty(ConditionForm::Multivalued { r: params.r() }, false);
    for _ in 0..samples {
        let x = PointId(rng.gen_range(0..n));
        let y = PointId(rng.gen_range(0..n));
        let i = rng.gen_range(0..m);
        let (lhs, rhs) = condition1_sides(family, map, params, x, y, i);
        report.record(x, y, i, lhs, rhs, tol);
    }
    report.violations.sort_by_key(|v| (v.x, v.y, v.index));
    report.violations.dedup_by_key(|v| (v.x, v.y, v.index));
    report
}

/// Per index: whether `a_i > c_i > 0`, the gate for uniqueness of the fixed
/// point of a single-valued map.
pub fn uniqueness_applicable(params: &ContractionParams) -> Vec<bool> {
    params
        .all_coefficients()
        .iter()
        .map(|co| co.a > co.c && co.c > 0.0)
        .collect()
}
