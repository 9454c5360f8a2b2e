//! Nearest-point orbits and the fixed point pipeline.
//!
//! Starting from `x0`, each step moves to a point of `F(x_n)` nearest to
//! `x_n` under the driver pseudometric, so `d_i(x_n, x_{n+1}) = d_i(x_n, F x_n)`.
//! When the contraction condition holds, these steps shrink geometrically:
//!
//! ```text
//! d_i(x_n, x_{n+1}) <= k_i d_i(x_{n-1}, x_n) <= k_i^n d_i(x_0, x_1)
//! d_i(x_n, x_m)     <= k_i^n / (1 - k_i) * d_i(x_0, x_1)      for m > n
//! ```
//!
//! In a finite space with a metric driver the step distances can only shrink
//! to zero, so the orbit lands on a fixed point in fewer than `N` steps.

use alloc::vec;
use alloc::vec::Vec;

use crate::contraction::{check_condition_global, ConditionReport, ContractionParams, MultiMap};
use crate::space::{CompactSet, PointId, PseudometricFamily};
use crate::{pow_u32, Error, DEFAULT_TOL};

/// Which distance picks the next point of the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    /// Nearest point under `d_i`. Carries the contraction guarantees.
    Index(usize),
    /// Nearest point under `max_i d_i`. Best effort only.
    Aggregate,
}

impl Default for Driver {
    fn default() -> Self {
        Driver::Index(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitStatus {
    /// The last point has `d_i(x, Fx) <= tol` for every index.
    FixedPointFound,
    /// The next point equals the current one without the residual vanishing.
    /// Only reachable on families with a nonzero diagonal.
    ConvergedStationary,
    MaxStepsReached,
}

/// An orbit `x_0, x_1, ...` with `x_{n+1}` in `F(x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub points: Vec<PointId>,
    /// `step_distances[i][n] = d_i(x_n, x_{n+1})`.
    pub step_distances: Vec<Vec<f64>>,
    pub driver: Driver,
    pub status: OrbitStatus,
}

impl OrbitRecord {
    /// Number of moves made.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> PointId {
        self.points[self.points.len() - 1]
    }
}

/// The member of `set` closest to `x` under `d_i`; ties go to the lowest id.
pub fn nearest_point(
    family: &PseudometricFamily,
    i: usize,
    x: PointId,
    set: &CompactSet,
) -> PointId {
    let mut best = set.members()[0];
    let mut best_distance = family.distance(i, x, best);
    for a in set.iter().skip(1) {
        let d = family.distance(i, x, a);
        if d < best_distance {
            best = a;
            best_distance = d;
        }
    }
    best
}

/// The member of `set` minimizing `max_i d_i(x, a)`; ties go to the lowest id.
pub fn nearest_point_aggregate(
    family: &PseudometricFamily,
    x: PointId,
    set: &CompactSet,
) -> PointId {
    let spread = |a: PointId| {
        (0..family.index_count())
            .map(|i| family.distance(i, x, a))
            .fold(0.0, f64::max)
    };
    let mut best = set.members()[0];
    let mut best_spread = spread(best);
    for a in set.iter().skip(1) {
        let s = spread(a);
        if s < best_spread {
            best = a;
            best_spread = s;
        }
    }
    best
}

/// `d_i(x, Fx)` for every index.
pub fn residuals(family: &PseudometricFamily, map: &MultiMap, x: PointId) -> Vec<f64> {
    (0..family.index_count())
        .map(|i| family.point_to_set_distance(i, x, map.image(x)))
        .collect()
}

/// Runs the nearest-point orbit from `x0` for at most `max_steps` moves.
pub fn generate_orbit(
    family: &PseudometricFamily,
    map: &MultiMap,
    x0: PointId,
    driver: Driver,
    max_steps: usize,
    tol: f64,
) -> Result<OrbitRecord, Error> {
    family.check_point(x0)?;
    if let Driver::Index(i) = driver {
        family.check_index(i)?;
    }
    if max_steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let m = family.index_count();
    let mut points = vec![x0];
    let mut step_distances = vec![Vec::new(); m];
    let status = loop {
        let x = points[points.len() - 1];
        if residuals(family, map, x).iter().all(|&r| r <= tol) {
            break OrbitStatus::FixedPointFound;
        }
        if points.len() > max_steps {
            break OrbitStatus::MaxStepsReached;
        }
        let next = match driver {
            Driver::Index(i) => nearest_point(family, i, x, map.image(x)),
            Driver::Aggregate => nearest_point_aggregate(family, x, map.image(x)),
        };
        if next == x {
            break OrbitStatus::ConvergedStationary;
        }
        for (i, column) in step_distances.iter_mut().enumerate() {
            column.push(family.distance(i, x, next));
        }
        points.push(next);
    };
    Ok(OrbitRecord {
        points,
        step_distances,
        driver,
        status,
    })
}

/// `result[i][n - 1]` is whether `d_i(x_n, x_{n+1}) <= k_i d_i(x_{n-1}, x_n) + tol`
/// for steps `n >= 1`.
pub fn step_contraction_check(
    orbit: &OrbitRecord,
    params: &ContractionParams,
    tol: f64,
) -> Vec<Vec<bool>> {
    orbit
        .step_distances
        .iter()
        .enumerate()
        .map(|(i, steps)| {
            let k = params.k(i);
            steps
                .windows(2)
                .map(|pair| pair[1] <= k * pair[0] + tol)
                .collect()
        })
        .collect()
}

/// `k^n d01 / (1 - k)`, the bound on `d_i(x_n, x_m)` for every `m > n`.
pub fn tail_bound(n: usize, k: f64, d01: f64) -> Result<f64, Error> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::ConstantOutOfRange(k));
    }
    let exp = u32::try_from(n).unwrap_or(u32::MAX);
    Ok(pow_u32(k, exp) * d01 / (1.0 - k))
}

/// Comparison of the realized tail of an orbit against [`tail_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub n: usize,
    /// `max_{m > n} d_i(x_n, x_m)`.
    pub worst_gap: f64,
    pub bound: f64,
    pub holds: bool,
}

/// One [`TailCheck`] per orbit position `n` that has a successor, on index `i`.
/// Empty when the orbit never moved.
pub fn tail_bound_checks(
    family: &PseudometricFamily,
    orbit: &OrbitRecord,
    i: usize,
    k: f64,
    tol: f64,
) -> Result<Vec<TailCheck>, Error> {
    let points = &orbit.points;
    if points.len() < 2 {
        return Ok(Vec::new());
    }
    let d01 = family.distance(i, points[0], points[1]);
    let mut checks = Vec::with_capacity(points.len() - 1);
    for n in 0..points.len() - 1 {
        let worst_gap = points[n + 1..]
            .iter()
            .map(|&xm| family.distance(i, points[n], xm))
            .fold(0.0, f64::max);
        let bound = tail_bound(n, k, d01)?;
        checks.push(TailCheck {
            n,
            worst_gap,
            bound,
            holds: worst_gap <= bound + tol,
        });
    }
    Ok(checks)
}

/// `x` belongs to its own image.
pub fn is_fixed_point(map: &MultiMap, x: PointId) -> bool {
    map.image(x).contains(x)
}

/// Membership together with the distance-based view of it.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointCheck {
    pub member: bool,
    pub residuals: Vec<f64>,
    /// Every residual is at most `tol`.
    pub residual_zero: bool,
}

impl FixedPointCheck {
    /// Membership and residuals disagree: every `d_i(x, Fx)` vanishes, each
    /// attained by some member of `Fx`, yet `x` itself is not a member.
    pub fn is_degenerate(&self) -> bool {
        self.member != self.residual_zero
    }
}

pub fn fixed_point_check(
    family: &PseudometricFamily,
    map: &MultiMap,
    x: PointId,
    tol: f64,
) -> FixedPointCheck {
    let residuals = residuals(family, map, x);
    FixedPointCheck {
        member: is_fixed_point(map, x),
        residual_zero: residuals.iter().all(|&r| r <= tol),
        residuals,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub driver: Driver,
    /// Defaults to `10 N`.
    pub max_steps: Option<usize>,
    pub tol: f64,
    /// Run even when the family does not separate points.
    pub allow_non_separating: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            driver: Driver::default(),
            max_steps: None,
            tol: DEFAULT_TOL,
            allow_non_separating: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    /// Last point of the orbit; a fixed point when `status` says so.
    pub point: PointId,
    /// `d_i(point, F point)` per index.
    pub residuals: Vec<f64>,
    pub steps: usize,
    pub orbit: OrbitRecord,
    /// Whether the point is a member of its own image.
    pub member: bool,
    pub condition: ConditionReport,
}

impl FixedPointResult {
    pub fn status(&self) -> OrbitStatus {
        self.orbit.status
    }

    pub fn converged(&self) -> bool {
        self.orbit.status == OrbitStatus::FixedPointFound
    }

    /// The exhaustive condition check passed, so a fixed point is guaranteed.
    pub fn certified(&self) -> bool {
        self.condition.certifies()
    }

    /// Residuals vanished at a point outside its own image. Possible even on
    /// separating families, since each `d_i(x, Fx)` may be attained by a
    /// different member of `Fx`.
    pub fn is_degenerate(&self) -> bool {
        self.converged() && !self.member
    }

    /// Certified, but the orbit did not end on a genuine fixed point.
    pub fn is_anomaly(&self) -> bool {
        self.certified() && !(self.converged() && self.member)
    }
}

/// Checks the condition exhaustively, then follows the orbit from `x0`.
///
/// A failed condition does not stop the iteration; the result is simply not
/// certified.
pub fn solve(
    family: &PseudometricFamily,
    map: &MultiMap,
    params: &ContractionParams,
    x0: PointId,
    options: &SolveOptions,
) -> Result<FixedPointResult, Error> {
    family.check_point(x0)?;
    params.check_family(family)?;
    if !options.allow_non_separating {
        if let Some((x, y)) = family.first_inseparable_pair() {
            return Err(Error::NotSeparating(x, y));
        }
    }
    let condition = check_condition_global(family, map, params, options.tol);
    let max_steps = options.max_steps.unwrap_or(10 * family.point_count());
    let orbit = generate_orbit(family, map, x0, options.driver, max_steps, options.tol)?;
    let point = orbit.last();
    Ok(FixedPointResult {
        point,
        residuals: residuals(family, map, point),
        steps: orbit.steps(),
        member: is_fixed_point(map, point),
        orbit,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::Coefficients;

    const P: PointId = PointId(0);
    const Q: PointId = PointId(1);

    fn two_points() -> PseudometricFamily {
        PseudometricFamily::new(2, vec![vec![0.0, 1.0, 1.0, 0.0]]).unwrap()
    }

    fn map_of(family: &PseudometricFamily, images: &[&[usize]]) -> MultiMap {
        MultiMap::new(
            family,
            images
                .iter()
                .map(|ids| CompactSet::new(ids.iter().copied().map(PointId)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn params(a: f64, b: f64, c: f64) -> ContractionParams {
        ContractionParams::uniform(1, Coefficients::new(a, b, c), 1).unwrap()
    }

    fn record(distances: &[f64]) -> OrbitRecord {
        OrbitRecord {
            points: (0..=distances.len()).map(PointId).collect(),
            step_distances: vec![distances.to_vec()],
            driver: Driver::Index(0),
            status: OrbitStatus::MaxStepsReached,
        }
    }

    #[test]
    fn nearest_point_cases() {
        let family = PseudometricFamily::from_matrices(&[vec![
            vec![0.0, 2.0, 5.0],
            vec![2.0, 0.0, 4.0],
            vec![5.0, 4.0, 0.0],
        ]])
        .unwrap();
        let set = |ids: &[usize]| CompactSet::new(ids.iter().copied().map(PointId)).unwrap();
        assert_eq!(nearest_point(&family, 0, P, &set(&[2])), PointId(2));
        assert_eq!(nearest_point(&family, 0, P, &set(&[1, 2])), Q);
        assert_eq!(nearest_point(&family, 0, Q, &set(&[1, 2])), Q);
    }

    #[test]
    fn nearest_point_ties_prefer_lowest_id() {
        // d(p0, p1) = 0 under a pseudometric, and p0 is in the set
        let family = PseudometricFamily::from_matrices(&[vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]])
        .unwrap();
        let set = CompactSet::new([PointId(0), PointId(1)]).unwrap();
        assert_eq!(nearest_point(&family, 0, Q, &set), P);
        let far = CompactSet::new([PointId(0), PointId(1)]).unwrap();
        assert_eq!(nearest_point(&family, 0, PointId(2), &far), P);
        assert_eq!(nearest_point_aggregate(&family, PointId(2), &far), P);
    }

    #[test]
    fn orbit_starting_at_fixed_point() {
        let family = two_points();
        let map = map_of(&family, &[&[0], &[0]]);
        let orbit = generate_orbit(&family, &map, P, Driver::Index(0), 5, DEFAULT_TOL).unwrap();
        assert_eq!(orbit.points, vec![P]);
        assert_eq!(orbit.status, OrbitStatus::FixedPointFound);
        assert_eq!(orbit.steps(), 0);
    }

    #[test]
    fn orbit_one_step_to_sink() {
        let family = two_points();
        let map = map_of(&family, &[&[0], &[0]]);
        let orbit = generate_orbit(&family, &map, Q, Driver::Index(0), 5, DEFAULT_TOL).unwrap();
        assert_eq!(orbit.points, vec![Q, P]);
        assert_eq!(orbit.step_distances, vec![vec![1.0]]);
        assert_eq!(orbit.status, OrbitStatus::FixedPointFound);
    }

    #[test]
    fn swap_orbit_hits_step_limit() {
        let family = two_points();
        let map = map_of(&family, &[&[1], &[0]]);
        let orbit = generate_orbit(&family, &map, P, Driver::Index(0), 4, DEFAULT_TOL).unwrap();
        assert_eq!(orbit.points, vec![P, Q, P, Q, P]);
        assert_eq!(orbit.status, OrbitStatus::MaxStepsReached);
        let aggregate =
            generate_orbit(&family, &map, P, Driver::Aggregate, 4, DEFAULT_TOL).unwrap();
        assert_eq!(aggregate.points, orbit.points);
    }

    #[test]
    fn orbit_argument_errors() {
        let family = two_points();
        let map = map_of(&family, &[&[0], &[0]]);
        assert_eq!(
            generate_orbit(&family, &map, PointId(2), Driver::Index(0), 4, DEFAULT_TOL),
            Err(Error::PointOutOfRange(PointId(2)))
        );
        assert!(matches!(
            generate_orbit(&family, &map, P, Driver::Index(1), 4, DEFAULT_TOL),
            Err(Error::IndexOutOfRange { index: 1, count: 1 })
        ));
        assert_eq!(
            generate_orbit(&family, &map, P, Driver::Index(0), 0, DEFAULT_TOL),
            Err(Error::ZeroSteps)
        );
    }

    #[test]
    fn step_contraction_cases() {
        let p = params(0.0, 0.25, 0.25);
        assert_eq!(
            step_contraction_check(&record(&[0.0, 0.0, 0.0]), &p, DEFAULT_TOL),
            vec![vec![true, true]]
        );
        assert_eq!(
            step_contraction_check(&record(&[1.0, 0.4]), &p, DEFAULT_TOL),
            vec![vec![true]]
        );
        assert_eq!(
            step_contraction_check(&record(&[1.0, 0.6]), &p, DEFAULT_TOL),
            vec![vec![false]]
        );
        assert_eq!(
            step_contraction_check(&record(&[1.0]), &p, DEFAULT_TOL),
            vec![Vec::<bool>::new()]
        );
    }

    #[test]
    fn tail_bound_values() {
        assert_eq!(tail_bound(0, 0.5, 1.0), Ok(2.0));
        assert_eq!(tail_bound(3, 0.5, 1.0), Ok(0.25));
        for n in 0..10 {
            assert_eq!(tail_bound(n, 0.7, 0.0), Ok(0.0));
        }
        assert_eq!(tail_bound(1, 1.0, 1.0), Err(Error::ConstantOutOfRange(1.0)));
        assert_eq!(tail_bound(1, 0.0, 1.0), Err(Error::ConstantOutOfRange(0.0)));
    }

    #[test]
    fn fixed_point_membership() {
        let family = two_points();
        let map = map_of(&family, &[&[0, 1], &[0]]);
        assert!(is_fixed_point(&map, P));
        assert!(!is_fixed_point(&map, Q));
        assert!(!fixed_point_check(&family, &map, Q, DEFAULT_TOL).is_degenerate());
    }

    #[test]
    fn inseparable_pair_is_degenerate() {
        let family = PseudometricFamily::new(2, vec![vec![0.0; 4]]).unwrap();
        let map = map_of(&family, &[&[1], &[0]]);
        let check = fixed_point_check(&family, &map, P, DEFAULT_TOL);
        assert!(!check.member);
        assert!(check.residual_zero);
        assert!(check.is_degenerate());
    }

    #[test]
    fn solve_sink_map() {
        let family = two_points();
        let map = map_of(&family, &[&[0], &[0]]);
        let result = solve(
            &family,
            &map,
            &params(0.0, 0.4, 0.5),
            Q,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(result.certified());
        assert!(result.converged());
        assert_eq!(result.point, P);
        assert_eq!(result.steps, 1);
        assert!(result.member);
        assert_eq!(result.residuals, vec![0.0]);
    }

    #[test]
    fn solve_constant_map_from_everywhere() {
        let family = PseudometricFamily::from_matrices(&[vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ]])
        .unwrap();
        let map = map_of(&family, &[&[2], &[2], &[2]]);
        for x0 in family.points() {
            let result = solve(
                &family,
                &map,
                &params(0.0, 0.4, 0.5),
                x0,
                &SolveOptions::default(),
            )
            .unwrap();
            assert!(result.certified());
            assert_eq!(result.point, PointId(2));
            assert!(result.steps <= 1);
        }
    }

    #[test]
    fn solve_swap_map_is_not_certified() {
        let family = two_points();
        let map = map_of(&family, &[&[1], &[0]]);
        let result = solve(
            &family,
            &map,
            &params(0.0, 0.1, 0.1),
            P,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(!result.certified());
        assert_eq!(result.status(), OrbitStatus::MaxStepsReached);
        assert_eq!(result.steps, 20);
        assert!(!result.is_anomaly());
    }

    #[test]
    fn solve_requires_separation_unless_overridden() {
        let family = PseudometricFamily::new(2, vec![vec![0.0; 4]]).unwrap();
        let map = map_of(&family, &[&[0], &[0]]);
        let p = params(0.0, 0.4, 0.5);
        assert_eq!(
            solve(&family, &map, &p, Q, &SolveOptions::default()),
            Err(Error::NotSeparating(P, Q))
        );
        let options = SolveOptions {
            allow_non_separating: true,
            ..SolveOptions::default()
        };
        let result = solve(&family, &map, &p, Q, &options).unwrap();
        // residual is zero at q already, though q is not in Fq
        assert_eq!(result.steps, 0);
        assert!(!result.member);
    }
}
