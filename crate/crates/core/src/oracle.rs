//! Brute-force ground truth and seeded instance generation.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contraction::{
    check_condition_global, check_single_valued_global, uniqueness_applicable, Coefficients,
    ContractionParams, MultiMap, SingleValuedMap,
};
use crate::space::{CompactSet, PointId, PseudometricFamily};
use crate::{Error, DEFAULT_TOL};

/// Every `x` with `x` in `Fx`, in increasing order.
pub fn enumerate_fixed_points(map: &MultiMap) -> Vec<PointId> {
    (0..map.point_count())
        .map(PointId)
        .filter(|&x| map.image(x).contains(x))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotApplicable {
    /// The single-valued condition fails somewhere.
    ConditionFails,
    /// No index has `a_i > c_i > 0`.
    GateClosed,
    /// The family does not separate points.
    NotSeparating,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniquenessVerdict {
    /// Hypotheses hold and the brute-force count is exactly one.
    Unique(PointId),
    /// Hypotheses hold but the brute-force count is not one.
    Counterexample {
        fixed_points: Vec<PointId>,
    },
    NotApplicable(NotApplicable),
}

/// Verifies the uniqueness hypotheses for `map`, then counts its fixed points
/// by enumeration.
pub fn certify_uniqueness(
    family: &PseudometricFamily,
    map: &SingleValuedMap,
    params: &ContractionParams,
    tol: f64,
) -> UniquenessVerdict {
    if !family.is_separating() {
        return UniquenessVerdict::NotApplicable(NotApplicable::NotSeparating);
    }
    if !uniqueness_applicable(params).contains(&true) {
        return UniquenessVerdict::NotApplicable(NotApplicable::GateClosed);
    }
    if !check_single_valued_global(family, map, params, tol).certifies() {
        return UniquenessVerdict::NotApplicable(NotApplicable::ConditionFails);
    }
    let fixed_points = enumerate_fixed_points(&map.lift());
    match fixed_points.as_slice() {
        [z] => UniquenessVerdict::Unique(*z),
        _ => UniquenessVerdict::Counterexample { fixed_points },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// `Fx = {z}` for a random `z`.
    Constant,
    /// A random self-map `T`, lifted to `Fx = {Tx}`.
    LiftedSingleValued,
    /// Random images of one to three points.
    RandomMultivalued,
    /// Contraction toward a random sink `z`: `Fx` holds the point nearest to
    /// `x` among those within `shrink * d_0(x, z)` of `z`, plus up to two more
    /// points from that ball.
    Sink,
    /// The single-valued core of [`MapKind::Sink`], lifted.
    LiftedSink,
}

/// Nearest point to `x` (under `d_0`, lowest id on ties) among those within
/// `shrink * d_0(x, z)` of `z`. The ball always contains `z`.
fn sink_step(family: &PseudometricFamily, x: PointId, z: PointId, shrink: f64) -> PointId {
    let reach = shrink * family.distance(0, x, z);
    family
        .points()
        .filter(|&w| family.distance(0, w, z) <= reach)
        .fold(z, |best, w| {
            let (dw, db) = (family.distance(0, x, w), family.distance(0, x, best));
            if dw < db || (dw == db && w < best) {
                w
            } else {
                best
            }
        })
}

/// Inclusive sampling ranges for the contraction parameters. Pairs `(b, c)`
/// are redrawn until `0 < b + c < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRanges {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
    pub r: (u32, u32),
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            a: (0.0, 0.0),
            b: (0.05, 0.6),
            c: (0.05, 0.35),
            r: (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceProfile {
    pub point_count: usize,
    pub index_count: usize,
    pub map_kind: MapKind,
    pub seed: u64,
    pub ranges: ParamRanges,
    /// Probability of each non-tree edge in the random graphs.
    pub edge_probability: f64,
    /// Probability that an edge weighs zero, making `d_i` a pseudometric.
    pub zero_edge_probability: f64,
    /// Attempts before giving up on a certified instance.
    pub budget: u32,
}

impl InstanceProfile {
    pub fn new(map_kind: MapKind, point_count: usize, index_count: usize, seed: u64) -> Self {
        InstanceProfile {
            point_count,
            index_count,
            map_kind,
            seed,
            ranges: ParamRanges::default(),
            edge_probability: 0.3,
            zero_edge_probability: 0.0,
            budget: 10_000,
        }
    }

    pub fn with_ranges(mut self, ranges: ParamRanges) -> Self {
        self.ranges = ranges;
        self
    }

    fn validate(&self) -> Result<(), Error> {
        let r = &self.ranges;
        if self.point_count == 0 {
            return Err(Error::Profile("point count must be at least 1"));
        }
        if self.index_count == 0 {
            return Err(Error::Profile("index count must be at least 1"));
        }
        if r.r.0 < 1 || r.r.0 > r.r.1 {
            return Err(Error::Profile("exponent range must satisfy 1 <= lo <= hi"));
        }
        for (lo, hi) in [r.a, r.b, r.c] {
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Profile(
                    "coefficient ranges must be finite with lo <= hi",
                ));
            }
        }
        if r.b.0 + r.c.0 >= 1.0 || r.b.1 + r.c.1 <= 0.0 {
            return Err(Error::Profile("ranges leave no b, c with 0 < b + c < 1"));
        }
        for p in [self.edge_probability, self.zero_edge_probability] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Profile("probabilities must lie in [0, 1]"));
            }
        }
        if self.zero_edge_probability >= 1.0 && self.point_count > 1 {
            return Err(Error::Profile("all-zero weights cannot separate points"));
        }
        if self.budget == 0 {
            return Err(Error::Profile("budget must be at least 1"));
        }
        Ok(())
    }
}

/// A generated, certified instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub family: PseudometricFamily,
    pub map: MultiMap,
    pub params: ContractionParams,
    /// The self-map behind `map` for the lifted kinds.
    pub single_valued: Option<SingleValuedMap>,
    /// Attempts used, including the successful one.
    pub attempts: u32,
}

/// Draws instances from `profile` until one passes the exhaustive condition
/// check. Deterministic in `profile.seed`.
pub fn generate_instance(profile: &InstanceProfile) -> Result<Instance, Error> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    for attempt in 1..=profile.budget {
        let family = random_separating_family(
            &mut rng,
            profile.point_count,
            profile.index_count,
            profile.edge_probability,
            profile.zero_edge_probability,
        );
        let params = random_params(&mut rng, &profile.ranges, profile.index_count);
        let (map, single_valued) = random_map(&mut rng, &family, profile.map_kind);
        if check_condition_global(&family, &map, &params, DEFAULT_TOL).certifies() {
            return Ok(Instance {
                family,
                map,
                params,
                single_valued,
                attempts: attempt,
            });
        }
    }
    Err(Error::GenerationFailed {
        attempts: profile.budget,
    })
}

/// Shortest-path distances of a random connected graph with weights drawn
/// from `[0.5, 5]` in steps of `0.001`, each zeroed with probability
/// `zero_edge_probability`. Always a valid pseudometric; a metric when no
/// weight is zero.
pub fn random_pseudometric<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    edge_probability: f64,
    zero_edge_probability: f64,
) -> Vec<f64> {
    let weight = |rng: &mut R| {
        if rng.gen_bool(zero_edge_probability) {
            0.0
        } else {
            f64::from(rng.gen_range(500u32..=5000)) / 1000.0
        }
    };
    let mut table = vec![f64::INFINITY; n * n];
    for x in 0..n {
        table[x * n + x] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 1..n {
        let (u, v) = (order[k], order[rng.gen_range(0..k)]);
        let w = weight(rng);
        table[u * n + v] = w;
        table[v * n + u] = w;
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if table[u * n + v].is_infinite() && rng.gen_bool(edge_probability) {
                let w = weight(rng);
                table[u * n + v] = w;
                table[v * n + u] = w;
            }
        }
    }
    for k in 0..n {
        for u in 0..n {
            for v in 0..n {
                let via = table[u * n + k] + table[k * n + v];
                if via < table[u * n + v] {
                    table[u * n + v] = via;
                }
            }
        }
    }
    table
}

/// A family of `m` random pseudometrics; may fail to separate points when
/// `zero_edge_probability > 0`.
pub fn random_family<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    edge_probability: f64,
    zero_edge_probability: f64,
) -> PseudometricFamily {
    let tables = (0..m)
        .map(|_| random_pseudometric(rng, n, edge_probability, zero_edge_probability))
        .collect();
    PseudometricFamily::new(n, tables).expect("generated tables have the declared shape")
}

fn random_separating_family<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    edge_probability: f64,
    zero_edge_probability: f64,
) -> PseudometricFamily {
    loop {
        let family = random_family(rng, n, m, edge_probability, zero_edge_probability);
        if family.is_separating() {
            return family;
        }
    }
}

fn sample(rng: &mut (impl Rng + ?Sized), (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn random_params<R: Rng + ?Sized>(
    rng: &mut R,
    ranges: &ParamRanges,
    m: usize,
) -> ContractionParams {
    let r = rng.gen_range(ranges.r.0..=ranges.r.1);
    let coeffs = (0..m)
        .map(|_| {
            let a = sample(rng, ranges.a);
            loop {
                let (b, c) = (sample(rng, ranges.b), sample(rng, ranges.c));
                if b + c > 0.0 && b + c < 1.0 {
                    break Coefficients::new(a, b, c);
                }
            }
        })
        .collect();
    ContractionParams::new(r, coeffs).expect("sampled coefficients satisfy 0 < b + c < 1")
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, pool: &[PointId], max_len: usize) -> CompactSet {
    let len = rng.gen_range(1..=max_len.min(pool.len()));
    CompactSet::new(pool.choose_multiple(rng, len).copied()).expect("pool is nonempty")
}

fn random_map<R: Rng + ?Sized>(
    rng: &mut R,
    family: &PseudometricFamily,
    kind: MapKind,
) -> (MultiMap, Option<SingleValuedMap>) {
    let n = family.point_count();
    let all: Vec<PointId> = family.points().collect();
    let images = match kind {
        MapKind::Constant => {
            let z = PointId(rng.gen_range(0..n));
            vec![CompactSet::singleton(z); n]
        }
        MapKind::LiftedSingleValued => {
            let targets = (0..n).map(|_| PointId(rng.gen_range(0..n))).collect();
            let map = SingleValuedMap::new(family, targets).expect("targets are in range");
            return (map.lift(), Some(map));
        }
        MapKind::RandomMultivalued => (0..n).map(|_| random_subset(rng, &all, 3)).collect(),
        MapKind::Sink | MapKind::LiftedSink => {
            let z = PointId(rng.gen_range(0..n));
            let shrink: f64 = rng.gen_range(0.2..=0.6);
            let targets: Vec<PointId> = family
                .points()
                .map(|x| sink_step(family, x, z, shrink))
                .collect();
            if kind == MapKind::LiftedSink {
                let map = SingleValuedMap::new(family, targets).expect("targets are in range");
                return (map.lift(), Some(map));
            }
            family
                .points()
                .zip(targets)
                .map(|(x, target)| {
                    let reach = shrink * family.distance(0, x, z);
                    let pool: Vec<PointId> = family
                        .points()
                        .filter(|&w| family.distance(0, w, z) <= reach)
                        .collect();
                    let extra = random_subset(rng, &pool, 2);
                    CompactSet::new(extra.iter().chain([target])).expect("nonempty")
                })
                .collect()
        }
    };
    (
        MultiMap::new(family, images).expect("images are in range"),
        None,
    )
}
