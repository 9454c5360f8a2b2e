//! Finite uniform spaces given by an indexed family of pseudometric tables.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, DEFAULT_TOL};

/// Index of a point in a [`PseudometricFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A finite point set `X` with pseudometrics `d_0, ..., d_{M-1}`, each stored
/// as a dense row-major `N x N` table.
///
/// Construction only checks shapes. Use [`validate`](Self::validate) to check
/// the pseudometric axioms; a family with axiom violations can still be built
/// so that every violation can be reported at once.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudometricFamily {
    point_count: usize,
    tables: Vec<Vec<f64>>,
    separating: bool,
}

impl PseudometricFamily {
    /// Builds a family from flat row-major tables of length `point_count^2`.
    pub fn new(point_count: usize, tables: Vec<Vec<f64>>) -> Result<Self, Error> {
        if point_count == 0 {
            return Err(Error::NoPoints);
        }
        if tables.is_empty() {
            return Err(Error::NoPseudometrics);
        }
        let expected = point_count * point_count;
        for (index, table) in tables.iter().enumerate() {
            if table.len() != expected {
                return Err(Error::TableShape {
                    index,
                    points: point_count,
                    expected,
                    found: table.len(),
                });
            }
        }
        let mut family = PseudometricFamily {
            point_count,
            tables,
            separating: false,
        };
        family.separating = family.first_inseparable_pair().is_none();
        Ok(family)
    }

    /// Builds a family from nested matrices, one `N x N` matrix per index.
    pub fn from_matrices(matrices: &[Vec<Vec<f64>>]) -> Result<Self, Error> {
        let point_count = matrices.first().map_or(0, Vec::len);
        let mut tables = Vec::with_capacity(matrices.len());
        for (index, matrix) in matrices.iter().enumerate() {
            let mut flat = Vec::with_capacity(point_count * point_count);
            for row in matrix {
                if row.len() != point_count || matrix.len() != point_count {
                    return Err(Error::TableShape {
                        index,
                        points: point_count,
                        expected: point_count * point_count,
                        found: matrix.iter().map(Vec::len).sum(),
                    });
                }
                flat.extend_from_slice(row);
            }
            tables.push(flat);
        }
        Self::new(point_count, tables)
    }

    #[inline]
    pub fn point_count(&self) -> usize {
        self.point_count
    }

    #[inline]
    pub fn index_count(&self) -> usize {
        self.tables.len()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + Clone {
        (0..self.point_count).map(PointId)
    }

    /// Whether every pair of distinct points is separated by some `d_i`
    /// (distance above [`DEFAULT_TOL`]). This is the Hausdorff property of the
    /// induced uniformity.
    #[inline]
    pub fn is_separating(&self) -> bool {
        self.separating
    }

    /// The `i`-th table as a flat row-major slice.
    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i]
    }

    pub fn check_point(&self, x: PointId) -> Result<(), Error> {
        if x.0 < self.point_count {
            Ok(())
        } else {
            Err(Error::PointOutOfRange(x))
        }
    }

    pub fn check_index(&self, i: usize) -> Result<(), Error> {
        if i < self.tables.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                count: self.tables.len(),
            })
        }
    }

    /// `d_i(x, y)`.
    ///
    /// # Panics
    ///
    /// If `i` or either point is out of range.
    #[inline]
    pub fn distance(&self, i: usize, x: PointId, y: PointId) -> f64 {
        assert!(x.0 < self.point_count && y.0 < self.point_count);
        self.tables[i][x.0 * self.point_count + y.0]
    }

    /// `d_i(x, A) = min_{a in A} d_i(x, a)`.
    pub fn point_to_set_distance(&self, i: usize, x: PointId, set: &CompactSet) -> f64 {
        set.iter()
            .map(|a| self.distance(i, x, a))
            .fold(f64::INFINITY, f64::min)
    }

    /// `Δ*(A)`: the largest `d_i(x, y)` over all indices and all pairs in `A`.
    pub fn augmented_diameter(&self, set: &CompactSet) -> f64 {
        let mut diameter = 0.0_f64;
        for i in 0..self.index_count() {
            for x in set.iter() {
                for y in set.iter() {
                    diameter = diameter.max(self.distance(i, x, y));
                }
            }
        }
        diameter
    }

    /// Pairs `x < y` with `d_i(x, y) <= DEFAULT_TOL` for every index.
    pub fn inseparable_pairs(&self) -> Vec<(PointId, PointId)> {
        let mut pairs = Vec::new();
        for x in 0..self.point_count {
            for y in (x + 1)..self.point_count {
                if self.is_inseparable(PointId(x), PointId(y)) {
                    pairs.push((PointId(x), PointId(y)));
                }
            }
        }
        pairs
    }

    pub(crate) fn first_inseparable_pair(&self) -> Option<(PointId, PointId)> {
        for x in 0..self.point_count {
            for y in (x + 1)..self.point_count {
                if self.is_inseparable(PointId(x), PointId(y)) {
                    return Some((PointId(x), PointId(y)));
                }
            }
        }
        None
    }

    fn is_inseparable(&self, x: PointId, y: PointId) -> bool {
        (0..self.index_count())
            .all(|i| self.distance(i, x, y) <= DEFAULT_TOL && self.distance(i, y, x) <= DEFAULT_TOL)
    }

    /// Checks every pseudometric axiom on every table and reports all
    /// violations found. Comparisons absorb an absolute error of `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let n = self.point_count;
        let mut violations = Vec::new();
        for i in 0..self.index_count() {
            for x in 0..n {
                for y in 0..n {
                    let value = self.distance(i, PointId(x), PointId(y));
                    if !value.is_finite() {
                        violations.push(Violation::NonFinite {
                            index: i,
                            x: PointId(x),
                            y: PointId(y),
                            value,
                        });
                    } else if value < -tol {
                        violations.push(Violation::Negative {
                            index: i,
                            x: PointId(x),
                            y: PointId(y),
                            value,
                        });
                    }
                }
            }
            for x in 0..n {
                let value = self.distance(i, PointId(x), PointId(x));
                if value.is_finite() && value.abs() > tol {
                    violations.push(Violation::NonZeroDiagonal {
                        index: i,
                        x: PointId(x),
                        value,
                    });
                }
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    let forward = self.distance(i, PointId(x), PointId(y));
                    let backward = self.distance(i, PointId(y), PointId(x));
                    if (forward - backward).abs() > tol {
                        violations.push(Violation::Asymmetric {
                            index: i,
                            x: PointId(x),
                            y: PointId(y),
                            forward,
                            backward,
                        });
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let (px, py, pz) = (PointId(x), PointId(y), PointId(z));
                        let direct = self.distance(i, px, pz);
                        let via = self.distance(i, px, py) + self.distance(i, py, pz);
                        if direct > via + tol {
                            violations.push(Violation::Triangle {
                                index: i,
                                x: px,
                                y: py,
                                z: pz,
                                direct,
                                via,
                            });
                        }
                    }
                }
            }
        }
        ValidationReport {
            violations,
            separating: self.separating,
            inseparable: self.inseparable_pairs(),
        }
    }
}

/// One failed pseudometric axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite {
        index: usize,
        x: PointId,
        y: PointId,
        value: f64,
    },
    Negative {
        index: usize,
        x: PointId,
        y: PointId,
        value: f64,
    },
    NonZeroDiagonal {
        index: usize,
        x: PointId,
        value: f64,
    },
    Asymmetric {
        index: usize,
        x: PointId,
        y: PointId,
        forward: f64,
        backward: f64,
    },
    /// `d_i(x, z) > d_i(x, y) + d_i(y, z)`.
    Triangle {
        index: usize,
        x: PointId,
        y: PointId,
        z: PointId,
        direct: f64,
        via: f64,
    },
}

impl Violation {
    pub fn index(&self) -> usize {
        match *self {
            Violation::NonFinite { index, .. }
            | Violation::Negative { index, .. }
            | Violation::NonZeroDiagonal { index, .. }
            | Violation::Asymmetric { index, .. }
            | Violation::Triangle { index, .. } => index,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub separating: bool,
    /// Pairs of distinct points no pseudometric tells apart.
    pub inseparable: Vec<(PointId, PointId)>,
}

impl ValidationReport {
    /// Valid means every axiom holds; separation is reported but not required.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A nonempty finite subset of `X`, stored sorted and without duplicates.
///
/// In a finite space every such subset is closed, compact and bounded, so this
/// is exactly an element of the hyperspace `2^X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompactSet {
    members: Vec<PointId>,
}

impl CompactSet {
    pub fn new<I: IntoIterator<Item = PointId>>(members: I) -> Result<Self, Error> {
        let mut members: Vec<PointId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        members.sort_unstable();
        members.dedup();
        Ok(CompactSet { members })
    }

    pub fn singleton(x: PointId) -> Self {
        CompactSet {
            members: alloc::vec![x],
        }
    }

    /// The whole space `{0, ..., n-1}`; `None` when `n == 0`.
    pub fn full(n: usize) -> Option<Self> {
        Self::new((0..n).map(PointId)).ok()
    }

    /// Set whose members are the set bits of `bits`; `None` for `0`.
    pub fn from_bits(bits: u64) -> Option<Self> {
        let members: Vec<PointId> = (0..64)
            .filter(|k| bits & (1u64 << k) != 0)
            .map(PointId)
            .collect();
        Self::new(members).ok()
    }

    #[inline]
    pub fn members(&self) -> &[PointId] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + Clone + '_ {
        self.members.iter().copied()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always `false`; present for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: PointId) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &CompactSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// The largest member, used for range checks.
    pub fn max_point(&self) -> PointId {
        self.members[self.members.len() - 1]
    }
}
