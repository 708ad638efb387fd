//! Points of the unit circle `[0, 1)`, the arc metric, the benchmark rate
//! `phi`, and the partition of the circle cut out by a finite point set.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for floating comparisons across the crate.
pub const TOLERANCE: f64 = 1e-12;

/// `1 / (2 ln 2)`, the limit of `n * phi(n)`.
pub const LIMIT_CONSTANT: f64 = 0.5 / LN_2;

/// A coordinate on the unit circle, always reduced into `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);

    /// Reduces any finite real modulo 1.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite(value));
        }
        Ok(Self::reduce(value))
    }

    pub(crate) fn reduce(value: f64) -> Self {
        let r = value - value.floor();
        // -1e-20 reduces to 1.0 after rounding; that is the point 0.
        if r >= 1.0 || r == 0.0 {
            CirclePoint(0.0)
        } else {
            CirclePoint(r)
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CirclePoint {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        CirclePoint::new(value)
    }
}

impl From<CirclePoint> for f64 {
    fn from(p: CirclePoint) -> f64 {
        p.0
    }
}

impl Eq for CirclePoint {}

impl PartialOrd for CirclePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CirclePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The circle distance `dist(s - t, Z)`, in `[0, 1/2]`.
pub fn rho(s: CirclePoint, t: CirclePoint) -> f64 {
    let d = (s.0 - t.0).abs();
    d.min(1.0 - d)
}

/// Length of the arc travelled counter-clockwise from `from` to `to`.
///
/// Coincident endpoints give the whole circle. The wrapping branch is written
/// as `1 - (from - to)` so that it rounds exactly like [`rho`] does.
#[inline]
pub fn arc_length(from: CirclePoint, to: CirclePoint) -> f64 {
    if to.0 > from.0 {
        to.0 - from.0
    } else {
        1.0 - (from.0 - to.0)
    }
}

/// `(ln(n + 1) - ln n) / (2 ln 2)`.
pub fn phi(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIndex);
    }
    // ln_1p avoids the cancellation in ln(n + 1) - ln(n).
    Ok((1.0 / n as f64).ln_1p() / (2.0 * LN_2))
}

/// One arc of a circle partition: starts at `left`, runs counter-clockwise to
/// the next point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcGap {
    pub left: CirclePoint,
    pub length: f64,
}

impl Eq for ArcGap {}

impl PartialOrd for ArcGap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by length, then by left endpoint.
impl Ord for ArcGap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then_with(|| self.left.cmp(&other.left))
    }
}

/// The distinct points inserted so far together with the multiset of arc
/// gaps between neighbours.
///
/// Duplicate insertions leave the geometry alone and only bump a counter; once
/// a duplicate has been seen the minimal distance is reported as 0.
#[derive(Clone, Debug, Default)]
pub struct PartitionState {
    points: BTreeSet<CirclePoint>,
    gaps: BTreeSet<ArcGap>,
    duplicates: usize,
}

impl PartitionState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points<I: IntoIterator<Item = CirclePoint>>(points: I) -> Self {
        let mut state = Self::new();
        for p in points {
            state.insert(p);
        }
        state
    }

    /// Number of distinct points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Distinct points plus duplicates, i.e. the prefix length `n`.
    pub fn inserted(&self) -> usize {
        self.points.len() + self.duplicates
    }

    pub fn points(&self) -> impl Iterator<Item = CirclePoint> + '_ {
        self.points.iter().copied()
    }

    pub fn gaps(&self) -> impl Iterator<Item = ArcGap> + '_ {
        self.gaps.iter().copied()
    }

    fn predecessor(&self, p: CirclePoint) -> CirclePoint {
        self.points
            .range(..p)
            .next_back()
            .or_else(|| self.points.last())
            .copied()
            .expect("non-empty partition")
    }

    fn successor(&self, p: CirclePoint) -> CirclePoint {
        self.points
            .range(p..)
            .next()
            .or_else(|| self.points.first())
            .copied()
            .expect("non-empty partition")
    }

    /// Inserts `p`, splitting the gap that contains it. Returns `false` (and
    /// counts a duplicate) when `p` is already present.
    pub fn insert(&mut self, p: CirclePoint) -> bool {
        if self.points.contains(&p) {
            self.duplicates += 1;
            return false;
        }
        if self.points.is_empty() {
            self.points.insert(p);
            self.gaps.insert(ArcGap { left: p, length: 1.0 });
            return true;
        }

        let left = self.predecessor(p);
        let right = self.successor(p);
        let removed = self.gaps.remove(&ArcGap {
            left,
            length: arc_length(left, right),
        });
        debug_assert!(removed, "gap starting at {left} not tracked");

        self.gaps.insert(ArcGap {
            left,
            length: arc_length(left, p),
        });
        self.gaps.insert(ArcGap {
            left: p,
            length: arc_length(p, right),
        });
        self.points.insert(p);
        true
    }

    /// The longest gap; ties go to the smallest left endpoint.
    pub fn widest_gap(&self) -> Option<ArcGap> {
        let length = self.gaps.last()?.length;
        self.gaps
            .range(
                ArcGap {
                    left: CirclePoint::ZERO,
                    length,
                }..,
            )
            .next()
            .copied()
    }

    /// The shortest gap; ties go to the smallest left endpoint.
    pub fn narrowest_gap(&self) -> Option<ArcGap> {
        self.gaps.first().copied()
    }

    /// `D_n`: half the longest gap.
    pub fn dispersion(&self) -> Option<f64> {
        self.gaps.last().map(|g| g.length / 2.0)
    }

    /// `d_n`: the smallest pairwise distance. Undefined below two inserted
    /// points, 0 once a duplicate has occurred.
    pub fn min_distance(&self) -> Option<f64> {
        if self.inserted() < 2 {
            None
        } else if self.duplicates > 0 {
            Some(0.0)
        } else {
            self.gaps.first().map(|g| g.length)
        }
    }

    /// Gap lengths in non-increasing order, `t_{n,1} >= ... >= t_{n,n}`.
    pub fn sorted_gap_vector(&self) -> Result<Vec<f64>> {
        if self.gaps.is_empty() {
            return Err(Error::EmptyPartition);
        }
        Ok(self.gaps.iter().rev().map(|g| g.length).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64) -> CirclePoint {
        CirclePoint::new(x).unwrap()
    }

    #[test]
    fn reduction_lands_in_unit_interval() {
        assert_eq!(pt(1.25).value(), 0.25);
        assert_eq!(pt(-0.25).value(), 0.75);
        assert_eq!(pt(-1e-20).value(), 0.0);
        assert_eq!(pt(-0.0).value().to_bits(), 0.0f64.to_bits());
        assert_eq!(pt(3.0).value(), 0.0);
        assert!(CirclePoint::new(f64::NAN).is_err());
        assert!(CirclePoint::new(f64::INFINITY).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(pt(0.3), pt(0.3)), 0.0);
        assert_eq!(rho(pt(0.0), pt(0.5)), 0.5);
        assert!((rho(pt(0.25), pt(0.9)) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1).unwrap(), 0.5);
        // log2(3/2)/2 and log2(4/3)/2, 40-digit reference values.
        assert!((phi(2).unwrap() - 0.292_481_250_360_578_09).abs() < 1e-16);
        assert!((phi(3).unwrap() - 0.207_518_749_639_421_91).abs() < 1e-16);
        assert!((phi(2).unwrap() + phi(3).unwrap() - 0.5).abs() < 1e-16);
        assert!(matches!(phi(0), Err(Error::ZeroIndex)));
    }

    #[test]
    fn insert_bisects_single_gap() {
        let mut s = PartitionState::new();
        s.insert(pt(0.0));
        assert_eq!(s.sorted_gap_vector().unwrap(), vec![1.0]);
        assert!(s.insert(pt(0.5)));
        assert_eq!(s.sorted_gap_vector().unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn insert_splits_log_odd_prefix() {
        let mut s = PartitionState::from_points([pt(0.0), pt(0.584_962_5)]);
        assert_eq!(s.sorted_gap_vector().unwrap(), vec![0.584_962_5, 1.0 - 0.584_962_5]);
        s.insert(pt(0.321_928_1));
        let v = s.sorted_gap_vector().unwrap();
        let want = [0.415_037_5, 0.321_928_1, 0.263_034_4];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
        assert_eq!(s.dispersion().unwrap(), v[0] / 2.0);
        assert_eq!(s.min_distance().unwrap(), v[2]);
    }

    #[test]
    fn duplicate_leaves_geometry_and_zeroes_min_distance() {
        let mut s = PartitionState::from_points([pt(0.0)]);
        assert_eq!(s.min_distance(), None);
        assert!(!s.insert(pt(0.0)));
        assert_eq!(s.duplicates(), 1);
        assert_eq!(s.sorted_gap_vector().unwrap(), vec![1.0]);
        assert_eq!(s.min_distance(), Some(0.0));
        assert_eq!(s.dispersion(), Some(0.5));
    }

    #[test]
    fn empty_partition_has_no_gap_vector() {
        let s = PartitionState::new();
        assert!(matches!(s.sorted_gap_vector(), Err(Error::EmptyPartition)));
        assert_eq!(s.dispersion(), None);
        assert_eq!(s.widest_gap(), None);
    }

    #[test]
    fn widest_gap_ties_break_to_smallest_left() {
        let s = PartitionState::from_points([pt(0.5), pt(0.0)]);
        assert_eq!(s.widest_gap().unwrap().left, pt(0.0));
        assert_eq!(s.narrowest_gap().unwrap().left, pt(0.0));
    }

    #[test]
    fn translation_does_not_change_gaps() {
        let base = [0.0, 0.1, 0.45, 0.8];
        let a = PartitionState::from_points(base.map(pt)).sorted_gap_vector().unwrap();
        let b = PartitionState::from_points(base.map(|x| pt(x + 0.37)))
            .sorted_gap_vector()
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
