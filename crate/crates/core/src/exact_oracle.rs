//! Error-free check of the log-odd gap structure.
//!
//! Every arc between neighbouring log-odd points is `log2` of the ratio of
//! their dyadic mantissas (the arc closing the circle has ratio
//! `2 * smallest / largest`). Since `log2` is strictly increasing, the claims
//! `D_n = phi_n` and `d_n = 2 phi_{2n-1}` are equivalent to the rational
//! identities `max ratio = (n + 1) / n` and `min ratio = 2n / (2n - 1)`,
//! which this module checks with integers only.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sequences::{log_odd_mantissa, DyadicMantissa};

/// A positive rational `num / den`, not necessarily reduced. Equality and
/// ordering are by value.
#[derive(Clone, Debug)]
pub struct ExactRatio {
    num: BigUint,
    den: BigUint,
}

impl ExactRatio {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self { num, den }
    }

    pub fn from_u64(num: u64, den: u64) -> Self {
        Self::new(BigUint::from(num), BigUint::from(den))
    }

    /// Lowest-terms numerator and denominator.
    pub fn reduced(&self) -> (BigUint, BigUint) {
        let g = self.num.gcd(&self.den);
        (&self.num / &g, &self.den / &g)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.num.bits().max(self.den.bits()).saturating_sub(64);
        let n = (&self.num >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (&self.den >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    /// Ratio of `to` over `from`, wrapped through 2 when `to` is not above
    /// `from` (the arc that passes 0 on the circle).
    fn between(from: &DyadicMantissa, to: &DyadicMantissa) -> Self {
        let wrap = u64::from(to <= from);
        let up = from.exponent() + wrap;
        let down = to.exponent();
        let common = up.min(down);
        Self {
            num: to.numerator() << (up - common),
            den: from.numerator() << (down - common),
        }
    }
}

fn small(x: &BigUint) -> Option<u64> {
    if x.bits() <= 63 {
        x.to_u64()
    } else {
        None
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b), Some(c), Some(d)) =
            (small(&self.num), small(&self.den), small(&other.num), small(&other.den))
        {
            return (a as u128 * d as u128).cmp(&(c as u128 * b as u128));
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ExactRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactRatio {}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.reduced();
        write!(f, "{n}/{d}")
    }
}

impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (n, d) = self.reduced();
        let mut s = serializer.serialize_struct("ExactRatio", 2)?;
        s.serialize_field("num", &n.to_string())?;
        s.serialize_field("den", &d.to_string())?;
        s.end()
    }
}

/// Two circularly adjacent mantissas and the ratio between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjacentPair {
    pub left: DyadicMantissa,
    pub right: DyadicMantissa,
    pub ratio: ExactRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremes {
    /// Realizes the longest arc, `2 D_n = log2(max.ratio)`.
    pub max: AdjacentPair,
    /// Realizes the shortest arc, `d_n = log2(min.ratio)`. Needs two points.
    pub min: Option<AdjacentPair>,
}

/// Mantissas in exact order plus the multiset of adjacency ratios, keyed by
/// ratio with the left endpoints that produce it.
#[derive(Clone, Debug, Default)]
pub struct MantissaLedger {
    sorted: BTreeSet<DyadicMantissa>,
    ratios: BTreeMap<ExactRatio, BTreeSet<DyadicMantissa>>,
}

impl MantissaLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn mantissas(&self) -> impl Iterator<Item = &DyadicMantissa> {
        self.sorted.iter()
    }

    fn successor(&self, m: &DyadicMantissa) -> &DyadicMantissa {
        use std::ops::Bound::{Excluded, Unbounded};
        self.sorted
            .range((Excluded(m), Unbounded))
            .next()
            .or_else(|| self.sorted.first())
            .expect("non-empty ledger")
    }

    fn predecessor(&self, m: &DyadicMantissa) -> &DyadicMantissa {
        self.sorted
            .range(..m)
            .next_back()
            .or_else(|| self.sorted.last())
            .expect("non-empty ledger")
    }

    fn add_ratio(&mut self, left: DyadicMantissa, right: &DyadicMantissa) {
        let r = ExactRatio::between(&left, right);
        self.ratios.entry(r).or_default().insert(left);
    }

    fn remove_ratio(&mut self, left: &DyadicMantissa, right: &DyadicMantissa) {
        let r = ExactRatio::between(left, right);
        let lefts = self.ratios.get_mut(&r).expect("tracked ratio");
        lefts.remove(left);
        if lefts.is_empty() {
            self.ratios.remove(&r);
        }
    }

    /// Inserts `m` in exact order, replacing the ratio of the arc it splits by
    /// the two new ones.
    pub fn insert(&mut self, m: DyadicMantissa) -> Result<()> {
        if self.sorted.contains(&m) {
            return Err(Error::DuplicateMantissa(m.to_string()));
        }
        if self.sorted.is_empty() {
            self.add_ratio(m.clone(), &m);
            self.sorted.insert(m);
            return Ok(());
        }
        let left = self.predecessor(&m).clone();
        let right = self.successor(&m).clone();
        self.remove_ratio(&left, &right);
        self.add_ratio(left, &m);
        self.add_ratio(m.clone(), &right);
        self.sorted.insert(m);
        Ok(())
    }

    fn pair(&self, ratio: &ExactRatio, lefts: &BTreeSet<DyadicMantissa>) -> AdjacentPair {
        // Ties go to the smallest left endpoint.
        let left = lefts.first().expect("non-empty ratio class").clone();
        let right = self.successor(&left).clone();
        let (n, d) = ratio.reduced();
        AdjacentPair {
            left,
            right,
            ratio: ExactRatio::new(n, d),
        }
    }

    /// Largest and smallest adjacency ratio, wraparound included.
    pub fn extreme_ratios(&self) -> Result<Extremes> {
        let (max_r, max_l) = self.ratios.last_key_value().ok_or(Error::EmptyPartition)?;
        let max = self.pair(max_r, max_l);
        let min = if self.sorted.len() >= 2 {
            let (r, l) = self.ratios.first_key_value().expect("non-empty");
            Some(self.pair(r, l))
        } else {
            None
        };
        Ok(Extremes { max, min })
    }

    /// Product of all adjacency ratios; equals 2 for any non-empty ledger.
    pub fn ratio_product(&self) -> ExactRatio {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (r, lefts) in &self.ratios {
            for _ in lefts {
                num *= &r.num;
                den *= &r.den;
            }
        }
        ExactRatio::new(num, den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Violation {
    pub n: u64,
    pub quantity: Quantity,
    pub expected: ExactRatio,
    pub found: ExactRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Witness {
    pub n: u64,
    #[serde(flatten)]
    pub extremes: Extremes,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Report {
    pub n_max: u64,
    pub violations: Vec<Example1Violation>,
    /// Per-n adjacent pairs realizing the extremes; empty when witnesses were
    /// not requested.
    pub witnesses: Vec<Example1Witness>,
}

impl Example1Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Feeds `mantissas` into a fresh ledger and, after the n-th insertion,
/// checks `max ratio = (n+1)/n` and (for `n >= 2`) `min ratio = 2n/(2n-1)`.
pub fn verify_mantissa_prefixes<I>(mantissas: I, keep_witnesses: bool) -> Result<Example1Report>
where
    I: IntoIterator<Item = DyadicMantissa>,
{
    let mut ledger = MantissaLedger::new();
    let mut report = Example1Report {
        n_max: 0,
        violations: Vec::new(),
        witnesses: Vec::new(),
    };
    for (i, m) in mantissas.into_iter().enumerate() {
        let n = i as u64 + 1;
        ledger.insert(m)?;
        let ext = ledger.extreme_ratios()?;

        let want_max = ExactRatio::from_u64(n + 1, n);
        if ext.max.ratio != want_max {
            report.violations.push(Example1Violation {
                n,
                quantity: Quantity::Max,
                expected: want_max,
                found: ext.max.ratio.clone(),
            });
        }
        if let Some(min) = &ext.min {
            let want_min = ExactRatio::from_u64(2 * n, 2 * n - 1);
            if min.ratio != want_min {
                report.violations.push(Example1Violation {
                    n,
                    quantity: Quantity::Min,
                    expected: want_min,
                    found: min.ratio.clone(),
                });
            }
        }
        if keep_witnesses {
            report.witnesses.push(Example1Witness { n, extremes: ext });
        }
        report.n_max = n;
    }
    Ok(report)
}

/// Exact check of the log-odd extremes for every prefix `n <= n_max`.
pub fn verify_example1(n_max: u64, keep_witnesses: bool) -> Example1Report {
    let mantissas = (1..=n_max).map(|k| log_odd_mantissa(k).expect("k >= 1"));
    // Distinct k give distinct odd numerators, so the ledger never rejects.
    verify_mantissa_prefixes(mantissas, keep_witnesses).expect("log-odd mantissas are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> DyadicMantissa {
        DyadicMantissa::from_odd(BigUint::from(n)).unwrap()
    }

    fn r(n: u64, d: u64) -> ExactRatio {
        ExactRatio::from_u64(n, d)
    }

    #[test]
    fn insert_keeps_exact_order() {
        let mut l = MantissaLedger::new();
        l.insert(m(1)).unwrap();
        l.insert(m(3)).unwrap();
        assert_eq!(l.mantissas().cloned().collect::<Vec<_>>(), vec![m(1), m(3)]);
        l.insert(m(5)).unwrap();
        assert_eq!(l.mantissas().cloned().collect::<Vec<_>>(), vec![m(1), m(5), m(3)]);
        l.insert(m(7)).unwrap();
        assert_eq!(l.mantissas().cloned().collect::<Vec<_>>(), vec![m(1), m(5), m(3), m(7)]);
        assert!(matches!(l.insert(m(3)), Err(Error::DuplicateMantissa(_))));
    }

    #[test]
    fn extremes_single_point() {
        let mut l = MantissaLedger::new();
        assert!(l.extreme_ratios().is_err());
        l.insert(m(1)).unwrap();
        let e = l.extreme_ratios().unwrap();
        assert_eq!(e.max.ratio, r(2, 1));
        assert!(e.min.is_none());
    }

    #[test]
    fn extremes_two_and_three_points() {
        let mut l = MantissaLedger::new();
        l.insert(m(1)).unwrap();
        l.insert(m(3)).unwrap();
        let e = l.extreme_ratios().unwrap();
        assert_eq!(e.max.ratio, r(3, 2));
        assert_eq!(e.min.unwrap().ratio, r(4, 3));

        l.insert(m(5)).unwrap();
        let e = l.extreme_ratios().unwrap();
        // Ratios are 5/4, 6/5 and the wraparound 2 / (3/2) = 4/3.
        assert_eq!(e.max.ratio, r(4, 3));
        assert_eq!((e.max.left.clone(), e.max.right.clone()), (m(3), m(1)));
        let min = e.min.unwrap();
        assert_eq!(min.ratio, r(6, 5));
        assert_eq!((min.left, min.right), (m(5), m(3)));
    }

    #[test]
    fn ratio_identity_is_value_based() {
        assert_eq!(r(4, 3), r(8, 6));
        assert!(r(6, 5) < r(5, 4));
        let big = ExactRatio::new(BigUint::from(4u32) << 100u32, BigUint::from(3u32) << 100u32);
        assert_eq!(big, r(4, 3));
        assert_eq!(big.to_string(), "4/3");
    }

    #[test]
    fn product_of_ratios_is_two() {
        let mut l = MantissaLedger::new();
        for k in 1..=40 {
            l.insert(log_odd_mantissa(k).unwrap()).unwrap();
            assert_eq!(l.ratio_product(), r(2, 1), "n = {k}");
        }
    }

    #[test]
    fn verify_small_prefix() {
        let rep = verify_example1(3, true);
        assert!(rep.is_clean());
        assert_eq!(rep.n_max, 3);
        assert_eq!(rep.witnesses.len(), 3);
        let w3 = &rep.witnesses[2].extremes;
        assert_eq!(w3.max.ratio, r(4, 3));
        assert_eq!(w3.min.as_ref().unwrap().ratio, r(6, 5));
    }

    #[test]
    fn verify_flags_corrupted_prefix() {
        // Drop k = 2.
        let ms = [1, 3, 4].map(|k| log_odd_mantissa(k).unwrap());
        let rep = verify_mantissa_prefixes(ms, false).unwrap();
        assert!(!rep.is_clean());
        assert!(rep.violations.iter().any(|v| v.n == 3));
        assert!(rep.witnesses.is_empty());
    }

    #[test]
    fn report_serializes_integers_as_strings() {
        let rep = verify_example1(2, true);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["n_max"], 2);
        assert_eq!(json["witnesses"][1]["max"]["ratio"]["num"], "3");
        assert_eq!(json["witnesses"][1]["min"]["ratio"]["den"], "3");
        assert_eq!(json["witnesses"][1]["max"]["left"]["numerator"], "1");
    }
}
