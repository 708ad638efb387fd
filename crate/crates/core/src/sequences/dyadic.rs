use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `numerator / 2^exponent` with an odd numerator and
/// `2^exponent <= numerator < 2^(exponent + 1)`, i.e. a value in `[1, 2)`.
///
/// The log-odd point `y_k` is exactly `log2` of the mantissa of `2k - 1`, so
/// arc lengths between log-odd points are logs of mantissa ratios and every
/// comparison between them reduces to integer cross-multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMantissa {
    numerator: BigUint,
    exponent: u64,
}

impl DyadicMantissa {
    /// Normalizes an odd positive integer into `[1, 2)`.
    pub fn from_odd(numerator: BigUint) -> Result<Self> {
        if numerator.bits() == 0 || !numerator.bit(0) {
            return Err(Error::InvalidSpec(format!(
                "mantissa numerator {numerator} must be odd and positive"
            )));
        }
        let exponent = numerator.bits() - 1;
        Ok(Self { numerator, exponent })
    }

    pub fn one() -> Self {
        Self {
            numerator: BigUint::one(),
            exponent: 0,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Closest double to the mantissa value.
    pub fn to_f64(&self) -> f64 {
        match self.numerator.to_u64() {
            Some(n) if self.exponent < 1023 => n as f64 / 2f64.powi(self.exponent as i32),
            _ => {
                // Keep the top 64 bits; the value lies in [1, 2).
                let shift = self.numerator.bits().saturating_sub(64);
                let top = (&self.numerator >> shift).to_u64().unwrap_or(u64::MAX);
                top as f64 / 2f64.powi((self.exponent - shift) as i32)
            }
        }
    }

    /// `self.numerator * 2^shift` as a `u128`, when it fits.
    fn scaled_small(&self, shift: u64) -> Option<u128> {
        let n = self.numerator.to_u64()?;
        if self.numerator.bits() + shift > 127 {
            return None;
        }
        Some((n as u128) << shift)
    }
}

impl Ord for DyadicMantissa {
    /// `a / 2^ea` vs `b / 2^eb` compares `a * 2^eb` with `b * 2^ea`.
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Some(l), Some(r)) = (self.scaled_small(other.exponent), other.scaled_small(self.exponent)) {
            return l.cmp(&r);
        }
        let l = &self.numerator << other.exponent;
        let r = &other.numerator << self.exponent;
        l.cmp(&r)
    }
}

impl PartialOrd for DyadicMantissa {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicMantissa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl Serialize for DyadicMantissa {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("DyadicMantissa", 2)?;
        s.serialize_field("numerator", &self.numerator.to_string())?;
        s.serialize_field("exponent", &self.exponent)?;
        s.end()
    }
}

/// The mantissa of `2k - 1`, the exact carrier of the log-odd point `y_k`.
pub fn log_odd_mantissa(k: u64) -> Result<DyadicMantissa> {
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    let odd = BigUint::from(k) * 2u32 - 1u32;
    DyadicMantissa::from_odd(odd)
}
