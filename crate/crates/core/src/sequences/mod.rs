//! Point generators on the circle: the log-odd sequence `log2(2k - 1) mod 1`
//! and the baselines it is compared against.

mod dyadic;
pub mod log2;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub use dyadic::{log_odd_mantissa, DyadicMantissa};

use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::format::sig17;

/// Minimum working precision for log-odd evaluation.
pub const MIN_LOG_PRECISION: u32 = 80;

/// Largest `k` for which `2k - 1` is exact in a double.
pub const MAX_LOG_ODD_INDEX: u64 = 1 << 52;

/// `(sqrt(5) - 1) / 2`, the sunflower rotation.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceKind {
    LogOdd,
    Kronecker {
        alpha: f64,
    },
    VanDerCorput {
        base: u64,
    },
    /// Uniform points from SplitMix64 seeded with `seed`.
    Random {
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

/// A sequence choice plus the working precision for log evaluation.
///
/// Parses from `log-odd`, `kronecker:<alpha|golden|inv-sqrt2>`, `vdc:<base>`,
/// `random:<seed>` and `file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub precision: Option<u32>,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind) -> Result<Self> {
        let kind = match kind {
            SequenceKind::Kronecker { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::NonFinite(alpha));
                }
                SequenceKind::Kronecker {
                    alpha: CirclePoint::reduce(alpha).value(),
                }
            }
            SequenceKind::VanDerCorput { base } if base < 2 => return Err(Error::InvalidBase(base)),
            other => other,
        };
        Ok(Self { kind, precision: None })
    }

    pub fn log_odd() -> Self {
        Self {
            kind: SequenceKind::LogOdd,
            precision: None,
        }
    }

    pub fn with_precision(mut self, bits: u32) -> Result<Self> {
        if bits < MIN_LOG_PRECISION {
            return Err(Error::InvalidPrecision {
                min: MIN_LOG_PRECISION,
                got: bits,
            });
        }
        self.precision = Some(bits);
        Ok(self)
    }

    /// The fifteen comparison sequences: log-odd, golden and `1/sqrt 2`
    /// rotations, van der Corput in bases 2 and 3, random seeds 1..=10.
    pub fn stock() -> Vec<SequenceSpec> {
        let mut specs = vec![
            SequenceSpec::log_odd(),
            SequenceSpec::new(SequenceKind::Kronecker { alpha: golden_alpha() }).unwrap(),
            SequenceSpec::new(SequenceKind::Kronecker { alpha: FRAC_1_SQRT_2 }).unwrap(),
            SequenceSpec::new(SequenceKind::VanDerCorput { base: 2 }).unwrap(),
            SequenceSpec::new(SequenceKind::VanDerCorput { base: 3 }).unwrap(),
        ];
        specs.extend((1..=10).map(|seed| SequenceSpec::new(SequenceKind::Random { seed }).unwrap()));
        specs
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_owned());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let kind = match (head, arg) {
            ("log-odd", None) => SequenceKind::LogOdd,
            ("kronecker", Some(a)) => {
                let alpha = match a {
                    "golden" => golden_alpha(),
                    "inv-sqrt2" => FRAC_1_SQRT_2,
                    _ => a.parse().map_err(|_| bad())?,
                };
                SequenceKind::Kronecker { alpha }
            }
            ("vdc", Some(a)) => SequenceKind::VanDerCorput {
                base: a.parse().map_err(|_| bad())?,
            },
            ("random", Some(a)) => SequenceKind::Random {
                seed: a.parse().map_err(|_| bad())?,
            },
            ("file", Some(a)) if !a.is_empty() => SequenceKind::File { path: a.into() },
            _ => return Err(bad()),
        };
        SequenceSpec::new(kind)
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceKind::LogOdd => f.write_str("log-odd"),
            SequenceKind::Kronecker { alpha } if *alpha == golden_alpha() => f.write_str("kronecker:golden"),
            SequenceKind::Kronecker { alpha } if *alpha == FRAC_1_SQRT_2 => f.write_str("kronecker:inv-sqrt2"),
            SequenceKind::Kronecker { alpha } => write!(f, "kronecker:{}", sig17(*alpha)),
            SequenceKind::VanDerCorput { base } => write!(f, "vdc:{base}"),
            SequenceKind::Random { seed } => write!(f, "random:{seed}"),
            SequenceKind::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

/// `y_k = log2(2k - 1) mod 1`, evaluated with the default double-double
/// logarithm.
pub fn log_odd_point(k: u64) -> Result<CirclePoint> {
    log_odd_point_with_precision(k, None)
}

/// As [`log_odd_point`], with at least `bits` of working precision.
pub fn log_odd_point_with_precision(k: u64, bits: Option<u32>) -> Result<CirclePoint> {
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    if k > MAX_LOG_ODD_INDEX {
        return Err(Error::IndexOutOfRange(k));
    }
    let odd = 2 * k - 1;
    let exponent = 63 - odd.leading_zeros();
    let value = match bits {
        Some(b) if b < MIN_LOG_PRECISION => {
            return Err(Error::InvalidPrecision {
                min: MIN_LOG_PRECISION,
                got: b,
            })
        }
        Some(b) if b > log2::DOUBLE_DOUBLE_BITS => log2::log2_ratio_wide(odd, exponent, b),
        _ => log2::log2_mantissa(odd as f64 / (1u64 << exponent) as f64),
    };
    Ok(CirclePoint::reduce(value))
}

/// `k * alpha mod 1`.
pub fn kronecker_point(alpha: f64, k: u64) -> Result<CirclePoint> {
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    CirclePoint::new(k as f64 * alpha)
}

/// Radical inverse of `k` in `base`.
pub fn van_der_corput_point(base: u64, k: u64) -> Result<CirclePoint> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    if k == 0 {
        return Err(Error::ZeroIndex);
    }
    let base = base as u128;
    let (mut rest, mut reversed, mut scale) = (k as u128, 0u128, 1u128);
    while rest > 0 {
        reversed = reversed * base + rest % base;
        scale *= base;
        rest /= base;
    }
    CirclePoint::new(reversed as f64 / scale as f64)
}

fn unit_f64(rng: &mut SplitMix64) -> f64 {
    // 53 random bits, uniform on [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Reads a point list: one decimal per line, `#` starts a comment, blank
/// lines are skipped. Every value must already lie in `[0, 1)`.
pub fn read_point_file(path: &Path) -> Result<Vec<CirclePoint>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_points(&text, path)
}

fn parse_points(text: &str, path: &Path) -> Result<Vec<CirclePoint>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::PointFile {
            path: path.to_owned(),
            line: i + 1,
            reason,
        };
        let x: f64 = line.parse().map_err(|_| err(format!("not a number: `{line}`")))?;
        if !(0.0..1.0).contains(&x) {
            return Err(err(format!("{line} is outside [0, 1)")));
        }
        points.push(CirclePoint::reduce(x));
    }
    Ok(points)
}

/// Writes points one per line with 17 significant digits.
pub fn write_points<W: Write>(mut out: W, points: impl IntoIterator<Item = CirclePoint>) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "{}", sig17(p.value()))?;
    }
    Ok(())
}

enum Source {
    LogOdd(Option<u32>),
    Kronecker(f64),
    VanDerCorput(u64),
    Random(SplitMix64),
    Points(std::vec::IntoIter<CirclePoint>),
}

/// The points `x_1, ..., x_{n_max}` of a [`SequenceSpec`].
pub struct SequenceStream {
    source: Source,
    next_k: u64,
    n_max: u64,
}

/// Opens a stream over the first `n_max` points. File-backed specs are read
/// and validated up front.
pub fn sequence_stream(spec: &SequenceSpec, n_max: u64) -> Result<SequenceStream> {
    if n_max == 0 {
        return Err(Error::ZeroIndex);
    }
    let source = match &spec.kind {
        SequenceKind::LogOdd => {
            if n_max > MAX_LOG_ODD_INDEX {
                return Err(Error::IndexOutOfRange(n_max));
            }
            if let Some(bits) = spec.precision {
                if bits < MIN_LOG_PRECISION {
                    return Err(Error::InvalidPrecision {
                        min: MIN_LOG_PRECISION,
                        got: bits,
                    });
                }
            }
            Source::LogOdd(spec.precision)
        }
        SequenceKind::Kronecker { alpha } => Source::Kronecker(*alpha),
        SequenceKind::VanDerCorput { base } => {
            if *base < 2 {
                return Err(Error::InvalidBase(*base));
            }
            Source::VanDerCorput(*base)
        }
        SequenceKind::Random { seed } => Source::Random(SplitMix64::seed_from_u64(*seed)),
        SequenceKind::File { path } => {
            let points = read_point_file(path)?;
            if (points.len() as u64) < n_max {
                return Err(Error::InsufficientPoints {
                    path: path.clone(),
                    available: points.len(),
                    requested: n_max as usize,
                });
            }
            Source::Points(points.into_iter())
        }
    };
    Ok(SequenceStream {
        source,
        next_k: 1,
        n_max,
    })
}

/// Collects the first `n_max` points.
pub fn generate(spec: &SequenceSpec, n_max: u64) -> Result<Vec<CirclePoint>> {
    Ok(sequence_stream(spec, n_max)?.collect())
}

impl Iterator for SequenceStream {
    type Item = CirclePoint;

    fn next(&mut self) -> Option<CirclePoint> {
        if self.next_k > self.n_max {
            return None;
        }
        let k = self.next_k;
        self.next_k += 1;
        // Arguments were validated when the stream was opened.
        let p = match &mut self.source {
            Source::LogOdd(bits) => log_odd_point_with_precision(k, *bits).ok()?,
            Source::Kronecker(alpha) => kronecker_point(*alpha, k).ok()?,
            Source::VanDerCorput(base) => van_der_corput_point(*base, k).ok()?,
            Source::Random(rng) => CirclePoint::reduce(unit_f64(rng)),
            Source::Points(it) => it.next()?,
        };
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.n_max + 1 - self.next_k) as usize;
        (left, Some(left))
    }
}
