//! Tools for the log-odd sequence `y_k = log2(2k - 1) mod 1` and for measuring
//! how fast any circle sequence fills `[0, 1)`: dispersion `D_n`, minimal gap
//! `d_n`, exact verification of the log-odd extremes, windowed checks of the
//! matching lower bounds, and a search probing how far `d_n` can stay above
//! `2 phi_{2n-1}`.

#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod circle;
pub mod conjecture_search;
pub mod error;
pub mod exact_oracle;
pub mod format;
pub mod gap_tracker;
pub mod sequences;
pub mod theorem_suite;

pub use circle::{phi, rho, ArcGap, CirclePoint, PartitionState, LIMIT_CONSTANT, TOLERANCE};
pub use error::{Error, Result};
pub use sequences::{DyadicMantissa, SequenceKind, SequenceSpec};
