//! Trajectories `n -> (D_n, d_n)` for any sequence, one `O(log n)` partition
//! update per point.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::circle::{phi, CirclePoint, PartitionState};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::sequences::{sequence_stream, SequenceSpec};

/// Column order of the trajectory CSV.
pub const CSV_HEADER: &str = "n,D_n,d_n,nD_n,nd_n,phi_n,D_ratio,d_ratio";

/// One prefix length of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub n: u64,
    #[serde(rename = "D_n")]
    pub dispersion: f64,
    /// Undefined for `n = 1`.
    #[serde(rename = "d_n")]
    pub min_gap: Option<f64>,
    #[serde(rename = "nD_n")]
    pub n_dispersion: f64,
    #[serde(rename = "nd_n")]
    pub n_min_gap: Option<f64>,
    #[serde(rename = "phi_n")]
    pub phi: f64,
    /// `D_n / phi_n`.
    #[serde(rename = "D_ratio")]
    pub dispersion_ratio: f64,
    /// `d_n / (2 phi_{2n-1})`.
    #[serde(rename = "d_ratio")]
    pub min_gap_ratio: Option<f64>,
}

/// Incremental tracker over one sequence.
#[derive(Clone, Debug, Default)]
pub struct GapTracker {
    state: PartitionState,
}

impl GapTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &PartitionState {
        &self.state
    }

    /// Adds the next point and reports the new prefix.
    pub fn push(&mut self, p: CirclePoint) -> TrajectoryRecord {
        self.state.insert(p);
        let n = self.state.inserted() as u64;
        let dispersion = self.state.dispersion().expect("at least one point");
        let min_gap = self.state.min_distance();
        let phi_n = phi(n).expect("n >= 1");
        let nf = n as f64;
        TrajectoryRecord {
            n,
            dispersion,
            min_gap,
            n_dispersion: nf * dispersion,
            n_min_gap: min_gap.map(|d| nf * d),
            phi: phi_n,
            dispersion_ratio: dispersion / phi_n,
            min_gap_ratio: min_gap.map(|d| d / (2.0 * phi(2 * n - 1).expect("2n - 1 >= 1"))),
        }
    }
}

/// Trajectory of an explicit point list.
pub fn track_points<I: IntoIterator<Item = CirclePoint>>(points: I) -> Vec<TrajectoryRecord> {
    let mut tracker = GapTracker::new();
    points.into_iter().map(|p| tracker.push(p)).collect()
}

/// One record per `n = 1..=n_max`.
pub fn track(spec: &SequenceSpec, n_max: u64) -> Result<Vec<TrajectoryRecord>> {
    Ok(track_points(sequence_stream(spec, n_max)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    Json,
}

impl FromStr for TrajectoryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut out: W, records: &[TrajectoryRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            sig17(r.dispersion),
            cell(r.min_gap),
            sig17(r.n_dispersion),
            cell(r.n_min_gap),
            sig17(r.phi),
            sig17(r.dispersion_ratio),
            cell(r.min_gap_ratio),
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, records: &[TrajectoryRecord]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out).map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

pub fn write_trajectory<W: Write>(out: W, records: &[TrajectoryRecord], format: TrajectoryFormat) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    match format {
        TrajectoryFormat::Csv => write_csv(out, records).map_err(|source| Error::Io {
            path: "<output>".into(),
            source,
        }),
        TrajectoryFormat::Json => write_json(out, records),
    }
}

/// Writes `records` to `path` in the chosen format.
pub fn emit_trajectory(records: &[TrajectoryRecord], format: TrajectoryFormat, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    match format {
        TrajectoryFormat::Csv => write_csv(&mut out, records).map_err(io_err)?,
        TrajectoryFormat::Json => write_json(&mut out, records)?,
    }
    out.flush().map_err(io_err)
}
