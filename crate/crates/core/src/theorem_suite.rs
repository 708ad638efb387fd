//! Finite-window checks of the two lower/upper-bound theorems and of the
//! gap-vector inequalities their arguments rest on.
//!
//! "Infinitely many n" cannot be checked by a machine. The telescoping
//! arguments behind both theorems prove something sharper for every start
//! `n`: some `m` in `[n, 2n - 1]` has `D_m >= phi_m` (W1), and some `m` in
//! `[2n + 1, 4n]` has `d_m <= phi_{m-1}` (W2). Those per-window statements are
//! what gets verified here.

use serde::Serialize;

use crate::circle::{phi, PartitionState, TOLERANCE};
use crate::error::Result;
use crate::gap_tracker::{track, TrajectoryRecord};
use crate::sequences::{sequence_stream, SequenceSpec};

pub const W1_NOTE: &str = "for every n the window [n, 2n-1] contains m with D_m >= phi_m \
    (finite form of the dispersion lower bound, from its telescoping sum); \
    witnesses accepted at D_m >= phi_m - 1e-12";

pub const W2_NOTE: &str = "for every n the window [2n+1, 4n] contains m with d_m <= phi_{m-1} \
    (finite form of the minimal-gap upper bound, from its rank-inequality sum); \
    tested with non-strict <= and witnesses accepted at d_m <= phi_{m-1} + 1e-12; \
    the open question restates this bound with strict <, which is not assumed here";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub m: u64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    pub n: u64,
    pub window: (u64, u64),
    pub witnesses: Vec<Witness>,
    pub satisfied: bool,
}

fn window_report(n: u64, window: (u64, u64), witnesses: Vec<Witness>) -> WindowReport {
    WindowReport {
        n,
        window,
        satisfied: !witnesses.is_empty(),
        witnesses,
    }
}

/// W1 over an existing trajectory; `trajectory[i]` must describe `n = i + 1`
/// and reach `2 n_max - 1`.
pub fn w1_windows(trajectory: &[TrajectoryRecord], n_max: u64) -> Vec<WindowReport> {
    if n_max == 0 {
        return Vec::new();
    }
    assert!(trajectory.len() as u64 >= 2 * n_max - 1, "trajectory too short for W1");
    (1..=n_max)
        .map(|n| {
            let (lo, hi) = (n, 2 * n - 1);
            let witnesses = trajectory[(lo - 1) as usize..hi as usize]
                .iter()
                .filter(|r| r.dispersion >= r.phi - TOLERANCE)
                .map(|r| Witness {
                    m: r.n,
                    value: r.dispersion,
                    bound: r.phi,
                })
                .collect();
            window_report(n, (lo, hi), witnesses)
        })
        .collect()
}

/// W2 over an existing trajectory reaching `4 n_max`.
pub fn w2_windows(trajectory: &[TrajectoryRecord], n_max: u64) -> Vec<WindowReport> {
    if n_max == 0 {
        return Vec::new();
    }
    assert!(trajectory.len() as u64 >= 4 * n_max, "trajectory too short for W2");
    (1..=n_max)
        .map(|n| {
            let (lo, hi) = (2 * n + 1, 4 * n);
            let witnesses = trajectory[(lo - 1) as usize..hi as usize]
                .iter()
                .filter_map(|r| {
                    let bound = phi(r.n - 1).expect("m >= 3");
                    let d = r.min_gap.expect("m >= 3");
                    (d <= bound + TOLERANCE).then_some(Witness {
                        m: r.n,
                        value: d,
                        bound,
                    })
                })
                .collect();
            window_report(n, (lo, hi), witnesses)
        })
        .collect()
}

/// One W1 report per `n <= n_max`.
pub fn verify_w1(spec: &SequenceSpec, n_max: u64) -> Result<Vec<WindowReport>> {
    let trajectory = track(spec, 2 * n_max.max(1) - 1)?;
    Ok(w1_windows(&trajectory, n_max))
}

/// One W2 report per `n <= n_max`.
pub fn verify_w2(spec: &SequenceSpec, n_max: u64) -> Result<Vec<WindowReport>> {
    let trajectory = track(spec, 4 * n_max.max(1))?;
    Ok(w2_windows(&trajectory, n_max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityFamily {
    /// `t_{n,k} <= t_{n+1,k-1}` for `1 < k <= n`.
    Splitting,
    /// `t_{2n,2k} >= t_{n+k,n+k}` for `1 <= k <= n`.
    Rank,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankViolation {
    pub family: InequalityFamily,
    pub n: u64,
    pub k: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// The sorted gap vectors involved, keyed by their prefix length.
    pub vectors: Vec<(u64, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub splitting_max_n: u64,
    pub rank_max_n: u64,
    pub splitting_checked: u64,
    pub rank_checked: u64,
    /// Index of the first duplicate point; nothing from there on is checked.
    pub skipped_from: Option<u64>,
    pub violation: Option<RankViolation>,
}

impl RankReport {
    pub fn is_clean(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks both inequality families over `vectors`, where `vectors[i]` is the
/// non-increasing gap vector of the `(i + 1)`-point prefix. Splitting pairs
/// run for `n <= splitting_max_n`, rank pairs for `n <= rank_max_n`; pairs
/// that need a vector beyond the slice are skipped. Stops at the first
/// violation.
pub fn check_gap_vectors(vectors: &[Vec<f64>], splitting_max_n: u64, rank_max_n: u64) -> RankReport {
    let t = |n: u64, k: u64| vectors[(n - 1) as usize][(k - 1) as usize];
    let available = vectors.len() as u64;
    let mut report = RankReport {
        splitting_max_n,
        rank_max_n,
        splitting_checked: 0,
        rank_checked: 0,
        skipped_from: None,
        violation: None,
    };
    let snapshot = |ns: &[u64]| ns.iter().map(|&n| (n, vectors[(n - 1) as usize].clone())).collect();

    for n in 1..=splitting_max_n.min(available.saturating_sub(1)) {
        for k in 2..=n {
            let (lhs, rhs) = (t(n, k), t(n + 1, k - 1));
            report.splitting_checked += 1;
            if lhs > rhs + TOLERANCE {
                report.violation = Some(RankViolation {
                    family: InequalityFamily::Splitting,
                    n,
                    k,
                    lhs,
                    rhs,
                    vectors: snapshot(&[n, n + 1]),
                });
                return report;
            }
        }
    }
    for n in 1..=rank_max_n.min(available / 2) {
        for k in 1..=n {
            let (lhs, rhs) = (t(2 * n, 2 * k), t(n + k, n + k));
            report.rank_checked += 1;
            if lhs < rhs - TOLERANCE {
                report.violation = Some(RankViolation {
                    family: InequalityFamily::Rank,
                    n,
                    k,
                    lhs,
                    rhs,
                    vectors: snapshot(&[2 * n, n + k]),
                });
                return report;
            }
        }
    }
    report
}

/// Splitting inequality for `n <= n_max` and rank inequality for
/// `n <= n_max / 2`, on the sequence's own gap vectors.
pub fn check_rank_inequalities(spec: &SequenceSpec, n_max: u64) -> Result<RankReport> {
    let horizon = n_max + 1;
    let mut state = PartitionState::new();
    let mut vectors = Vec::with_capacity(horizon as usize);
    let mut skipped_from = None;
    for (i, p) in sequence_stream(spec, horizon)?.enumerate() {
        if !state.insert(p) {
            skipped_from = Some(i as u64 + 1);
            break;
        }
        vectors.push(state.sorted_gap_vector()?);
    }
    let mut report = check_gap_vectors(&vectors, n_max, n_max / 2);
    report.skipped_from = skipped_from;
    Ok(report)
}
