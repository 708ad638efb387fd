//! Multi-start local search for ordered point lists that keep every prefix's
//! minimal gap as far above `2 phi_{2n-1}` as possible.
//!
//! The objective is `J = min over floor_n <= n <= N of d_n / (2 phi_{2n-1})`.
//! The log-odd prefix scores exactly 1. A family whose best `J` stays above 1
//! as `N` grows would argue against `d_n <= 2 phi_{2n-1}` holding infinitely
//! often; bests falling to 1 or below are consistent with it. The search only
//! produces evidence either way.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{arc_length, phi, CirclePoint, PartitionState, TOLERANCE};
use crate::error::{Error, Result};
use crate::gap_tracker::GapTracker;
use crate::sequences::log_odd_point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub initial_step: f64,
    /// Per-iteration step multiplier, in `(0, 1)`.
    pub decay: f64,
    pub iterations: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Number of points `N`.
    pub horizon: usize,
    pub restarts: u32,
    pub seed: u64,
    pub schedule: Schedule,
    /// Smallest prefix length entering the objective.
    pub floor_n: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            horizon: 10,
            restarts: 64,
            seed: 1,
            schedule: Schedule {
                initial_step: 0.25,
                decay: 0.999,
                iterations: 5000,
            },
            floor_n: 2,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.floor_n < 2 {
            return bad("floor-n must be at least 2");
        }
        if self.horizon < self.floor_n {
            return bad("horizon must be at least floor-n");
        }
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.schedule.iterations == 0 {
            return bad("iterations must be positive");
        }
        let Schedule {
            initial_step, decay, ..
        } = self.schedule;
        if !(initial_step.is_finite() && initial_step > 0.0) {
            return bad("step must be positive");
        }
        if !(decay > 0.0 && decay < 1.0) {
            return bad("decay must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Objective {
    #[serde(rename = "J")]
    pub value: f64,
    /// `d_n / (2 phi_{2n-1})` for `n = floor_n..=N`.
    pub per_n_ratios: Vec<f64>,
}

/// Scores `points` in the given insertion order with the incremental
/// tracker. Repeated points make `d_n = 0`, hence `J = 0`. A list shorter
/// than `floor_n` has an empty window and scores `+inf`.
pub fn evaluate_objective(points: &[CirclePoint], floor_n: usize) -> Objective {
    let mut tracker = GapTracker::new();
    let mut per_n_ratios = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let rec = tracker.push(p);
        if i + 1 >= floor_n.max(2) {
            per_n_ratios.push(rec.min_gap_ratio.expect("n >= 2"));
        }
    }
    let value = per_n_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Objective { value, per_n_ratios }
}

/// Scores prefixes with a sorted vector and a running minimum; the hot path
/// of the search. [`evaluate_objective`] re-checks the winner.
struct FastScorer {
    /// `2 phi_{2n-1}` at index `n`.
    denominators: Vec<f64>,
    floor_n: usize,
    sorted: Vec<CirclePoint>,
}

impl FastScorer {
    fn new(horizon: usize, floor_n: usize) -> Self {
        let mut denominators = vec![f64::NAN; horizon + 1];
        for (n, d) in denominators.iter_mut().enumerate().skip(1) {
            *d = 2.0 * phi(2 * n as u64 - 1).expect("n >= 1");
        }
        Self {
            denominators,
            floor_n,
            sorted: Vec::with_capacity(horizon),
        }
    }

    fn score(&mut self, points: &[CirclePoint]) -> f64 {
        self.sorted.clear();
        let mut min_gap = f64::INFINITY;
        let mut worst = f64::INFINITY;
        for (i, &p) in points.iter().enumerate() {
            let n = i + 1;
            match self.sorted.binary_search(&p) {
                Ok(_) => return 0.0,
                Err(pos) if !self.sorted.is_empty() => {
                    let len = self.sorted.len();
                    let left = self.sorted[(pos + len - 1) % len];
                    let right = self.sorted[pos % len];
                    min_gap = min_gap.min(arc_length(left, p)).min(arc_length(p, right));
                    self.sorted.insert(pos, p);
                }
                Err(pos) => self.sorted.insert(pos, p),
            }
            if n >= self.floor_n {
                worst = worst.min(min_gap / self.denominators[n]);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    LogOdd,
    Greedy,
    Random,
}

impl Initialization {
    fn for_restart(restart: u32) -> Self {
        match restart % 3 {
            0 => Self::LogOdd,
            1 => Self::Greedy,
            _ => Self::Random,
        }
    }
}

/// `x_1 = 0`, then each new point at the midpoint of the widest gap, which
/// maximizes the next minimal gap.
pub fn greedy_points(horizon: usize) -> Vec<CirclePoint> {
    let mut state = PartitionState::new();
    let mut points = Vec::with_capacity(horizon);
    for i in 0..horizon {
        let p = if i == 0 {
            CirclePoint::ZERO
        } else {
            let g = state.widest_gap().expect("non-empty");
            CirclePoint::reduce(g.left.value() + g.length / 2.0)
        };
        state.insert(p);
        points.push(p);
    }
    points
}

fn log_odd_prefix(horizon: usize) -> Vec<CirclePoint> {
    (1..=horizon as u64)
        .map(|k| log_odd_point(k).expect("k >= 1"))
        .collect()
}

fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Improvement {
    pub iteration: u32,
    #[serde(rename = "J")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartSummary {
    pub restart: u32,
    pub initialization: Initialization,
    pub initial_j: f64,
    pub final_j: f64,
    pub accepted_moves: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Telemetry {
    pub restarts: u32,
    pub iterations_per_restart: u32,
    pub best_restart: u32,
    pub per_restart: Vec<RestartSummary>,
    /// Strict improvements of the winning restart.
    pub improvement_history: Vec<Improvement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub horizon: usize,
    pub floor_n: usize,
    pub best_points: Vec<CirclePoint>,
    #[serde(rename = "J")]
    pub value: f64,
    pub per_n_ratios: Vec<f64>,
    pub telemetry: Telemetry,
}

struct RestartOutcome {
    points: Vec<CirclePoint>,
    summary: RestartSummary,
    history: Vec<Improvement>,
}

fn run_restart(config: &SearchConfig, restart: u32, seed: u64) -> RestartOutcome {
    let n = config.horizon;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let initialization = Initialization::for_restart(restart);
    let mut points = match initialization {
        Initialization::LogOdd => log_odd_prefix(n),
        Initialization::Greedy => greedy_points(n),
        Initialization::Random => (0..n)
            .map(|i| {
                if i == 0 {
                    CirclePoint::ZERO
                } else {
                    CirclePoint::reduce(uniform(&mut rng))
                }
            })
            .collect(),
    };

    let mut scorer = FastScorer::new(n, config.floor_n);
    let mut current = scorer.score(&points);
    let initial_j = current;
    let mut history = vec![Improvement {
        iteration: 0,
        value: current,
    }];
    let mut accepted_moves = 0;
    let mut step = config.schedule.initial_step;

    // x_1 stays at 0; rotations do not change the objective.
    if n >= 2 {
        for it in 1..=config.schedule.iterations {
            let i = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            let old = points[i];
            points[i] = CirclePoint::reduce(old.value() + step * (2.0 * uniform(&mut rng) - 1.0));
            let candidate = scorer.score(&points);
            if candidate >= current {
                if candidate > current {
                    history.push(Improvement {
                        iteration: it,
                        value: candidate,
                    });
                }
                current = candidate;
                accepted_moves += 1;
            } else {
                points[i] = old;
            }
            step *= config.schedule.decay;
        }
    }

    RestartOutcome {
        points,
        summary: RestartSummary {
            restart,
            initialization,
            initial_j,
            final_j: current,
            accepted_moves,
        },
        history,
    }
}

/// Runs `config.restarts` independent local searches (in parallel) and keeps
/// the best; ties go to the lower restart index. The reported `J` comes from
/// a fresh tracker pass over the winning points.
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut master = SplitMix64::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.restarts).map(|_| master.next_u64()).collect();

    let outcomes: Vec<RestartOutcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &seed)| run_restart(config, r as u32, seed))
        .collect();

    let best = outcomes.iter().enumerate().fold(0, |best, (i, o)| {
        if o.summary.final_j > outcomes[best].summary.final_j {
            i
        } else {
            best
        }
    });
    let winner = &outcomes[best];

    let objective = evaluate_objective(&winner.points, config.floor_n);
    debug_assert!(
        (objective.value - winner.summary.final_j).abs() <= TOLERANCE,
        "fast scorer {} vs tracker {}",
        winner.summary.final_j,
        objective.value
    );

    Ok(SearchResult {
        horizon: config.horizon,
        floor_n: config.floor_n,
        best_points: winner.points.clone(),
        value: objective.value,
        per_n_ratios: objective.per_n_ratios,
        telemetry: Telemetry {
            restarts: config.restarts,
            iterations_per_restart: config.schedule.iterations,
            best_restart: best as u32,
            per_restart: outcomes.iter().map(|o| o.summary.clone()).collect(),
            improvement_history: winner.history.clone(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub horizon: usize,
    #[serde(rename = "J")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Whether the bests never increase with `N`, as they must for exact
    /// optima (a longer horizon only adds constraints).
    pub non_increasing: bool,
}

/// Best `J` for each horizon in `horizons` (ascending), every other setting
/// taken from `template`.
pub fn sweep(horizons: &[usize], template: &SearchConfig) -> Result<SweepReport> {
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("horizons must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        let config = SearchConfig { horizon, ..*template };
        let res = search(&config)?;
        rows.push(SweepRow {
            horizon,
            value: res.value,
        });
    }
    let non_increasing = rows.windows(2).all(|w| w[1].value <= w[0].value + TOLERANCE);
    Ok(SweepReport { rows, non_increasing })
}
