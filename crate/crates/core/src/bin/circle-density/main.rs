mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use circle_density::conjecture_search::{search, sweep, Schedule, SearchConfig};
use circle_density::exact_oracle::verify_example1;
use circle_density::format::sig17;
use circle_density::gap_tracker::{track, write_trajectory, TrajectoryFormat, TrajectoryRecord};
use circle_density::sequences::{generate, write_points, SequenceKind};
use circle_density::theorem_suite::{
    check_rank_inequalities, verify_w1, verify_w2, RankReport, WindowReport, Witness, W1_NOTE, W2_NOTE,
};
use circle_density::{Error, Result, SequenceSpec};

use config::FileConfig;

/// Log-odd sequence construction, dispersion trajectories, exact and windowed
/// verification, and conjecture search on the unit circle.
#[derive(Parser, Debug)]
#[command(name = "circle-density", version)]
struct Cli {
    /// Key-value config file; explicit flags override its entries.
    #[arg(long, global = true, env = "CIRCLE_DENSITY_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the first n points of a sequence, one per line.
    Generate(GenerateArgs),
    /// Emit the D_n / d_n trajectory as CSV or JSON.
    #[command(visible_alias = "track")]
    Trajectory(TrajectoryArgs),
    /// Run a verification suite; exits 1 on any violation.
    Verify(VerifyArgs),
    /// Side-by-side nD_n / nd_n trajectories with a summary block.
    Bench(BenchArgs),
    /// Search for point lists whose minimal gaps stay above 2 phi_{2n-1}.
    Search(SearchArgs),
    /// Best J for several horizons.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// log-odd, kronecker:<alpha|golden|inv-sqrt2>, vdc:<base>, random:<seed>, file:<path>
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    /// Working precision in bits for log-odd evaluation.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// example1, w1, w2 or rank
    #[arg(long)]
    suite: Option<String>,
    /// Sequence to check (repeatable); defaults to log-odd.
    #[arg(long)]
    sequence: Vec<String>,
    /// Check the fifteen stock sequences.
    #[arg(long)]
    stock: bool,
    #[arg(long)]
    n: Option<u64>,
    /// Include every witness in the report.
    #[arg(long)]
    witnesses: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Sequence to compare (repeatable).
    #[arg(long)]
    sequence: Vec<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchFlags {
    #[arg(long)]
    restarts: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u32>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long = "floor-n")]
    floor_n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Horizon N.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    flags: SearchFlags,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Ascending horizons, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[command(flatten)]
    flags: SearchFlags,
}

enum Outcome {
    Clean,
    Violation,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_spec(s: &str, precision: Option<u32>) -> Result<SequenceSpec> {
    let spec: SequenceSpec = s.parse()?;
    match precision {
        Some(bits) => spec.with_precision(bits),
        None => Ok(spec),
    }
}

fn sequences_or(flags: &[String], cfg: &FileConfig) -> Result<Vec<String>> {
    if !flags.is_empty() {
        return Ok(flags.to_vec());
    }
    Ok(cfg.strings("sequence")?.unwrap_or_default())
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("--{name} is required")))
}

fn with_output<F>(out: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_owned(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write(&mut w)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w).map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

fn io_err(source: io::Error) -> Error {
    Error::Io {
        path: "<output>".into(),
        source,
    }
}

fn cmd_generate(args: GenerateArgs, cfg: &FileConfig) -> Result<Outcome> {
    let sequence = required(args.sequence.or(cfg.string("sequence")?), "sequence")?;
    let n = required(args.n.or(cfg.u64("n")?), "n")?;
    let precision = args.precision.or(cfg.u64("precision")?.map(|p| p as u32));
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let points = generate(&parse_spec(&sequence, precision)?, n)?;
    with_output(out.as_deref(), |w| write_points(w, points).map_err(io_err))?;
    Ok(Outcome::Clean)
}

fn cmd_trajectory(args: TrajectoryArgs, cfg: &FileConfig) -> Result<Outcome> {
    let sequence = required(args.sequence.or(cfg.string("sequence")?), "sequence")?;
    let n = required(args.n.or(cfg.u64("n")?), "n")?;
    let precision = args.precision.or(cfg.u64("precision")?.map(|p| p as u32));
    let format: TrajectoryFormat = args
        .format
        .or(cfg.string("format")?)
        .unwrap_or_else(|| "csv".to_owned())
        .parse()?;
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let records = track(&parse_spec(&sequence, precision)?, n)?;
    with_output(out.as_deref(), |w| write_trajectory(w, &records, format))?;
    Ok(Outcome::Clean)
}

#[derive(Serialize)]
struct WindowSummary {
    n: u64,
    window: (u64, u64),
    satisfied: bool,
    witness_count: usize,
    first_witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Witness>>,
}

#[derive(Serialize)]
struct WindowSequenceReport {
    sequence: String,
    violations: Vec<u64>,
    windows: Vec<WindowSummary>,
}

#[derive(Serialize)]
struct WindowSuiteReport {
    suite: &'static str,
    note: &'static str,
    n_max: u64,
    clean: bool,
    sequences: Vec<WindowSequenceReport>,
}

fn summarize_windows(sequence: String, reports: Vec<WindowReport>, keep_witnesses: bool) -> WindowSequenceReport {
    let violations = reports.iter().filter(|r| !r.satisfied).map(|r| r.n).collect();
    let windows = reports
        .into_iter()
        .map(|r| WindowSummary {
            n: r.n,
            window: r.window,
            satisfied: r.satisfied,
            witness_count: r.witnesses.len(),
            first_witness: r.witnesses.first().copied(),
            witnesses: keep_witnesses.then_some(r.witnesses),
        })
        .collect();
    WindowSequenceReport {
        sequence,
        violations,
        windows,
    }
}

#[derive(Serialize)]
struct RankSequenceReport {
    sequence: String,
    #[serde(flatten)]
    report: RankReport,
}

#[derive(Serialize)]
struct RankSuiteReport {
    suite: &'static str,
    n_max: u64,
    clean: bool,
    sequences: Vec<RankSequenceReport>,
}

#[derive(Serialize)]
struct Example1Output<'a> {
    suite: &'static str,
    clean: bool,
    #[serde(flatten)]
    report: &'a circle_density::exact_oracle::Example1Report,
}

fn cmd_verify(args: VerifyArgs, cfg: &FileConfig) -> Result<Outcome> {
    let suite = required(args.suite.or(cfg.string("suite")?), "suite")?;
    let n = required(args.n.or(cfg.u64("n")?), "n")?;
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let keep_witnesses = args.witnesses || cfg.bool("witnesses")?.unwrap_or(false);
    let stock = args.stock || cfg.bool("stock")?.unwrap_or(false);

    let names = sequences_or(&args.sequence, cfg)?;
    let mut specs = names.iter().map(|s| parse_spec(s, None)).collect::<Result<Vec<_>>>()?;
    if stock {
        specs.extend(SequenceSpec::stock());
    }
    if specs.is_empty() {
        specs.push(SequenceSpec::log_odd());
    }

    let clean = match suite.as_str() {
        "example1" => {
            if specs.iter().any(|s| s.kind != SequenceKind::LogOdd) {
                return Err(usage("suite example1 applies to the log-odd sequence only"));
            }
            let report = verify_example1(n, keep_witnesses);
            let clean = report.is_clean();
            with_output(out.as_deref(), |w| {
                write_json(
                    w,
                    &Example1Output {
                        suite: "example1",
                        clean,
                        report: &report,
                    },
                )
            })?;
            clean
        }
        "w1" | "w2" => {
            let is_w1 = suite == "w1";
            let sequences = specs
                .par_iter()
                .map(|spec| {
                    let reports = if is_w1 {
                        verify_w1(spec, n)?
                    } else {
                        verify_w2(spec, n)?
                    };
                    Ok(summarize_windows(spec.to_string(), reports, keep_witnesses))
                })
                .collect::<Result<Vec<_>>>()?;
            let clean = sequences.iter().all(|s| s.violations.is_empty());
            let report = WindowSuiteReport {
                suite: if is_w1 { "w1" } else { "w2" },
                note: if is_w1 { W1_NOTE } else { W2_NOTE },
                n_max: n,
                clean,
                sequences,
            };
            with_output(out.as_deref(), |w| write_json(w, &report))?;
            clean
        }
        "rank" => {
            let sequences = specs
                .par_iter()
                .map(|spec| {
                    Ok(RankSequenceReport {
                        sequence: spec.to_string(),
                        report: check_rank_inequalities(spec, n)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            for s in &sequences {
                if let Some(at) = s.report.skipped_from {
                    eprintln!("{}: duplicate point at n = {at}; checks stop there", s.sequence);
                }
            }
            let clean = sequences.iter().all(|s| s.report.is_clean());
            let report = RankSuiteReport {
                suite: "rank",
                n_max: n,
                clean,
                sequences,
            };
            with_output(out.as_deref(), |w| write_json(w, &report))?;
            clean
        }
        other => return Err(usage(format!("unknown suite `{other}`"))),
    };
    Ok(if clean { Outcome::Clean } else { Outcome::Violation })
}

/// Column-group summary of one bench sequence.
struct BenchSummary {
    max_n_dispersion: f64,
    min_n_min_gap: Option<f64>,
    min_gap_strictly_decreasing: bool,
}

fn bench_summary(records: &[TrajectoryRecord]) -> BenchSummary {
    let max_n_dispersion = records.iter().map(|r| r.n_dispersion).fold(f64::NEG_INFINITY, f64::max);
    let min_n_min_gap = records.iter().filter_map(|r| r.n_min_gap).reduce(f64::min);
    let gaps: Vec<f64> = records.iter().filter_map(|r| r.min_gap).collect();
    BenchSummary {
        max_n_dispersion,
        min_n_min_gap,
        min_gap_strictly_decreasing: gaps.windows(2).all(|w| w[1] < w[0]),
    }
}

fn cmd_bench(args: BenchArgs, cfg: &FileConfig) -> Result<Outcome> {
    let names = sequences_or(&args.sequence, cfg)?;
    if names.is_empty() {
        return Err(usage("bench needs at least one --sequence"));
    }
    let n = required(args.n.or(cfg.u64("n")?), "n")?;
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let specs = names.iter().map(|s| parse_spec(s, None)).collect::<Result<Vec<_>>>()?;
    let runs = specs.par_iter().map(|s| track(s, n)).collect::<Result<Vec<_>>>()?;

    with_output(out.as_deref(), |w| {
        let mut header = vec!["n".to_owned()];
        for s in &specs {
            header.push(format!("{s}:nD_n"));
            header.push(format!("{s}:nd_n"));
        }
        writeln!(w, "{}", header.join(",")).map_err(io_err)?;
        for i in 0..n as usize {
            let mut row = vec![(i + 1).to_string()];
            for r in &runs {
                row.push(sig17(r[i].n_dispersion));
                row.push(r[i].n_min_gap.map(sig17).unwrap_or_default());
            }
            writeln!(w, "{}", row.join(",")).map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
        writeln!(w, "sequence,max_nD_n,min_nd_n,d_n_strictly_decreasing").map_err(io_err)?;
        for (s, r) in specs.iter().zip(&runs) {
            let sum = bench_summary(r);
            writeln!(
                w,
                "{s},{},{},{}",
                sig17(sum.max_n_dispersion),
                sum.min_n_min_gap.map(sig17).unwrap_or_default(),
                sum.min_gap_strictly_decreasing
            )
            .map_err(io_err)?;
        }
        Ok(())
    })?;
    Ok(Outcome::Clean)
}

fn search_template(flags: &SearchFlags, cfg: &FileConfig) -> Result<SearchConfig> {
    let d = SearchConfig::default();
    Ok(SearchConfig {
        horizon: d.horizon,
        restarts: flags
            .restarts
            .or(cfg.u64("restarts")?.map(|v| v as u32))
            .unwrap_or(d.restarts),
        seed: flags.seed.or(cfg.u64("seed")?).unwrap_or(d.seed),
        schedule: Schedule {
            initial_step: flags.step.or(cfg.f64("step")?).unwrap_or(d.schedule.initial_step),
            decay: flags.decay.or(cfg.f64("decay")?).unwrap_or(d.schedule.decay),
            iterations: flags
                .iterations
                .or(cfg.u64("iterations")?.map(|v| v as u32))
                .unwrap_or(d.schedule.iterations),
        },
        floor_n: flags
            .floor_n
            .or(cfg.u64("floor-n")?.map(|v| v as usize))
            .unwrap_or(d.floor_n),
    })
}

fn cmd_search(args: SearchArgs, cfg: &FileConfig) -> Result<Outcome> {
    let horizon = required(args.n.or(cfg.u64("n")?.map(|v| v as usize)), "n")?;
    let config = SearchConfig {
        horizon,
        ..search_template(&args.flags, cfg)?
    };
    let out = args.flags.out.clone().or(cfg.string("out")?.map(PathBuf::from));
    let result = search(&config)?;
    with_output(out.as_deref(), |w| write_json(w, &result))?;
    Ok(Outcome::Clean)
}

fn cmd_sweep(args: SweepArgs, cfg: &FileConfig) -> Result<Outcome> {
    let horizons: Vec<usize> = if args.ns.is_empty() {
        cfg.u64s("ns")?
            .unwrap_or_default()
            .into_iter()
            .map(|v| v as usize)
            .collect()
    } else {
        args.ns.clone()
    };
    let template = search_template(&args.flags, cfg)?;
    let out = args.flags.out.clone().or(cfg.string("out")?.map(PathBuf::from));
    let report = sweep(&horizons, &template)?;
    with_output(out.as_deref(), |w| write_json(w, &report))?;
    Ok(Outcome::Clean)
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(a, &cfg),
        Command::Trajectory(a) => cmd_trajectory(a, &cfg),
        Command::Verify(a) => cmd_verify(a, &cfg),
        Command::Bench(a) => cmd_bench(a, &cfg),
        Command::Search(a) => cmd_search(a, &cfg),
        Command::Sweep(a) => cmd_sweep(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        // Reader went away (`| head`); nothing left to report.
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
