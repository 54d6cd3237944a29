//! Command-line front end: grid sampling, verification, boosts and trajectory info.
//!
//! Exit codes: 0 on success, 1 when a verification or admissibility check fails,
//! 2 on usage, configuration or I/O errors.

mod grid;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::trajectory::{boost_trajectory, significance_interval, Boost, BoostWindow, Trajectory, TrajectoryConfig};
use crate::verify::{suite, SamplerSpec, SuiteOptions};
use crate::{Error, Result, Vec3};

pub use grid::{sample_grid, AxisRange, Format, GridSpec, Quantity, SampleOptions, SampleSummary, CHUNK, DEFAULT_MAX_POINTS};

/// Destination of command output; `Send` so sampling can stream from a worker pool.
pub type Out = dyn Write + Send;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "RETFIELDS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "retfields", version, about = "Retarded-time fields of point-charge trajectories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample fields on a regular grid and stream them as CSV or JSON lines.
    Sample(SampleArgs),
    /// Run the verification suite and report every invariant.
    Verify(VerifyArgs),
    /// Transform a trajectory into a boosted frame.
    Boost(BoostArgs),
    /// Print admissibility bounds and derived quantities.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct TrajArg {
    /// Trajectory config (JSON).
    #[arg(long, value_name = "PATH")]
    pub traj: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub traj: TrajArg,
    /// x₁ axis as `min,max,count`.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub x1: AxisRange,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub x2: AxisRange,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub x3: AxisRange,
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    pub t: AxisRange,
    /// Comma-separated quantities.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "E")]
    pub quantities: Vec<Quantity>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Retarded-time tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Multiplier applied to E, B, A and phi.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Worker threads (0 = all cores); RETFIELDS_THREADS takes precedence.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    pub max_points: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub traj: TrajArg,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Half-width of the spatial sampling box around the origin.
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    /// Sampled observation times as `min,max`.
    #[arg(long, default_value = "-4,4", allow_hyphen_values = true)]
    pub time: String,
    /// Accepted delays as `min,max`.
    #[arg(long, default_value = "0.5,10")]
    pub delay_range: String,
    /// Write the JSON report here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[command(flatten)]
    pub traj: TrajArg,
    /// Boost speed `u`, `|u| < 1`.
    #[arg(long, allow_hyphen_values = true)]
    pub speed: f64,
    /// Boost axis: `x`, `y`, `z` or `a,b,c`.
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    pub axis: String,
    /// Boosted-frame time window as `start,end`.
    #[arg(long, default_value = "-10,10", allow_hyphen_values = true)]
    pub window: String,
    /// Spline knots across the window.
    #[arg(long, default_value_t = 201)]
    pub knots: usize,
    /// Tolerance for collapsing a linear result to uniform motion.
    #[arg(long, default_value_t = 1e-12)]
    pub simplify_tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[command(flatten)]
    pub traj: TrajArg,
    /// Stopping time `t₁` for the bounds.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub stop_time: f64,
    /// Proper time over `t0,t1`.
    #[arg(long, allow_hyphen_values = true)]
    pub proper_time: Option<String>,
    /// Initial diameter for the significance interval.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Velocity bound for the significance interval.
    #[arg(long)]
    pub v: Option<f64>,
    /// Observation period for the significance interval.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Speed of light in the units of `delta`, `v` and `t1`.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub json: bool,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotAdmissible { .. } | Error::OutsideG { .. } | Error::IterationLimit { .. } => 1,
        _ => 2,
    }
}

/// Runs a parsed command, writing human output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut Out) -> Result<i32> {
    match cli.command {
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Boost(a) => cmd_boost(&a, out),
        Command::Info(a) => cmd_info(&a, out),
    }
}

/// Thread count after applying the environment override.
pub fn thread_count(flag: usize) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid_argument("threads", format!("{THREADS_ENV}=`{v}` is not a thread count"))),
        Err(_) => Ok(flag),
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(threads)?)
        .build()
        .map_err(|e| Error::invalid_argument("threads", e.to_string()))?;
    Ok(pool.install(f))
}

fn pair(name: &'static str, s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parsed: Vec<f64> = parts.iter().filter_map(|p| p.parse().ok()).collect();
    match parsed[..] {
        [a, b] if parts.len() == 2 && a.is_finite() && b.is_finite() && a <= b => Ok((a, b)),
        _ => Err(Error::invalid_argument(name, format!("expected `min,max` with min <= max, got `{s}`"))),
    }
}

fn parse_axis(s: &str) -> Result<Vec3> {
    let bad = || Error::invalid_argument("axis", format!("expected x, y, z or `a,b,c`, got `{s}`"));
    match s.trim() {
        "x" => Ok(Vec3::x()),
        "y" => Ok(Vec3::y()),
        "z" => Ok(Vec3::z()),
        other => {
            let c: Vec<f64> = other.split(',').map(|p| p.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            match c[..] {
                [a, b, c] => Ok(Vec3::new(a, b, c)),
                _ => Err(bad()),
            }
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(Some(path.to_path_buf()), e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(Some(path.to_path_buf()), e))
}

fn emit(out: &mut Out, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io(None, e))
}

pub fn cmd_sample(a: &SampleArgs, out: &mut Out) -> Result<i32> {
    let traj = Trajectory::load(&a.traj.traj)?;
    let grid = GridSpec {
        x1: a.x1,
        x2: a.x2,
        x3: a.x3,
        t: a.t,
        quantities: a.quantities.clone(),
    };
    grid.validate(a.max_points)?;
    if !(a.tol > 0.0) || !a.scale.is_finite() {
        return Err(Error::invalid_argument("tol", "tolerance must be positive and scale finite"));
    }
    let opts = SampleOptions {
        tol: a.tol,
        scale: a.scale,
        format: a.format,
    };
    let summary = match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            with_pool(a.threads, || sample_grid(&traj, &grid, &opts, &mut w))?
                .map_err(|e| attach_path(e, path))?
        }
        None => {
            let mut w = BufWriter::new(out);
            with_pool(a.threads, || sample_grid(&traj, &grid, &opts, &mut w))??
        }
    };
    eprintln!("{} rows written, {} outside G", summary.rows, summary.outside_g);
    Ok(0)
}

fn attach_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { path: None, source } => Error::io(Some(path.to_path_buf()), source),
        other => other,
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut Out) -> Result<i32> {
    let traj = Trajectory::load(&a.traj.traj)?;
    let (t0, t1) = pair("time", &a.time)?;
    let delay_range = pair("delay-range", &a.delay_range)?;
    if !(a.extent > 0.0) {
        return Err(Error::invalid_argument("extent", "must be positive"));
    }
    let options = SuiteOptions {
        sampler: SamplerSpec {
            points: a.points,
            seed: a.seed,
            lower: [-a.extent, -a.extent, -a.extent, t0],
            upper: [a.extent, a.extent, a.extent, t1],
            delay_range,
            ..SamplerSpec::default()
        },
        tol: a.tol,
        timings: a.timings,
        ..SuiteOptions::default()
    };
    let report = with_pool(a.threads, || suite(&traj, &options))??;
    if let Some(path) = &a.output {
        write_text(path, &(report.to_json() + "\n"))?;
    }
    if a.json {
        emit(out, &(report.to_json() + "\n"))?;
    } else {
        emit(out, &report.to_text())?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

pub fn cmd_boost(a: &BoostArgs, out: &mut Out) -> Result<i32> {
    let traj = Trajectory::load(&a.traj.traj)?;
    let boost = Boost::new(a.speed, parse_axis(&a.axis)?)?;
    let (start, end) = pair("window", &a.window)?;
    let boosted = boost_trajectory(
        &traj,
        &boost,
        BoostWindow {
            start,
            end,
            knots: a.knots,
        },
    )?;
    let result = boosted.simplified(a.simplify_tol);
    let mut config = result.to_config();
    let axis = boost.axis();
    let metadata = serde_json::json!({
        "source_kind": traj.kind_name(),
        "boost": { "speed": boost.speed(), "axis": [axis.x, axis.y, axis.z] },
        "window": { "start": start, "end": end, "knots": a.knots },
        "interpolation_error": boosted.interpolation_error,
    });
    if let TrajectoryConfig::PiecewiseCubic(s) = &mut config {
        s.metadata = Some(metadata);
    } else {
        eprintln!("boosted trajectory is uniform; interpolation error {:e}", boosted.interpolation_error);
    }
    let text = config.to_json_pretty() + "\n";
    match &a.output {
        Some(path) => write_text(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct Info {
    kind: &'static str,
    smooth: bool,
    admissibility: crate::trajectory::AdmissibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    proper_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    significance_interval: Option<f64>,
}

pub fn cmd_info(a: &InfoArgs, out: &mut Out) -> Result<i32> {
    let traj = Trajectory::load(&a.traj.traj)?;
    let proper_time = match &a.proper_time {
        Some(s) => {
            let (t0, t1) = pair("proper-time", s)?;
            Some(traj.proper_time(t0, t1)?)
        }
        None => None,
    };
    let significance_interval = match (a.delta, a.v, a.t1) {
        (Some(d), Some(v), Some(t1)) => Some(significance_interval(d, v, t1, a.c)?),
        (None, None, None) => None,
        _ => return Err(Error::invalid_argument("delta", "--delta, --v and --t1 must be given together")),
    };
    let info = Info {
        kind: traj.kind_name(),
        smooth: traj.is_smooth(),
        admissibility: traj.check_admissible(a.stop_time),
        proper_time,
        significance_interval,
    };
    let text = if a.json {
        serde_json::to_string_pretty(&info).expect("info serializes") + "\n"
    } else {
        let r = &info.admissibility;
        let mut s = format!(
            "kind: {}\nsmooth (C3): {}\nstop time: {}\nspeed bound q(t1): {}\nacceleration bound A(t1): {}\nadmissible: {}\n",
            info.kind, info.smooth, r.stop_time, r.speed_bound, r.accel_bound, r.admissible
        );
        if let Some(p) = proper_time {
            s += &format!("proper time: {p}\n");
        }
        if let Some(i) = significance_interval {
            s += &format!("significance interval a: {i}\n");
        }
        s
    };
    emit(out, &text)?;
    Ok(if info.admissibility.admissible { 0 } else { 1 })
}
