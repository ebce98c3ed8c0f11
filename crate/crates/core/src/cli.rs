//! Command-line front end: `optimize`, `check`, `sample`, `compare`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation or usage error,
//! 3 convergence failure, 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::allocators::{bry_descent, initial_guess, mellinger_descent};
use crate::compare::{compare_methods, CompareConfig};
use crate::course::{random_course, WaypointCourse};
use crate::error::{Result, TrajError};
use crate::feasibility::{peak_report, MotionLimits, STANDARD_GRAVITY};
use crate::io::{
    export_report, export_samples, parse_manifest, read_course_document, CourseDocument, Preset, RunManifest,
    RunMethod, RunReport, TraceDocument, WeightsSpec, FAILED_TRACE_TAIL,
};
use crate::peak::optimize_from;
use crate::qp::{SmoothConfig, SmoothProblem};
use crate::trajectory::{Method, PiecewiseTrajectory, TrajectoryMeta};

#[derive(Debug, Parser)]
#[command(name = "peak-traj", version, about = "Time-optimal polynomial trajectories through waypoints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Allocate segment times and write the trajectory with its peak report.
    Optimize(RunArgs),
    /// Build a trajectory and report its feasibility against the limits.
    Check(RunArgs),
    /// Build a trajectory and export dense samples as CSV.
    Sample(RunArgs),
    /// Compare the initial guess, Mellinger allocation and peak optimization.
    Compare(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Course file (JSON).
    #[arg(long)]
    course: Option<PathBuf>,
    /// Replay a saved run manifest instead of reading the flags below.
    #[arg(long, conflicts_with = "course")]
    manifest: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<RunMethod>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Velocity, acceleration, jerk and snap limits.
    #[arg(long, value_delimiter = ',')]
    limits: Option<Vec<f64>>,
    #[arg(long)]
    order: Option<usize>,
    /// First learning rate.
    #[arg(long)]
    d1: Option<f64>,
    /// Second learning rate.
    #[arg(long)]
    d2: Option<f64>,
    /// Convergence band on normalized peaks.
    #[arg(long, value_delimiter = ',')]
    band: Option<Vec<f64>>,
    /// Total time for the initial guess, seconds.
    #[arg(long)]
    total_time: Option<f64>,
    /// Time penalty for the `bry` method.
    #[arg(long)]
    ct: Option<f64>,
    /// Sample step for `sample`, seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration trace output (peak method).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Generate a random course from this seed when no course file is given.
    #[arg(long)]
    seed: Option<u64>,
    /// Legs of a generated course.
    #[arg(long)]
    segments: Option<usize>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "peak-traj: {e}");
            e.exit_code()
        }
    }
}

struct Setup {
    manifest: RunManifest,
    course: WaypointCourse,
}

fn build_setup(args: &RunArgs, forced: Option<RunMethod>) -> Result<Setup> {
    if let Some(path) = &args.manifest {
        let mut manifest = parse_manifest(&std::fs::read(path)?)?;
        if let Some(m) = forced {
            manifest.method = m;
        }
        if args.out.is_some() {
            manifest.out.clone_from(&args.out);
        }
        if args.trace.is_some() {
            manifest.trace.clone_from(&args.trace);
        }
        let course = load_course(&manifest)?.course;
        manifest.validate()?;
        return Ok(Setup { manifest, course });
    }

    let method = forced.or(args.method).unwrap_or(RunMethod::Peak);
    if forced.is_some() && args.method.is_some_and(|m| Some(m) != forced) {
        return Err(TrajError::validation("compare runs every method; drop --method"));
    }
    let mut manifest = RunManifest::new(method);
    manifest.course.clone_from(&args.course);
    manifest.seed = args.seed;
    if let Some(k) = args.segments {
        manifest.segments = k;
    }
    let doc = load_course(&manifest)?;

    if let Some(p) = args.preset.or(doc.preset) {
        manifest.weights = WeightsSpec::Preset(p);
    }
    if let Some(n) = args.order.or(doc.order) {
        manifest.order = n;
    }
    manifest.limits = match &args.limits {
        Some(v) if v.len() != 4 => {
            return Err(TrajError::validation(format!("--limits takes 4 values, got {}", v.len())))
        }
        Some(v) => {
            let gravity = doc.limits.map_or(STANDARD_GRAVITY, |l| l.gravity);
            Some(MotionLimits::new(v[0], v[1], v[2], v[3])?.with_gravity(gravity)?)
        }
        None => doc.limits,
    };
    if let Some(d1) = args.d1 {
        manifest.peak.first_rate = d1;
    }
    if let Some(d2) = args.d2 {
        manifest.peak.second_rate = d2;
    }
    if let Some(b) = &args.band {
        if b.len() != 2 {
            return Err(TrajError::validation(format!("--band takes 2 values, got {}", b.len())));
        }
        manifest.peak.band = [b[0], b[1]];
    }
    if let Some(t) = args.total_time {
        manifest.total_time = Some(t);
        manifest.peak.initial_total_time = Some(t);
    }
    if let Some(ct) = args.ct {
        manifest.allocator.time_penalty = ct;
    }
    if let Some(dt) = args.dt {
        manifest.dt = dt;
    }
    manifest.out.clone_from(&args.out);
    manifest.trace.clone_from(&args.trace);
    manifest.validate()?;
    Ok(Setup {
        manifest,
        course: doc.course,
    })
}

fn load_course(manifest: &RunManifest) -> Result<CourseDocument> {
    match (&manifest.course, manifest.seed) {
        (Some(path), _) => read_course_document(path),
        (None, Some(seed)) => Ok(CourseDocument {
            course: random_course(seed, manifest.segments)?,
            limits: None,
            order: None,
            preset: None,
        }),
        (None, None) => Err(TrajError::validation("either --course or --seed is required")),
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Optimize(args) => {
            let setup = build_setup(&args, None)?;
            run_single(&setup, true, stdout)
        }
        Command::Check(args) => {
            let setup = build_setup(&args, None)?;
            if setup.manifest.limits.is_none() {
                return Err(TrajError::validation("check needs --limits or a limits block in the course"));
            }
            run_single(&setup, false, stdout)
        }
        Command::Sample(args) => {
            let setup = build_setup(&args, None)?;
            let (traj, _) = build_trajectory(&setup)?;
            let gravity = setup.manifest.limits.map_or(STANDARD_GRAVITY, |l| l.gravity);
            with_output(setup.manifest.out.as_deref(), stdout, |w| {
                export_samples(&traj, setup.manifest.dt, gravity, w).map(|_| ())
            })
        }
        Command::Compare(args) => {
            let setup = build_setup(&args, Some(RunMethod::Compare))?;
            let m = &setup.manifest;
            let config = CompareConfig {
                smooth: SmoothConfig::with_order(m.order),
                allocator: m.allocator,
                peak: m.peak,
            };
            let limits = m.limits.expect("validated");
            let report = compare_methods(&setup.course, &limits, &m.weights.weights(), &config)?;
            with_output(m.out.as_deref(), stdout, |w| export_report(&report, w))
        }
    }
}

fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(p)?);
            f(&mut file)
        }
        None => f(stdout),
    }
}

type Built = (PiecewiseTrajectory, Option<crate::peak::IterationTrace>);

fn build_trajectory(setup: &Setup) -> Result<Built> {
    let m = &setup.manifest;
    let problem = SmoothProblem::new(setup.course.clone(), m.weights.weights(), SmoothConfig::with_order(m.order))?;
    let total = m.total_time.unwrap_or(setup.course.num_segments() as f64);
    let start = initial_guess(&setup.course, total)?;
    let (times, method) = match m.method {
        RunMethod::Initial => (start, Method::Initial),
        RunMethod::Mellinger => (mellinger_descent(&problem, &start, &m.allocator)?.times, Method::Mellinger),
        RunMethod::Bry => (bry_descent(&problem, &start, &m.allocator)?.times, Method::Bry),
        RunMethod::Peak => {
            let limits = m.limits.expect("validated");
            let (traj, trace) = optimize_from(&problem, &limits, &start, &m.peak)?;
            return Ok((traj, Some(trace)));
        }
        RunMethod::Compare => return Err(TrajError::validation("use the compare subcommand")),
    };
    let traj = problem.solve(&times)?;
    let meta = TrajectoryMeta {
        method,
        ..traj.meta().clone()
    };
    Ok((PiecewiseTrajectory::new(traj.segments().to_vec(), meta)?, None))
}

fn run_single(setup: &Setup, include_trajectory: bool, stdout: &mut dyn Write) -> Result<()> {
    let m = &setup.manifest;
    let mut report = RunReport::new(m, &setup.course);
    let (traj, trace) = match build_trajectory(setup) {
        Ok(built) => built,
        Err(TrajError::Convergence { message, trace }) => {
            report.converged = Some(false);
            report.error = Some(message.clone());
            report.trace_tail = Some(trace.tail(FAILED_TRACE_TAIL).to_vec());
            with_output(m.out.as_deref(), stdout, |w| export_report(&report, w))?;
            if let Some(p) = &m.trace {
                with_output(Some(p), stdout, |w| export_report(&TraceDocument::new(&setup.course, &trace), w))?;
            }
            return Err(TrajError::Convergence { message, trace });
        }
        Err(e) => return Err(e),
    };

    report.total_time = Some(traj.total_time());
    report.segment_times = Some(traj.durations());
    if let Some(limits) = &m.limits {
        let peaks = peak_report(&traj, limits);
        report.feasible = Some(peaks.is_feasible(m.peak.tolerance()));
        report.peaks = Some(peaks);
    }
    if let Some(t) = &trace {
        report.converged = Some(t.converged);
        if !t.converged {
            report.trace_tail = Some(t.tail(FAILED_TRACE_TAIL).to_vec());
        }
    }
    if include_trajectory {
        report.trajectory = Some(traj);
    }
    with_output(m.out.as_deref(), stdout, |w| export_report(&report, w))?;
    if let (Some(p), Some(t)) = (&m.trace, &trace) {
        with_output(Some(p), stdout, |w| export_report(&TraceDocument::new(&setup.course, t), w))?;
    }
    Ok(())
}
