//! Side-by-side comparison of the initial guess, Mellinger allocation and
//! peak optimization on one course.
//!
//! The baselines do not look at the limits while allocating time, so each is
//! stretched afterwards by the smallest uniform factor that makes it feasible
//! at the same tolerance the peak optimizer accepts.

use serde::{Deserialize, Serialize};

use crate::allocators::{initial_guess, mellinger_descent, AllocatorConfig};
use crate::course::WaypointCourse;
use crate::error::{Result, TrajError};
use crate::feasibility::{peak_report, MotionLimits, PeakReport};
use crate::peak::{optimize_from, PeakOptimizerConfig};
use crate::qp::{CostWeights, SmoothConfig, SmoothProblem};
use crate::trajectory::PiecewiseTrajectory;

pub const REPORT_SCHEMA: &str = "peak-traj/comparison/v1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub smooth: SmoothConfig,
    pub allocator: AllocatorConfig,
    pub peak: PeakOptimizerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub total_time: f64,
    pub segment_times: Vec<f64>,
    /// Uniform stretch applied to reach feasibility (1 for peak).
    pub scale: f64,
    pub feasible: bool,
    pub report: PeakReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum MethodOutcome {
    Ok(MethodResult),
    Failed { kind: String, message: String },
}

impl MethodOutcome {
    pub fn result(&self) -> Option<&MethodResult> {
        match self {
            MethodOutcome::Ok(r) => Some(r),
            MethodOutcome::Failed { .. } => None,
        }
    }

    fn from_result(r: Result<MethodResult>) -> Self {
        match r {
            Ok(r) => MethodOutcome::Ok(r),
            Err(e) => MethodOutcome::Failed {
                kind: match e {
                    TrajError::Convergence { .. } => "convergence",
                    TrajError::Numerical(_) => "numerical",
                    TrajError::Io(_) => "io",
                    _ => "validation",
                }
                .to_string(),
                message: e.to_string(),
            },
        }
    }

    fn total(&self) -> Option<f64> {
        self.result().map(|r| r.total_time)
    }
}

/// Percent reductions of total time, `100 (1 − a / b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reductions {
    pub peak_vs_initial: Option<f64>,
    pub peak_vs_mellinger: Option<f64>,
    pub mellinger_vs_initial: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema: String,
    pub course: String,
    pub limits: MotionLimits,
    pub tolerance: f64,
    pub initial: MethodOutcome,
    pub mellinger: MethodOutcome,
    pub peak: MethodOutcome,
    pub reductions: Reductions,
}

/// Smallest uniform factor `α` such that re-solving at `α τ` is feasible
/// within `tolerance`. Returns `α`, the scaled times and the trajectory.
pub fn scale_to_feasibility(
    problem: &SmoothProblem,
    times: &[f64],
    limits: &MotionLimits,
    tolerance: f64,
    min_segment_time: f64,
) -> Result<(f64, Vec<f64>, PiecewiseTrajectory)> {
    if !limits.can_hover() {
        return Err(TrajError::Convergence {
            message: "acceleration limit does not exceed gravity".into(),
            trace: Box::default(),
        });
    }
    let scaled = |a: f64| -> Vec<f64> { times.iter().map(|t| t * a).collect() };
    let feasible = |a: f64| -> Result<bool> {
        let traj = problem.solve(&scaled(a))?;
        Ok(peak_report(&traj, limits).is_feasible(tolerance))
    };
    let shortest = times.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = min_segment_time / shortest;

    let (mut lo, mut hi);
    if feasible(1.0)? {
        hi = 1.0;
        lo = 0.5;
        while lo > floor && feasible(lo)? {
            hi = lo;
            lo *= 0.5;
        }
        lo = lo.max(floor);
        if feasible(lo)? {
            hi = lo;
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut doublings = 0;
        while !feasible(hi)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(TrajError::Convergence {
                    message: "no uniform stretch makes the trajectory feasible".into(),
                    trace: Box::default(),
                });
            }
        }
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let out = scaled(hi);
    let traj = problem.solve(&out)?;
    Ok((hi, out, traj))
}

fn scaled_result(
    problem: &SmoothProblem,
    times: &[f64],
    limits: &MotionLimits,
    config: &CompareConfig,
) -> Result<MethodResult> {
    let tolerance = config.peak.tolerance();
    let (scale, segment_times, traj) =
        scale_to_feasibility(problem, times, limits, tolerance, config.peak.min_segment_time)?;
    let report = peak_report(&traj, limits);
    Ok(MethodResult {
        total_time: traj.total_time(),
        segment_times,
        scale,
        feasible: report.is_feasible(tolerance),
        report,
    })
}

fn reduction(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(100.0 * (1.0 - a? / b?))
}

/// Runs all three methods from the same distance-proportional start.
///
/// A method that fails is reported with its error instead of aborting the
/// comparison; only problem-setup errors propagate.
pub fn compare_methods(
    course: &WaypointCourse,
    limits: &MotionLimits,
    weights: &CostWeights,
    config: &CompareConfig,
) -> Result<ComparisonReport> {
    config.peak.validate()?;
    config.allocator.validate()?;
    let problem = SmoothProblem::new(course.clone(), weights.clone(), config.smooth)?;
    let total = config
        .peak
        .initial_total_time
        .unwrap_or(course.num_segments() as f64);
    let start = initial_guess(course, total)?;

    let initial = MethodOutcome::from_result(scaled_result(&problem, &start, limits, config));
    let mellinger = MethodOutcome::from_result(
        mellinger_descent(&problem, &start, &config.allocator)
            .and_then(|alloc| scaled_result(&problem, &alloc.times, limits, config)),
    );
    let peak = MethodOutcome::from_result(optimize_from(&problem, limits, &start, &config.peak).map(|(traj, _)| {
        let report = peak_report(&traj, limits);
        MethodResult {
            total_time: traj.total_time(),
            segment_times: traj.durations(),
            scale: 1.0,
            feasible: report.is_feasible(config.peak.tolerance()),
            report,
        }
    }));

    let reductions = Reductions {
        peak_vs_initial: reduction(peak.total(), initial.total()),
        peak_vs_mellinger: reduction(peak.total(), mellinger.total()),
        mellinger_vs_initial: reduction(mellinger.total(), initial.total()),
    };
    Ok(ComparisonReport {
        schema: REPORT_SCHEMA.to_string(),
        course: course.name().to_string(),
        limits: *limits,
        tolerance: config.peak.tolerance(),
        initial,
        mellinger,
        peak,
        reductions,
    })
}
