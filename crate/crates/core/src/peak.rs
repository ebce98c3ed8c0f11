//! Alternating peak optimization.
//!
//! The time-optimal problem (minimize `Σ τ_k` subject to the derivative
//! limits and the smoothness constraints) is split in two and alternated:
//!
//! 1. with the segment times fixed, solve the smoothness QP for the
//!    coefficients;
//! 2. with the coefficients fixed, measure each segment's normalized peaks
//!    `κ_k(s)` and rescale the segment times toward their most restrictive
//!    limit.
//!
//! The time update works in one of two modes. If any normalized peak is
//! above the upper edge of the convergence band, every segment time is
//! multiplied by the same factor `1 − δ₁(1 − max κ)`, which stretches the
//! whole trajectory without changing its shape. Otherwise each segment `k`
//! outside the band gets its own factor `1 − δ₁(1 − max κ_k)` and passes
//! `1 − δ₂(1 − max κ_k)` to its neighbours. All factors come from the same
//! old state and multiply together.

use serde::{Deserialize, Serialize};

use crate::allocators::{initial_guess, MIN_SEGMENT_TIME};
use crate::course::WaypointCourse;
use crate::error::{Result, TrajError};
use crate::feasibility::{peak_report, MotionLimits, PeakReport};
use crate::qp::{CostWeights, SmoothConfig, SmoothProblem};
use crate::trajectory::{Method, PiecewiseTrajectory, TrajectoryMeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakOptimizerConfig {
    /// Own-segment learning rate `δ₁`, in `(0, 1)`.
    pub first_rate: f64,
    /// Neighbour learning rate `δ₂`, in `[0, δ₁]`.
    pub second_rate: f64,
    /// Convergence band `[lo, hi]` on every segment's max κ.
    pub band: [f64; 2],
    pub max_iterations: usize,
    /// Stop once the best feasible total time improved by less than 0.1 %
    /// over this many iterations.
    pub stall_window: usize,
    pub min_segment_time: f64,
    /// Total time handed to the distance-proportional initial guess;
    /// defaults to one second per segment.
    pub initial_total_time: Option<f64>,
}

impl Default for PeakOptimizerConfig {
    fn default() -> Self {
        PeakOptimizerConfig {
            first_rate: 0.1,
            second_rate: 0.05,
            band: [0.95, 1.05],
            max_iterations: 500,
            stall_window: 50,
            min_segment_time: MIN_SEGMENT_TIME,
            initial_total_time: None,
        }
    }
}

const STALL_IMPROVEMENT: f64 = 1e-3;

impl PeakOptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.band;
        let ok = self.first_rate > 0.0
            && self.first_rate < 1.0
            && self.second_rate >= 0.0
            && self.second_rate <= self.first_rate
            && lo > 0.0
            && lo < 1.0
            && hi > 1.0
            && hi.is_finite()
            && self.max_iterations >= 1
            && self.min_segment_time > 0.0
            && self.initial_total_time.map_or(true, |t| t > 0.0 && t.is_finite());
        if ok {
            Ok(())
        } else {
            Err(TrajError::validation(format!("invalid peak optimizer configuration {self:?}")))
        }
    }

    /// Feasibility tolerance implied by the band, `hi − 1`.
    pub fn tolerance(&self) -> f64 {
        self.band[1] - 1.0
    }

    /// Whether `kappa` lies inside the convergence band.
    pub fn in_band(&self, kappa: f64) -> bool {
        (self.band[0]..=self.band[1]).contains(&kappa)
    }
}

/// Which time update an iteration applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdatePhase {
    UniformScale,
    PerSegment,
    /// No update: the run stopped at this iterate.
    Hold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub segment_times: Vec<f64>,
    pub total_time: f64,
    pub max_kappa: f64,
    pub segment_max_kappa: Vec<f64>,
    pub feasible: bool,
    pub phase: UpdatePhase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    pub entries: Vec<TraceEntry>,
    pub converged: bool,
    /// Iteration whose trajectory was returned.
    pub best_iteration: Option<usize>,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    /// Final `n` entries.
    pub fn tail(&self, n: usize) -> &[TraceEntry] {
        &self.entries[self.entries.len().saturating_sub(n)..]
    }
}

/// One alternation's time update, computed entirely from `old` and the
/// report of the trajectory built from `old`.
pub fn update_segment_times(
    old: &[f64],
    report: &PeakReport,
    config: &PeakOptimizerConfig,
) -> (Vec<f64>, UpdatePhase) {
    let floor = config.min_segment_time;
    if report.max_kappa > config.band[1] {
        let factor = 1.0 - config.first_rate * (1.0 - report.max_kappa);
        let times = old.iter().map(|t| (t * factor).max(floor)).collect();
        return (times, UpdatePhase::UniformScale);
    }

    let kappas = report.segment_max_kappa();
    let own = |k: usize| {
        if config.in_band(kappas[k]) {
            1.0
        } else {
            1.0 - config.first_rate * (1.0 - kappas[k])
        }
    };
    let neighbour = |k: usize| {
        if config.in_band(kappas[k]) {
            1.0
        } else {
            1.0 - config.second_rate * (1.0 - kappas[k])
        }
    };
    let last = old.len() - 1;
    let times = old
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut factor = own(k);
            if k > 0 {
                factor *= neighbour(k - 1);
            }
            if k < last {
                factor *= neighbour(k + 1);
            }
            (t * factor).max(floor)
        })
        .collect();
    (times, UpdatePhase::PerSegment)
}

/// Peak optimization from the distance-proportional initial guess.
pub fn optimize(
    course: &WaypointCourse,
    limits: &MotionLimits,
    weights: &CostWeights,
    smooth: SmoothConfig,
    config: &PeakOptimizerConfig,
) -> Result<(PiecewiseTrajectory, IterationTrace)> {
    let problem = SmoothProblem::new(course.clone(), weights.clone(), smooth)?;
    let total = config
        .initial_total_time
        .unwrap_or(course.num_segments() as f64);
    let initial = initial_guess(course, total)?;
    optimize_from(&problem, limits, &initial, config)
}

/// Peak optimization from caller-supplied segment times.
///
/// Returns the feasible iterate with the smallest total time together with
/// the full trace. Fails with a convergence error when no iterate is feasible
/// within the iteration cap, or immediately when the thrust limit cannot
/// even support hovering.
pub fn optimize_from(
    problem: &SmoothProblem,
    limits: &MotionLimits,
    initial: &[f64],
    config: &PeakOptimizerConfig,
) -> Result<(PiecewiseTrajectory, IterationTrace)> {
    config.validate()?;
    let mut trace = IterationTrace::default();
    if !limits.can_hover() {
        return Err(TrajError::Convergence {
            message: format!(
                "acceleration limit {} does not exceed gravity {}; hovering is already infeasible",
                limits.acceleration, limits.gravity
            ),
            trace: Box::new(trace),
        });
    }
    if initial.len() != problem.num_segments() {
        return Err(TrajError::validation(format!(
            "expected {} segment times, got {}",
            problem.num_segments(),
            initial.len()
        )));
    }

    let tolerance = config.tolerance();
    let mut times: Vec<f64> = initial.iter().map(|t| t.max(config.min_segment_time)).collect();
    let mut best: Option<(PiecewiseTrajectory, f64)> = None;
    // best feasible total time after each iteration, for stall detection
    let mut best_history: Vec<Option<f64>> = Vec::new();

    for iteration in 0..config.max_iterations {
        let traj = problem.solve(&times)?;
        let report = peak_report(&traj, limits);
        let total = traj.total_time();
        let feasible = report.is_feasible(tolerance);
        let segment_max_kappa = report.segment_max_kappa();
        let converged = segment_max_kappa.iter().all(|&k| config.in_band(k));
        if feasible && best.as_ref().map_or(true, |(_, t)| total < *t) {
            best = Some((traj, total));
            trace.best_iteration = Some(iteration);
        }
        let best_total = best.as_ref().map(|(_, t)| *t);
        best_history.push(best_total);

        let stalled = config.stall_window > 0
            && iteration >= config.stall_window
            && match (best_history[iteration - config.stall_window], best_total) {
                (Some(then), Some(now)) => then - now < STALL_IMPROVEMENT * then,
                _ => false,
            };

        let mut entry = TraceEntry {
            iteration,
            segment_times: times.clone(),
            total_time: total,
            max_kappa: report.max_kappa,
            segment_max_kappa,
            feasible,
            phase: UpdatePhase::Hold,
        };
        if converged || stalled {
            trace.entries.push(entry);
            trace.converged = converged;
            break;
        }
        let (next, phase) = update_segment_times(&times, &report, config);
        entry.phase = phase;
        trace.entries.push(entry);
        times = next;
    }

    match best {
        Some((traj, _)) => {
            let meta = TrajectoryMeta {
                method: Method::Peak,
                ..traj.meta().clone()
            };
            let traj = PiecewiseTrajectory::new(traj.segments().to_vec(), meta)?;
            Ok((traj, trace))
        }
        None => Err(TrajError::Convergence {
            message: format!(
                "no feasible iterate within {} iterations (last max kappa {:.4})",
                trace.entries.len(),
                trace.last().map_or(f64::NAN, |e| e.max_kappa)
            ),
            trace: Box::new(trace),
        }),
    }
}
