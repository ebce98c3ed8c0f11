//! Segment-time allocation baselines.
//!
//! * [`initial_guess`] splits a total time proportionally to leg length.
//! * [`mellinger_descent`] redistributes a fixed total time to minimize the
//!   smoothness cost, using finite differences along sum-preserving probe
//!   directions.
//! * [`bry_descent`] drops the fixed total and minimizes the smoothness cost
//!   plus `c_t Σ τ_k`, re-solving the coefficients after every time step.
//!
//! Both descents use a backtracking line search, so the accepted costs are
//! non-increasing.

use serde::{Deserialize, Serialize};

use crate::course::WaypointCourse;
use crate::error::{Result, TrajError};
use crate::qp::SmoothProblem;

/// Floor on every segment time, seconds.
pub const MIN_SEGMENT_TIME: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AllocatorConfig {
    /// Weight `c_t` on the total time (time-penalized descent only).
    pub time_penalty: f64,
    /// Finite-difference step in seconds; `None` means `1e-4 · T`.
    pub fd_step: Option<f64>,
    /// Initial step as a fraction of the starting total time.
    pub step_size: f64,
    /// Step shrink factor per backtracking trial.
    pub backtrack: f64,
    pub max_halvings: usize,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the cost by less than this fraction.
    pub tolerance: f64,
    pub min_segment_time: f64,
}

impl Default for AllocatorConfig {
    fn default() -> Self {
        AllocatorConfig {
            time_penalty: 0.0,
            fd_step: None,
            step_size: 0.1,
            backtrack: 0.5,
            max_halvings: 20,
            max_iterations: 200,
            tolerance: 1e-6,
            min_segment_time: MIN_SEGMENT_TIME,
        }
    }
}

impl AllocatorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.time_penalty >= 0.0
            && self.time_penalty.is_finite()
            && self.fd_step.map_or(true, |h| h > 0.0 && h.is_finite())
            && self.step_size > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.max_iterations >= 1
            && self.tolerance >= 0.0
            && self.min_segment_time > 0.0;
        if ok {
            Ok(())
        } else {
            Err(TrajError::validation(format!("invalid allocator configuration {self:?}")))
        }
    }
}

/// Outcome of a descent run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub times: Vec<f64>,
    pub cost: f64,
    pub initial_cost: f64,
    /// Cost after each accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
    pub iterations: usize,
}

/// `τ_k = T d_k / Σ d_j`; the last entry absorbs rounding so `Σ τ_k = T`.
pub fn initial_guess(course: &WaypointCourse, total_time: f64) -> Result<Vec<f64>> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(TrajError::validation(format!("total time must be positive, got {total_time}")));
    }
    let legs = course.leg_lengths();
    if let Some(k) = legs.iter().position(|&d| d <= 0.0) {
        return Err(TrajError::validation(format!("waypoints {k} and {} coincident", k + 1)));
    }
    let sum: f64 = legs.iter().sum();
    let mut times: Vec<f64> = legs.iter().map(|d| total_time * d / sum).collect();
    let head: f64 = times[..times.len() - 1].iter().sum();
    *times.last_mut().unwrap() = total_time - head;
    Ok(times)
}

fn probe_cost(problem: &SmoothProblem, times: &[f64]) -> Result<f64> {
    problem.cost(times).map_err(|e| match e {
        TrajError::Numerical(msg) => TrajError::Numerical(format!("{msg}; probe segment times {times:?}")),
        other => other,
    })
}

/// Forward differences of the smoothness cost along the sum-preserving probe
/// directions `e_i − (1 − e_i)/(K − 1)`, and the descent direction
/// `−Σ g_i v_i` they define. Both are empty for a single segment.
pub fn mellinger_direction(problem: &SmoothProblem, times: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let base = probe_cost(problem, times)?;
    mellinger_direction_from(problem, times, base, h)
}

fn mellinger_direction_from(
    problem: &SmoothProblem,
    times: &[f64],
    base: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = times.len();
    if k < 2 {
        return Ok((Vec::new(), Vec::new()));
    }
    let spread = h / (k - 1) as f64;
    let mut grads = Vec::with_capacity(k);
    for i in 0..k {
        let probe: Vec<f64> = times
            .iter()
            .enumerate()
            .map(|(j, &t)| if j == i { t + h } else { t - spread })
            .collect();
        grads.push((probe_cost(problem, &probe)? - base) / h);
    }
    let sum: f64 = grads.iter().sum();
    let direction = grads
        .iter()
        .map(|&g| -(g - (sum - g) / (k - 1) as f64))
        .collect();
    Ok((grads, direction))
}

/// Largest `a` with `times + a · dir ≥ floor` componentwise.
fn max_step(times: &[f64], dir: &[f64], floor: f64) -> f64 {
    times
        .iter()
        .zip(dir)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&t, &d)| ((t - floor) / -d).max(0.0))
        .fold(f64::INFINITY, f64::min)
}

fn normalize(dir: &mut [f64]) -> bool {
    let m = dir.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    if !(m > 0.0) || !m.is_finite() {
        return false;
    }
    dir.iter_mut().for_each(|d| *d /= m);
    true
}

/// Descent on `f(τ)` subject to `Σ τ_k = T` (taken from `initial`) and
/// `τ_k ≥ τ_min`.
pub fn mellinger_descent(problem: &SmoothProblem, initial: &[f64], config: &AllocatorConfig) -> Result<Allocation> {
    config.validate()?;
    check_initial(problem, initial, config)?;
    let total: f64 = initial.iter().sum();
    let h = config.fd_step.unwrap_or(1e-4 * total);
    let mut times = initial.to_vec();
    let mut cost = probe_cost(problem, &times)?;
    let mut out = Allocation {
        times: times.clone(),
        cost,
        initial_cost: cost,
        cost_history: vec![cost],
        iterations: 0,
    };
    if times.len() < 2 {
        return Ok(out);
    }

    let mut alpha = config.step_size;
    for iter in 0..config.max_iterations {
        out.iterations = iter + 1;
        let (_, mut dir) = mellinger_direction_from(problem, &times, cost, h)?;
        if !normalize(&mut dir) {
            break;
        }
        let scaled: Vec<f64> = dir.iter().map(|d| d * total).collect();
        let mut a = alpha.min(max_step(&times, &scaled, config.min_segment_time));
        if !(a > 0.0) {
            break;
        }
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let cand: Vec<f64> = times
                .iter()
                .zip(&scaled)
                .map(|(t, d)| (t + a * d).max(config.min_segment_time))
                .collect();
            let c = probe_cost(problem, &cand)?;
            if c < cost {
                accepted = Some((cand, c));
                break;
            }
            a *= config.backtrack;
        }
        let Some((cand, c)) = accepted else { break };
        let decrease = (cost - c) / cost.abs().max(f64::MIN_POSITIVE);
        times = cand;
        cost = c;
        out.cost_history.push(cost);
        alpha = (2.0 * a).min(config.step_size);
        if decrease < config.tolerance {
            break;
        }
    }
    out.times = times;
    out.cost = cost;
    Ok(out)
}

/// Descent on `f(τ) + c_t Σ τ_k` with only the floor `τ_k ≥ τ_min`.
pub fn bry_descent(problem: &SmoothProblem, initial: &[f64], config: &AllocatorConfig) -> Result<Allocation> {
    config.validate()?;
    check_initial(problem, initial, config)?;
    let scale: f64 = initial.iter().sum();
    let h = config.fd_step.unwrap_or(1e-4 * scale);
    let floor = config.min_segment_time;
    let objective = |times: &[f64]| -> Result<f64> {
        Ok(probe_cost(problem, times)? + config.time_penalty * times.iter().sum::<f64>())
    };

    let mut times = initial.to_vec();
    let mut cost = objective(&times)?;
    let mut out = Allocation {
        times: times.clone(),
        cost,
        initial_cost: cost,
        cost_history: vec![cost],
        iterations: 0,
    };
    let mut alpha = config.step_size;
    for iter in 0..config.max_iterations {
        out.iterations = iter + 1;
        let mut dir = Vec::with_capacity(times.len());
        for i in 0..times.len() {
            let mut probe = times.clone();
            probe[i] += h;
            let g = (objective(&probe)? - cost) / h;
            // components pushing into the floor are projected out
            dir.push(if times[i] <= floor && g > 0.0 { 0.0 } else { -g });
        }
        if !normalize(&mut dir) {
            break;
        }
        let mut a = alpha;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let cand: Vec<f64> = times
                .iter()
                .zip(&dir)
                .map(|(t, d)| (t + a * scale * d).max(floor))
                .collect();
            if cand == times {
                break;
            }
            let c = objective(&cand)?;
            if c < cost {
                accepted = Some((cand, c));
                break;
            }
            a *= config.backtrack;
        }
        let Some((cand, c)) = accepted else { break };
        let decrease = (cost - c) / cost.abs().max(f64::MIN_POSITIVE);
        times = cand;
        cost = c;
        out.cost_history.push(cost);
        alpha = (2.0 * a).min(config.step_size);
        if decrease < config.tolerance {
            break;
        }
    }
    out.times = times;
    out.cost = cost;
    Ok(out)
}

fn check_initial(problem: &SmoothProblem, initial: &[f64], config: &AllocatorConfig) -> Result<()> {
    if initial.len() != problem.num_segments() {
        return Err(TrajError::validation(format!(
            "expected {} segment times, got {}",
            problem.num_segments(),
            initial.len()
        )));
    }
    if initial.iter().any(|&t| !(t >= config.min_segment_time) || !t.is_finite()) {
        return Err(TrajError::validation(format!(
            "initial segment times must be at least {} s, got {initial:?}",
            config.min_segment_time
        )));
    }
    Ok(())
}
