//! Piecewise-polynomial trajectory representation.
//!
//! Every segment stores one monomial polynomial per axis in local time
//! `t ∈ [0, τ]`, so the position on an axis is `Σ c_i t^i`. Segments are laid
//! end to end; absolute time `t` maps to the segment containing it and the
//! local offset from that segment's start.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Result, TrajError};
use crate::poly;

/// Highest polynomial order supported by the solver.
pub const MAX_ORDER: usize = 9;

/// How a trajectory's segment times were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Caller supplied the segment times.
    Fixed,
    Initial,
    Mellinger,
    Bry,
    Peak,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    /// Highest derivative order carrying weight in the smoothness cost.
    pub minimized_order: Option<usize>,
    /// Derivative order up to which joints are continuous.
    pub continuity_order: usize,
    pub method: Method,
}

impl Default for TrajectoryMeta {
    fn default() -> Self {
        TrajectoryMeta {
            minimized_order: None,
            continuity_order: 0,
            method: Method::Fixed,
        }
    }
}

/// One polynomial piece: `N + 1` coefficients per position axis plus an
/// optional yaw polynomial carried along unchanged by the optimizers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentPolynomial {
    coefficients: [Vec<f64>; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    yaw: Option<Vec<f64>>,
    duration: f64,
}

impl SegmentPolynomial {
    pub fn new(coefficients: [Vec<f64>; 3], duration: f64) -> Result<Self> {
        Self::with_yaw(coefficients, None, duration)
    }

    pub fn with_yaw(coefficients: [Vec<f64>; 3], yaw: Option<Vec<f64>>, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(TrajError::validation(format!(
                "segment duration must be positive and finite, got {duration}"
            )));
        }
        let len = coefficients[0].len();
        if len < 2 || len > MAX_ORDER + 1 {
            return Err(TrajError::validation(format!(
                "polynomial order must lie in 1..={MAX_ORDER}, got {}",
                len as i64 - 1
            )));
        }
        let yaw_len = yaw.as_ref().map_or(len, Vec::len);
        if coefficients.iter().any(|c| c.len() != len) || yaw_len != len {
            return Err(TrajError::validation(
                "all axes of a segment must share the same polynomial order",
            ));
        }
        let all_finite = coefficients
            .iter()
            .chain(yaw.iter())
            .flatten()
            .all(|c| c.is_finite());
        if !all_finite {
            return Err(TrajError::validation("non-finite polynomial coefficient"));
        }
        Ok(SegmentPolynomial {
            coefficients,
            yaw,
            duration,
        })
    }

    /// Rest polynomial holding `position` for `duration` seconds.
    pub fn stationary(position: [f64; 3], order: usize, duration: f64) -> Result<Self> {
        let axis = |v: f64| {
            let mut c = vec![0.0; order + 1];
            c[0] = v;
            c
        };
        Self::new([axis(position[0]), axis(position[1]), axis(position[2])], duration)
    }

    pub fn order(&self) -> usize {
        self.coefficients[0].len() - 1
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn coefficients(&self, axis: usize) -> &[f64] {
        &self.coefficients[axis]
    }

    pub fn yaw(&self) -> Option<&[f64]> {
        self.yaw.as_deref()
    }

    /// `s`-th derivative at local time `t`; zero for `s > N`.
    pub fn derivative(&self, t: f64, s: usize) -> Vector3<f64> {
        Vector3::new(
            poly::eval_derivative(&self.coefficients[0], t, s),
            poly::eval_derivative(&self.coefficients[1], t, s),
            poly::eval_derivative(&self.coefficients[2], t, s),
        )
    }

    pub fn yaw_derivative(&self, t: f64, s: usize) -> Option<f64> {
        self.yaw.as_ref().map(|c| poly::eval_derivative(c, t, s))
    }
}

/// The central artifact: `K ≥ 1` segments joined end to end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseTrajectory {
    segments: Vec<SegmentPolynomial>,
    meta: TrajectoryMeta,
}

/// State of a trajectory at one instant, derivatives up to snap.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub jerk: Vector3<f64>,
    pub snap: Vector3<f64>,
    pub velocity_norm: f64,
    pub acceleration_norm: f64,
    pub jerk_norm: f64,
    pub snap_norm: f64,
}

const JOINT_TOLERANCE: f64 = 1e-6;

impl PiecewiseTrajectory {
    /// Builds a trajectory, checking the per-segment invariants and position
    /// continuity at every interior joint.
    pub fn new(segments: Vec<SegmentPolynomial>, meta: TrajectoryMeta) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| TrajError::validation("a trajectory needs at least one segment"))?;
        let order = first.order();
        let yaw = first.yaw.is_some();
        if segments.iter().any(|s| s.order() != order || s.yaw.is_some() != yaw) {
            return Err(TrajError::validation(
                "all segments must share the same order and axis set",
            ));
        }
        for (k, pair) in segments.windows(2).enumerate() {
            let end = pair[0].derivative(pair[0].duration, 0);
            let start = pair[1].derivative(0.0, 0);
            let scale = 1.0f64.max(end.amax());
            if (end - start).amax() > JOINT_TOLERANCE * scale {
                return Err(TrajError::validation(format!(
                    "position discontinuity between segments {k} and {}",
                    k + 1
                )));
            }
        }
        Ok(PiecewiseTrajectory { segments, meta })
    }

    pub fn segments(&self) -> &[SegmentPolynomial] {
        &self.segments
    }

    pub fn segment(&self, k: usize) -> Option<&SegmentPolynomial> {
        self.segments.get(k)
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn order(&self) -> usize {
        self.segments[0].order()
    }

    pub fn has_yaw(&self) -> bool {
        self.segments[0].yaw.is_some()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.duration).collect()
    }

    pub fn total_time(&self) -> f64 {
        *self.segment_start_times().last().unwrap()
    }

    /// Prefix sums `[0, τ₁, τ₁+τ₂, …]`, one entry longer than the segment list.
    pub fn segment_start_times(&self) -> Vec<f64> {
        segment_start_times(&self.durations())
    }

    /// Segment index and local time for absolute time `t`. Joints resolve to
    /// the later segment, the final instant to the last one.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let starts = self.segment_start_times();
        let end = *starts.last().unwrap();
        if !(0.0..=end).contains(&t) {
            return Err(TrajError::Domain { t, start: 0.0, end });
        }
        let k = starts[..self.segments.len()].partition_point(|&s| s <= t) - 1;
        let local = (t - starts[k]).clamp(0.0, self.segments[k].duration);
        Ok((k, local))
    }

    /// `s`-th time derivative of the position at absolute time `t`.
    pub fn evaluate(&self, t: f64, s: usize) -> Result<Vector3<f64>> {
        if s > self.order() {
            return Err(TrajError::validation(format!(
                "derivative order {s} exceeds polynomial order {}",
                self.order()
            )));
        }
        let (k, local) = self.locate(t)?;
        Ok(self.segments[k].derivative(local, s))
    }

    pub fn evaluate_yaw(&self, t: f64, s: usize) -> Result<Option<f64>> {
        let (k, local) = self.locate(t)?;
        Ok(self.segments[k].yaw_derivative(local, s))
    }

    /// Full state at `t`.
    pub fn sample_at(&self, t: f64) -> Result<TrajectorySample> {
        let (k, local) = self.locate(t)?;
        let seg = &self.segments[k];
        let d = |s| seg.derivative(local, s);
        let (velocity, acceleration, jerk, snap) = (d(1), d(2), d(3), d(4));
        Ok(TrajectorySample {
            time: t,
            position: d(0),
            velocity_norm: velocity.norm(),
            acceleration_norm: acceleration.norm(),
            jerk_norm: jerk.norm(),
            snap_norm: snap.norm(),
            velocity,
            acceleration,
            jerk,
            snap,
        })
    }

    /// Samples at `0, dt, 2dt, …` followed by the exact final time.
    pub fn sample(&self, dt: f64) -> Result<Vec<TrajectorySample>> {
        sample_times(self.total_time(), dt)?
            .into_iter()
            .map(|t| self.sample_at(t))
            .collect()
    }

    /// Largest left/right mismatch of the `s`-th derivative over all joints.
    pub fn joint_defect(&self, s: usize) -> f64 {
        self.segments
            .windows(2)
            .map(|p| (p[0].derivative(p[0].duration, s) - p[1].derivative(0.0, s)).amax())
            .fold(0.0, f64::max)
    }
}

/// Prefix sums of segment durations.
pub fn segment_start_times(durations: &[f64]) -> Vec<f64> {
    let mut starts = Vec::with_capacity(durations.len() + 1);
    let mut acc = 0.0;
    starts.push(acc);
    for &d in durations {
        acc += d;
        starts.push(acc);
    }
    starts
}

/// Uniform sampling grid over `[0, total]` that always ends on `total`.
pub fn sample_times(total: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(TrajError::validation(format!("sample step must be positive, got {dt}")));
    }
    // grid points this close to the end are replaced by the end itself
    let snap = 1e-9 * dt;
    let mut times = Vec::new();
    let mut i = 0u64;
    loop {
        let t = i as f64 * dt;
        if t >= total - snap {
            break;
        }
        times.push(t);
        i += 1;
    }
    times.push(total);
    Ok(times)
}
