//! Peak derivative norms per segment, normalized against motion limits.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrajError};
use crate::poly;
use crate::trajectory::{PiecewiseTrajectory, SegmentPolynomial};

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Uniform samples per segment before refinement.
const PEAK_SAMPLES: usize = 256;
/// Sampled local maxima refined by golden-section search.
const REFINED_CANDIDATES: usize = 4;

/// Limits on velocity, acceleration (mass-normalized thrust), jerk and snap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionLimits {
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
    pub snap: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

impl MotionLimits {
    /// All limits must be positive. Acceleration limits at or below gravity
    /// are accepted here (they describe a vehicle that cannot hover) and
    /// rejected by the optimizers.
    pub fn new(velocity: f64, acceleration: f64, jerk: f64, snap: f64) -> Result<Self> {
        MotionLimits {
            velocity,
            acceleration,
            jerk,
            snap,
            gravity: STANDARD_GRAVITY,
        }
        .validated()
    }

    pub fn with_gravity(mut self, gravity: f64) -> Result<Self> {
        self.gravity = gravity;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let all = [self.velocity, self.acceleration, self.jerk, self.snap];
        if all.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(TrajError::validation(format!("motion limits must be positive, got {all:?}")));
        }
        if !(self.gravity >= 0.0) || !self.gravity.is_finite() {
            return Err(TrajError::validation(format!("gravity must be nonnegative, got {}", self.gravity)));
        }
        Ok(self)
    }

    /// Limit of derivative order `s ∈ 1..=4`.
    pub fn limit(&self, s: usize) -> f64 {
        match s {
            1 => self.velocity,
            2 => self.acceleration,
            3 => self.jerk,
            4 => self.snap,
            _ => panic!("no limit for derivative order {s}"),
        }
    }

    /// Whether the thrust limit exceeds what hovering needs.
    pub fn can_hover(&self) -> bool {
        self.acceleration > self.gravity
    }
}

/// Location and size of a maximum over one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub magnitude: f64,
    /// Local time within the segment, seconds.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativePeak {
    pub order: usize,
    pub kappa: f64,
    /// Peak norm in SI units; for `order == 2` the gravity-corrected thrust
    /// proxy, so that `kappa · limit == magnitude`.
    pub magnitude: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPeaks {
    /// Orders 1 through 4.
    pub derivatives: [DerivativePeak; 4],
    /// Acceleration peak without the gravity correction.
    pub raw_acceleration: Peak,
    pub max_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub segments: Vec<SegmentPeaks>,
    pub max_kappa: f64,
}

impl PeakReport {
    pub fn segment_max_kappa(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.max_kappa).collect()
    }

    pub fn is_feasible(&self, tolerance: f64) -> bool {
        is_feasible(self, tolerance)
    }
}

fn check_order(s: usize) -> Result<()> {
    if !(1..=4).contains(&s) {
        return Err(TrajError::validation(format!("derivative order must lie in 1..=4, got {s}")));
    }
    Ok(())
}

fn segment_of(traj: &PiecewiseTrajectory, k: usize) -> Result<&SegmentPolynomial> {
    traj.segment(k).ok_or_else(|| {
        TrajError::validation(format!("segment {k} out of range for {} segments", traj.num_segments()))
    })
}

/// Maximum over the segment of `‖P⁽ˢ⁾(t) + offset‖`.
pub fn offset_norm_peak(seg: &SegmentPolynomial, s: usize, offset: Vector3<f64>) -> Peak {
    let d: Vec<Vec<f64>> = (0..3).map(|a| poly::derivative_coefficients(seg.coefficients(a), s)).collect();
    let sq = |t: f64| -> f64 { (0..3).map(|a| (poly::eval(&d[a], t) + offset[a]).powi(2)).sum() };
    let tau = seg.duration();
    let step = tau / PEAK_SAMPLES as f64;
    let grid: Vec<f64> = (0..=PEAK_SAMPLES).map(|i| sq(i as f64 * step)).collect();

    // sampled local maxima, largest first; ties keep the earliest index
    let mut candidates: Vec<usize> = (0..=PEAK_SAMPLES)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { grid[i - 1] };
            let right = if i == PEAK_SAMPLES { f64::NEG_INFINITY } else { grid[i + 1] };
            grid[i] >= left && grid[i] >= right
        })
        .collect();
    candidates.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    candidates.truncate(REFINED_CANDIDATES);

    let mut best_t = candidates[0] as f64 * step;
    let mut best = grid[candidates[0]];
    for &i in &candidates {
        let lo = i.saturating_sub(1) as f64 * step;
        let hi = ((i + 1).min(PEAK_SAMPLES) as f64 * step).min(tau);
        let (t, v) = golden_section_max(&sq, lo, hi);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    Peak {
        magnitude: best.sqrt(),
        time: best_t,
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let tol = 1e-13 * (1.0 + b.abs());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let ft = f(t);
    [(t, ft), (c, fc), (d, fd)]
        .into_iter()
        .fold((t, ft), |acc, x| if x.1 > acc.1 { x } else { acc })
}

/// Largest Euclidean norm of the `s`-th derivative over segment `k`.
pub fn segment_peak(traj: &PiecewiseTrajectory, k: usize, s: usize) -> Result<Peak> {
    check_order(s)?;
    Ok(offset_norm_peak(segment_of(traj, k)?, s, Vector3::zeros()))
}

fn derivative_peak(seg: &SegmentPolynomial, s: usize, limits: &MotionLimits) -> DerivativePeak {
    let offset = if s == 2 {
        Vector3::new(0.0, 0.0, limits.gravity)
    } else {
        Vector3::zeros()
    };
    let peak = offset_norm_peak(seg, s, offset);
    DerivativePeak {
        order: s,
        kappa: peak.magnitude / limits.limit(s),
        magnitude: peak.magnitude,
        time: peak.time,
    }
}

/// Normalized peak `κ_k(s)`; order 2 measures the thrust proxy
/// `sqrt(ẍ² + ÿ² + (z̈ + g)²)`.
pub fn kappa(traj: &PiecewiseTrajectory, k: usize, s: usize, limits: &MotionLimits) -> Result<f64> {
    check_order(s)?;
    Ok(derivative_peak(segment_of(traj, k)?, s, limits).kappa)
}

pub fn peak_report(traj: &PiecewiseTrajectory, limits: &MotionLimits) -> PeakReport {
    let segments: Vec<SegmentPeaks> = traj
        .segments()
        .iter()
        .map(|seg| {
            let derivatives = [1, 2, 3, 4].map(|s| derivative_peak(seg, s, limits));
            let max_kappa = derivatives.iter().map(|d| d.kappa).fold(0.0, f64::max);
            SegmentPeaks {
                derivatives,
                raw_acceleration: offset_norm_peak(seg, 2, Vector3::zeros()),
                max_kappa,
            }
        })
        .collect();
    let max_kappa = segments.iter().map(|s| s.max_kappa).fold(0.0, f64::max);
    PeakReport { segments, max_kappa }
}

/// True iff every normalized peak is at most `1 + tolerance`.
pub fn is_feasible(report: &PeakReport, tolerance: f64) -> bool {
    report.max_kappa <= 1.0 + tolerance
}
