//! Time-optimal piecewise-polynomial trajectories through 3-D waypoints.
//!
//! A trajectory is a chain of polynomial segments, one per leg between
//! consecutive waypoints. For fixed segment times the coefficients come from
//! an equality-constrained quadratic program that minimizes an integral of
//! squared derivatives (minimum jerk or minimum snap). The segment times
//! themselves are chosen by one of:
//!
//! * a distance-proportional [initial guess](allocators::initial_guess),
//! * [Mellinger-style](allocators::mellinger_descent) redistribution under a
//!   fixed total time,
//! * [Bry-style](allocators::bry_descent) descent with a penalty on total
//!   time,
//! * [peak optimization](peak::optimize), which alternates the QP with a
//!   time update that drives every segment's most restrictive normalized
//!   derivative peak toward its limit.
//!
//! ```
//! use peak_traj::{CostWeights, MotionLimits, PeakOptimizerConfig, SmoothConfig, WaypointCourse};
//!
//! let course = WaypointCourse::from_positions(
//!     "hop",
//!     &[[0.0, 0.0, 1.0], [1.0, 0.5, 1.2], [2.5, 0.5, 1.0]],
//! )?;
//! let limits = MotionLimits::new(5.0, 15.5, 62.0, 800.0)?;
//! let (traj, trace) = peak_traj::optimize(
//!     &course,
//!     &limits,
//!     &CostWeights::minimum_jerk(),
//!     SmoothConfig::default(),
//!     &PeakOptimizerConfig::default(),
//! )?;
//! assert!(trace.converged);
//! let report = peak_traj::peak_report(&traj, &limits);
//! assert!(report.is_feasible(0.05));
//! # Ok::<(), peak_traj::TrajError>(())
//! ```

pub mod allocators;
pub mod cli;
pub mod compare;
pub mod course;
pub mod error;
pub mod feasibility;
pub mod io;
pub mod peak;
mod poly;
pub mod qp;
pub mod trajectory;

pub use allocators::{bry_descent, initial_guess, mellinger_descent, AllocatorConfig, Allocation};
pub use compare::{compare_methods, CompareConfig, ComparisonReport};
pub use course::{random_course, Waypoint, WaypointCourse};
pub use error::{Result, TrajError};
pub use feasibility::{is_feasible, kappa, peak_report, segment_peak, MotionLimits, PeakReport};
pub use peak::{optimize, optimize_from, update_segment_times, IterationTrace, PeakOptimizerConfig};
pub use qp::{build_cost_matrix, solve_smooth, CostWeights, SmoothConfig, SmoothProblem};
pub use trajectory::{PiecewiseTrajectory, SegmentPolynomial, TrajectorySample};
