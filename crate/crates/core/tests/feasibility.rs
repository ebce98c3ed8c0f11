use nalgebra::{Rotation3, Vector3};
use peak_traj::feasibility::STANDARD_GRAVITY;
use peak_traj::trajectory::TrajectoryMeta;
use peak_traj::{
    kappa, peak_report, random_course, segment_peak, CostWeights, MotionLimits, PiecewiseTrajectory, SegmentPolynomial,
    SmoothConfig, SmoothProblem, WaypointCourse,
};
use proptest::prelude::*;

fn reference_limits() -> MotionLimits {
    MotionLimits::new(5.0, 15.5, 62.0, 800.0).unwrap()
}

fn quintic(tau: f64) -> PiecewiseTrajectory {
    let course = WaypointCourse::from_positions("q", &[[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
    SmoothProblem::new(course, CostWeights::minimum_jerk(), SmoothConfig::default())
        .unwrap()
        .solve(&[tau])
        .unwrap()
}

fn single(seg: SegmentPolynomial) -> PiecewiseTrajectory {
    PiecewiseTrajectory::new(vec![seg], TrajectoryMeta::default()).unwrap()
}

#[test]
fn quintic_peaks_and_times() {
    let traj = quintic(1.0);
    let v = segment_peak(&traj, 0, 1).unwrap();
    assert!((v.magnitude - 1.875).abs() < 1e-9 && (v.time - 0.5).abs() < 1e-6);
    let j = segment_peak(&traj, 0, 3).unwrap();
    assert!((j.magnitude - 60.0).abs() < 1e-9);
    assert!(j.time < 1e-9 || (j.time - 1.0).abs() < 1e-9);
    let s = segment_peak(&traj, 0, 4).unwrap();
    assert!((s.magnitude - 360.0).abs() < 1e-9);
    assert!((kappa(&traj, 0, 1, &reference_limits()).unwrap() - 0.375).abs() < 1e-9);
}

#[test]
fn quintic_one_second_feasible_half_second_not() {
    let limits = reference_limits();
    let report = peak_report(&quintic(1.0), &limits);
    assert!(report.is_feasible(0.0));
    // thrust proxy for a horizontal move: sqrt(a² + g²) with |a| ≤ 10/√3
    let thrust = report.segments[0].derivatives[1].magnitude;
    let expected = ((10.0 / 3f64.sqrt()).powi(2) + 9.81f64.powi(2)).sqrt();
    assert!((thrust - expected).abs() < 1e-6, "{thrust} vs {expected}");

    let fast = peak_report(&quintic(0.5), &limits);
    assert!((fast.segments[0].derivatives[2].magnitude - 480.0).abs() < 1e-6);
    assert!(!fast.is_feasible(0.05));
}

#[test]
fn hover_and_free_fall() {
    let limits = reference_limits();
    let hover = single(SegmentPolynomial::stationary([1.0, 2.0, 3.0], 5, 2.0).unwrap());
    let report = peak_report(&hover, &limits);
    assert!((report.max_kappa - 9.81 / 15.5).abs() < 1e-12);
    for s in [1, 3, 4] {
        assert_eq!(segment_peak(&hover, 0, s).unwrap().magnitude, 0.0);
    }
    let low = MotionLimits::new(5.0, 9.0, 62.0, 800.0).unwrap();
    assert!(!peak_report(&hover, &low).is_feasible(0.0));

    let fall = single(
        SegmentPolynomial::new([vec![0.0, 0.0, 0.0], vec![0.0; 3], vec![10.0, 0.0, -STANDARD_GRAVITY / 2.0]], 1.0).unwrap(),
    );
    assert!(kappa(&fall, 0, 2, &limits).unwrap().abs() < 1e-12);
}

#[test]
fn rejects_bad_orders_and_segments() {
    let traj = quintic(1.0);
    assert!(segment_peak(&traj, 0, 0).is_err());
    assert!(segment_peak(&traj, 0, 5).is_err());
    assert!(segment_peak(&traj, 1, 1).is_err());
}

#[test]
fn doubling_durations_lowers_jerk_and_snap_kappa() {
    let limits = reference_limits();
    for seed in 0..10 {
        let course = random_course(seed, 4).unwrap();
        let p = SmoothProblem::new(course, CostWeights::minimum_jerk(), SmoothConfig::default()).unwrap();
        let d = [0.6, 1.1, 0.9, 1.3];
        let a = peak_report(&p.solve(&d).unwrap(), &limits);
        let b = peak_report(&p.solve(&d.map(|t| 2.0 * t)).unwrap(), &limits);
        for (sa, sb) in a.segments.iter().zip(&b.segments) {
            for s in [2, 3] {
                assert!(sb.derivatives[s].kappa < sa.derivatives[s].kappa);
            }
        }
    }
}

/// Dense sampling of `‖P⁽ˢ⁾‖` on one segment.
fn dense_max(seg: &SegmentPolynomial, s: usize, n: usize) -> f64 {
    (0..=n)
        .map(|i| seg.derivative(seg.duration() * i as f64 / n as f64, s).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn peak_bounds_dense_sampling(seed in 0u64..1000, k in 1usize..5, s in 1usize..=4) {
        let course = random_course(seed, k).unwrap();
        let p = SmoothProblem::new(course, CostWeights::minimum_snap(), SmoothConfig::with_order(7)).unwrap();
        let d: Vec<f64> = (0..k).map(|i| 0.5 + 0.25 * ((seed as usize + 3 * i) % 7) as f64).collect();
        let traj = p.solve(&d).unwrap();
        for (i, seg) in traj.segments().iter().enumerate() {
            let peak = segment_peak(&traj, i, s).unwrap().magnitude;
            let dense = dense_max(seg, s, 20_000);
            prop_assert!(peak >= dense * (1.0 - 1e-12));
            prop_assert!(peak <= dense * (1.0 + 1e-4));
        }
    }

    #[test]
    fn peaks_invariant_under_rigid_motion(
        seed in 0u64..1000,
        yaw in -3.2f64..3.2,
        axis in prop::array::uniform3(-1.0f64..1.0),
        angle in -3.2f64..3.2,
        shift in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let course = random_course(seed, 3).unwrap();
        let d = [0.9, 1.2, 0.7];
        let solve = |c: WaypointCourse| {
            SmoothProblem::new(c, CostWeights::minimum_jerk(), SmoothConfig::default()).unwrap().solve(&d).unwrap()
        };
        let base = peak_report(&solve(course.clone()), &reference_limits());

        // arbitrary rotation and translation: every order except thrust
        let axis = Vector3::from(axis);
        prop_assume!(axis.norm() > 0.1);
        let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let offset = Vector3::from(shift);
        let moved = peak_report(&solve(course.map_positions(|p| r * p + offset).unwrap()), &reference_limits());
        for (a, b) in base.segments.iter().zip(&moved.segments) {
            for s in [0, 2, 3] {
                let (x, y) = (a.derivatives[s].magnitude, b.derivatives[s].magnitude);
                prop_assert!((x - y).abs() <= 1e-7 * x.max(1.0), "order {}: {x} vs {y}", s + 1);
            }
        }

        // rotation about the vertical keeps the thrust proxy too
        let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), yaw);
        let turned = peak_report(&solve(course.map_positions(|p| rz * p + offset).unwrap()), &reference_limits());
        for (a, b) in base.segments.iter().zip(&turned.segments) {
            let (x, y) = (a.derivatives[1].magnitude, b.derivatives[1].magnitude);
            prop_assert!((x - y).abs() <= 1e-7 * x, "thrust {x} vs {y}");
        }
    }
}
