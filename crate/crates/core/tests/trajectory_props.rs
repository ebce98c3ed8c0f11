use peak_traj::trajectory::{sample_times, segment_start_times};
use peak_traj::{random_course, CostWeights, SmoothConfig, SmoothProblem, TrajError};
use proptest::prelude::*;

fn solved(seed: u64, k: usize, snap: bool, durations: &[f64]) -> peak_traj::PiecewiseTrajectory {
    let course = random_course(seed, k).unwrap();
    let (weights, order) = if snap {
        (CostWeights::minimum_snap(), 7)
    } else {
        (CostWeights::minimum_jerk(), 5)
    };
    SmoothProblem::new(course, weights, SmoothConfig::with_order(order))
        .unwrap()
        .solve(durations)
        .unwrap()
}

fn durations(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.3f64..3.0, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joints_continuous_up_to_continuity_order(
        (k, d) in (1usize..6).prop_flat_map(|k| (Just(k), durations(k))),
        seed in 0u64..1000,
        snap in any::<bool>(),
    ) {
        let traj = solved(seed, k, snap, &d);
        let c = traj.meta().continuity_order;
        for s in 0..=c {
            // joint mismatch relative to the derivative's own size
            let scale = (0..traj.num_segments())
                .map(|i| traj.segments()[i].derivative(0.0, s).norm())
                .fold(1.0, f64::max);
            prop_assert!(traj.joint_defect(s) <= 1e-8 * scale, "order {s}: {}", traj.joint_defect(s));
        }
    }

    #[test]
    fn derivatives_match_central_differences(
        (k, d) in (1usize..5).prop_flat_map(|k| (Just(k), durations(k))),
        seed in 0u64..1000,
        frac in 0.01f64..0.99,
    ) {
        let traj = solved(seed, k, false, &d);
        let t = frac * traj.total_time();
        let h = 1e-5;
        for s in 0..4 {
            let fd = (traj.evaluate(t + h, s).unwrap() - traj.evaluate(t - h, s).unwrap()) / (2.0 * h);
            let exact = traj.evaluate(t, s + 1).unwrap();
            // a joint inside the stencil breaks the difference above the continuity order
            let starts = traj.segment_start_times();
            if s + 1 > traj.meta().continuity_order && starts.iter().any(|&j| (j - t).abs() < 2.0 * h) {
                continue;
            }
            prop_assert!((fd - exact).norm() <= 1e-4 * (1.0 + exact.norm()), "s={s} fd {fd:?} exact {exact:?}");
        }
    }

    #[test]
    fn sample_grid_is_closed_and_uniform(total in 0.05f64..20.0, dt in 0.001f64..1.0) {
        let times = sample_times(total, dt).unwrap();
        prop_assert_eq!(times[0], 0.0);
        prop_assert_eq!(*times.last().unwrap(), total);
        for w in times.windows(2) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(w[1] - w[0] <= dt * (1.0 + 1e-9));
        }
    }

    #[test]
    fn start_times_are_prefix_sums(d in prop::collection::vec(0.01f64..10.0, 1..10)) {
        let starts = segment_start_times(&d);
        prop_assert_eq!(starts.len(), d.len() + 1);
        prop_assert_eq!(starts[0], 0.0);
        let mut acc = 0.0;
        for (i, t) in d.iter().enumerate() {
            acc += t;
            prop_assert!((starts[i + 1] - acc).abs() <= 1e-12 * acc);
        }
    }
}

#[test]
fn locate_prefers_later_segment_at_joints() {
    let traj = solved(3, 3, false, &[1.0, 2.0, 0.5]);
    assert_eq!(traj.locate(1.0).unwrap(), (1, 0.0));
    assert_eq!(traj.locate(3.5).unwrap().0, 2);
    assert!(matches!(traj.locate(3.6), Err(TrajError::Domain { .. })));
    assert!(matches!(traj.locate(-0.1), Err(TrajError::Domain { .. })));
}

#[test]
fn order_above_polynomial_degree_rejected() {
    let traj = solved(3, 2, false, &[1.0, 1.0]);
    assert!(traj.evaluate(0.5, 6).is_err());
    assert_eq!(traj.evaluate(0.5, 5).unwrap().len(), 3);
}
