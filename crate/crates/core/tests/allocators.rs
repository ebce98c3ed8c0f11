use peak_traj::allocators::{mellinger_direction, MIN_SEGMENT_TIME};
use peak_traj::{
    bry_descent, initial_guess, mellinger_descent, random_course, AllocatorConfig, CostWeights, SmoothConfig,
    SmoothProblem, WaypointCourse,
};
use proptest::prelude::*;

fn problem(points: &[[f64; 3]]) -> SmoothProblem {
    let course = WaypointCourse::from_positions("c", points).unwrap();
    SmoothProblem::new(course, CostWeights::minimum_snap(), SmoothConfig::with_order(7)).unwrap()
}

fn collinear() -> SmoothProblem {
    problem(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
}

/// Minimizer of `f(τ₁, T − τ₁)` on a 0.1 % grid of `T`, skipping the
/// extreme splits where the solve degenerates.
fn sweep_two(problem: &SmoothProblem, total: f64) -> f64 {
    (50..=950)
        .map(|i| total * i as f64 / 1000.0)
        .map(|t| (t, problem.cost(&[t, total - t]).unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

#[test]
fn symmetric_course_converges_to_sweep_minimizer() {
    let p = collinear();
    let total = 2.0;
    let best = sweep_two(&p, total);
    assert!((best - 1.0).abs() <= 0.002 * total);
    let out = mellinger_descent(&p, &[0.4 * total, 0.6 * total], &AllocatorConfig::default()).unwrap();
    assert!((out.times[0] - best).abs() <= 0.02 * total, "{:?}", out.times);
    assert!(out.cost < out.initial_cost);
}

#[test]
fn asymmetric_course_matches_sweep() {
    let p = problem(&[[0.0; 3], [0.4, 0.3, 0.0], [2.5, 0.2, 0.6]]);
    let total = 3.0;
    let best = sweep_two(&p, total);
    let start = initial_guess(p.course(), total).unwrap();
    let out = mellinger_descent(&p, &start, &AllocatorConfig::default()).unwrap();
    assert!((out.times[0] - best).abs() <= 0.02 * total, "{:?} vs {best}", out.times);
}

#[test]
fn start_at_minimizer_stays_put() {
    let p = collinear();
    let best = sweep_two(&p, 2.0);
    let start = [best, 2.0 - best];
    let out = mellinger_descent(&p, &start, &AllocatorConfig::default()).unwrap();
    assert!(out.cost >= out.initial_cost * (1.0 - 1e-3));
    assert!(out.cost <= out.initial_cost);
}

#[test]
fn single_segment_unchanged() {
    let p = problem(&[[0.0; 3], [1.0, 1.0, 0.0]]);
    let out = mellinger_descent(&p, &[2.5], &AllocatorConfig::default()).unwrap();
    assert_eq!(out.times, vec![2.5]);
    assert_eq!(out.cost, out.initial_cost);
}

#[test]
fn forward_gradients_agree_with_central_differences() {
    let course = random_course(21, 5).unwrap();
    let p = SmoothProblem::new(course.clone(), CostWeights::minimum_jerk(), SmoothConfig::default()).unwrap();
    let times = initial_guess(&course, 5.0).unwrap();
    let h = 1e-4 * 5.0;
    let (grads, dir) = mellinger_direction(&p, &times, h).unwrap();
    let k = times.len();
    let probe = |i: usize, step: f64| -> Vec<f64> {
        times
            .iter()
            .enumerate()
            .map(|(j, &t)| if j == i { t + step } else { t - step / (k - 1) as f64 })
            .collect()
    };
    for i in 0..k {
        let central = (p.cost(&probe(i, h / 2.0)).unwrap() - p.cost(&probe(i, -h / 2.0)).unwrap()) / h;
        assert!((grads[i] - central).abs() <= 1e-2 * central.abs().max(1.0), "{i}: {} vs {central}", grads[i]);
    }
    // the direction keeps the total fixed
    assert!(dir.iter().sum::<f64>().abs() < 1e-9 * dir.iter().map(|d| d.abs()).sum::<f64>());
}

#[test]
fn time_penalty_zero_grows_total_time() {
    let p = collinear();
    let config = AllocatorConfig {
        max_iterations: 40,
        ..Default::default()
    };
    let out = bry_descent(&p, &[1.0, 1.0], &config).unwrap();
    assert!(out.times.iter().sum::<f64>() > 2.0);
}

#[test]
fn huge_time_penalty_pins_floor() {
    // for a 1 m leg the interior optimum sits near (5 a / c_t)^(1/6); this
    // penalty pushes it far below the floor
    let p = collinear();
    let config = AllocatorConfig {
        time_penalty: 1e40,
        ..Default::default()
    };
    let out = bry_descent(&p, &[1.0, 1.0], &config).unwrap();
    for t in &out.times {
        assert!((t - MIN_SEGMENT_TIME).abs() < 1e-12, "{:?}", out.times);
    }
}

#[test]
fn moderate_time_penalty_brackets_sweep_oracle() {
    let p = collinear();
    let ct = 50.0;
    // oracle: best uniform stretch of the symmetric split
    let j = |a: f64| p.cost(&[a, a]).unwrap() + ct * 2.0 * a;
    let oracle = (1..4000)
        .map(|i| 0.001 * i as f64)
        .min_by(|x, y| j(*x).total_cmp(&j(*y)))
        .unwrap();
    let config = AllocatorConfig {
        time_penalty: ct,
        ..Default::default()
    };
    let out = bry_descent(&p, &[1.0, 1.0], &config).unwrap();
    let total: f64 = out.times.iter().sum();
    assert!(total > 2.0 * MIN_SEGMENT_TIME);
    assert!((total - 2.0 * oracle).abs() <= 0.02 * 2.0 * oracle, "{total} vs {}", 2.0 * oracle);
}

#[test]
fn rejects_bad_initial_times() {
    let p = collinear();
    assert!(mellinger_descent(&p, &[1.0], &AllocatorConfig::default()).is_err());
    assert!(bry_descent(&p, &[1.0, 0.0], &AllocatorConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mellinger_monotone_and_sum_preserving(seed in 0u64..200, k in 2usize..6) {
        let course = random_course(seed, k).unwrap();
        let p = SmoothProblem::new(course.clone(), CostWeights::minimum_jerk(), SmoothConfig::default()).unwrap();
        let start = initial_guess(&course, k as f64).unwrap();
        let config = AllocatorConfig { max_iterations: 40, ..Default::default() };
        let out = mellinger_descent(&p, &start, &config).unwrap();
        for w in out.cost_history.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        let sum: f64 = out.times.iter().sum();
        prop_assert!((sum - k as f64).abs() <= 1e-9 * k as f64);
        prop_assert!(out.times.iter().all(|&t| t >= MIN_SEGMENT_TIME));
        let again = mellinger_descent(&p, &start, &config).unwrap();
        prop_assert_eq!(out, again);
    }
}
