use peak_traj::{peak_report, CostWeights, MotionLimits, SmoothConfig, SmoothProblem, WaypointCourse};

fn main() -> peak_traj::Result<()> {
    let limits = MotionLimits::new(5.0, 15.5, 62.0, 800.0)?;
    let course = WaypointCourse::from_positions("line", &[[0.0; 3], [1.0, 0.0, 0.0]])?;
    let problem = SmoothProblem::new(course, CostWeights::minimum_jerk(), SmoothConfig::default())?;

    for tau in [0.5, 1.0, 2.0] {
        let report = peak_report(&problem.solve(&[tau])?, &limits);
        let seg = &report.segments[0];
        // kappa per order: velocity, thrust, jerk, snap
        let k: Vec<String> = seg.derivatives.iter().map(|d| format!("{:.3}", d.kappa)).collect();
        println!("tau={tau}: kappa [{}]  feasible={}", k.join(", "), report.is_feasible(0.0));
    }
    Ok(())
}
