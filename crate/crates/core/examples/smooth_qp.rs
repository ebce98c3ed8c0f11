//! Minimum-jerk and minimum-snap solves for the same waypoints and times.

use peak_traj::{build_cost_matrix, random_course, CostWeights, SmoothConfig, SmoothProblem};

fn main() -> peak_traj::Result<()> {
    let q = build_cost_matrix(5, &CostWeights::minimum_jerk(), 1.0)?;
    println!("jerk cost matrix, tau = 1:\n{}", q.into_inner());

    let course = random_course(7, 4)?;
    let durations = [0.8, 1.2, 1.0, 0.9];
    for (name, weights, order) in [
        ("jerk", CostWeights::minimum_jerk(), 5),
        ("snap", CostWeights::minimum_snap(), 7),
    ] {
        let problem = SmoothProblem::new(course.clone(), weights, SmoothConfig::with_order(order))?;
        let sol = problem.solve_detailed(&durations)?;
        let r = problem.kkt_residuals(&sol)?;
        println!(
            "{name}: cost {:.4}  stationarity {:.1e}  constraints {:.1e}",
            sol.cost, r.stationarity, r.feasibility
        );
    }
    Ok(())
}
