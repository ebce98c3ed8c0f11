//! Trade smoothness against total time with a linear time penalty.

use peak_traj::{bry_descent, initial_guess, random_course, AllocatorConfig, CostWeights, SmoothConfig, SmoothProblem};

fn main() -> peak_traj::Result<()> {
    let course = random_course(3, 5)?;
    let problem = SmoothProblem::new(course.clone(), CostWeights::minimum_snap(), SmoothConfig::with_order(7))?;
    let start = initial_guess(&course, 5.0)?;

    for ct in [1.0, 50.0, 1e4] {
        let config = AllocatorConfig {
            time_penalty: ct,
            ..Default::default()
        };
        let out = bry_descent(&problem, &start, &config)?;
        let total: f64 = out.times.iter().sum();
        println!("c_t={ct:>8}: total {total:.3} s  snap cost {:.3}", out.cost);
    }
    Ok(())
}
