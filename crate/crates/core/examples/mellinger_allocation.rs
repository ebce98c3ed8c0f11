//! Redistribute a fixed total time to lower the snap cost.

use peak_traj::{initial_guess, mellinger_descent, random_course, AllocatorConfig, CostWeights, SmoothConfig, SmoothProblem};

fn main() -> peak_traj::Result<()> {
    let course = random_course(3, 5)?;
    let problem = SmoothProblem::new(course.clone(), CostWeights::minimum_snap(), SmoothConfig::with_order(7))?;
    let start = initial_guess(&course, 6.0)?;
    let out = mellinger_descent(&problem, &start, &AllocatorConfig::default())?;

    println!("start  {start:.3?}");
    println!("final  {:.3?}", out.times);
    println!("cost {:.4} -> {:.4} in {} iterations", out.initial_cost, out.cost, out.iterations);
    println!("total {:.6}", out.times.iter().sum::<f64>());
    Ok(())
}
