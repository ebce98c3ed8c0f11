//! Evaluate a solved trajectory at arbitrary times and on a uniform grid.

use peak_traj::{CostWeights, SmoothConfig, SmoothProblem, WaypointCourse};

fn main() -> peak_traj::Result<()> {
    let course = WaypointCourse::from_positions("hop", &[[0.0, 0.0, 1.0], [1.0, 0.5, 1.2], [2.0, 0.0, 1.0]])?;
    let problem = SmoothProblem::new(course, CostWeights::minimum_jerk(), SmoothConfig::default())?;
    let traj = problem.solve(&[1.0, 1.5])?;

    for t in [0.0, 0.5, 1.0, 2.5] {
        let (seg, local) = traj.locate(t)?;
        let p = traj.evaluate(t, 0)?;
        let v = traj.evaluate(t, 1)?;
        println!("t={t:.2} seg={seg} local={local:.2} p=({:.3}, {:.3}, {:.3}) |v|={:.3}", p[0], p[1], p[2], v.norm());
    }

    let samples = traj.sample(0.25)?;
    println!("{} samples over {:.2} s", samples.len(), traj.total_time());
    let fastest = samples.iter().max_by(|a, b| a.velocity_norm.total_cmp(&b.velocity_norm)).unwrap();
    println!("fastest sample at t={:.2}: {:.3} m/s", fastest.time, fastest.velocity_norm);
    Ok(())
}
