//! Dense samples as CSV, to stdout or to the path given as the first argument.

use peak_traj::io::export_samples;
use peak_traj::{random_course, CostWeights, SmoothConfig, SmoothProblem};

fn main() -> peak_traj::Result<()> {
    let course = random_course(11, 3)?;
    let problem = SmoothProblem::new(course, CostWeights::minimum_snap(), SmoothConfig::with_order(7))?;
    let traj = problem.solve(&[1.0, 1.4, 0.8])?;

    let rows = match std::env::args().nth(1) {
        Some(path) => export_samples(&traj, 0.01, 9.81, std::fs::File::create(path)?)?,
        None => export_samples(&traj, 0.05, 9.81, std::io::stdout().lock())?,
    };
    eprintln!("{rows} rows");
    Ok(())
}
