//! Drive normalized peaks into the convergence band and print the trace.

use peak_traj::io::parse_course_document;
use peak_traj::{optimize, random_course, CostWeights, IterationTrace, PeakOptimizerConfig, SmoothConfig};

fn summary(name: &str, trace: &IterationTrace, total: f64) {
    println!(
        "{name}: {} iterations, converged={}, best iteration {:?}, total {total:.3} s",
        trace.entries.len(),
        trace.converged,
        trace.best_iteration
    );
}

fn main() -> peak_traj::Result<()> {
    let doc = parse_course_document(include_bytes!("../data/tight_start.json"))?;
    let limits = doc.limits.expect("course carries limits");
    let weights = CostWeights::minimum_jerk();
    let config = PeakOptimizerConfig {
        initial_total_time: Some(15.0),
        ..Default::default()
    };
    let (traj, trace) = optimize(&doc.course, &limits, &weights, SmoothConfig::default(), &config)?;
    for e in trace.entries.iter().step_by(20) {
        println!("{:>3} {:?} T={:.3} max kappa={:.3}", e.iteration, e.phase, e.total_time, e.max_kappa);
    }
    // the short second leg keeps shrinking and pushes its neighbours out of
    // the band, so this one stalls and returns its best feasible iterate
    summary("tight_start", &trace, traj.total_time());
    println!("segment times {:.3?}", traj.durations());

    let course = random_course(2, 5)?;
    let (traj, trace) = optimize(&course, &limits, &weights, SmoothConfig::default(), &PeakOptimizerConfig::default())?;
    summary(course.name(), &trace, traj.total_time());
    Ok(())
}
