use peak_traj::{compare_methods, random_course, CompareConfig, CostWeights, MotionLimits};

fn main() -> peak_traj::Result<()> {
    let limits = MotionLimits::new(5.0, 15.5, 62.0, 800.0)?;
    for seed in 0..5 {
        let course = random_course(seed, 6)?;
        let r = compare_methods(&course, &limits, &CostWeights::minimum_jerk(), &CompareConfig::default())?;
        let t = |o: &peak_traj::compare::MethodOutcome| o.result().map_or(f64::NAN, |m| m.total_time);
        println!(
            "seed {seed}: initial {:.2} s  mellinger {:.2} s  peak {:.2} s  reduction vs mellinger {:.1}%",
            t(&r.initial),
            t(&r.mellinger),
            t(&r.peak),
            r.reductions.peak_vs_mellinger.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
