use nalgebra::{DMatrix, DVector};
use peak_traj::io::{
    course_document_to_json, export_samples, export_samples_to_path, parse_course_document, parse_manifest,
    CourseDocument, Preset, RunManifest, RunMethod, SAMPLE_HEADER,
};
use peak_traj::trajectory::TrajectoryMeta;
use peak_traj::{
    random_course, CostWeights, MotionLimits, PiecewiseTrajectory, SegmentPolynomial, SmoothConfig, SmoothProblem,
    WaypointCourse,
};
use proptest::prelude::*;

fn csv(traj: &PiecewiseTrajectory, dt: f64) -> (usize, Vec<Vec<f64>>) {
    let mut buf = Vec::new();
    let n = export_samples(traj, dt, 9.81, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SAMPLE_HEADER));
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect::<Vec<f64>>())
        .collect();
    (n, rows)
}

fn quintic() -> PiecewiseTrajectory {
    let course = WaypointCourse::from_positions("q", &[[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
    SmoothProblem::new(course, CostWeights::minimum_jerk(), SmoothConfig::default())
        .unwrap()
        .solve(&[1.0])
        .unwrap()
}

#[test]
fn seven_waypoints_with_limits() {
    let text = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tight_start.json")).unwrap();
    let doc = parse_course_document(&text).unwrap();
    assert_eq!(doc.course.waypoints().len(), 7);
    assert_eq!(doc.limits, Some(MotionLimits::new(5.0, 15.5, 62.0, 800.0).unwrap()));
    assert_eq!(doc.preset, Some(Preset::Jerk));
    assert_eq!(doc.order, Some(5));
}

#[test]
fn samples_cover_closed_interval() {
    let (n, rows) = csv(&quintic(), 0.01);
    assert_eq!(n, 101);
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r.len() == 20));
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[100][0], 1.0);
    assert!((rows[50][1] - 0.5).abs() < 1e-12);
    assert!((rows[50][16] - 1.875).abs() < 1e-12);
}

#[test]
fn hover_row_values() {
    let hover = PiecewiseTrajectory::new(
        vec![SegmentPolynomial::stationary([1.0, 2.0, 3.0], 5, 1.0).unwrap()],
        TrajectoryMeta::default(),
    )
    .unwrap();
    let (_, rows) = csv(&hover, 0.25);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(&r[1..4], &[1.0, 2.0, 3.0]);
        assert!(r[4..16].iter().all(|v| *v == 0.0));
        assert_eq!(r[16], 0.0);
        assert!((r[17] - 9.81).abs() < 1e-12);
        assert_eq!(r[18], 0.0);
        assert_eq!(r[19], 0.0);
    }
}

#[test]
fn csv_positions_refit_to_the_polynomial() {
    let traj = quintic();
    let (_, rows) = csv(&traj, 0.01);
    let a = DMatrix::from_fn(rows.len(), 6, |i, j| rows[i][0].powi(j as i32));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r[1]));
    let fit = a.svd(true, true).solve(&b, 1e-14).unwrap();
    let expected = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];
    for (c, e) in fit.iter().zip(expected) {
        assert!((c - e).abs() < 1e-8, "{fit}");
    }
}

#[test]
fn export_to_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let n = export_samples_to_path(&quintic(), 0.1, 9.81, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(n, 11);
    assert_eq!(text.lines().count(), 12);
    assert!(export_samples_to_path(&quintic(), 0.1, 9.81, &dir.path().join("no/such/dir.csv")).is_err());
}

#[test]
fn manifest_round_trip() {
    let mut m = RunManifest::new(RunMethod::Peak);
    m.seed = Some(7);
    m.limits = Some(MotionLimits::new(5.0, 15.5, 62.0, 800.0).unwrap());
    m.total_time = Some(3.5);
    m.peak.first_rate = 0.2;
    m.validate().unwrap();
    let text = serde_json::to_string_pretty(&m).unwrap();
    assert_eq!(parse_manifest(text.as_bytes()).unwrap(), m);
    assert!(parse_manifest(br#"{"method": "peak"}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn course_round_trip(seed in 0u64..10_000, k in 1usize..9, with_limits in any::<bool>()) {
        let doc = CourseDocument {
            course: random_course(seed, k).unwrap(),
            limits: with_limits.then(|| MotionLimits::new(4.0, 20.0, 80.0, 900.0).unwrap()),
            order: with_limits.then_some(7),
            preset: with_limits.then_some(Preset::Snap),
        };
        let text = course_document_to_json(&doc).unwrap();
        let back = parse_course_document(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(course_document_to_json(&back).unwrap(), text);
    }
}
