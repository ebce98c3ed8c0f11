//! Course files, run manifests, sample export and report documents.
//!
//! Course files are JSON:
//!
//! ```json
//! {
//!   "name": "hop",
//!   "waypoints": [
//!     [0, 0, 1],
//!     {"position": [1, 0.5, 1.2], "yaw": 0.3},
//!     {"position": [2.5, 0.5, 1], "velocity": [0, 0, 0], "acceleration": [0, 0, 0]}
//!   ],
//!   "limits": {"velocity": 5, "acceleration": 15.5, "jerk": 62, "snap": 800},
//!   "order": 5,
//!   "preset": "jerk"
//! }
//! ```
//!
//! Only `waypoints` is required. Unknown keys are rejected.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::allocators::AllocatorConfig;
use crate::course::{Waypoint, WaypointCourse};
use crate::error::{Result, TrajError};
use crate::feasibility::{MotionLimits, PeakReport};
use crate::peak::{IterationTrace, PeakOptimizerConfig, TraceEntry};
use crate::qp::CostWeights;
use crate::trajectory::PiecewiseTrajectory;

pub const RUN_REPORT_SCHEMA: &str = "peak-traj/run/v1";
pub const TRACE_SCHEMA: &str = "peak-traj/trace/v1";
/// Trace entries kept in the report of a run that did not converge.
pub const FAILED_TRACE_TAIL: usize = 10;

pub const SAMPLE_HEADER: &str = "t,x,y,z,vx,vy,vz,ax,ay,az,jx,jy,jz,sx,sy,sz,v_norm,a_norm_gravity_corrected,j_norm,s_norm";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Jerk,
    Snap,
}

impl Preset {
    pub fn weights(self) -> CostWeights {
        match self {
            Preset::Jerk => CostWeights::minimum_jerk(),
            Preset::Snap => CostWeights::minimum_snap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaypointSpec {
    position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    velocity: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    acceleration: Option<[f64; 3]>,
}

/// A waypoint is either a bare `[x, y, z]` or a full object.
#[derive(Debug, Clone, PartialEq)]
struct WaypointEntry(WaypointSpec);

impl<'de> Deserialize<'de> for WaypointEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = WaypointEntry;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a position [x, y, z] or a waypoint object")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, seq: A) -> std::result::Result<Self::Value, A::Error> {
                let position = <[f64; 3]>::deserialize(de::value::SeqAccessDeserializer::new(seq))?;
                Ok(WaypointEntry(WaypointSpec {
                    position,
                    yaw: None,
                    velocity: None,
                    acceleration: None,
                }))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> std::result::Result<Self::Value, A::Error> {
                WaypointSpec::deserialize(de::value::MapAccessDeserializer::new(map)).map(WaypointEntry)
            }
        }

        deserializer.deserialize_any(EntryVisitor)
    }
}

impl Serialize for WaypointEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = &self.0;
        if spec.yaw.is_none() && spec.velocity.is_none() && spec.acceleration.is_none() {
            spec.position.serialize(serializer)
        } else {
            spec.serialize(serializer)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CourseFileRaw {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    waypoints: Vec<WaypointEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limits: Option<MotionLimits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
}

/// A parsed course file: the course plus optional solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CourseDocument {
    pub course: WaypointCourse,
    pub limits: Option<MotionLimits>,
    pub order: Option<usize>,
    pub preset: Option<Preset>,
}

const DEFAULT_COURSE_NAME: &str = "course";

fn to_vec3(v: [f64; 3]) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

fn from_vec3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub fn parse_course_document(bytes: &[u8]) -> Result<CourseDocument> {
    let raw: CourseFileRaw = serde_json::from_slice(bytes)?;
    let waypoints = raw
        .waypoints
        .into_iter()
        .map(|WaypointEntry(w)| Waypoint {
            position: to_vec3(w.position),
            yaw: w.yaw,
            velocity: w.velocity.map(to_vec3),
            acceleration: w.acceleration.map(to_vec3),
        })
        .collect();
    let course = WaypointCourse::new(raw.name.unwrap_or_else(|| DEFAULT_COURSE_NAME.into()), waypoints)?;
    let limits = raw.limits.map(MotionLimits::validated).transpose()?;
    Ok(CourseDocument {
        course,
        limits,
        order: raw.order,
        preset: raw.preset,
    })
}

/// Parses and validates a course file.
pub fn parse_course(bytes: &[u8]) -> Result<WaypointCourse> {
    Ok(parse_course_document(bytes)?.course)
}

pub fn read_course_document(path: &Path) -> Result<CourseDocument> {
    parse_course_document(&std::fs::read(path)?)
}

/// Canonical JSON for a course document.
pub fn course_document_to_json(doc: &CourseDocument) -> Result<String> {
    let raw = CourseFileRaw {
        name: Some(doc.course.name().to_string()),
        waypoints: doc
            .course
            .waypoints()
            .iter()
            .map(|w| {
                WaypointEntry(WaypointSpec {
                    position: from_vec3(&w.position),
                    yaw: w.yaw,
                    velocity: w.velocity.as_ref().map(from_vec3),
                    acceleration: w.acceleration.as_ref().map(from_vec3),
                })
            })
            .collect(),
        limits: doc.limits,
        order: doc.order,
        preset: doc.preset,
    };
    let mut s = serde_json::to_string_pretty(&raw)?;
    s.push('\n');
    Ok(s)
}

pub fn course_to_json(course: &WaypointCourse) -> Result<String> {
    course_document_to_json(&CourseDocument {
        course: course.clone(),
        limits: None,
        order: None,
        preset: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMethod {
    Initial,
    Mellinger,
    Bry,
    Peak,
    Compare,
}

/// Either a named preset or an explicit weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Preset(Preset),
    Explicit(CostWeights),
}

impl WeightsSpec {
    pub fn weights(&self) -> CostWeights {
        match self {
            WeightsSpec::Preset(p) => p.weights(),
            WeightsSpec::Explicit(w) => w.clone(),
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub method: RunMethod,
    pub weights: WeightsSpec,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<MotionLimits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default)]
    pub allocator: AllocatorConfig,
    #[serde(default)]
    pub peak: PeakOptimizerConfig,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Seed of a generated course, used when no course file is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_segments")]
    pub segments: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub course: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
}

fn default_dt() -> f64 {
    0.01
}

fn default_segments() -> usize {
    6
}

impl RunManifest {
    pub fn new(method: RunMethod) -> Self {
        RunManifest {
            method,
            weights: WeightsSpec::Preset(Preset::Jerk),
            order: 5,
            limits: None,
            total_time: None,
            allocator: AllocatorConfig::default(),
            peak: PeakOptimizerConfig::default(),
            dt: default_dt(),
            seed: None,
            segments: default_segments(),
            course: None,
            out: None,
            trace: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(self.method, RunMethod::Peak | RunMethod::Compare) && self.limits.is_none() {
            return Err(TrajError::validation("limits are required for peak optimization and comparison"));
        }
        if self.course.is_none() && self.seed.is_none() {
            return Err(TrajError::validation("either a course file or a seed is required"));
        }
        if !(self.dt > 0.0) {
            return Err(TrajError::validation(format!("sample step must be positive, got {}", self.dt)));
        }
        if let Some(t) = self.total_time {
            if !(t > 0.0) || !t.is_finite() {
                return Err(TrajError::validation(format!("total time must be positive, got {t}")));
            }
        }
        self.allocator.validate()?;
        self.peak.validate()
    }

    /// The manifest without output locations, for embedding in reports.
    pub fn without_outputs(&self) -> Self {
        RunManifest {
            out: None,
            trace: None,
            ..self.clone()
        }
    }
}

pub fn parse_manifest(bytes: &[u8]) -> Result<RunManifest> {
    Ok(serde_json::from_slice(bytes)?)
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one CSV row per sample at `0, dt, …, T` and returns the row count
/// (header excluded).
pub fn export_samples<W: Write>(traj: &PiecewiseTrajectory, dt: f64, gravity: f64, mut out: W) -> Result<usize> {
    let samples = traj.sample(dt)?;
    writeln!(out, "{SAMPLE_HEADER}")?;
    for s in &samples {
        let thrust = (s.acceleration + Vector3::new(0.0, 0.0, gravity)).norm();
        let mut fields = vec![num(s.time)];
        for v in [&s.position, &s.velocity, &s.acceleration, &s.jerk, &s.snap] {
            fields.extend(v.iter().map(|c| num(*c)));
        }
        fields.extend([s.velocity_norm, thrust, s.jerk_norm, s.snap_norm].map(num));
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(samples.len())
}

pub fn export_samples_to_path(traj: &PiecewiseTrajectory, dt: f64, gravity: f64, path: &Path) -> Result<usize> {
    export_samples(traj, dt, gravity, BufWriter::new(File::create(path)?))
}

/// Pretty JSON with struct-order keys and a trailing newline.
pub fn report_to_string<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn export_report<T: Serialize, W: Write>(report: &T, mut out: W) -> Result<()> {
    out.write_all(report_to_string(report)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn export_report_to_path<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    export_report(report, BufWriter::new(File::create(path)?))
}

/// Result document of `optimize` and `check` runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub manifest: RunManifest,
    pub course: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peaks: Option<PeakReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PiecewiseTrajectory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_tail: Option<Vec<TraceEntry>>,
}

impl RunReport {
    pub fn new(manifest: &RunManifest, course: &WaypointCourse) -> Self {
        RunReport {
            schema: RUN_REPORT_SCHEMA.to_string(),
            manifest: manifest.without_outputs(),
            course: course.name().to_string(),
            converged: None,
            error: None,
            total_time: None,
            segment_times: None,
            feasible: None,
            tolerance: manifest.peak.tolerance(),
            peaks: None,
            trajectory: None,
            trace_tail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceDocument<'a> {
    pub schema: &'static str,
    pub course: &'a str,
    #[serde(flatten)]
    pub trace: &'a IterationTrace,
}

impl<'a> TraceDocument<'a> {
    pub fn new(course: &'a WaypointCourse, trace: &'a IterationTrace) -> Self {
        TraceDocument {
            schema: TRACE_SCHEMA,
            course: course.name(),
            trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"waypoints": [[0, 0, 1], [1, 0, 1]]}"#;

    #[test]
    fn minimal_course() {
        let c = parse_course(MINIMAL.as_bytes()).unwrap();
        assert_eq!(c.num_segments(), 1);
        assert_eq!(c.name(), DEFAULT_COURSE_NAME);
    }

    #[test]
    fn coincident_waypoints_named() {
        let text = r#"{"waypoints": [[0, 0, 0], [1, 0, 0], [2, 0, 0], [2, 0, 0]]}"#;
        let err = parse_course(text.as_bytes()).unwrap_err();
        assert!(matches!(err, TrajError::Validation(_)));
        assert!(err.to_string().contains("waypoints 2 and 3 coincident"), "{err}");
    }

    #[test]
    fn course_with_limits() {
        let text = r#"{
            "name": "seven",
            "waypoints": [[0,0,1],[1,0,1],[2,1,1],[3,1,1.5],[4,0,1],{"position":[5,0,1],"yaw":0.5},[6,1,1]],
            "limits": {"velocity": 5, "acceleration": 15.5, "jerk": 62, "snap": 800},
            "preset": "snap",
            "order": 5
        }"#;
        // mixed yaw is rejected; strip it and parse again
        assert!(parse_course_document(text.as_bytes()).is_err());
        let text = text.replace(r#"{"position":[5,0,1],"yaw":0.5}"#, "[5,0,1]");
        let doc = parse_course_document(text.as_bytes()).unwrap();
        assert_eq!(doc.course.waypoints().len(), 7);
        assert_eq!(doc.limits, Some(MotionLimits::new(5.0, 15.5, 62.0, 800.0).unwrap()));
        assert_eq!(doc.preset, Some(Preset::Snap));
        assert_eq!(doc.order, Some(5));
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_course(b"{\n  \"waypoints\": [[0,0,0],\n  [1,0,]\n}").unwrap_err();
        match err {
            TrajError::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = parse_course(br#"{"waypoints": [[0,0,0],[1,0,0]], "speed": 3}"#).unwrap_err();
        assert!(matches!(err, TrajError::Parse { .. }), "{err}");
        let err = parse_course(br#"{"waypoints": [[0,0,0],{"position":[1,0,0],"jerk":[0,0,0]}]}"#).unwrap_err();
        match err {
            TrajError::Parse { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("jerk"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_course(br#"{"waypoints": [[0,0],[1,0,0]]}"#).is_err());
        assert!(parse_course(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn manifest_requires_limits_for_peak() {
        let mut m = RunManifest::new(RunMethod::Peak);
        m.seed = Some(1);
        assert!(m.validate().is_err());
        m.limits = Some(MotionLimits::new(5.0, 15.5, 62.0, 800.0).unwrap());
        m.validate().unwrap();
        let mut m = RunManifest::new(RunMethod::Initial);
        m.seed = Some(1);
        m.validate().unwrap();
        m.seed = None;
        assert!(m.validate().is_err());
    }

    #[test]
    fn explicit_weights_in_manifest() {
        let mut m = RunManifest::new(RunMethod::Initial);
        m.weights = WeightsSpec::Explicit(CostWeights::new(vec![0.0, 0.0, 0.5, 1.0]).unwrap());
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(parse_manifest(text.as_bytes()).unwrap(), m);
        let bad = text.replace("[0.0,0.0,0.5,1.0]", "[0.0,0.0]");
        assert!(parse_manifest(bad.as_bytes()).is_err());
    }
}
