//! Waypoint courses: the constraint source for every solve.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TrajError};

/// Minimum separation between consecutive waypoints, meters.
pub const MIN_WAYPOINT_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub position: Vector3<f64>,
    /// Heading, radians. Carried through the smoothing solve but never
    /// limited or optimized.
    pub yaw: Option<f64>,
    /// Fixed velocity. Endpoints default to zero when absent; interior
    /// waypoints leave it free.
    pub velocity: Option<Vector3<f64>>,
    /// Fixed acceleration, same defaulting as `velocity`.
    pub acceleration: Option<Vector3<f64>>,
}

impl Waypoint {
    pub fn at(x: f64, y: f64, z: f64) -> Self {
        Waypoint {
            position: Vector3::new(x, y, z),
            yaw: None,
            velocity: None,
            acceleration: None,
        }
    }

    pub fn with_yaw(mut self, yaw: f64) -> Self {
        self.yaw = Some(yaw);
        self
    }

    pub fn with_velocity(mut self, v: Vector3<f64>) -> Self {
        self.velocity = Some(v);
        self
    }

    pub fn with_acceleration(mut self, a: Vector3<f64>) -> Self {
        self.acceleration = Some(a);
        self
    }
}

/// Ordered waypoints, at least two, with no coincident neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointCourse {
    name: String,
    waypoints: Vec<Waypoint>,
}

impl WaypointCourse {
    pub fn new(name: impl Into<String>, waypoints: Vec<Waypoint>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(TrajError::validation(format!(
                "a course needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        for (i, w) in waypoints.iter().enumerate() {
            let finite = w.position.iter().all(|v| v.is_finite())
                && w.yaw.map_or(true, f64::is_finite)
                && w.velocity.map_or(true, |v| v.iter().all(|c| c.is_finite()))
                && w.acceleration.map_or(true, |v| v.iter().all(|c| c.is_finite()));
            if !finite {
                return Err(TrajError::validation(format!("waypoint {i} has a non-finite value")));
            }
        }
        for (i, pair) in waypoints.windows(2).enumerate() {
            if (pair[1].position - pair[0].position).norm() <= MIN_WAYPOINT_SEPARATION {
                return Err(TrajError::validation(format!(
                    "waypoints {i} and {} coincident",
                    i + 1
                )));
            }
        }
        let with_yaw = waypoints.iter().filter(|w| w.yaw.is_some()).count();
        if with_yaw != 0 && with_yaw != waypoints.len() {
            let missing = waypoints.iter().position(|w| w.yaw.is_none()).unwrap();
            return Err(TrajError::validation(format!(
                "waypoint {missing} has no yaw while others do; yaw must be given for all or none"
            )));
        }
        Ok(WaypointCourse {
            name: name.into(),
            waypoints,
        })
    }

    /// Course through bare positions.
    pub fn from_positions(name: impl Into<String>, positions: &[[f64; 3]]) -> Result<Self> {
        let wps = positions.iter().map(|p| Waypoint::at(p[0], p[1], p[2])).collect();
        Self::new(name, wps)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn num_segments(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn has_yaw(&self) -> bool {
        self.waypoints[0].yaw.is_some()
    }

    /// Euclidean length of each leg.
    pub fn leg_lengths(&self) -> Vec<f64> {
        self.waypoints
            .windows(2)
            .map(|p| (p[1].position - p[0].position).norm())
            .collect()
    }

    /// Same course with every position mapped through `f`.
    pub fn map_positions(&self, f: impl Fn(Vector3<f64>) -> Vector3<f64>) -> Result<Self> {
        let wps = self
            .waypoints
            .iter()
            .map(|w| Waypoint {
                position: f(w.position),
                ..w.clone()
            })
            .collect();
        Self::new(self.name.clone(), wps)
    }
}

/// Deterministic pseudo-random course with `segments` legs.
///
/// Legs alternate between short, sharply turning hops and long, gently
/// curving straights, so that different segments are limited by different
/// derivatives.
pub fn random_course(seed: u64, segments: usize) -> Result<WaypointCourse> {
    if segments == 0 {
        return Err(TrajError::validation("a course needs at least one segment"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Vector3::new(0.0, 0.0, 1.0);
    let mut heading: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let mut waypoints = vec![Waypoint::at(pos.x, pos.y, pos.z)];
    for _ in 0..segments {
        let tight = rng.gen_bool(0.4);
        let (length, turn) = if tight {
            (rng.gen_range(0.3..0.9), rng.gen_range(1.2..2.4))
        } else {
            (rng.gen_range(1.5..4.0), rng.gen_range(0.0..0.6))
        };
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        heading += sign * turn;
        let climb = rng.gen_range(-0.3..0.3) * length;
        pos += Vector3::new(length * heading.cos(), length * heading.sin(), climb);
        pos.z = pos.z.clamp(0.3, 3.0);
        waypoints.push(Waypoint::at(pos.x, pos.y, pos.z));
    }
    WaypointCourse::new(format!("random-{seed}"), waypoints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coincident_neighbours() {
        let err = WaypointCourse::from_positions("c", &[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
            .unwrap_err();
        assert!(err.to_string().contains("waypoints 1 and 2 coincident"), "{err}");
    }

    #[test]
    fn rejects_short_course_and_partial_yaw() {
        assert!(WaypointCourse::from_positions("c", &[[0.0; 3]]).is_err());
        let wps = vec![Waypoint::at(0.0, 0.0, 0.0).with_yaw(0.1), Waypoint::at(1.0, 0.0, 0.0)];
        assert!(WaypointCourse::new("c", wps).is_err());
    }

    #[test]
    fn random_course_is_deterministic() {
        let a = random_course(7, 6).unwrap();
        let b = random_course(7, 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_segments(), 6);
        assert_ne!(a, random_course(8, 6).unwrap());
    }
}
