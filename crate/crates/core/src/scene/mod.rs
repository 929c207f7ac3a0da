//! World model: motorcycle state, hazards, road corridor, camera and the
//! scenario files that bundle them.

mod camera;
mod scenario;

pub use camera::{
    body_to_world, camera_axes_in_body, camera_pose_at, CameraDescription, CameraModel, CameraRig,
    Intrinsics, Mount, RigidTransform,
};
pub use scenario::{load_scenario, parse_scenario, Scenario, TrialConfig};

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{self, Vec2};

/// Wraps an angle into (−π, π].
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Planar motorcycle state `[x, y, θ, v, δ]` plus lean angle `φ`.
///
/// `phi` is passed to perception providers only; the planner dynamics never
/// read it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorcycleState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl MotorcycleState {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn validate(&self, delta_max: f64) -> Result<()> {
        let all = [self.x, self.y, self.theta, self.v, self.delta, self.phi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("state has non-finite components"));
        }
        if self.v < 0.0 {
            return Err(Error::invalid("state speed v must be >= 0"));
        }
        if self.delta.abs() > delta_max {
            return Err(Error::invalid(format!(
                "state steering |delta| = {} exceeds delta_max = {}",
                self.delta.abs(),
                delta_max
            )));
        }
        if !(self.theta > -PI && self.theta <= PI) {
            return Err(Error::invalid("state heading theta must lie in (-pi, pi]"));
        }
        Ok(())
    }
}

/// Ground-truth hazard: a flat footprint on z = 0 with a scalar depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hazard {
    pub id: String,
    pub label: String,
    pub footprint: Vec<Vec2>,
    #[serde(default)]
    pub depth_m: f64,
    pub base_context_score: f64,
}

impl Hazard {
    pub fn validate(&self) -> Result<()> {
        if self.footprint.len() < 3 {
            return Err(Error::invalid(format!(
                "hazard '{}' footprint needs at least 3 vertices",
                self.id
            )));
        }
        if self
            .footprint
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::invalid(format!(
                "hazard '{}' has non-finite vertices",
                self.id
            )));
        }
        if !geometry::is_simple(&self.footprint) {
            return Err(Error::invalid(format!(
                "hazard '{}' footprint is not a simple polygon",
                self.id
            )));
        }
        if !(self.depth_m >= 0.0 && self.depth_m.is_finite()) {
            return Err(Error::invalid(format!(
                "hazard '{}' depth_m must be >= 0",
                self.id
            )));
        }
        if !(0.0..=1.0).contains(&self.base_context_score) {
            return Err(Error::invalid(format!(
                "hazard '{}' base_context_score must lie in [0, 1]",
                self.id
            )));
        }
        Ok(())
    }

    pub fn centroid(&self) -> Vec2 {
        geometry::centroid(&self.footprint)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        geometry::point_in_polygon_closed(&self.footprint, p)
    }
}

/// Drivable corridor: all points within `width / 2` of the centerline
/// polyline. A two-point centerline describes a straight road.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Road {
    pub centerline: Vec<Vec2>,
    pub width: f64,
}

impl Road {
    pub fn validate(&self) -> Result<()> {
        if self.centerline.len() < 2 {
            return Err(Error::invalid("road centerline needs at least 2 points"));
        }
        if !(self.width > 0.0) {
            return Err(Error::invalid("road width must be positive"));
        }
        Ok(())
    }

    pub fn distance_to_centerline(&self, p: Vec2) -> f64 {
        self.centerline
            .windows(2)
            .map(|w| geometry::point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.distance_to_centerline(p) <= 0.5 * self.width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_wrapping() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(0.25), 0.25);
        assert!((normalize_angle(-0.25 - TAU) + 0.25).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        let mut s = MotorcycleState::default();
        assert!(s.validate(0.6).is_ok());
        s.v = -1.0;
        assert!(s.validate(0.6).is_err());
        s.v = 1.0;
        s.delta = 0.7;
        assert!(s.validate(0.6).is_err());
        s.delta = 0.0;
        s.theta = -PI;
        assert!(s.validate(0.6).is_err());
    }

    #[test]
    fn road_corridor() {
        let road = Road {
            centerline: vec![Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0)],
            width: 4.0,
        };
        assert!(road.contains(Vec2::new(5.0, 2.0)));
        assert!(!road.contains(Vec2::new(5.0, 2.01)));
        assert!(!road.contains(Vec2::new(13.0, 0.0)));
    }

    #[test]
    fn hazard_rejects_bad_scores() {
        let mut h = Hazard {
            id: "h".into(),
            label: "pothole".into(),
            footprint: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
            ],
            depth_m: 0.1,
            base_context_score: 0.5,
        };
        assert!(h.validate().is_ok());
        h.base_context_score = 1.5;
        assert!(h.validate().is_err());
        h.base_context_score = 0.5;
        h.depth_m = -0.1;
        assert!(h.validate().is_err());
    }
}
