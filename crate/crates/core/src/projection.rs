//! Pinhole projection, ground-plane ray casting and footprint rasterization.
//!
//! Camera frame: +Z optical axis, +X right, +Y down. Pixel `(m, n)` is
//! column `m`, row `n`, and its center sits at image coordinates `(m, n)`.

use nalgebra::{Matrix3, Vector3};

use crate::geometry::{self, Vec2};
use crate::grid::Mask;
use crate::scene::{CameraModel, Hazard, Intrinsics, MotorcycleState, RigidTransform};

/// Points at or behind this camera depth do not project.
pub const MIN_DEPTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelSample {
    /// Sub-pixel column coordinate.
    pub u: f64,
    /// Sub-pixel row coordinate.
    pub v: f64,
    /// Nearest pixel column.
    pub m: i64,
    /// Nearest pixel row.
    pub n: i64,
    /// In front of the camera and inside the image.
    pub valid: bool,
}

impl PixelSample {
    pub const BEHIND: PixelSample = PixelSample {
        u: 0.0,
        v: 0.0,
        m: -1,
        n: -1,
        valid: false,
    };

    /// `(m, n)` as grid indices when valid.
    pub fn index(&self) -> Option<(usize, usize)> {
        self.valid.then_some((self.m as usize, self.n as usize))
    }
}

#[inline]
pub fn world_to_camera(p_w: &Vector3<f64>, t_cw: &RigidTransform) -> Vector3<f64> {
    t_cw.apply(p_w)
}

pub fn project_point(p_c: &Vector3<f64>, k: &Intrinsics) -> PixelSample {
    if !(p_c.z > MIN_DEPTH) {
        return PixelSample::BEHIND;
    }
    let u = k.fx * p_c.x / p_c.z + k.cx;
    let v = k.fy * p_c.y / p_c.z + k.cy;
    let m = u.round();
    let n = v.round();
    let valid = m >= 0.0 && m < k.width as f64 && n >= 0.0 && n < k.height as f64;
    PixelSample {
        u,
        v,
        m: if m.is_finite() { m as i64 } else { -1 },
        n: if n.is_finite() { n as i64 } else { -1 },
        valid,
    }
}

/// Casts pixel rays from a fixed camera onto a horizontal plane.
#[derive(Debug, Clone, Copy)]
pub struct GroundCaster {
    r_wc: Matrix3<f64>,
    center: Vector3<f64>,
    k: Intrinsics,
    ground_z: f64,
}

impl GroundCaster {
    pub fn new(camera: &CameraModel, ground_z: f64) -> Self {
        GroundCaster {
            r_wc: camera.t_cw.rotation.transpose(),
            center: camera.center_world(),
            k: camera.intrinsics,
            ground_z,
        }
    }

    /// Ground point seen through the center of pixel `(m, n)`, if the ray
    /// meets the plane in front of the camera.
    #[inline]
    pub fn hit(&self, m: usize, n: usize) -> Option<Vec2> {
        let d_c = Vector3::new(
            (m as f64 - self.k.cx) / self.k.fx,
            (n as f64 - self.k.cy) / self.k.fy,
            1.0,
        );
        let d_w = self.r_wc * d_c;
        if d_w.z == 0.0 {
            return None;
        }
        let s = (self.ground_z - self.center.z) / d_w.z;
        if !(s > 0.0) {
            return None;
        }
        Some(Vec2::new(
            self.center.x + s * d_w.x,
            self.center.y + s * d_w.y,
        ))
    }
}

/// Binary mask of the pixels whose ground ray lands inside the footprint.
pub fn rasterize_footprint(hazard: &Hazard, camera: &CameraModel) -> Mask {
    let k = &camera.intrinsics;
    let (w, h) = (k.width, k.height);
    let mut mask = Mask::new(w, h);
    let caster = GroundCaster::new(camera, 0.0);

    let (m_range, n_range) = match projected_bounds(hazard, camera) {
        Some(b) => b,
        None => return mask,
    };
    for n in n_range {
        for m in m_range.clone() {
            if let Some(p) = caster.hit(m, n) {
                if geometry::point_in_polygon(&hazard.footprint, p) {
                    mask.set(m, n, true);
                }
            }
        }
    }
    mask
}

type PixelRange = std::ops::Range<usize>;

/// Pixel window that can contain the footprint's image. The full image when
/// any vertex is behind the camera; `None` when the window is empty.
fn projected_bounds(hazard: &Hazard, camera: &CameraModel) -> Option<(PixelRange, PixelRange)> {
    const MARGIN: f64 = 2.0;
    let k = &camera.intrinsics;
    let (w, h) = (k.width, k.height);
    let (mut u0, mut u1, mut v0, mut v1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in &hazard.footprint {
        let p_c = world_to_camera(&Vector3::new(p.x, p.y, 0.0), &camera.t_cw);
        if !(p_c.z > MIN_DEPTH) {
            return Some((0..w, 0..h));
        }
        let u = k.fx * p_c.x / p_c.z + k.cx;
        let v = k.fy * p_c.y / p_c.z + k.cy;
        u0 = u0.min(u);
        u1 = u1.max(u);
        v0 = v0.min(v);
        v1 = v1.max(v);
    }
    let clamp = |x: f64, hi: usize| x.max(0.0).min(hi as f64) as usize;
    let m0 = clamp((u0 - MARGIN).floor(), w);
    let m1 = clamp((u1 + MARGIN).ceil() + 1.0, w);
    let n0 = clamp((v0 - MARGIN).floor(), h);
    let n1 = clamp((v1 + MARGIN).ceil() + 1.0, h);
    (m0 < m1 && n0 < n1).then_some((m0..m1, n0..n1))
}

/// Projects each waypoint, lifted to `z = ground_offset`, into the image.
pub fn project_trajectory(
    states: &[MotorcycleState],
    camera: &CameraModel,
    ground_offset: f64,
) -> Vec<PixelSample> {
    states
        .iter()
        .map(|s| {
            let p_c = world_to_camera(&Vector3::new(s.x, s.y, ground_offset), &camera.t_cw);
            project_point(&p_c, &camera.intrinsics)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{camera_pose_at, CameraRig, Mount};
    use nalgebra::Rotation3;

    fn k640() -> Intrinsics {
        Intrinsics {
            fx: 500.0,
            fy: 500.0,
            cx: 320.0,
            cy: 240.0,
            width: 640,
            height: 480,
        }
    }

    fn road_camera() -> CameraModel {
        let rig = CameraRig {
            intrinsics: Intrinsics {
                fx: 200.0,
                fy: 200.0,
                cx: 80.0,
                cy: 60.0,
                width: 160,
                height: 120,
            },
            mount: Mount {
                translation: [0.0, 0.0, 1.2],
                pitch: 0.15,
                ..Mount::default()
            },
        };
        camera_pose_at(&MotorcycleState::default(), &rig)
    }

    fn square_hazard(cx: f64, cy: f64, half: f64) -> Hazard {
        Hazard {
            id: "sq".into(),
            label: "pothole".into(),
            footprint: vec![
                Vec2::new(cx - half, cy - half),
                Vec2::new(cx + half, cy - half),
                Vec2::new(cx + half, cy + half),
                Vec2::new(cx - half, cy + half),
            ],
            depth_m: 0.1,
            base_context_score: 0.5,
        }
    }

    #[test]
    fn identity_transform() {
        let p = world_to_camera(&Vector3::new(1.0, 2.0, 3.0), &RigidTransform::identity());
        assert_eq!(p, Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn pure_translation() {
        let t = RigidTransform::new(Matrix3::identity(), Vector3::new(0.0, 0.0, -5.0));
        assert_eq!(
            world_to_camera(&Vector3::zeros(), &t),
            Vector3::new(0.0, 0.0, -5.0)
        );
    }

    #[test]
    fn yaw_rotation_by_hand() {
        // Rz(90°) = [[0,-1,0],[1,0,0],[0,0,1]] maps (1,0,0) to (0,1,0)
        let r =
            *Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2).matrix();
        let p = world_to_camera(&Vector3::x(), &RigidTransform::new(r, Vector3::zeros()));
        assert!((p - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn principal_point() {
        for z in [0.5, 3.0, 1e4] {
            let s = project_point(&Vector3::new(0.0, 0.0, z), &k640());
            assert_eq!(
                (s.u, s.v, s.m, s.n, s.valid),
                (320.0, 240.0, 320, 240, true)
            );
        }
    }

    #[test]
    fn zero_depth_is_invalid() {
        assert!(!project_point(&Vector3::new(1.0, 1.0, 0.0), &k640()).valid);
        assert!(!project_point(&Vector3::new(1.0, 1.0, -2.0), &k640()).valid);
        assert!(!project_point(&Vector3::new(0.0, 0.0, 1e-6), &k640()).valid);
    }

    #[test]
    fn hand_computed_pinhole() {
        // 500 * 1 / 10 + 320 = 370, 500 * 0 / 10 + 240 = 240
        let s = project_point(&Vector3::new(1.0, 0.0, 10.0), &k640());
        assert_eq!((s.m, s.n, s.valid), (370, 240, true));
    }

    #[test]
    fn off_image_is_invalid() {
        let s = project_point(&Vector3::new(10.0, 0.0, 1.0), &k640());
        assert!(!s.valid);
        assert_eq!(s.m, 5320);
    }

    #[test]
    fn hazard_behind_camera_has_empty_mask() {
        let mask = rasterize_footprint(&square_hazard(-10.0, 0.0, 1.0), &road_camera());
        assert!(mask.is_empty());
    }

    #[test]
    fn square_on_optical_axis_contains_its_center() {
        let cam = road_camera();
        // optical axis meets z = 0 at 1.2 / tan(0.15) ahead
        let d = 1.2 / 0.15f64.tan();
        let mask = rasterize_footprint(&square_hazard(d, 0.0, 1.5), &cam);
        assert!(!mask.is_empty());
        let s = project_point(
            &world_to_camera(&Vector3::new(d, 0.0, 0.0), &cam.t_cw),
            &cam.intrinsics,
        );
        let (m, n) = s.index().unwrap();
        assert_eq!((m, n), (80, 60));
        assert!(mask.get(m, n));
    }

    #[test]
    fn straight_ahead_waypoints_move_down_as_they_get_nearer() {
        let cam = road_camera();
        let states: Vec<MotorcycleState> = [40.0, 30.0, 20.0, 15.0, 10.0, 8.0]
            .iter()
            .map(|&x| MotorcycleState {
                x,
                ..MotorcycleState::default()
            })
            .collect();
        let samples = project_trajectory(&states, &cam, 0.0);
        assert!(samples.iter().all(|s| s.valid && s.m == 80));
        for pair in samples.windows(2) {
            assert!(pair[1].n > pair[0].n);
        }
    }

    #[test]
    fn waypoint_below_camera_is_outside_frustum() {
        let cam = road_camera();
        let s = project_trajectory(&[MotorcycleState::default()], &cam, 0.0);
        assert!(!s[0].valid);
    }

    #[test]
    fn waypoints_behind_camera_are_invalid() {
        let cam = road_camera();
        let states: Vec<MotorcycleState> = (1..6)
            .map(|i| MotorcycleState {
                x: -(i as f64),
                ..MotorcycleState::default()
            })
            .collect();
        assert!(project_trajectory(&states, &cam, 0.0)
            .iter()
            .all(|s| !s.valid));
    }

    #[test]
    fn pixels_above_horizon_never_hit_ground() {
        let cam = road_camera();
        let caster = GroundCaster::new(&cam, 0.0);
        assert!(caster.hit(80, 0).is_none());
        assert!(caster.hit(80, 119).is_some());
    }
}
