use nalgebra::{Matrix3, Matrix4, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::MotorcycleState;
use crate::error::{Error, Result};

/// Pinhole intrinsics plus image size in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Intrinsics {
    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::invalid("camera focal lengths must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("camera image size must be positive"));
        }
        if !(self.cx >= 0.0
            && self.cx < self.width as f64
            && self.cy >= 0.0
            && self.cy < self.height as f64)
        {
            return Err(Error::invalid("camera principal point outside the image"));
        }
        Ok(())
    }
}

/// Rigid transform `p ↦ R·p + t` from a source frame into a target frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        RigidTransform {
            rotation,
            translation,
        }
    }

    /// Builds from a homogeneous 4×4 matrix, checking that the rotation block
    /// is orthonormal with determinant +1 and the bottom row is `[0 0 0 1]`.
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self> {
        const TOL: f64 = 1e-6;
        let rotation: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
        let translation: Vector3<f64> = m.fixed_view::<3, 1>(0, 3).into_owned();
        let gram = rotation.transpose() * rotation;
        if (gram - Matrix3::identity()).abs().max() > TOL {
            return Err(Error::invalid("rotation block of T_cw is not orthonormal"));
        }
        if (rotation.determinant() - 1.0).abs() > TOL {
            return Err(Error::invalid(
                "rotation block of T_cw must have determinant +1",
            ));
        }
        let bottom = m.fixed_view::<1, 4>(3, 0);
        if (bottom[0].abs() + bottom[1].abs() + bottom[2].abs() + (bottom[3] - 1.0).abs()) > TOL {
            return Err(Error::invalid("T_cw bottom row must be [0, 0, 0, 1]"));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    #[inline]
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }
}

/// Camera axes (+X right, +Y down, +Z forward) expressed in the body frame
/// (+x forward, +y left, +z up).
pub fn camera_axes_in_body() -> Matrix3<f64> {
    Matrix3::new(
        0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, //
        0.0, -1.0, 0.0,
    )
}

/// Camera placement on the motorcycle body.
///
/// `translation` is the optical center in body coordinates. `pitch` is a
/// downward tilt (positive looks at the road), `yaw` turns left and `roll`
/// rotates about the forward axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mount {
    pub translation: [f64; 3],
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl Mount {
    /// Camera-to-body transform.
    pub fn camera_to_body(&self) -> RigidTransform {
        let tilt = Rotation3::from_axis_angle(&Vector3::z_axis(), self.yaw)
            * Rotation3::from_axis_angle(&Vector3::y_axis(), self.pitch)
            * Rotation3::from_axis_angle(&Vector3::x_axis(), self.roll);
        RigidTransform::new(
            tilt.matrix() * camera_axes_in_body(),
            Vector3::from(self.translation),
        )
    }
}

/// Intrinsics plus extrinsics `T_cw` (world → camera).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub intrinsics: Intrinsics,
    pub t_cw: RigidTransform,
}

impl CameraModel {
    pub fn new(intrinsics: Intrinsics, t_cw: RigidTransform) -> Result<Self> {
        intrinsics.validate()?;
        RigidTransform::from_matrix(&t_cw.to_matrix())?;
        Ok(CameraModel { intrinsics, t_cw })
    }

    pub fn width(&self) -> usize {
        self.intrinsics.width
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height
    }

    /// Optical center in world coordinates.
    pub fn center_world(&self) -> Vector3<f64> {
        -(self.t_cw.rotation.transpose() * self.t_cw.translation)
    }

    /// Optical axis (+Z of the camera) in world coordinates.
    pub fn optical_axis_world(&self) -> Vector3<f64> {
        self.t_cw.rotation.transpose() * Vector3::z()
    }
}

/// Serialized camera description: intrinsics plus `T_cw` as a row-major 4×4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraDescription {
    #[serde(flatten)]
    pub intrinsics: Intrinsics,
    pub t_cw: [[f64; 4]; 4],
}

impl From<&CameraModel> for CameraDescription {
    fn from(cam: &CameraModel) -> Self {
        let m = cam.t_cw.to_matrix();
        let mut rows = [[0.0; 4]; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m[(r, c)];
            }
        }
        CameraDescription {
            intrinsics: cam.intrinsics,
            t_cw: rows,
        }
    }
}

impl TryFrom<&CameraDescription> for CameraModel {
    type Error = Error;

    fn try_from(desc: &CameraDescription) -> Result<Self> {
        let m = Matrix4::from_fn(|r, c| desc.t_cw[r][c]);
        let t_cw = RigidTransform::from_matrix(&m)?;
        CameraModel::new(desc.intrinsics, t_cw)
    }
}

/// Camera as configured in a scenario: intrinsics and a fixed body mount.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraRig {
    pub intrinsics: Intrinsics,
    pub mount: Mount,
}

/// World-to-body transform inverse, i.e. body pose in the world (planar).
pub fn body_to_world(state: &MotorcycleState) -> RigidTransform {
    RigidTransform::new(
        *Rotation3::from_axis_angle(&Vector3::z_axis(), state.theta).matrix(),
        Vector3::new(state.x, state.y, 0.0),
    )
}

/// Camera following the body pose `(x, y, θ)` through the fixed mount.
pub fn camera_pose_at(state: &MotorcycleState, rig: &CameraRig) -> CameraModel {
    let camera_to_world = body_to_world(state).compose(&rig.mount.camera_to_body());
    CameraModel {
        intrinsics: rig.intrinsics,
        t_cw: camera_to_world.inverse(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn rig(mount: Mount) -> CameraRig {
        CameraRig {
            intrinsics: Intrinsics {
                fx: 200.0,
                fy: 200.0,
                cx: 80.0,
                cy: 60.0,
                width: 160,
                height: 120,
            },
            mount,
        }
    }

    fn at(x: f64, y: f64, theta: f64) -> MotorcycleState {
        MotorcycleState {
            x,
            y,
            theta,
            ..MotorcycleState::default()
        }
    }

    #[test]
    fn identity_mount_at_origin_is_axis_convention() {
        let cam = camera_pose_at(&at(0.0, 0.0, 0.0), &rig(Mount::default()));
        assert_eq!(cam.t_cw.rotation, camera_axes_in_body().transpose());
        assert_eq!(cam.t_cw.translation, Vector3::zeros());
        // world forward is camera +Z, world left is camera -X, world up is camera -Y
        assert_eq!(cam.t_cw.apply(&Vector3::x()), Vector3::z());
        assert_eq!(cam.t_cw.apply(&Vector3::y()), -Vector3::x());
        assert_eq!(cam.t_cw.apply(&Vector3::z()), -Vector3::y());
    }

    #[test]
    fn translating_state_moves_camera_center() {
        let mount = Mount {
            translation: [0.3, 0.0, 1.2],
            pitch: 0.2,
            ..Mount::default()
        };
        let a = camera_pose_at(&at(0.0, 0.0, 0.0), &rig(mount));
        let b = camera_pose_at(&at(1.0, 0.0, 0.0), &rig(mount));
        let shift = b.center_world() - a.center_world();
        assert_relative_eq!(shift, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn yawing_state_rotates_optical_axis() {
        let a = camera_pose_at(&at(0.0, 0.0, 0.0), &rig(Mount::default()));
        let b = camera_pose_at(&at(0.0, 0.0, FRAC_PI_2), &rig(Mount::default()));
        assert_relative_eq!(a.optical_axis_world(), Vector3::x(), epsilon = 1e-12);
        assert_relative_eq!(b.optical_axis_world(), Vector3::y(), epsilon = 1e-12);
    }

    #[test]
    fn positive_pitch_looks_down() {
        let mount = Mount {
            pitch: 0.3,
            ..Mount::default()
        };
        let cam = camera_pose_at(&at(0.0, 0.0, 0.0), &rig(mount));
        let axis = cam.optical_axis_world();
        assert!(axis.z < 0.0);
        assert_relative_eq!(axis.z, -(0.3f64).sin(), epsilon = 1e-12);
    }

    #[test]
    fn from_matrix_rejects_reflection_and_shear() {
        let mut m = Matrix4::identity();
        m[(0, 0)] = -1.0;
        assert!(RigidTransform::from_matrix(&m).is_err());
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.1;
        assert!(RigidTransform::from_matrix(&m).is_err());
        let mut m = Matrix4::identity();
        m[(0, 3)] = 4.0;
        assert!(RigidTransform::from_matrix(&m).is_ok());
    }

    #[test]
    fn description_roundtrip_preserves_transform() {
        let mount = Mount {
            translation: [0.5, -0.1, 1.1],
            roll: 0.01,
            pitch: 0.25,
            yaw: -0.05,
        };
        let cam = camera_pose_at(&at(3.0, -1.0, 0.4), &rig(mount));
        let desc = CameraDescription::from(&cam);
        let json = serde_json::to_string(&desc).unwrap();
        let back: CameraDescription = serde_json::from_str(&json).unwrap();
        let cam2 = CameraModel::try_from(&back).unwrap();
        assert_eq!(cam, cam2);
    }

    #[test]
    fn intrinsics_validation() {
        let mut k = rig(Mount::default()).intrinsics;
        assert!(k.validate().is_ok());
        k.cx = 160.0;
        assert!(k.validate().is_err());
        k.cx = 80.0;
        k.fy = 0.0;
        assert!(k.validate().is_err());
    }
}
