use nalgebra::{Isometry3, Quaternion, Translation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::world::Vec3;

/// Rigid pose: position in meters and orientation as a unit quaternion
/// `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: [f64; 4],
}

impl Default for Pose {
    fn default() -> Self {
        Pose::at(Vec3::ZERO)
    }
}

impl Pose {
    pub const IDENTITY_ROTATION: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

    /// Pure translation with identity orientation.
    pub fn at(position: Vec3) -> Self {
        Pose { position, orientation: Self::IDENTITY_ROTATION }
    }

    pub fn new(position: Vec3, orientation: [f64; 4]) -> Self {
        Pose { position, orientation }
    }

    /// Pose whose orientation is `angle` radians about `axis`.
    pub fn from_axis_angle(position: Vec3, axis: Vec3, angle: f64) -> Self {
        let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(axis.x, axis.y, axis.z));
        let q = UnitQuaternion::from_axis_angle(&axis, angle);
        Pose::from_isometry(&Isometry3::from_parts(Translation3::new(position.x, position.y, position.z), q))
    }

    pub fn quaternion_norm(&self) -> f64 {
        self.orientation.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.quaternion_norm() - 1.0).abs() <= 1e-9
    }

    pub fn to_isometry(&self) -> Isometry3<f64> {
        let [w, x, y, z] = self.orientation;
        let q = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
        Isometry3::from_parts(Translation3::new(self.position.x, self.position.y, self.position.z), q)
    }

    pub fn from_isometry(iso: &Isometry3<f64>) -> Self {
        let t = iso.translation.vector;
        let q = iso.rotation.quaternion();
        Pose { position: Vec3::new(t.x, t.y, t.z), orientation: [q.w, q.i, q.j, q.k] }
    }

    /// This world pose expressed in `frame`.
    pub fn relative_to(&self, frame: &Pose) -> Pose {
        Pose::from_isometry(&(frame.to_isometry().inverse() * self.to_isometry()))
    }

    /// This pose, given in `frame`, expressed in the world.
    pub fn in_world(&self, frame: &Pose) -> Pose {
        Pose::from_isometry(&(frame.to_isometry() * self.to_isometry()))
    }

    /// Straight-line position and spherical orientation interpolation.
    pub fn interpolate(&self, to: &Pose, t: f64) -> Pose {
        let a = self.to_isometry().rotation;
        let b = to.to_isometry().rotation;
        let q = a.try_slerp(&b, t, 1e-9).unwrap_or(if t < 0.5 { a } else { b });
        Pose {
            position: self.position.lerp(&to.position, t),
            orientation: [q.w, q.i, q.j, q.k],
        }
    }
}
