use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A point or displacement in meters, serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        (*self - *other).norm()
    }

    pub fn horizontal_distance(&self, other: &Vec3) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn lerp(&self, other: &Vec3, t: f64) -> Vec3 {
        *self + (*other - *self).scale(t)
    }

    pub fn scale(&self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

/// Bounding-box extents `[width, length, height]` in meters. Width runs
/// along x, length along y.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Dims {
    pub width: f64,
    pub length: f64,
    pub height: f64,
}

impl Dims {
    pub const ZERO: Dims = Dims { width: 0.0, length: 0.0, height: 0.0 };

    pub const fn new(width: f64, length: f64, height: f64) -> Self {
        Dims { width, length, height }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.width, self.length, self.height]
    }

    pub fn is_positive(&self) -> bool {
        self.width > 0.0 && self.length > 0.0 && self.height > 0.0
    }

    pub fn distance(&self, other: &Dims) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<[f64; 3]> for Dims {
    fn from(a: [f64; 3]) -> Self {
        Dims::new(a[0], a[1], a[2])
    }
}

impl From<Dims> for [f64; 3] {
    fn from(d: Dims) -> Self {
        d.as_array()
    }
}

/// Axis-aligned box given by the center of its base and its extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseBox {
    pub base: Vec3,
    pub dims: Dims,
}

impl BaseBox {
    pub fn top(&self) -> f64 {
        self.base.z + self.dims.height
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(self.base.x, self.base.y, self.base.z + self.dims.height / 2.0)
    }

    /// Positive-area overlap of the two footprints on the table plane.
    pub fn footprint_overlaps(&self, other: &BaseBox, tol: f64) -> bool {
        let ox = (self.dims.width + other.dims.width) / 2.0 - (self.base.x - other.base.x).abs();
        let oy = (self.dims.length + other.dims.length) / 2.0 - (self.base.y - other.base.y).abs();
        ox > tol && oy > tol
    }

    /// Positive-volume intersection.
    pub fn intersects(&self, other: &BaseBox, tol: f64) -> bool {
        let oz = self.top().min(other.top()) - self.base.z.max(other.base.z);
        self.footprint_overlaps(other, tol) && oz > tol
    }
}
