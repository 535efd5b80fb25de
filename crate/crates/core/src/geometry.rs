//! Points and angles in image coordinates.
//!
//! Axis convention used throughout the crate: `x` grows to the right, `y`
//! grows downward, and pixel `(i, j)` has its center at the point `(i, j)`.
//! Angles are in degrees, counter-clockwise as seen on screen, which is the
//! usual mathematical orientation once `y` is flipped. So the vector
//! `(10, 0)` has angle 0 and `(0, -10)` (straight up) has angle 90.

use serde::{Deserialize, Serialize};

use crate::scalar::{wrap_degrees, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_pixel(x: u32, y: u32) -> Self {
        Self::new(T::from_u32(x).unwrap(), T::from_u32(y).unwrap())
    }

    pub fn distance_sq(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Self) -> T {
        self.distance_sq(other).sqrt()
    }

    /// Angle in `[0, 360)` of the vector from `self` to `to`.
    pub fn angle_to(self, to: Self) -> T {
        let dx = to.x - self.x;
        let dy = self.y - to.y;
        wrap_degrees(dy.atan2(dx).to_degrees())
    }

    /// Nearest pixel, or `None` when the point lies left of or above the
    /// raster origin.
    pub fn round_to_pixel(self) -> Option<(u32, u32)> {
        let x = self.x.round();
        let y = self.y.round();
        if x < T::zero() || y < T::zero() {
            return None;
        }
        Some((x.to_u32()?, y.to_u32()?))
    }

    pub fn cast<U: Scalar>(self) -> Point<U> {
        Point::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

/// Integer pixel location.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pixel {
    pub x: u32,
    pub y: u32,
}

impl Pixel {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn to_point<T: Scalar>(self) -> Point<T> {
        Point::from_pixel(self.x, self.y)
    }
}

/// Rotation by `angle_deg` counter-clockwise on screen, as a linear map on
/// image-space offsets.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation<T> {
    cos: T,
    sin: T,
}

impl<T: Scalar> Rotation<T> {
    pub(crate) fn degrees(angle_deg: T) -> Self {
        let rad = angle_deg.to_radians();
        // Snap quarter turns so axis-aligned rotations stay exact.
        let tol = T::epsilon() * T::lit(8.0);
        let snap = |v: T| {
            if v.abs() < tol {
                T::zero()
            } else if (v.abs() - T::one()).abs() < tol {
                v.signum()
            } else {
                v
            }
        };
        Self {
            cos: snap(rad.cos()),
            sin: snap(rad.sin()),
        }
    }

    pub(crate) fn apply(&self, dx: T, dy: T) -> (T, T) {
        (dx * self.cos + dy * self.sin, dy * self.cos - dx * self.sin)
    }

    pub(crate) fn invert(&self, dx: T, dy: T) -> (T, T) {
        (dx * self.cos - dy * self.sin, dy * self.cos + dx * self.sin)
    }
}
