//! Geometry and compositing kernel.
//!
//! RGBA cutouts are [`image::RgbaImage`]s whose alpha channel is the leaf
//! mask. Instance labels live in [`LabelMap`], binary masks in [`Mask`].

mod buffers;
mod components;
mod compose;
mod distance;
mod transform;

pub use buffers::{LabelMap, Mask};
pub use components::connected_components;
pub use compose::{composite_leaf, Placement, Scene};
pub use distance::{farthest_point, nearest_point};
pub use transform::{rotate, scale, Rotated, MAX_SCALE};

/// Alpha values above this (out of 255) count as leaf when assigning labels.
pub const ALPHA_THRESHOLD: u8 = 127;

/// Binary alpha mask of an RGBA raster (alpha above [`ALPHA_THRESHOLD`]).
pub fn alpha_mask(raster: &image::RgbaImage) -> Mask {
    let (w, h) = raster.dimensions();
    Mask::from_fn(w, h, |x, y| raster.get_pixel(x, y)[3] > ALPHA_THRESHOLD)
}
