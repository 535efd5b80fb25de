use image::RgbImage;
use serde::{Deserialize, Serialize};

use super::transform::{covered_range, scaled_dims, Sampler};
use super::LabelMap;
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Rotation};
use crate::leafbank::LeafCutout;
use crate::scalar::Scalar;

/// Where and how one cutout is pasted into a scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement<T> {
    pub leaf_id: String,
    /// Scene pixel receiving the cutout's anchor.
    pub position: Pixel,
    /// Counter-clockwise rotation about the anchor, in `[0, 360)`.
    pub angle_deg: T,
    pub scale_x: T,
    pub scale_y: T,
    /// 1-based stacking order; higher z is drawn on top.
    pub z: u32,
}

impl<T: Scalar> Placement<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.angle_deg >= T::zero() && self.angle_deg < T::lit(360.0)) {
            return Err(Error::InvalidPlacement(format!(
                "angle {} outside [0, 360)",
                self.angle_deg
            )));
        }
        if !(self.scale_x > T::zero() && self.scale_y > T::zero()) {
            return Err(Error::InvalidPlacement(format!(
                "scales ({}, {}) must be positive",
                self.scale_x, self.scale_y
            )));
        }
        if self.z == 0 {
            return Err(Error::InvalidPlacement("z must be >= 1".into()));
        }
        Ok(())
    }
}

/// A background with leaves pasted onto it, plus the matching label raster.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub pixels: RgbImage,
    pub labels: LabelMap,
    /// Number of placements applied so far.
    pub next_z: u32,
}

impl Scene {
    pub fn new(background: RgbImage) -> Self {
        let (w, h) = background.dimensions();
        Self {
            pixels: background,
            labels: LabelMap::new(w, h),
            next_z: 0,
        }
    }

    pub fn dimensions(&self) -> (u32, u32) {
        self.pixels.dimensions()
    }

    /// Visible pixel count per z, indexed by z (entry 0 is background).
    pub fn visible_areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.next_z as usize + 1];
        for &l in self.labels.as_slice() {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Drops labels of placements with fewer than `min_visible` visible
    /// pixels and renumbers the survivors `1..=n` in z order. Returns the
    /// z -> label map (0 for dropped placements).
    pub fn keep_visible(&mut self, min_visible: usize) -> Vec<u32> {
        let areas = self.visible_areas();
        let mut map = vec![0u32; areas.len()];
        let mut next = 0;
        for z in 1..areas.len() {
            if areas[z] >= min_visible && areas[z] > 0 {
                next += 1;
                map[z] = next;
            }
        }
        for l in self.labels.as_mut_slice() {
            *l = map[*l as usize];
        }
        map
    }
}

/// Adds one leaf to the scene as its `z`-th placement.
///
/// The cutout is scaled, rotated about its anchor and pasted with the anchor
/// on `p.position`, in a single inverse-mapped pass. Pixels whose resampled
/// alpha exceeds the threshold receive the leaf's RGB and label `p.z`,
/// overwriting anything below. Content outside the scene is clipped.
pub fn composite_leaf<T: Scalar>(
    scene: &mut Scene,
    cutout: &LeafCutout,
    p: &Placement<T>,
) -> Result<()> {
    p.validate()?;
    if p.z != scene.next_z + 1 {
        return Err(Error::InvalidPlacement(format!(
            "placement z = {} but scene expects z = {}",
            p.z,
            scene.next_z + 1
        )));
    }
    let (sw, sh) = scene.dimensions();
    if p.position.x >= sw || p.position.y >= sh {
        return Err(Error::InvalidPlacement(format!(
            "anchor position ({}, {}) outside {sw}x{sh} scene",
            p.position.x, p.position.y
        )));
    }

    let raster = &cutout.pixels;
    let (w, h) = raster.dimensions();
    let (nw, nh) = scaled_dims(w, h, p.scale_x, p.scale_y)?;
    let half = T::lit(0.5);
    let rx = T::from_u32(nw).unwrap() / T::from_u32(w).unwrap();
    let ry = T::from_u32(nh).unwrap() / T::from_u32(h).unwrap();
    // Anchor in the scaled frame.
    let ax = (T::from_u32(cutout.anchor.x).unwrap() + half) * rx - half;
    let ay = (T::from_u32(cutout.anchor.y).unwrap() + half) * ry - half;
    let px = T::from_u32(p.position.x).unwrap();
    let py = T::from_u32(p.position.y).unwrap();
    let rot = Rotation::degrees(p.angle_deg);

    let nwf = T::from_u32(nw).unwrap();
    let nhf = T::from_u32(nh).unwrap();
    let (mut min_x, mut min_y) = (T::infinity(), T::infinity());
    let (mut max_x, mut max_y) = (T::neg_infinity(), T::neg_infinity());
    for (cx, cy) in [
        (-half, -half),
        (nwf - half, -half),
        (-half, nhf - half),
        (nwf - half, nhf - half),
    ] {
        let (dx, dy) = rot.apply(cx - ax, cy - ay);
        min_x = min_x.min(px + dx);
        max_x = max_x.max(px + dx);
        min_y = min_y.min(py + dy);
        max_y = max_y.max(py + dy);
    }
    let (x0, x1) = covered_range(min_x, max_x);
    let (y0, y1) = covered_range(min_y, max_y);
    let x0 = x0.max(0);
    let y0 = y0.max(0);
    let x1 = x1.min(sw as i64 - 1);
    let y1 = y1.min(sh as i64 - 1);

    let sampler = Sampler::new(raster);
    let z = p.z;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let dx = T::from_i64(x).unwrap() - px;
            let dy = T::from_i64(y).unwrap() - py;
            let (ux, uy) = rot.invert(dx, dy);
            let sx = (ax + ux + half) / rx - half;
            let sy = (ay + uy + half) / ry - half;
            if let Some(c) = sampler.sample(sx, sy) {
                let (x, y) = (x as u32, y as u32);
                scene.pixels.put_pixel(x, y, image::Rgb([c[0], c[1], c[2]]));
                scene.labels.set(x, y, z);
            }
        }
    }
    scene.next_z = z;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leafbank::LeafCutout;
    use image::{Rgb, Rgba, RgbaImage};

    fn block(w: u32, h: u32, color: [u8; 3], anchor: Pixel) -> LeafCutout {
        let px = RgbaImage::from_pixel(w, h, Rgba([color[0], color[1], color[2], 255]));
        LeafCutout::from_raster("t", 1, px, anchor, false)
    }

    fn place(z: u32, x: u32, y: u32, angle: f64) -> Placement<f64> {
        Placement {
            leaf_id: "t_1".into(),
            position: Pixel::new(x, y),
            angle_deg: angle,
            scale_x: 1.0,
            scale_y: 1.0,
            z,
        }
    }

    #[test]
    fn first_placement_labels_footprint() {
        let mut scene = Scene::new(RgbImage::from_pixel(10, 10, Rgb([0, 0, 0])));
        let leaf = block(3, 2, [10, 200, 30], Pixel::new(1, 1));
        composite_leaf(&mut scene, &leaf, &place(1, 5, 5, 0.0)).unwrap();
        assert_eq!(scene.next_z, 1);
        assert_eq!(scene.labels.instances(), vec![1]);
        assert_eq!(scene.labels.foreground().count(), 6);
        for y in 4..=5 {
            for x in 4..=6 {
                assert_eq!(scene.labels.get(x, y), 1);
                assert_eq!(*scene.pixels.get_pixel(x, y), Rgb([10, 200, 30]));
            }
        }
    }

    #[test]
    fn later_leaf_covers_earlier() {
        let mut scene = Scene::new(RgbImage::new(12, 12));
        let a = block(3, 3, [1, 1, 1], Pixel::new(1, 1));
        let b = block(5, 5, [2, 2, 2], Pixel::new(2, 2));
        composite_leaf(&mut scene, &a, &place(1, 6, 6, 0.0)).unwrap();
        composite_leaf(&mut scene, &b, &place(2, 6, 6, 0.0)).unwrap();
        assert_eq!(scene.visible_areas(), vec![144 - 25, 0, 25]);
    }

    #[test]
    fn clipped_at_borders() {
        let mut scene = Scene::new(RgbImage::new(8, 8));
        let leaf = block(5, 5, [3, 3, 3], Pixel::new(2, 2));
        composite_leaf(&mut scene, &leaf, &place(1, 0, 0, 0.0)).unwrap();
        assert_eq!(scene.labels.foreground().count(), 9);
    }

    #[test]
    fn rejects_bad_placements() {
        let mut scene = Scene::new(RgbImage::new(8, 8));
        let leaf = block(2, 2, [3, 3, 3], Pixel::new(0, 0));
        assert!(composite_leaf(&mut scene, &leaf, &place(1, 8, 0, 0.0)).is_err());
        assert!(composite_leaf(&mut scene, &leaf, &place(2, 1, 1, 0.0)).is_err());
        assert!(composite_leaf(&mut scene, &leaf, &place(1, 1, 1, 360.0)).is_err());
        assert_eq!(scene.next_z, 0);
    }

    #[test]
    fn quarter_turn_about_anchor() {
        // A 1x4 vertical bar anchored at its bottom pixel, turned by 90 deg,
        // should extend to the left of the anchor.
        let mut scene = Scene::new(RgbImage::new(9, 9));
        let leaf = block(1, 4, [5, 5, 5], Pixel::new(0, 3));
        composite_leaf(&mut scene, &leaf, &place(1, 4, 4, 90.0)).unwrap();
        let set: Vec<_> = scene.labels.foreground().pixels().collect();
        assert_eq!(set, vec![(1, 4), (2, 4), (3, 4), (4, 4)]);
    }

    #[test]
    fn keep_visible_renumbers() {
        let mut scene = Scene::new(RgbImage::new(12, 12));
        let small = block(1, 1, [1, 1, 1], Pixel::new(0, 0));
        let big = block(4, 4, [2, 2, 2], Pixel::new(0, 0));
        composite_leaf(&mut scene, &big, &place(1, 0, 0, 0.0)).unwrap();
        composite_leaf(&mut scene, &small, &place(2, 10, 10, 0.0)).unwrap();
        composite_leaf(&mut scene, &big, &place(3, 6, 6, 0.0)).unwrap();
        let map = scene.keep_visible(2);
        assert_eq!(map, vec![0, 1, 0, 2]);
        assert_eq!(scene.labels.instances(), vec![1, 2]);
    }
}
