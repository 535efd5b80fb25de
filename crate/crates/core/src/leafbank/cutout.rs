use std::collections::BTreeMap;

use image::{Rgba, RgbaImage};

use super::{AnnotatedImage, SubsetTag};
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Point};
use crate::raster::{alpha_mask, nearest_point};

/// Measurements of a leaf taken in its source image at extraction time.
/// Filtering needs them; cutouts loaded from a persisted bank have none.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceStats {
    /// Plant center in source-image coordinates.
    pub plant_center: Point<f64>,
    /// Distance from the plant center to the nearest leaf pixel.
    pub base_distance: f64,
    pub source_diagonal: f64,
    /// Leaf pixels with at least one 8-neighbor outside the leaf.
    pub boundary_px: u32,
    /// Boundary pixels 8-adjacent to a different nonzero label.
    pub contact_px: u32,
}

impl SourceStats {
    pub fn contact_fraction(&self) -> f64 {
        if self.boundary_px == 0 {
            0.0
        } else {
            self.contact_px as f64 / self.boundary_px as f64
        }
    }
}

/// RGBA cutout of a single leaf. Alpha is the leaf mask (0 or 255).
#[derive(Clone, Debug, PartialEq)]
pub struct LeafCutout {
    pub pixels: RgbaImage,
    /// Point that lands on the placement position when compositing. For
    /// aligned leaves this is the bottom-center pixel.
    pub anchor: Pixel,
    pub source_id: String,
    pub label: u32,
    pub subset_tag: SubsetTag,
    pub aligned: bool,
    pub area_px: u32,
    /// Top-left of the cutout in its source image, while that is meaningful.
    pub origin: Option<Pixel>,
    pub source_stats: Option<SourceStats>,
}

impl LeafCutout {
    pub fn from_raster(
        source_id: impl Into<String>,
        label: u32,
        pixels: RgbaImage,
        anchor: Pixel,
        aligned: bool,
    ) -> Self {
        let area_px = alpha_mask(&pixels).count() as u32;
        Self {
            pixels,
            anchor,
            source_id: source_id.into(),
            label,
            subset_tag: SubsetTag::Custom,
            aligned,
            area_px,
            origin: None,
            source_stats: None,
        }
    }

    /// Bank identifier, `{source_id}_{label}`.
    pub fn id(&self) -> String {
        format!("{}_{}", self.source_id, self.label)
    }

    pub fn width(&self) -> u32 {
        self.pixels.width()
    }

    pub fn height(&self) -> u32 {
        self.pixels.height()
    }

    /// Anchor position required of aligned cutouts.
    pub fn canonical_anchor(&self) -> Pixel {
        Pixel::new(self.width() / 2, self.height().saturating_sub(1))
    }

    pub(crate) fn refresh_area(&mut self) {
        self.area_px = alpha_mask(&self.pixels).count() as u32;
    }
}

#[derive(Clone, Copy)]
struct Bounds {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Cuts every labeled leaf out of `img` into its own tight RGBA raster.
///
/// Cutouts come back in ascending label order. Each anchor starts at the
/// leaf pixel nearest the plant center (the leaf base).
pub fn extract_leaves(img: &AnnotatedImage) -> Result<Vec<LeafCutout>> {
    img.validate()?;
    let labels = &img.labels;
    let (w, h) = labels.dimensions();

    let mut bounds: BTreeMap<u32, Bounds> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels.get(x, y);
            if l == 0 {
                continue;
            }
            bounds
                .entry(l)
                .and_modify(|b| {
                    b.x0 = b.x0.min(x);
                    b.y0 = b.y0.min(y);
                    b.x1 = b.x1.max(x);
                    b.y1 = b.y1.max(y);
                })
                .or_insert(Bounds {
                    x0: x,
                    y0: y,
                    x1: x,
                    y1: y,
                });
        }
    }
    if bounds.is_empty() {
        return Err(Error::EmptyExtraction {
            source_id: img.source_id.clone(),
        });
    }

    let center = img.effective_plant_center()?;
    let diagonal = img.diagonal();
    let label_at = |x: i64, y: i64| -> u32 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0
        } else {
            labels.get(x as u32, y as u32)
        }
    };

    let mut out = Vec::with_capacity(bounds.len());
    for (&label, b) in &bounds {
        let cw = b.x1 - b.x0 + 1;
        let ch = b.y1 - b.y0 + 1;
        let mut boundary_px = 0;
        let mut contact_px = 0;
        let raster = RgbaImage::from_fn(cw, ch, |cx, cy| {
            let (sx, sy) = (b.x0 + cx, b.y0 + cy);
            if labels.get(sx, sy) != label {
                return Rgba([0, 0, 0, 0]);
            }
            let mut on_boundary = false;
            let mut touches_other = false;
            for (dx, dy) in NEIGHBORS_8 {
                let n = label_at(sx as i64 + dx, sy as i64 + dy);
                if n != label {
                    on_boundary = true;
                    if n != 0 {
                        touches_other = true;
                    }
                }
            }
            boundary_px += u32::from(on_boundary);
            contact_px += u32::from(touches_other);
            let p = img.pixels.get_pixel(sx, sy);
            Rgba([p[0], p[1], p[2], 255])
        });

        let local_center = Point::new(center.x - b.x0 as f64, center.y - b.y0 as f64);
        let mask = alpha_mask(&raster);
        let base = nearest_point(&mask, local_center)?;
        let base_distance = local_center.distance(base.to_point());

        let mut cutout = LeafCutout::from_raster(img.source_id.clone(), label, raster, base, false);
        cutout.subset_tag = img.subset_tag;
        cutout.origin = Some(Pixel::new(b.x0, b.y0));
        cutout.source_stats = Some(SourceStats {
            plant_center: center,
            base_distance,
            source_diagonal: diagonal,
            boundary_px,
            contact_px,
        });
        out.push(cutout);
    }
    Ok(out)
}
