use image::{Rgb, RgbImage};

use crate::raster::{LabelMap, Mask};

/// Pixels whose label differs from at least one 4-neighbor.
pub fn boundary_pixels(labels: &LabelMap) -> Mask {
    let (w, h) = labels.dimensions();
    Mask::from_fn(w, h, |x, y| {
        let l = labels.get(x, y);
        (x > 0 && labels.get(x - 1, y) != l)
            || (x + 1 < w && labels.get(x + 1, y) != l)
            || (y > 0 && labels.get(x, y - 1) != l)
            || (y + 1 < h && labels.get(x, y + 1) != l)
    })
}

/// Distinct, saturated color for an instance id. Never black.
pub fn label_color(label: u32) -> [u8; 3] {
    // Golden-angle hue walk.
    let hue = (label as f64 * 137.507_764) % 360.0;
    let sector = hue / 60.0;
    let f = sector - sector.floor();
    let hi = 255.0;
    let lo = 40.0;
    let up = lo + (hi - lo) * f;
    let down = hi - (hi - lo) * f;
    let (r, g, b) = match sector as u32 {
        0 => (hi, up, lo),
        1 => (down, hi, lo),
        2 => (lo, hi, up),
        3 => (lo, down, hi),
        4 => (up, lo, hi),
        _ => (hi, lo, down),
    };
    [r as u8, g as u8, b as u8]
}

/// RGB with label boundaries painted in the color of the higher label on
/// either side. Interior pixels are untouched.
pub fn render_overlay(rgb: &RgbImage, labels: &LabelMap) -> RgbImage {
    let boundary = boundary_pixels(labels);
    let (w, h) = labels.dimensions();
    let mut out = rgb.clone();
    for (x, y) in boundary.pixels() {
        let mut top = labels.get(x, y);
        for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                top = top.max(labels.get(nx as u32, ny as u32));
            }
        }
        out.put_pixel(x, y, Rgb(label_color(top)));
    }
    out
}
