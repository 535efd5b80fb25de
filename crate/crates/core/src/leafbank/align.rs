use image::{Rgba, RgbaImage};

use super::LeafCutout;
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Point};
use crate::raster::{alpha_mask, farthest_point, rotate, scale, Rotated, ALPHA_THRESHOLD};
use crate::scalar::{wrap_degrees, Scalar};

/// Resampling can move the farthest pixel off the rotated axis; alignment
/// re-measures and corrects this many times at most.
const MAX_ALIGN_PASSES: usize = 4;

/// Fallback search: rotations within `ALIGN_NUDGES * ALIGN_NUDGE_DEG`
/// degrees of the measured axis.
const ALIGN_NUDGES: usize = 12;
const ALIGN_NUDGE_DEG: f64 = 0.25;

/// Angle in `[0, 360)` between the horizontal axis and the segment from
/// `plant_center` to the leaf pixel farthest from it. `plant_center` is in
/// the cutout's own pixel frame.
pub fn principal_axis<T: Scalar>(cutout: &LeafCutout, plant_center: Point<T>) -> Result<T> {
    let mask = alpha_mask(&cutout.pixels);
    let tip = farthest_point(&mask, plant_center)?;
    Ok(plant_center.angle_to(tip.to_point()))
}

/// Rotates a leaf so its principal axis points straight up and re-crops it
/// so the plant center sits on the bottom-center pixel.
///
/// `plant_center` is in the cutout's pixel frame and may lie outside the
/// raster. Leaf pixels that end up below the plant center are cropped.
/// Aligned input is accepted; re-aligning it about its own anchor is a
/// near no-op.
pub fn align_canonical<T: Scalar>(cutout: &LeafCutout, plant_center: Point<T>) -> Result<LeafCutout> {
    let axis = principal_axis(cutout, plant_center)?;
    let attempt = |rotation: T| -> Result<(u32, T, LeafCutout)> {
        let rotated = rotate(&cutout.pixels, rotation, plant_center);
        let candidate = crop_upright(cutout, &rotated)?;
        let anchor = candidate.anchor.to_point::<T>();
        let tip = farthest_point(&alpha_mask(&candidate.pixels), anchor)?;
        let r = wrap_degrees(T::lit(90.0) - anchor.angle_to(tip.to_point()));
        let residual = if r > T::lit(180.0) { r - T::lit(360.0) } else { r };
        Ok((tip.x.abs_diff(candidate.anchor.x), residual, candidate))
    };

    let base = wrap_degrees(T::lit(90.0) - axis);
    let mut rotation = base;
    let mut best: Option<(u32, LeafCutout)> = None;
    for _ in 0..MAX_ALIGN_PASSES {
        let (offset, residual, candidate) = attempt(rotation)?;
        if best.as_ref().is_none_or(|(o, _)| offset < *o) {
            best = Some((offset, candidate));
        }
        if offset <= 1 || residual == T::zero() {
            break;
        }
        rotation = wrap_degrees(rotation + residual);
    }
    // Blunt tips can leave several nearly equidistant pixels spread over a
    // few columns; small nudges of the rotation settle which one is farthest.
    let mut k = 1;
    while best.as_ref().is_some_and(|(o, _)| *o > 1) && k <= ALIGN_NUDGES {
        for sign in [T::one(), -T::one()] {
            let nudge = sign * T::from_usize_lossy(k) * T::lit(ALIGN_NUDGE_DEG);
            let (offset, _, candidate) = attempt(wrap_degrees(base + nudge))?;
            if best.as_ref().is_none_or(|(o, _)| offset < *o) {
                best = Some((offset, candidate));
            }
        }
        k += 1;
    }
    Ok(best.expect("at least one alignment pass").1)
}

/// Crops a rotated leaf so the pivot lands on `(floor(w/2), h - 1)`.
fn crop_upright<T: Scalar>(source: &LeafCutout, rotated: &Rotated<T>) -> Result<LeafCutout> {
    let ax = rotated.pivot.x.round().to_i64().unwrap_or(0);
    let ay = rotated.pivot.y.round().to_i64().unwrap_or(0);
    let raster = &rotated.raster;

    let mut kept: Vec<(i64, i64, Rgba<u8>)> = Vec::new();
    for (x, y, p) in raster.enumerate_pixels() {
        if p[3] > ALPHA_THRESHOLD && (y as i64) <= ay {
            kept.push((x as i64, y as i64, *p));
        }
    }
    if kept.is_empty() {
        return Err(Error::DegenerateMask(format!(
            "leaf `{}` has no pixels above its plant center after rotation",
            source.id()
        )));
    }
    let half_w = kept.iter().map(|&(x, _, _)| (x - ax).abs()).max().unwrap();
    let min_y = kept.iter().map(|&(_, y, _)| y).min().unwrap();
    let w = (2 * half_w + 1) as u32;
    let h = (ay - min_y + 1) as u32;
    let mut out = RgbaImage::new(w, h);
    for (x, y, p) in kept {
        out.put_pixel((x - ax + half_w) as u32, (y - min_y) as u32, p);
    }

    let mut aligned = LeafCutout::from_raster(
        source.source_id.clone(),
        source.label,
        out,
        Pixel::new(half_w as u32, h - 1),
        true,
    );
    aligned.subset_tag = source.subset_tag;
    aligned.source_stats = source.source_stats.clone();
    Ok(aligned)
}

/// Uniformly rescales a leaf so its longest side is exactly `longest`
/// pixels and anchors it at its mask centroid.
pub fn prescale_longest(cutout: &LeafCutout, longest: u32) -> Result<LeafCutout> {
    let (w, h) = cutout.pixels.dimensions();
    let factor = longest as f64 / w.max(h) as f64;
    let pixels = scale(&cutout.pixels, factor, factor)?;
    debug_assert_eq!(pixels.width().max(pixels.height()), longest);

    let mask = alpha_mask(&pixels);
    let n = mask.count();
    if n == 0 {
        return Err(Error::DegenerateMask(format!(
            "leaf `{}` vanished when rescaled",
            cutout.id()
        )));
    }
    let (sx, sy) = mask
        .pixels()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x as f64, b + y as f64));
    let centroid = Point::new(sx / n as f64, sy / n as f64);
    let anchor = centroid.round_to_pixel().unwrap_or((0, 0));
    let anchor = Pixel::new(anchor.0.min(pixels.width() - 1), anchor.1.min(pixels.height() - 1));

    let mut out = LeafCutout::from_raster(cutout.source_id.clone(), cutout.label, pixels, anchor, false);
    out.subset_tag = cutout.subset_tag;
    out.source_stats = cutout.source_stats.clone();
    Ok(out)
}
