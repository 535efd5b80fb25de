//! Resampling transforms on RGBA cutouts.
//!
//! Alpha is resampled nearest-neighbor so masks stay binary. RGB is
//! resampled bilinearly over the opaque neighbors only, so the transparent
//! surround of a cutout never bleeds into leaf edges.

use image::{Rgba, RgbaImage};

use super::ALPHA_THRESHOLD;
use crate::error::{Error, Result};
use crate::geometry::{Point, Rotation};
use crate::scalar::{wrap_degrees, Scalar};

/// Upper bound accepted by [`scale`] for either factor.
pub const MAX_SCALE: f64 = 16.0;

pub(crate) struct Sampler<'a> {
    src: &'a RgbaImage,
    w: i64,
    h: i64,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(src: &'a RgbaImage) -> Self {
        let (w, h) = src.dimensions();
        Self {
            src,
            w: w as i64,
            h: h as i64,
        }
    }

    #[inline]
    fn opaque_at(&self, x: i64, y: i64) -> Option<&Rgba<u8>> {
        if x < 0 || y < 0 || x >= self.w || y >= self.h {
            return None;
        }
        let p = self.src.get_pixel(x as u32, y as u32);
        (p[3] > ALPHA_THRESHOLD).then_some(p)
    }

    /// Samples the source at continuous position `(x, y)`. Returns `None`
    /// where the nearest source pixel is transparent or out of bounds.
    #[inline]
    pub(crate) fn sample<T: Scalar>(&self, x: T, y: T) -> Option<[u8; 4]> {
        let ix = x.round().to_i64()?;
        let iy = y.round().to_i64()?;
        let nearest = self.opaque_at(ix, iy)?;

        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0.to_i64()?, y0.to_i64()?);
        let one = T::one();
        let taps = [
            (x0, y0, (one - fx) * (one - fy)),
            (x0 + 1, y0, fx * (one - fy)),
            (x0, y0 + 1, (one - fx) * fy),
            (x0 + 1, y0 + 1, fx * fy),
        ];
        let mut acc = [T::zero(); 3];
        let mut wsum = T::zero();
        for (tx, ty, wt) in taps {
            if wt <= T::zero() {
                continue;
            }
            if let Some(p) = self.opaque_at(tx, ty) {
                for c in 0..3 {
                    acc[c] = acc[c] + wt * T::from_u8(p[c]).unwrap();
                }
                wsum = wsum + wt;
            }
        }
        let mut out = [nearest[0], nearest[1], nearest[2], nearest[3]];
        if wsum > T::zero() {
            for c in 0..3 {
                let v = (acc[c] / wsum).round();
                out[c] = v.max(T::zero()).min(T::lit(255.0)).to_u8().unwrap_or(0);
            }
        }
        Some(out)
    }
}

/// Pixel-center range `[lo, hi]` covered by a continuous extent.
pub(crate) fn covered_range<T: Scalar>(min: T, max: T) -> (i64, i64) {
    let tol = |v: T| T::epsilon() * T::lit(64.0) * (T::one() + v.abs());
    let lo = (min - tol(min)).ceil();
    let hi = (max + tol(max)).floor();
    (
        lo.to_i64().unwrap_or(i64::MIN),
        hi.to_i64().unwrap_or(i64::MAX),
    )
}

/// A rotated raster with the pivot's position inside it.
#[derive(Clone, Debug)]
pub struct Rotated<T> {
    pub raster: RgbaImage,
    pub pivot: Point<T>,
}

/// Rotates `src` counter-clockwise by `angle_deg` about `pivot` (source
/// pixel coordinates). The output is expanded to hold all rotated content;
/// the pivot's location in the output is returned with it.
pub fn rotate<T: Scalar>(src: &RgbaImage, angle_deg: T, pivot: Point<T>) -> Rotated<T> {
    let (w, h) = src.dimensions();
    if wrap_degrees(angle_deg) == T::zero() || w == 0 || h == 0 {
        return Rotated {
            raster: src.clone(),
            pivot,
        };
    }
    let rot = Rotation::degrees(angle_deg);
    let half = T::lit(0.5);
    let wf = T::from_u32(w).unwrap();
    let hf = T::from_u32(h).unwrap();
    let corners = [
        (-half, -half),
        (wf - half, -half),
        (-half, hf - half),
        (wf - half, hf - half),
    ];
    let (mut min_x, mut min_y) = (T::infinity(), T::infinity());
    let (mut max_x, mut max_y) = (T::neg_infinity(), T::neg_infinity());
    for (cx, cy) in corners {
        let (dx, dy) = rot.apply(cx - pivot.x, cy - pivot.y);
        let (px, py) = (pivot.x + dx, pivot.y + dy);
        min_x = min_x.min(px);
        max_x = max_x.max(px);
        min_y = min_y.min(py);
        max_y = max_y.max(py);
    }
    let (x0, x1) = covered_range(min_x, max_x);
    let (y0, y1) = covered_range(min_y, max_y);
    let out_w = (x1 - x0 + 1).max(0) as u32;
    let out_h = (y1 - y0 + 1).max(0) as u32;

    let sampler = Sampler::new(src);
    let mut out = RgbaImage::new(out_w, out_h);
    for v in 0..out_h {
        for u in 0..out_w {
            let wx = T::from_i64(x0 + u as i64).unwrap();
            let wy = T::from_i64(y0 + v as i64).unwrap();
            let (dx, dy) = rot.invert(wx - pivot.x, wy - pivot.y);
            if let Some(p) = sampler.sample(pivot.x + dx, pivot.y + dy) {
                out.put_pixel(u, v, Rgba(p));
            }
        }
    }
    Rotated {
        raster: out,
        pivot: Point::new(
            pivot.x - T::from_i64(x0).unwrap(),
            pivot.y - T::from_i64(y0).unwrap(),
        ),
    }
}

pub(crate) fn check_scale_factors<T: Scalar>(sx: T, sy: T) -> Result<()> {
    let max = T::lit(MAX_SCALE);
    for (name, s) in [("sx", sx), ("sy", sy)] {
        if !(s > T::zero() && s <= max) {
            return Err(Error::InvalidInput(format!(
                "scale factor {name} = {s} outside (0, {MAX_SCALE}]"
            )));
        }
    }
    Ok(())
}

/// Output dimensions of scaling a `w x h` raster, `round(w * sx) x round(h * sy)`.
pub(crate) fn scaled_dims<T: Scalar>(w: u32, h: u32, sx: T, sy: T) -> Result<(u32, u32)> {
    check_scale_factors(sx, sy)?;
    let nw = (T::from_u32(w).unwrap() * sx).round().to_u32().unwrap_or(0);
    let nh = (T::from_u32(h).unwrap() * sy).round().to_u32().unwrap_or(0);
    if nw == 0 || nh == 0 {
        return Err(Error::DegenerateScale {
            width: w,
            height: h,
            sx: sx.to_f64_lossy(),
            sy: sy.to_f64_lossy(),
        });
    }
    Ok((nw, nh))
}

/// Scales horizontally by `sx` and vertically by `sy`, independently.
pub fn scale<T: Scalar>(src: &RgbaImage, sx: T, sy: T) -> Result<RgbaImage> {
    let (w, h) = src.dimensions();
    let (nw, nh) = scaled_dims(w, h, sx, sy)?;
    if (nw, nh) == (w, h) {
        return Ok(src.clone());
    }
    let rx = T::from_u32(nw).unwrap() / T::from_u32(w).unwrap();
    let ry = T::from_u32(nh).unwrap() / T::from_u32(h).unwrap();
    let half = T::lit(0.5);
    let sampler = Sampler::new(src);
    let mut out = RgbaImage::new(nw, nh);
    for v in 0..nh {
        let sy = (T::from_u32(v).unwrap() + half) / ry - half;
        for u in 0..nw {
            let sx = (T::from_u32(u).unwrap() + half) / rx - half;
            if let Some(p) = sampler.sample(sx, sy) {
                out.put_pixel(u, v, Rgba(p));
            }
        }
    }
    Ok(out)
}
