use super::Mask;
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Point};
use crate::scalar::Scalar;

fn extremal<T: Scalar>(mask: &Mask, from: Point<T>, farther: bool) -> Result<Pixel> {
    let mut best: Option<(Pixel, T)> = None;
    // Raster order plus a strict comparison breaks ties by smallest row,
    // then smallest column.
    for (x, y) in mask.pixels() {
        let d = from.distance_sq(Point::from_pixel(x, y));
        let better = match best {
            None => true,
            Some((_, bd)) => {
                if farther {
                    d > bd
                } else {
                    d < bd
                }
            }
        };
        if better {
            best = Some((Pixel::new(x, y), d));
        }
    }
    best.map(|(p, _)| p)
        .ok_or_else(|| Error::DegenerateMask("mask has no set pixels".into()))
}

/// Mask pixel at maximal Euclidean distance from `from`.
pub fn farthest_point<T: Scalar>(mask: &Mask, from: Point<T>) -> Result<Pixel> {
    extremal(mask, from, true)
}

/// Mask pixel at minimal Euclidean distance from `from`, same tie rule.
pub fn nearest_point<T: Scalar>(mask: &Mask, from: Point<T>) -> Result<Pixel> {
    extremal(mask, from, false)
}
