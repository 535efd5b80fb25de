use std::fmt;
use std::str::FromStr;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::raster::LabelMap;

/// Which dataset subset a source image or leaf belongs to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubsetTag {
    A1,
    A2,
    A3,
    A4,
    #[default]
    Custom,
}

impl fmt::Display for SubsetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsetTag::A1 => "A1",
            SubsetTag::A2 => "A2",
            SubsetTag::A3 => "A3",
            SubsetTag::A4 => "A4",
            SubsetTag::Custom => "custom",
        })
    }
}

impl FromStr for SubsetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(SubsetTag::A1),
            "a2" => Ok(SubsetTag::A2),
            "a3" => Ok(SubsetTag::A3),
            "a4" => Ok(SubsetTag::A4),
            "custom" => Ok(SubsetTag::Custom),
            other => Err(Error::InvalidInput(format!("unknown subset tag `{other}`"))),
        }
    }
}

/// A source photograph with its per-leaf instance annotation.
#[derive(Clone, Debug)]
pub struct AnnotatedImage {
    pub pixels: RgbImage,
    pub labels: LabelMap,
    pub plant_center: Option<Point<f64>>,
    pub source_id: String,
    pub subset_tag: SubsetTag,
}

impl AnnotatedImage {
    pub fn new(
        pixels: RgbImage,
        labels: LabelMap,
        plant_center: Option<Point<f64>>,
        source_id: impl Into<String>,
        subset_tag: SubsetTag,
    ) -> Result<Self> {
        let img = Self {
            pixels,
            labels,
            plant_center,
            source_id: source_id.into(),
            subset_tag,
        };
        img.validate()?;
        Ok(img)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pixels.dimensions() != self.labels.dimensions() {
            let (w, h) = self.pixels.dimensions();
            let (lw, lh) = self.labels.dimensions();
            return Err(Error::InvalidInput(format!(
                "`{}`: label mask is {lw}x{lh} but image is {w}x{h}",
                self.source_id
            )));
        }
        Ok(())
    }

    /// Length of the image diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        let (w, h) = self.pixels.dimensions();
        (w as f64).hypot(h as f64)
    }

    /// The marked plant center, or the foreground centroid when unmarked.
    pub fn effective_plant_center(&self) -> Result<Point<f64>> {
        if let Some(c) = self.plant_center {
            return Ok(c);
        }
        let fg = self.labels.foreground();
        let n = fg.count();
        if n == 0 {
            return Err(Error::EmptyExtraction {
                source_id: self.source_id.clone(),
            });
        }
        let (sx, sy) = fg
            .pixels()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x as f64, b + y as f64));
        Ok(Point::new(sx / n as f64, sy / n as f64))
    }
}
