use serde::{Deserialize, Serialize};

use super::AngleSchedule;
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Point};
use crate::leafbank::SubsetTag;
use crate::raster::MAX_SCALE;
use crate::rng::SceneRng;
use crate::scalar::Scalar;

/// Order in which the drawn leaves are stacked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafOrder {
    /// Stack in draw order.
    #[default]
    Random,
    /// Largest leaves first (bottom), smallest on top.
    AreaDescending,
}

/// Structured-collage parameters for one dataset subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetParams {
    pub tag: SubsetTag,
    pub train_w: u32,
    pub train_h: u32,
    pub center: Pixel,
    /// Full width/height of the box the plant center is drawn from.
    pub center_delta_w: u32,
    pub center_delta_h: u32,
    pub leaves_min: u32,
    pub leaves_max: u32,
    pub schedule: AngleSchedule<f64>,
    /// Placed leaves with fewer visible pixels lose their label.
    pub min_visible: u32,
    pub order: LeafOrder,
}

impl SubsetParams {
    fn preset_row(tag: SubsetTag, size: u32, delta: u32, leaves: (u32, u32)) -> Self {
        Self {
            tag,
            train_w: size,
            train_h: size,
            center: Pixel::new(size / 2, size / 2),
            center_delta_w: delta,
            center_delta_h: delta,
            leaves_min: leaves.0,
            leaves_max: leaves.1,
            schedule: AngleSchedule::default(),
            min_visible: 50,
            order: LeafOrder::Random,
        }
    }

    pub fn a1() -> Self {
        Self::preset_row(SubsetTag::A1, 512, 40, (5, 25))
    }

    pub fn a2() -> Self {
        Self::preset_row(SubsetTag::A2, 512, 40, (3, 25))
    }

    pub fn a3() -> Self {
        Self::preset_row(SubsetTag::A3, 2048, 160, (2, 15))
    }

    pub fn a4() -> Self {
        Self::preset_row(SubsetTag::A4, 448, 35, (4, 30))
    }

    /// Built-in preset for `tag`; `None` for custom subsets.
    pub fn preset(tag: SubsetTag) -> Option<Self> {
        match tag {
            SubsetTag::A1 => Some(Self::a1()),
            SubsetTag::A2 => Some(Self::a2()),
            SubsetTag::A3 => Some(Self::a3()),
            SubsetTag::A4 => Some(Self::a4()),
            SubsetTag::Custom => None,
        }
    }

    pub fn canvas(&self) -> (u32, u32) {
        (self.train_w, self.train_h)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.train_w == 0 || self.train_h == 0 || !self.train_w.is_multiple_of(64) || !self.train_h.is_multiple_of(64) {
            problems.push(format!(
                "training size {}x{} must be positive multiples of 64",
                self.train_w, self.train_h
            ));
        }
        if self.leaves_min > self.leaves_max {
            problems.push(format!(
                "leaves_min {} exceeds leaves_max {}",
                self.leaves_min, self.leaves_max
            ));
        }
        let half_w = self.center_delta_w as f64 / 2.0;
        let half_h = self.center_delta_h as f64 / 2.0;
        let cx = self.center.x as f64;
        let cy = self.center.y as f64;
        if cx - half_w < 0.0
            || cy - half_h < 0.0
            || cx + half_w > (self.train_w as f64 - 1.0)
            || cy + half_h > (self.train_h as f64 - 1.0)
        {
            problems.push(format!(
                "plant center box {}±{half_w} x {}±{half_h} leaves the {}x{} canvas",
                self.center.x, self.center.y, self.train_w, self.train_h
            ));
        }
        if let Err(e) = self.schedule.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

/// Naive-collage parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveParams {
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub leaves_min: u32,
    pub leaves_max: u32,
    pub scale_min: f64,
    pub scale_max: f64,
    pub prescale_longest_dim: u32,
    pub min_visible: u32,
}

impl Default for NaiveParams {
    fn default() -> Self {
        Self {
            canvas_w: 1024,
            canvas_h: 1024,
            leaves_min: 10,
            leaves_max: 40,
            scale_min: 0.4,
            scale_max: 1.1,
            prescale_longest_dim: 600,
            min_visible: 50,
        }
    }
}

impl NaiveParams {
    pub fn canvas(&self) -> (u32, u32) {
        (self.canvas_w, self.canvas_h)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.canvas_w == 0 || self.canvas_h == 0 {
            problems.push("canvas must be non-empty".to_string());
        }
        if self.leaves_min > self.leaves_max {
            problems.push(format!(
                "leaves_min {} exceeds leaves_max {}",
                self.leaves_min, self.leaves_max
            ));
        }
        if !(self.scale_min > 0.0 && self.scale_min <= self.scale_max && self.scale_max <= MAX_SCALE) {
            problems.push(format!(
                "scale range [{}, {}] must satisfy 0 < min <= max <= {MAX_SCALE}",
                self.scale_min, self.scale_max
            ));
        }
        if self.prescale_longest_dim == 0 {
            problems.push("prescale_longest_dim must be positive".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

/// Plant center drawn uniformly from the delta box around the image center,
/// clamped inside the canvas.
pub fn pick_plant_center<T: Scalar>(params: &SubsetParams, rng: &mut SceneRng) -> Point<T> {
    let half = T::lit(0.5);
    let hw = T::from_u32(params.center_delta_w).unwrap() * half;
    let hh = T::from_u32(params.center_delta_h).unwrap() * half;
    let cx = T::from_u32(params.center.x).unwrap();
    let cy = T::from_u32(params.center.y).unwrap();
    let x = cx + rng.uniform(-hw, hw);
    let y = cy + rng.uniform(-hh, hh);
    let max_x = T::from_u32(params.train_w.saturating_sub(1)).unwrap();
    let max_y = T::from_u32(params.train_h.saturating_sub(1)).unwrap();
    Point::new(x.max(T::zero()).min(max_x), y.max(T::zero()).min(max_y))
}
