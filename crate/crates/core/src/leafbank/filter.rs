use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LeafCutout;
use crate::error::Error;
use crate::raster::{alpha_mask, connected_components};

/// Thresholds deciding which cutouts are good enough for the bank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterThresholds {
    /// Largest allowed base-to-center distance as a fraction of the source
    /// diagonal. `None` skips the check (sources without a plant).
    pub base_dist_frac: Option<f64>,
    /// Largest allowed fraction of boundary pixels touching another leaf.
    pub occlusion_frac: f64,
    /// Smallest allowed mask area in pixels.
    pub min_area: u32,
}

impl Default for FilterThresholds {
    fn default() -> Self {
        Self {
            base_dist_frac: Some(0.15),
            occlusion_frac: 0.05,
            min_area: 100,
        }
    }
}

impl FilterThresholds {
    /// Defaults for loose leaves with no plant center.
    pub fn naive() -> Self {
        Self {
            base_dist_frac: None,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    MultiComponent,
    TooSmall,
    BaseFarFromCenter,
    Occluded,
}

impl DiscardReason {
    pub const ALL: [DiscardReason; 4] = [
        DiscardReason::MultiComponent,
        DiscardReason::TooSmall,
        DiscardReason::BaseFarFromCenter,
        DiscardReason::Occluded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiscardReason::MultiComponent => "multi_component",
            DiscardReason::TooSmall => "too_small",
            DiscardReason::BaseFarFromCenter => "base_far_from_center",
            DiscardReason::Occluded => "occluded",
        }
    }
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DiscardReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        DiscardReason::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown discard reason `{s}`")))
    }
}

/// Partition of cutout ids into kept and discarded.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: Vec<String>,
    pub discarded: Vec<(String, DiscardReason)>,
}

impl FilterReport {
    pub fn merge(&mut self, other: FilterReport) {
        self.kept.extend(other.kept);
        self.discarded.extend(other.discarded);
    }

    pub fn total(&self) -> usize {
        self.kept.len() + self.discarded.len()
    }

    pub fn count(&self, reason: DiscardReason) -> usize {
        self.discarded.iter().filter(|(_, r)| *r == reason).count()
    }

    pub fn discard(&mut self, id: String, reason: DiscardReason) {
        self.kept.retain(|k| *k != id);
        self.discarded.push((id, reason));
    }
}

/// First criterion the cutout fails, checked in the order multi-component,
/// too small, base far from center, occluded.
pub fn first_failure(cutout: &LeafCutout, ctx: &FilterThresholds) -> Option<DiscardReason> {
    let (_, components) = connected_components(&alpha_mask(&cutout.pixels));
    if components > 1 {
        return Some(DiscardReason::MultiComponent);
    }
    if cutout.area_px < ctx.min_area {
        return Some(DiscardReason::TooSmall);
    }
    if let Some(stats) = &cutout.source_stats {
        if let Some(frac) = ctx.base_dist_frac {
            if stats.base_distance > frac * stats.source_diagonal {
                return Some(DiscardReason::BaseFarFromCenter);
            }
        }
        if stats.contact_fraction() > ctx.occlusion_frac {
            return Some(DiscardReason::Occluded);
        }
    }
    None
}

pub fn filter_leaves(cutouts: &[LeafCutout], ctx: &FilterThresholds) -> FilterReport {
    let mut report = FilterReport::default();
    for c in cutouts {
        match first_failure(c, ctx) {
            None => report.kept.push(c.id()),
            Some(r) => report.discarded.push((c.id(), r)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pixel;
    use crate::leafbank::SourceStats;
    use crate::geometry::Point;
    use image::{Rgba, RgbaImage};

    fn leaf(w: u32, h: u32, keep: impl Fn(u32, u32) -> bool, stats: Option<SourceStats>) -> LeafCutout {
        let px = RgbaImage::from_fn(w, h, |x, y| {
            if keep(x, y) {
                Rgba([1, 2, 3, 255])
            } else {
                Rgba([0, 0, 0, 0])
            }
        });
        let mut c = LeafCutout::from_raster("s", w * 1000 + h, px, Pixel::new(0, 0), false);
        c.source_stats = stats;
        c
    }

    fn stats(base: f64, boundary: u32, contact: u32) -> Option<SourceStats> {
        Some(SourceStats {
            plant_center: Point::new(0.0, 0.0),
            base_distance: base,
            source_diagonal: 100.0,
            boundary_px: boundary,
            contact_px: contact,
        })
    }

    #[test]
    fn reasons_in_order() {
        let ctx = FilterThresholds::default();
        let two = leaf(30, 10, |x, _| !(10..20).contains(&x), stats(50.0, 10, 10));
        assert_eq!(first_failure(&two, &ctx), Some(DiscardReason::MultiComponent));
        let small = leaf(9, 9, |_, _| true, stats(50.0, 10, 10));
        assert_eq!(first_failure(&small, &ctx), Some(DiscardReason::TooSmall));
        let far = leaf(20, 20, |_, _| true, stats(15.1, 10, 10));
        assert_eq!(first_failure(&far, &ctx), Some(DiscardReason::BaseFarFromCenter));
        let occluded = leaf(20, 20, |_, _| true, stats(15.0, 100, 6));
        assert_eq!(first_failure(&occluded, &ctx), Some(DiscardReason::Occluded));
        let clean = leaf(20, 20, |_, _| true, stats(15.0, 100, 5));
        assert_eq!(first_failure(&clean, &ctx), None);
    }

    #[test]
    fn naive_thresholds_skip_base_check() {
        let far = leaf(20, 20, |_, _| true, stats(99.0, 10, 0));
        assert_eq!(first_failure(&far, &FilterThresholds::naive()), None);
    }

    #[test]
    fn report_partitions_input() {
        let ctx = FilterThresholds::default();
        let cutouts = vec![
            leaf(20, 20, |_, _| true, None),
            leaf(5, 5, |_, _| true, None),
            leaf(21, 20, |x, y| (x + y) % 2 == 0, None),
        ];
        let r = filter_leaves(&cutouts, &ctx);
        assert_eq!(r.kept, vec![cutouts[0].id()]);
        assert_eq!(
            r.discarded,
            vec![
                (cutouts[1].id(), DiscardReason::TooSmall),
                (cutouts[2].id(), DiscardReason::MultiComponent)
            ]
        );
        assert_eq!(r.total(), 3);
        assert!(filter_leaves(&[], &ctx).kept.is_empty());
    }

    #[test]
    fn reason_names_round_trip() {
        for r in DiscardReason::ALL {
            assert_eq!(r.as_str().parse::<DiscardReason>().unwrap(), r);
        }
    }
}
