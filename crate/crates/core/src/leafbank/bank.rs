use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filter::{first_failure, DiscardReason, FilterReport, FilterThresholds};
use super::{align_canonical, extract_leaves, prescale_longest, AnnotatedImage, LeafCutout, SubsetTag};
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Point};
use crate::raster::MAX_SCALE;

pub const BANK_INDEX_FILE: &str = "index.csv";
pub const BANK_INDEX_HEADER: [&str; 8] = [
    "id",
    "source_id",
    "label",
    "subset_tag",
    "anchor_x",
    "anchor_y",
    "area_px",
    "aligned",
];

#[derive(Debug, Serialize, Deserialize)]
struct IndexRow {
    id: String,
    source_id: String,
    label: u32,
    subset_tag: String,
    anchor_x: u32,
    anchor_y: u32,
    area_px: u32,
    aligned: bool,
}

/// Read-only collection of leaf cutouts, addressable by id.
#[derive(Clone, Debug, Default)]
pub struct LeafBank {
    leaves: Vec<LeafCutout>,
    by_id: HashMap<String, usize>,
}

impl LeafBank {
    pub fn new(leaves: Vec<LeafCutout>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(leaves.len());
        for (i, leaf) in leaves.iter().enumerate() {
            if by_id.insert(leaf.id(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate leaf id `{}`", leaf.id())));
            }
        }
        Ok(Self { leaves, by_id })
    }

    pub fn leaves(&self) -> &[LeafCutout] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&LeafCutout> {
        self.by_id.get(id).map(|&i| &self.leaves[i])
    }

    pub fn all_aligned(&self) -> bool {
        self.leaves.iter().all(|l| l.aligned)
    }

    /// Writes `{id}.png` per leaf plus the CSV index.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for leaf in &self.leaves {
            let path = dir.join(format!("{}.png", leaf.id()));
            leaf.pixels.save(&path).map_err(|e| Error::image(&path, e))?;
        }
        let index = dir.join(BANK_INDEX_FILE);
        let mut wtr = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&index)
            .map_err(|e| Error::csv(&index, e))?;
        wtr.write_record(BANK_INDEX_HEADER).map_err(|e| Error::csv(&index, e))?;
        for leaf in &self.leaves {
            wtr.serialize(IndexRow {
                id: leaf.id(),
                source_id: leaf.source_id.clone(),
                label: leaf.label,
                subset_tag: leaf.subset_tag.to_string(),
                anchor_x: leaf.anchor.x,
                anchor_y: leaf.anchor.y,
                area_px: leaf.area_px,
                aligned: leaf.aligned,
            })
            .map_err(|e| Error::csv(&index, e))?;
        }
        wtr.flush().map_err(|e| Error::io(&index, e))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let index = dir.join(BANK_INDEX_FILE);
        let mut rdr = csv::Reader::from_path(&index).map_err(|e| Error::csv(&index, e))?;
        let header = rdr.headers().map_err(|e| Error::csv(&index, e))?.clone();
        if header.iter().ne(BANK_INDEX_HEADER) {
            return Err(Error::Ingestion {
                path: index,
                reason: format!("unexpected header, expected `{}`", BANK_INDEX_HEADER.join(",")),
            });
        }
        let mut leaves = Vec::new();
        for row in rdr.deserialize::<IndexRow>() {
            let row = row.map_err(|e| Error::csv(&index, e))?;
            let path = dir.join(format!("{}.png", row.id));
            let pixels = image::open(&path).map_err(|e| Error::image(&path, e))?.to_rgba8();
            let bad = |reason: String| Error::Ingestion {
                path: path.clone(),
                reason,
            };
            let mut leaf = LeafCutout::from_raster(
                row.source_id,
                row.label,
                pixels,
                Pixel::new(row.anchor_x, row.anchor_y),
                row.aligned,
            );
            leaf.subset_tag = row.subset_tag.parse()?;
            if leaf.id() != row.id {
                return Err(bad(format!("id `{}` does not match source_id/label", row.id)));
            }
            if leaf.area_px != row.area_px {
                return Err(bad(format!(
                    "index says {} leaf pixels, raster has {}",
                    row.area_px, leaf.area_px
                )));
            }
            if leaf.anchor.x >= leaf.width() || leaf.anchor.y >= leaf.height() {
                return Err(bad("anchor outside raster".into()));
            }
            if leaf.aligned && leaf.anchor != leaf.canonical_anchor() {
                return Err(bad("aligned leaf anchor is not bottom-center".into()));
            }
            leaves.push(leaf);
        }
        Self::new(leaves)
    }
}

/// Result of building a bank from annotated sources.
#[derive(Clone, Debug)]
pub struct BankBuild {
    pub bank: LeafBank,
    pub report: FilterReport,
    /// Sources skipped entirely (for example, no leaf labels).
    pub warnings: Vec<String>,
}

/// Kept leaves, filter tallies and an optional skip warning for one source.
type SourceOutcome = (Vec<LeafCutout>, FilterReport, Option<String>);

fn build<F>(images: &[AnnotatedImage], thresholds: &FilterThresholds, finish: F) -> Result<BankBuild>
where
    F: Fn(&AnnotatedImage, &LeafCutout) -> Result<Option<LeafCutout>> + Sync,
{
    let per_image: Vec<Result<SourceOutcome>> = images
        .par_iter()
        .map(|img| {
            let cutouts = match extract_leaves(img) {
                Ok(c) => c,
                Err(Error::EmptyExtraction { source_id }) => {
                    return Ok((
                        Vec::new(),
                        FilterReport::default(),
                        Some(format!("source `{source_id}` has no leaf labels; skipped")),
                    ))
                }
                Err(e) => return Err(e),
            };
            let mut report = FilterReport::default();
            let mut kept = Vec::new();
            for c in &cutouts {
                if let Some(reason) = first_failure(c, thresholds) {
                    report.discarded.push((c.id(), reason));
                    continue;
                }
                match finish(img, c)? {
                    Some(leaf) => {
                        report.kept.push(c.id());
                        kept.push(leaf);
                    }
                    None => report.discarded.push((c.id(), DiscardReason::TooSmall)),
                }
            }
            Ok((kept, report, None))
        })
        .collect();

    let mut leaves = Vec::new();
    let mut report = FilterReport::default();
    let mut warnings = Vec::new();
    for r in per_image {
        let (l, rep, warn) = r?;
        leaves.extend(l);
        report.merge(rep);
        warnings.extend(warn);
    }
    Ok(BankBuild {
        bank: LeafBank::new(leaves)?,
        report,
        warnings,
    })
}

/// Extracts, filters and aligns leaves for the structured generator.
pub fn build_structured_bank(images: &[AnnotatedImage], thresholds: &FilterThresholds) -> Result<BankBuild> {
    build(images, thresholds, |img, c| {
        let center = img.effective_plant_center()?;
        let origin = c.origin.expect("fresh cutouts carry their origin");
        let local = Point::new(center.x - origin.x as f64, center.y - origin.y as f64);
        let mut aligned = align_canonical(c, local)?;
        aligned.subset_tag = img.subset_tag;
        aligned.refresh_area();
        if aligned.area_px < thresholds.min_area {
            return Ok(None);
        }
        Ok(Some(aligned))
    })
}

/// Extracts and filters loose leaves, then rescales each so its longest
/// side is `longest` pixels. Leaves that would need more than the maximum
/// upscale factor are discarded as too small.
pub fn build_naive_bank(
    images: &[AnnotatedImage],
    thresholds: &FilterThresholds,
    longest: u32,
) -> Result<BankBuild> {
    if longest == 0 {
        return Err(Error::Config("prescale_longest_dim must be positive".into()));
    }
    build(images, thresholds, |_, c| {
        let side = c.width().max(c.height());
        if longest as f64 / side as f64 > MAX_SCALE {
            return Ok(None);
        }
        match prescale_longest(c, longest) {
            Ok(leaf) => Ok(Some(leaf)),
            Err(Error::DegenerateScale { .. }) | Err(Error::DegenerateMask(_)) => Ok(None),
            Err(e) => Err(e),
        }
    })
}

impl SubsetTag {
    /// Preset subsets, A1 through A4.
    pub const PRESETS: [SubsetTag; 4] = [SubsetTag::A1, SubsetTag::A2, SubsetTag::A3, SubsetTag::A4];
}
