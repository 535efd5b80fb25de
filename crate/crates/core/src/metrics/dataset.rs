use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instances::{best_dice, count_diffs, fgbg_dice, InstanceMaskSet};
use crate::error::{Error, Result};
use crate::io::{csv_writer, read_label_png};
use crate::scalar::Scalar;

pub const PER_IMAGE_HEADER: [&str; 5] = ["image_id", "best_dice", "fgbg_dice", "diff_fg", "abs_diff_fg"];
pub const AGGREGATE_HEADER: [&str; 5] = ["images", "best_dice", "fgbg_dice", "diff_fg", "abs_diff_fg"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics<T> {
    pub image_id: String,
    /// Symmetric BestDice.
    pub best_dice: T,
    pub best_dice_pred_to_gt: T,
    pub best_dice_gt_to_pred: T,
    pub fgbg_dice: T,
    pub diff_fg: i64,
    pub abs_diff_fg: u64,
}

/// Means over all evaluated images. `abs_diff_fg` is the mean of the
/// per-image absolute differences, not the absolute value of `diff_fg`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate<T> {
    pub images: usize,
    pub best_dice: T,
    pub fgbg_dice: T,
    pub diff_fg: T,
    pub abs_diff_fg: T,
}

impl<T: Scalar> Aggregate<T> {
    /// Returns `None` for an empty slice.
    pub fn of(records: &[ImageMetrics<T>]) -> Option<Self> {
        if records.is_empty() {
            return None;
        }
        let n = T::from_usize_lossy(records.len());
        let mean = |f: &dyn Fn(&ImageMetrics<T>) -> T| -> T {
            records.iter().map(f).fold(T::zero(), |a, b| a + b) / n
        };
        Some(Self {
            images: records.len(),
            best_dice: mean(&|r| r.best_dice),
            fgbg_dice: mean(&|r| r.fgbg_dice),
            diff_fg: mean(&|r| T::from_i64(r.diff_fg).unwrap()),
            abs_diff_fg: mean(&|r| T::from_u64(r.abs_diff_fg).unwrap()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T> {
    /// Sorted by image id.
    pub records: Vec<ImageMetrics<T>>,
    pub aggregate: Aggregate<T>,
    /// Ground-truth images with no prediction.
    pub missing_pred: Vec<String>,
    /// Predictions with no ground-truth counterpart.
    pub missing_gt: Vec<String>,
}

impl<T: Scalar> MetricsReport<T> {
    /// Builds a report from per-image records; fails when there are none.
    pub fn new(
        mut records: Vec<ImageMetrics<T>>,
        missing_pred: Vec<String>,
        missing_gt: Vec<String>,
    ) -> Result<Self> {
        records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        let aggregate = Aggregate::of(&records)
            .ok_or_else(|| Error::Evaluation("no images to evaluate".into()))?;
        Ok(Self {
            records,
            aggregate,
            missing_pred,
            missing_gt,
        })
    }

    pub fn has_missing(&self) -> bool {
        !self.missing_pred.is_empty() || !self.missing_gt.is_empty()
    }

    pub fn write_per_image_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv_writer(path)?;
        wtr.write_record(PER_IMAGE_HEADER).map_err(|e| Error::csv(path, e))?;
        for r in &self.records {
            wtr.write_record([
                r.image_id.clone(),
                r.best_dice.to_string(),
                r.fgbg_dice.to_string(),
                r.diff_fg.to_string(),
                r.abs_diff_fg.to_string(),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        wtr.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_aggregate_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv_writer(path)?;
        wtr.write_record(AGGREGATE_HEADER).map_err(|e| Error::csv(path, e))?;
        wtr.write_record(self.aggregate_fields()).map_err(|e| Error::csv(path, e))?;
        wtr.flush().map_err(|e| Error::io(path, e))
    }

    /// The aggregate row exactly as written to CSV.
    pub fn aggregate_fields(&self) -> [String; 5] {
        let a = &self.aggregate;
        [
            a.images.to_string(),
            a.best_dice.to_string(),
            a.fgbg_dice.to_string(),
            a.diff_fg.to_string(),
            a.abs_diff_fg.to_string(),
        ]
    }
}

/// How label files are recognised in the prediction and ground-truth trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Files whose names end with this suffix are label images; the rest of
    /// the name is the image id.
    pub suffix: String,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            suffix: "_label.png".into(),
        }
    }
}

pub fn evaluate_pair<T: Scalar>(
    image_id: &str,
    pred: &InstanceMaskSet,
    gt: &InstanceMaskSet,
) -> Result<ImageMetrics<T>> {
    let bd = best_dice::<T>(pred, gt)?;
    let fg = fgbg_dice::<T>(pred, gt)?;
    let cd = count_diffs(pred, gt);
    Ok(ImageMetrics {
        image_id: image_id.to_string(),
        best_dice: bd.symmetric,
        best_dice_pred_to_gt: bd.pred_to_gt,
        best_dice_gt_to_pred: bd.gt_to_pred,
        fgbg_dice: fg,
        diff_fg: cd.diff_fg,
        abs_diff_fg: cd.abs_diff_fg,
    })
}

fn label_ids(dir: &Path, suffix: &str) -> Result<BTreeSet<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut ids = BTreeSet::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(id) = name.strip_suffix(suffix) {
            if !id.is_empty() && entry.path().is_file() {
                ids.insert(id.to_string());
            }
        }
    }
    Ok(ids)
}

fn load_set(path: PathBuf) -> Result<InstanceMaskSet> {
    let labels = read_label_png(&path)?;
    InstanceMaskSet::new(labels).map_err(|e| Error::Evaluation(format!("{}: {e}", path.display())))
}

/// Scores every label image present in both trees. Files present on only one
/// side are listed in the report; an empty intersection is an error.
pub fn evaluate_dataset<T: Scalar>(
    pred_dir: &Path,
    gt_dir: &Path,
    opts: &EvalOptions,
) -> Result<MetricsReport<T>> {
    let pred_ids = label_ids(pred_dir, &opts.suffix)?;
    let gt_ids = label_ids(gt_dir, &opts.suffix)?;
    let common: Vec<&String> = gt_ids.intersection(&pred_ids).collect();
    if common.is_empty() {
        return Err(Error::Evaluation(format!(
            "no '*{}' files in common between {} and {}",
            opts.suffix,
            pred_dir.display(),
            gt_dir.display()
        )));
    }
    let missing_pred = gt_ids.difference(&pred_ids).cloned().collect();
    let missing_gt = pred_ids.difference(&gt_ids).cloned().collect();
    let records = common
        .par_iter()
        .map(|id| {
            let file = format!("{id}{}", opts.suffix);
            let pred = load_set(pred_dir.join(&file))?;
            let gt = load_set(gt_dir.join(&file))?;
            evaluate_pair::<T>(id, &pred, &gt).map_err(|e| Error::Evaluation(format!("{id}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    MetricsReport::new(records, missing_pred, missing_gt)
}
