use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{LabelMap, Mask};
use crate::scalar::Scalar;

/// Instance segmentation of one image: 0 is background, each other value
/// one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMaskSet {
    labels: LabelMap,
}

impl InstanceMaskSet {
    pub fn new(labels: LabelMap) -> Result<Self> {
        let (w, h) = labels.dimensions();
        if w == 0 || h == 0 {
            return Err(Error::InvalidInput("instance mask must be non-empty".into()));
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.labels.instance_count()
    }

    pub fn dimensions(&self) -> (u32, u32) {
        self.labels.dimensions()
    }
}

impl TryFrom<LabelMap> for InstanceMaskSet {
    type Error = Error;

    fn try_from(labels: LabelMap) -> Result<Self> {
        Self::new(labels)
    }
}

fn same_dims(a: (u32, u32), b: (u32, u32)) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!(
            "mask dimensions differ: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}

fn dice_from_counts<T: Scalar>(inter: u64, a: u64, b: u64) -> T {
    if a + b == 0 {
        return T::one();
    }
    T::lit(2.0) * T::from_u64(inter).unwrap() / T::from_u64(a + b).unwrap()
}

/// `2|A ∩ B| / (|A| + |B|)`; two empty masks score 1.
pub fn dice<T: Scalar>(a: &Mask, b: &Mask) -> Result<T> {
    same_dims(a.dimensions(), b.dimensions())?;
    Ok(dice_from_counts(
        a.intersection_count(b) as u64,
        a.count() as u64,
        b.count() as u64,
    ))
}

/// `|A ∩ B| / |A ∪ B|`; two empty masks score 1.
pub fn iou<T: Scalar>(a: &Mask, b: &Mask) -> Result<T> {
    same_dims(a.dimensions(), b.dimensions())?;
    let inter = a.intersection_count(b) as u64;
    let union = (a.count() + b.count()) as u64 - inter;
    if union == 0 {
        return Ok(T::one());
    }
    Ok(T::from_u64(inter).unwrap() / T::from_u64(union).unwrap())
}

/// Per-instance areas and pairwise overlaps of two label rasters.
pub(crate) struct Overlaps {
    pub pred_labels: Vec<u32>,
    pub gt_labels: Vec<u32>,
    pub pred_area: Vec<u64>,
    pub gt_area: Vec<u64>,
    /// Row-major `gt x pred` intersection counts.
    inter: Vec<u64>,
}

impl Overlaps {
    pub(crate) fn new(pred: &InstanceMaskSet, gt: &InstanceMaskSet) -> Result<Self> {
        same_dims(pred.dimensions(), gt.dimensions())?;
        let pred_labels = pred.labels.instances();
        let gt_labels = gt.labels.instances();
        let index = |ls: &[u32]| -> HashMap<u32, usize> {
            ls.iter().enumerate().map(|(i, &l)| (l, i)).collect()
        };
        let pi = index(&pred_labels);
        let gi = index(&gt_labels);
        let mut pred_area = vec![0u64; pred_labels.len()];
        let mut gt_area = vec![0u64; gt_labels.len()];
        let mut inter = vec![0u64; pred_labels.len() * gt_labels.len()];
        for (&p, &g) in pred.labels.as_slice().iter().zip(gt.labels.as_slice()) {
            let pj = (p != 0).then(|| pi[&p]);
            let gj = (g != 0).then(|| gi[&g]);
            if let Some(j) = pj {
                pred_area[j] += 1;
            }
            if let Some(i) = gj {
                gt_area[i] += 1;
            }
            if let (Some(j), Some(i)) = (pj, gj) {
                inter[i * pred_labels.len() + j] += 1;
            }
        }
        Ok(Self {
            pred_labels,
            gt_labels,
            pred_area,
            gt_area,
            inter,
        })
    }

    pub(crate) fn intersection(&self, gt_idx: usize, pred_idx: usize) -> u64 {
        self.inter[gt_idx * self.pred_labels.len() + pred_idx]
    }

    fn dice<T: Scalar>(&self, gt_idx: usize, pred_idx: usize) -> T {
        dice_from_counts(
            self.intersection(gt_idx, pred_idx),
            self.gt_area[gt_idx],
            self.pred_area[pred_idx],
        )
    }
}

/// Best-match Dice in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestDice<T> {
    /// Mean over ground-truth instances of their best Dice against any
    /// predicted instance.
    pub pred_to_gt: T,
    /// Mean over predicted instances of their best Dice against any
    /// ground-truth instance.
    pub gt_to_pred: T,
    /// `min(pred_to_gt, gt_to_pred)`, the headline value.
    pub symmetric: T,
}

pub fn best_dice<T: Scalar>(pred: &InstanceMaskSet, gt: &InstanceMaskSet) -> Result<BestDice<T>> {
    let ov = Overlaps::new(pred, gt)?;
    let (np, ng) = (ov.pred_labels.len(), ov.gt_labels.len());
    if np == 0 || ng == 0 {
        let v = if np == ng { T::one() } else { T::zero() };
        return Ok(BestDice {
            pred_to_gt: v,
            gt_to_pred: v,
            symmetric: v,
        });
    }
    let mean_best = |outer: usize, inner: usize, d: &dyn Fn(usize, usize) -> T| -> T {
        let sum = (0..outer)
            .map(|o| (0..inner).map(|i| d(o, i)).fold(T::zero(), T::max))
            .fold(T::zero(), |a, b| a + b);
        sum / T::from_usize_lossy(outer)
    };
    let pred_to_gt = mean_best(ng, np, &|g, p| ov.dice(g, p));
    let gt_to_pred = mean_best(np, ng, &|p, g| ov.dice(g, p));
    Ok(BestDice {
        pred_to_gt,
        gt_to_pred,
        symmetric: pred_to_gt.min(gt_to_pred),
    })
}

/// Dice of the binarized foregrounds; instance identity is ignored.
pub fn fgbg_dice<T: Scalar>(pred: &InstanceMaskSet, gt: &InstanceMaskSet) -> Result<T> {
    dice(&pred.labels.foreground(), &gt.labels.foreground())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDiff {
    /// `count(pred) - count(gt)`; negative means undercounting.
    pub diff_fg: i64,
    pub abs_diff_fg: u64,
}

pub fn count_diffs(pred: &InstanceMaskSet, gt: &InstanceMaskSet) -> CountDiff {
    let diff = pred.count() as i64 - gt.count() as i64;
    CountDiff {
        diff_fg: diff,
        abs_diff_fg: diff.unsigned_abs(),
    }
}
