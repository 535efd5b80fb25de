use serde::{Deserialize, Serialize};

use super::instances::{InstanceMaskSet, Overlaps};
use crate::error::Result;
use crate::scalar::Scalar;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.8;
pub const DEFAULT_MIN_AREA: u64 = 700;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub detected: u32,
    pub missed: u32,
}

/// Counts ground-truth leaves larger than `min_area` pixels that some
/// prediction matches with IoU of at least `iou_thresh`.
///
/// Matching is one-to-one and greedy by descending IoU, so one predicted
/// blob cannot detect several leaves. Leaves of area `<= min_area` are
/// ignored entirely.
pub fn iou_detection_eval<T: Scalar>(
    pred: &InstanceMaskSet,
    gt: &InstanceMaskSet,
    iou_thresh: T,
    min_area: u64,
) -> Result<Detection> {
    let ov = Overlaps::new(pred, gt)?;
    let eligible: Vec<usize> = (0..ov.gt_labels.len())
        .filter(|&g| ov.gt_area[g] > min_area)
        .collect();

    let mut candidates: Vec<(T, usize, usize)> = Vec::new();
    for &g in &eligible {
        for p in 0..ov.pred_labels.len() {
            let inter = ov.intersection(g, p);
            if inter == 0 {
                continue;
            }
            let union = ov.gt_area[g] + ov.pred_area[p] - inter;
            let iou = T::from_u64(inter).unwrap() / T::from_u64(union).unwrap();
            if iou >= iou_thresh {
                candidates.push((iou, g, p));
            }
        }
    }
    // Highest IoU first; ties by gt then pred index keep this deterministic.
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("IoU is finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut gt_taken = vec![false; ov.gt_labels.len()];
    let mut pred_taken = vec![false; ov.pred_labels.len()];
    let mut detected = 0;
    for (_, g, p) in candidates {
        if !gt_taken[g] && !pred_taken[p] {
            gt_taken[g] = true;
            pred_taken[p] = true;
            detected += 1;
        }
    }
    Ok(Detection {
        detected,
        missed: eligible.len() as u32 - detected,
    })
}
