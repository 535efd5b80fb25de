//! Leaf segmentation and counting scores.

mod dataset;
mod detection;
mod instances;

pub use dataset::{evaluate_dataset, evaluate_pair, Aggregate, EvalOptions, ImageMetrics, MetricsReport, AGGREGATE_HEADER, PER_IMAGE_HEADER};
pub use detection::{iou_detection_eval, Detection, DEFAULT_IOU_THRESHOLD, DEFAULT_MIN_AREA};
pub use instances::{best_dice, count_diffs, dice, fgbg_dice, iou, BestDice, CountDiff, InstanceMaskSet};
