//! Scene generators.
//!
//! The naive generator scatters prescaled leaves at random positions,
//! scales and rotations. The structured generator grows a rosette: every
//! leaf is anchored at one randomized plant center and successive leaves are
//! turned by the triad angle schedule, last leaf on top.

mod batch;
mod manifest;
mod naive;
mod params;
mod schedule;
mod structured;

pub use batch::{generate_batch, BatchOutcome, BatchSpec, GeneratorConfig, COUNTS_FILE};
pub use manifest::{replay_manifest, GeneratorKind, SceneManifest};
pub use naive::generate_naive;
pub use params::{pick_plant_center, LeafOrder, NaiveParams, SubsetParams};
pub use schedule::AngleSchedule;
pub use structured::generate_structured;

/// `image_id` of scene `index` in a generated dataset.
pub fn image_id(index: u64) -> String {
    format!("scene_{index:06}")
}
