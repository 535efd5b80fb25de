//! Reading sources and writing banks, scenes, counts and previews.

mod backgrounds;
mod labels;
mod preview;
mod scene;
mod source;

pub use backgrounds::{load_image_dir, prepare_backgrounds, Background, BackgroundSet, CropMode};
pub use labels::{read_label_png, write_foreground_png, write_label_png};
pub use preview::{boundary_pixels, label_color, render_overlay};
pub use scene::{read_manifest, read_scene, write_counts, write_scene, write_scene_with, SceneFiles, SceneNaming};
pub use source::{discover_sources, load_annotated, read_centers_csv, SourceRecord};

/// Writes CSV with a mandatory header row and LF line endings.
pub(crate) fn csv_writer(path: &std::path::Path) -> crate::Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| crate::Error::csv(path, e))
}
