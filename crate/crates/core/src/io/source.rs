use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::leafbank::{AnnotatedImage, SubsetTag};

use super::read_label_png;

/// Where to find one annotated source image.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceRecord {
    pub source_id: String,
    pub rgb_path: PathBuf,
    pub label_path: PathBuf,
    pub plant_center: Option<Point<f64>>,
    pub subset_tag: SubsetTag,
}

/// Loads and validates an RGB + label pair. A label image with no leaves
/// is returned as is; callers decide whether to warn.
pub fn load_annotated(rec: &SourceRecord) -> Result<AnnotatedImage> {
    let pixels = image::open(&rec.rgb_path)
        .map_err(|e| Error::Ingestion {
            path: rec.rgb_path.clone(),
            reason: e.to_string(),
        })?
        .to_rgb8();
    let labels = read_label_png(&rec.label_path)?;
    if pixels.dimensions() != labels.dimensions() {
        let (w, h) = pixels.dimensions();
        let (lw, lh) = labels.dimensions();
        return Err(Error::Ingestion {
            path: rec.label_path.clone(),
            reason: format!("label mask is {lw}x{lh} but {} is {w}x{h}", rec.rgb_path.display()),
        });
    }
    AnnotatedImage::new(pixels, labels, rec.plant_center, rec.source_id.clone(), rec.subset_tag)
}

/// Finds `{id}_rgb.png` / `{id}_label.png` pairs in `dir`, sorted by id.
/// Returns the pairs and the ids of RGB images lacking a label file.
pub fn discover_sources(
    dir: &Path,
    subset_tag: SubsetTag,
    centers: &HashMap<String, Point<f64>>,
) -> Result<(Vec<SourceRecord>, Vec<String>)> {
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if let Some(id) = name.to_str().and_then(|n| n.strip_suffix("_rgb.png")) {
            ids.push(id.to_string());
        }
    }
    ids.sort();
    let mut records = Vec::new();
    let mut unpaired = Vec::new();
    for id in ids {
        let label_path = dir.join(format!("{id}_label.png"));
        if !label_path.exists() {
            unpaired.push(id);
            continue;
        }
        records.push(SourceRecord {
            rgb_path: dir.join(format!("{id}_rgb.png")),
            label_path,
            plant_center: centers.get(&id).copied(),
            subset_tag,
            source_id: id,
        });
    }
    Ok((records, unpaired))
}

/// Reads plant centers from a `source_id,x,y` CSV.
pub fn read_centers_csv(path: &Path) -> Result<HashMap<String, Point<f64>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    if header.iter().ne(["source_id", "x", "y"]) {
        return Err(Error::Ingestion {
            path: path.to_path_buf(),
            reason: "centers CSV header must be `source_id,x,y`".into(),
        });
    }
    let mut out = HashMap::new();
    for row in rdr.deserialize::<(String, f64, f64)>() {
        let (id, x, y) = row.map_err(|e| Error::csv(path, e))?;
        out.insert(id, Point::new(x, y));
    }
    Ok(out)
}
