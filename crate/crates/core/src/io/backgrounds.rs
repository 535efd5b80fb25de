use std::fs;
use std::path::Path;

use image::{imageops, RgbImage};

use crate::error::{Error, Result};
use crate::leafbank::SubsetTag;
use crate::rng::SceneRng;

/// One prepared background, already at canvas size.
#[derive(Clone, Debug, PartialEq)]
pub struct Background {
    pub id: String,
    pub pixels: RgbImage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundSet {
    pub subset_tag: SubsetTag,
    pub width: u32,
    pub height: u32,
    pub images: Vec<Background>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CropMode {
    #[default]
    Center,
    /// Crop window drawn per image from a stream keyed by `seed` and the
    /// image's position in the list.
    Random { seed: u64 },
}

/// Crops (and optionally upscales) every source image to `canvas`.
///
/// A source smaller than the canvas in either dimension is an error unless
/// `allow_resize` is set, in which case it is upscaled just enough to cover
/// the canvas before cropping.
pub fn prepare_backgrounds(
    sources: Vec<Background>,
    canvas: (u32, u32),
    mode: CropMode,
    allow_resize: bool,
    subset_tag: SubsetTag,
) -> Result<BackgroundSet> {
    let (cw, ch) = canvas;
    if cw == 0 || ch == 0 {
        return Err(Error::Preparation("canvas must be non-empty".into()));
    }
    let mut images = Vec::with_capacity(sources.len());
    for (i, src) in sources.into_iter().enumerate() {
        let (w, h) = src.pixels.dimensions();
        let pixels = if w < cw || h < ch {
            if !allow_resize {
                return Err(Error::Preparation(format!(
                    "background `{}` is {w}x{h}, smaller than the {cw}x{ch} canvas",
                    src.id
                )));
            }
            let f = (cw as f64 / w as f64).max(ch as f64 / h as f64);
            let nw = ((w as f64 * f).ceil() as u32).max(cw);
            let nh = ((h as f64 * f).ceil() as u32).max(ch);
            imageops::resize(&src.pixels, nw, nh, imageops::FilterType::Triangle)
        } else {
            src.pixels
        };
        let (w, h) = pixels.dimensions();
        let (x, y) = match mode {
            CropMode::Center => ((w - cw) / 2, (h - ch) / 2),
            CropMode::Random { seed } => {
                let mut rng = SceneRng::for_crop(seed, i as u64);
                (
                    rng.int_inclusive(0, (w - cw) as u64) as u32,
                    rng.int_inclusive(0, (h - ch) as u64) as u32,
                )
            }
        };
        let cropped = if (w, h) == (cw, ch) {
            pixels
        } else {
            imageops::crop_imm(&pixels, x, y, cw, ch).to_image()
        };
        images.push(Background {
            id: src.id,
            pixels: cropped,
        });
    }
    Ok(BackgroundSet {
        subset_tag,
        width: cw,
        height: ch,
        images,
    })
}

/// Loads every PNG in `dir` as RGB, sorted by file name; ids are file stems.
pub fn load_image_dir(dir: &Path) -> Result<Vec<Background>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png")) {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let pixels = image::open(&path)
                .map_err(|e| Error::Ingestion {
                    path: path.clone(),
                    reason: e.to_string(),
                })?
                .to_rgb8();
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            Ok(Background { id, pixels })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    fn gradient(id: &str, w: u32, h: u32) -> Background {
        Background {
            id: id.into(),
            pixels: RgbImage::from_fn(w, h, |x, y| Rgb([(x % 256) as u8, (y % 256) as u8, 1])),
        }
    }

    #[test]
    fn center_crop_a3() {
        let set = prepare_backgrounds(vec![gradient("b", 2448, 2048)], (2048, 2048), CropMode::Center, false, SubsetTag::A3)
            .unwrap();
        let img = &set.images[0].pixels;
        assert_eq!(img.dimensions(), (2048, 2048));
        // 200 px trimmed from each side.
        assert_eq!(img.get_pixel(0, 0)[0], 200);
    }

    #[test]
    fn exact_size_unchanged() {
        let src = gradient("b", 512, 512);
        let set = prepare_backgrounds(vec![src.clone()], (512, 512), CropMode::Random { seed: 3 }, false, SubsetTag::A1)
            .unwrap();
        assert_eq!(set.images[0], src);
    }

    #[test]
    fn naive_canvas_crop() {
        let set = prepare_backgrounds(
            vec![gradient("a", 3000, 4000), gradient("b", 1100, 1030)],
            (1024, 1024),
            CropMode::Random { seed: 9 },
            false,
            SubsetTag::Custom,
        )
        .unwrap();
        assert_eq!(set.images.len(), 2);
        assert!(set.images.iter().all(|b| b.pixels.dimensions() == (1024, 1024)));
    }

    #[test]
    fn too_small_needs_resize() {
        let err = prepare_backgrounds(vec![gradient("s", 530, 500)], (512, 512), CropMode::Center, false, SubsetTag::A1);
        assert!(matches!(err, Err(Error::Preparation(_))));
        let set = prepare_backgrounds(vec![gradient("s", 530, 500)], (512, 512), CropMode::Center, true, SubsetTag::A1)
            .unwrap();
        assert_eq!(set.images[0].pixels.dimensions(), (512, 512));
    }
}
