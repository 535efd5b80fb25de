//! Instance label PNGs.
//!
//! Labels are written as 16-bit single-channel PNG. Reading accepts 8- and
//! 16-bit grayscale as well as palette images, whose raw palette indices
//! are taken as instance ids.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use image::{GrayImage, ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::raster::LabelMap;

fn ingest_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Ingestion {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn read_label_png(path: &Path) -> Result<LabelMap> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    // Keep palette indices and 16-bit samples as stored.
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| ingest_err(path, e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ingest_err(path, "image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| ingest_err(path, e.to_string()))?;
    let (w, h) = (info.width, info.height);
    let depth = info.bit_depth as u32;
    let stride = info.line_size;

    let values: Vec<u32> = match (info.color_type, info.bit_depth) {
        (png::ColorType::Grayscale | png::ColorType::Indexed, png::BitDepth::Sixteen) => buf
            [..stride * h as usize]
            .chunks(stride)
            .flat_map(|row| {
                row[..2 * w as usize]
                    .chunks_exact(2)
                    .map(|b| u16::from_be_bytes([b[0], b[1]]) as u32)
            })
            .collect(),
        (png::ColorType::Grayscale | png::ColorType::Indexed, _) => {
            let per_byte = 8 / depth;
            let mask = (1u32 << depth) - 1;
            let mut out = Vec::with_capacity(w as usize * h as usize);
            for row in buf[..stride * h as usize].chunks(stride) {
                for x in 0..w {
                    let byte = row[(x / per_byte) as usize] as u32;
                    let shift = 8 - depth * (x % per_byte + 1);
                    out.push((byte >> shift) & mask);
                }
            }
            out
        }
        (other, _) => {
            return Err(ingest_err(
                path,
                format!("label image must be single-channel or palette, found {other:?}"),
            ))
        }
    };
    LabelMap::from_raw(w, h, values)
}

/// Writes raw instance labels as 16-bit grayscale.
pub fn write_label_png(path: &Path, labels: &LabelMap) -> Result<()> {
    let max = labels.max_label();
    if max > u16::MAX as u32 {
        return Err(Error::InvalidInput(format!(
            "label {max} does not fit a 16-bit label image"
        )));
    }
    let (w, h) = labels.dimensions();
    let raw: Vec<u16> = labels.as_slice().iter().map(|&l| l as u16).collect();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(w, h, raw).expect("buffer matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}

/// Writes the binary foreground (0 / 255) as 8-bit grayscale.
pub fn write_foreground_png(path: &Path, labels: &LabelMap) -> Result<()> {
    let (w, h) = labels.dimensions();
    let raw: Vec<u8> = labels
        .as_slice()
        .iter()
        .map(|&l| if l != 0 { 255 } else { 0 })
        .collect();
    let img = GrayImage::from_raw(w, h, raw).expect("buffer matches dimensions");
    img.save(path).map_err(|e| Error::image(path, e))
}
