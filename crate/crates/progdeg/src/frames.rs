//! 8-bit PNG frames.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder};
use progdeg_core::{ImageBuffer, FRAME_COUNT};

use crate::{Error, Result};

/// `frame_01.png` … `frame_09.png`.
pub fn frame_file_name(t: usize) -> String {
    format!("frame_{t:02}.png")
}

pub fn frame_path(clip_dir: &Path, t: usize) -> PathBuf {
    clip_dir.join(frame_file_name(t))
}

/// Decodes any PNG to RGB and maps it onto `[0, 1]`.
pub fn read_png(path: &Path) -> Result<ImageBuffer> {
    let img = image::open(path).map_err(|source| Error::Image { path: path.to_owned(), source })?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    Ok(ImageBuffer::from_rgb8(w as usize, h as usize, rgb.as_raw())?)
}

/// Writes an 8-bit RGB PNG, rounding half up.
pub fn write_png(path: &Path, img: &ImageBuffer) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    PngEncoder::new_with_quality(BufWriter::new(file), CompressionType::Fast, FilterType::Adaptive)
        .write_image(&img.to_rgb8(), img.width() as u32, img.height() as u32, ExtendedColorType::Rgb8)
        .map_err(|source| Error::Image { path: path.to_owned(), source })
}

pub fn png_dimensions(path: &Path) -> Result<(usize, usize)> {
    let (w, h) = image::image_dimensions(path).map_err(|source| Error::Image { path: path.to_owned(), source })?;
    Ok((w as usize, h as usize))
}

/// Reads `frame_01.png` … `frame_09.png` from `clip_dir`.
pub fn read_clip_frames(clip_dir: &Path) -> Result<Vec<ImageBuffer>> {
    (1..=FRAME_COUNT).map(|t| read_png(&frame_path(clip_dir, t))).collect()
}

pub fn write_clip_frames(clip_dir: &Path, frames: &[ImageBuffer]) -> Result<()> {
    std::fs::create_dir_all(clip_dir).map_err(|e| Error::io(clip_dir, e))?;
    for (t0, frame) in frames.iter().enumerate() {
        write_png(&frame_path(clip_dir, t0 + 1), frame)?;
    }
    Ok(())
}
