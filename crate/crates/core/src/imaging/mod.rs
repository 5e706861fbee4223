//! Pixel buffers and the pixel operations the degradation pipelines are
//! built from.

mod blur;
mod color;
mod convolve;
mod dct;
mod kernel;
mod resize;

pub use blur::{gaussian_blur, gaussian_blur_with, gaussian_weights};
pub use color::{linear_to_srgb, srgb_to_linear, srgb_transfer, TransferDirection};
pub use convolve::convolve2d;
pub use dct::{dct_artifact, quantization_table, CHROMA_QUANT_BASE, LUMA_QUANT_BASE};
pub use kernel::{motion_kernel, Kernel2D};
pub use resize::resize;

pub(crate) use blur::blur_raw;
pub(crate) use convolve::correlate_raw;

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// How samples outside the image are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Edge replication.
    Clamp,
    /// Wrap around.
    Periodic,
}

impl Boundary {
    #[inline]
    pub(crate) fn resolve(self, i: isize, n: usize) -> usize {
        match self {
            Boundary::Clamp => i.clamp(0, n as isize - 1) as usize,
            Boundary::Periodic => i.rem_euclid(n as isize) as usize,
        }
    }
}

/// An RGB image with display-encoded components in `[0, 1]`, stored
/// row-major and channel-interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageBuffer {
    /// A black image.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, [0.0; 3])
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let rgb = rgb.map(clamp_unit);
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Ok(Self { width, height, data })
    }

    /// Wraps interleaved RGB data. Values are clamped into `[0, 1]`;
    /// non-finite values are rejected.
    pub fn from_data(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::invalid(alloc::format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height * 3,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite sample value"));
        }
        data.iter_mut().for_each(|v| *v = clamp_unit(*v));
        Ok(Self { width, height, data })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).map(clamp_unit));
            }
        }
        Ok(Self { width, height, data })
    }

    /// Decodes 8-bit interleaved RGB.
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        check_dims(width, height)?;
        if bytes.len() != width * height * 3 {
            return Err(Error::invalid("rgb8 byte count does not match dimensions"));
        }
        let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        Ok(Self { width, height, data })
    }

    /// Quantizes to 8-bit interleaved RGB, rounding half up.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_u8(v)).collect()
    }

    /// Snaps every component onto the 8-bit grid, i.e. what a PNG round
    /// trip of this image yields.
    pub fn quantized(&self) -> Self {
        let data = self
            .data
            .iter()
            .map(|&v| f64::from(quantize_u8(v)) / 255.0)
            .collect();
        Self { data, ..*self }
    }

    pub(crate) fn from_raw_clamped(width: usize, height: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        data.iter_mut().for_each(|v| *v = clamp_unit(*v));
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn same_dims(&self, other: &ImageBuffer) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            })
        }
    }

    /// Copies out the `width`×`height` window whose top-left corner is
    /// `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::invalid(alloc::format!(
                "crop {width}x{height}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut data = vec![0.0; width * height * 3];
        for (y, row) in data.chunks_exact_mut(width * 3).enumerate() {
            let start = ((y0 + y) * self.width + x0) * 3;
            row.copy_from_slice(&self.data[start..start + width * 3]);
        }
        Ok(Self { width, height, data })
    }

    /// Mean of Rec. 709 luma over the display-encoded values.
    pub fn mean_luma(&self) -> f64 {
        let sum: f64 = self
            .data
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .sum();
        sum / (self.width * self.height) as f64
    }
}

#[inline]
pub(crate) fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.2126 * r + 0.7152 * g + 0.0722 * b
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

#[inline]
fn quantize_u8(v: f64) -> u8 {
    libm::floor(clamp_unit(v) * 255.0 + 0.5) as u8
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::invalid(alloc::format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_dims() {
        assert!(ImageBuffer::new(0, 3).is_err());
        assert!(ImageBuffer::new(3, 0).is_err());
    }

    #[test]
    fn from_data_checks_length_and_clamps() {
        assert!(ImageBuffer::from_data(2, 2, vec![0.0; 11]).is_err());
        assert!(ImageBuffer::from_data(1, 1, vec![0.0, f64::NAN, 0.0]).is_err());
        let img = ImageBuffer::from_data(1, 1, vec![-0.5, 0.5, 1.5]).unwrap();
        assert_eq!(img.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn rgb8_rounds_half_up() {
        let img = ImageBuffer::from_data(1, 1, vec![0.5 / 255.0, 1.5 / 255.0, 254.49 / 255.0]).unwrap();
        assert_eq!(img.to_rgb8(), vec![1, 2, 254]);
    }

    #[test]
    fn rgb8_round_trip_is_lossless() {
        let bytes: Vec<u8> = (0..=255u8).chain(0..=255u8).chain(0..=255u8).collect();
        let img = ImageBuffer::from_rgb8(256, 1, &bytes).unwrap();
        assert_eq!(img.to_rgb8(), bytes);
        assert_eq!(img.quantized(), img);
    }

    #[test]
    fn crop_extracts_window() {
        let img = ImageBuffer::from_fn(4, 3, |x, y| [x as f64 / 4.0, y as f64 / 3.0, 0.0]).unwrap();
        let c = img.crop(1, 1, 2, 2).unwrap();
        assert_eq!(c.pixel(0, 0), img.pixel(1, 1));
        assert_eq!(c.pixel(1, 1), img.pixel(2, 2));
        assert!(img.crop(3, 0, 2, 1).is_err());
    }
}
