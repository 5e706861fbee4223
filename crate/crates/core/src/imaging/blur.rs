use alloc::vec;
use alloc::vec::Vec;

use super::{Boundary, ImageBuffer};
use crate::{Error, Result};

/// Normalized 1-D Gaussian taps for offsets `-r..=r`, `r = ceil(3σ)`.
pub fn gaussian_weights(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as isize;
    let mut w: Vec<f64> = (-radius..=radius)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Separable Gaussian blur with edge replication.
pub fn gaussian_blur(img: &ImageBuffer, sigma: f64) -> Result<ImageBuffer> {
    gaussian_blur_with(img, sigma, Boundary::Clamp)
}

pub fn gaussian_blur_with(img: &ImageBuffer, sigma: f64, boundary: Boundary) -> Result<ImageBuffer> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(alloc::format!("blur sigma {sigma} must be >= 0")));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let out = blur_raw(img.data(), img.width(), img.height(), sigma, boundary);
    Ok(ImageBuffer::from_raw_clamped(img.width(), img.height(), out))
}

/// Unclamped separable blur, horizontal pass first. `sigma` must be positive.
pub(crate) fn blur_raw(
    src: &[f64],
    width: usize,
    height: usize,
    sigma: f64,
    boundary: Boundary,
) -> Vec<f64> {
    let w = gaussian_weights(sigma);
    let r = (w.len() / 2) as isize;
    let stride = width * 3;

    let mut tmp = vec![0.0; src.len()];
    for (srow, trow) in src.chunks_exact(stride).zip(tmp.chunks_exact_mut(stride)) {
        for x in 0..width {
            let mut acc = [0.0; 3];
            for (k, &wk) in w.iter().enumerate() {
                let sx = boundary.resolve(x as isize + k as isize - r, width);
                for c in 0..3 {
                    acc[c] += wk * srow[sx * 3 + c];
                }
            }
            trow[x * 3..x * 3 + 3].copy_from_slice(&acc);
        }
    }

    let mut out = vec![0.0; src.len()];
    for (y, orow) in out.chunks_exact_mut(stride).enumerate() {
        for (k, &wk) in w.iter().enumerate() {
            let sy = boundary.resolve(y as isize + k as isize - r, height);
            let trow = &tmp[sy * stride..(sy + 1) * stride];
            for (o, t) in orow.iter_mut().zip(trow) {
                *o += wk * t;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_identity() {
        let img = ImageBuffer::from_fn(6, 5, |x, y| [(x * y) as f64 / 30.0, 0.2, 0.8]).unwrap();
        assert_eq!(gaussian_blur(&img, 0.0).unwrap(), img);
    }

    #[test]
    fn negative_sigma_rejected() {
        let img = ImageBuffer::new(4, 4).unwrap();
        assert!(gaussian_blur(&img, -0.1).is_err());
        assert!(gaussian_blur(&img, f64::NAN).is_err());
    }

    #[test]
    fn constant_preserved() {
        let img = ImageBuffer::filled(17, 13, [0.25, 0.5, 0.75]).unwrap();
        let out = gaussian_blur(&img, 2.0).unwrap();
        for (a, b) in out.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_radius_and_normalization() {
        let w = gaussian_weights(1.0);
        assert_eq!(w.len(), 7);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(gaussian_weights(0.5).len(), 5);
        assert_eq!(gaussian_weights(2.0).len(), 13);
    }
}
