use alloc::vec;
use alloc::vec::Vec;

use super::ImageBuffer;
use crate::{Error, Result};

/// Catmull-Rom cubic (a = -0.5).
#[inline]
fn cubic(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// For each output position, the four source indices (edge-clamped) and
/// their weights. Pixel centers are aligned (`src = (dst + 0.5)·in/out − 0.5`).
fn contributions(input: usize, output: usize) -> Vec<([usize; 4], [f64; 4])> {
    let scale = input as f64 / output as f64;
    let last = input as isize - 1;
    (0..output)
        .map(|o| {
            let center = (o as f64 + 0.5) * scale - 0.5;
            let base = libm::floor(center);
            let frac = center - base;
            let base = base as isize;
            let mut idx = [0usize; 4];
            let mut w = [0.0; 4];
            for k in 0..4 {
                idx[k] = (base - 1 + k as isize).clamp(0, last) as usize;
                w[k] = cubic(frac - (k as f64 - 1.0));
            }
            (idx, w)
        })
        .collect()
}

/// Bicubic resize, horizontal pass then vertical pass. Returns the input
/// unchanged when the target dimensions equal the source dimensions.
pub fn resize(img: &ImageBuffer, out_w: usize, out_h: usize) -> Result<ImageBuffer> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::invalid(alloc::format!(
            "resize target {out_w}x{out_h} must be positive"
        )));
    }
    let (in_w, in_h) = img.dims();
    if (out_w, out_h) == (in_w, in_h) {
        return Ok(img.clone());
    }
    let src = img.data();

    let cols = contributions(in_w, out_w);
    let mut tmp = vec![0.0; out_w * in_h * 3];
    for (srow, trow) in src.chunks_exact(in_w * 3).zip(tmp.chunks_exact_mut(out_w * 3)) {
        for (x, (idx, w)) in cols.iter().enumerate() {
            for c in 0..3 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += w[k] * srow[idx[k] * 3 + c];
                }
                trow[x * 3 + c] = acc;
            }
        }
    }

    let rows = contributions(in_h, out_h);
    let stride = out_w * 3;
    let mut out = vec![0.0; out_w * out_h * 3];
    for (orow, (idx, w)) in out.chunks_exact_mut(stride).zip(&rows) {
        for k in 0..4 {
            let trow = &tmp[idx[k] * stride..(idx[k] + 1) * stride];
            for (o, t) in orow.iter_mut().zip(trow) {
                *o += w[k] * t;
            }
        }
    }
    Ok(ImageBuffer::from_raw_clamped(out_w, out_h, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_interpolates_at_integers() {
        assert_eq!(cubic(0.0), 1.0);
        assert_eq!(cubic(1.0), 0.0);
        assert_eq!(cubic(2.0), 0.0);
        // weights at any phase sum to one
        for i in 0..100 {
            let f = i as f64 / 100.0;
            let s: f64 = (0..4).map(|k| cubic(f - (k as f64 - 1.0))).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_dims_are_bit_exact() {
        let img = ImageBuffer::from_fn(7, 5, |x, y| [x as f64 / 7.0, y as f64 / 5.0, 0.5]).unwrap();
        assert_eq!(resize(&img, 7, 5).unwrap(), img);
    }

    #[test]
    fn constant_survives_any_target() {
        let img = ImageBuffer::filled(9, 6, [0.5; 3]).unwrap();
        for (w, h) in [(1, 1), (3, 17), (40, 2), (9, 12)] {
            let out = resize(&img, w, h).unwrap();
            assert!(out.data().iter().all(|v| (v - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn zero_target_rejected() {
        let img = ImageBuffer::new(4, 4).unwrap();
        assert!(resize(&img, 0, 4).is_err());
        assert!(resize(&img, 4, 0).is_err());
    }

    #[test]
    fn integer_upscale_phases() {
        let c = contributions(2, 4);
        // output 0 maps to source -0.25
        assert!((c[0].1[1] - cubic(0.75)).abs() < 1e-15);
        assert_eq!(c[0].0, [0, 0, 0, 1]);
    }
}
