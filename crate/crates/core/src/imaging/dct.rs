//! JPEG-style 8×8 block transform coding round trip (4:4:4, no entropy
//! coding). Only the lossy quantization step of a real codec is simulated.

use alloc::vec;
use alloc::vec::Vec;

use super::ImageBuffer;
use crate::{Error, Result};

const N: usize = 8;

/// Standard luminance quantization table (ITU-T T.81 Annex K, K.1).
#[rustfmt::skip]
pub const LUMA_QUANT_BASE: [u16; 64] = [
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
];

/// Standard chrominance quantization table (ITU-T T.81 Annex K, K.2).
#[rustfmt::skip]
pub const CHROMA_QUANT_BASE: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Scales a base table by the usual quality factor.
pub fn quantization_table(base: &[u16; 64], quality: u8) -> [f64; 64] {
    let q = f64::from(quality.clamp(1, 100));
    let scale = if q < 50.0 { 5000.0 / q } else { 200.0 - 2.0 * q };
    let mut table = [0.0; 64];
    for (t, &b) in table.iter_mut().zip(base) {
        *t = libm::round(f64::from(b) * scale / 100.0).max(1.0);
    }
    table
}

/// Orthonormal DCT-II basis: `basis[u][x] = C(u)/2 · cos((2x+1)uπ/16)`.
fn dct_basis() -> [[f64; N]; N] {
    let mut basis = [[0.0; N]; N];
    for (u, row) in basis.iter_mut().enumerate() {
        let cu = if u == 0 { libm::sqrt(0.5) } else { 1.0 };
        for (x, b) in row.iter_mut().enumerate() {
            *b = 0.5 * cu * libm::cos(((2 * x + 1) * u) as f64 * core::f64::consts::PI / 16.0);
        }
    }
    basis
}

fn forward(block: &[f64; 64], basis: &[[f64; N]; N]) -> [f64; 64] {
    let mut rows = [0.0; 64];
    for y in 0..N {
        for u in 0..N {
            rows[y * N + u] = (0..N).map(|x| basis[u][x] * block[y * N + x]).sum();
        }
    }
    let mut coeffs = [0.0; 64];
    for v in 0..N {
        for u in 0..N {
            coeffs[v * N + u] = (0..N).map(|y| basis[v][y] * rows[y * N + u]).sum();
        }
    }
    coeffs
}

fn inverse(coeffs: &[f64; 64], basis: &[[f64; N]; N]) -> [f64; 64] {
    let mut cols = [0.0; 64];
    for y in 0..N {
        for u in 0..N {
            cols[y * N + u] = (0..N).map(|v| basis[v][y] * coeffs[v * N + u]).sum();
        }
    }
    let mut block = [0.0; 64];
    for y in 0..N {
        for x in 0..N {
            block[y * N + x] = (0..N).map(|u| basis[u][x] * cols[y * N + u]).sum();
        }
    }
    block
}

/// Simulates block-compression artifacts at the given quality (1..=100).
///
/// Works in full-range BT.601 YCbCr on the 0..255 scale; the image is padded
/// to whole blocks by edge replication and cropped back afterwards.
pub fn dct_artifact(img: &ImageBuffer, quality: u8) -> Result<ImageBuffer> {
    if !(1..=100).contains(&quality) {
        return Err(Error::invalid(alloc::format!("quality {quality} outside 1..=100")));
    }
    let (w, h) = img.dims();
    let pw = w.div_ceil(N) * N;
    let ph = h.div_ceil(N) * N;

    // Planes on the padded grid, level-shifted by -128.
    let mut planes = [vec![0.0; pw * ph], vec![0.0; pw * ph], vec![0.0; pw * ph]];
    for y in 0..ph {
        for x in 0..pw {
            let [r, g, b] = img.pixel(x.min(w - 1), y.min(h - 1)).map(|v| v * 255.0);
            let i = y * pw + x;
            planes[0][i] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
            planes[1][i] = -0.168_736 * r - 0.331_264 * g + 0.5 * b;
            planes[2][i] = 0.5 * r - 0.418_688 * g - 0.081_312 * b;
        }
    }

    let basis = dct_basis();
    let tables = [
        quantization_table(&LUMA_QUANT_BASE, quality),
        quantization_table(&CHROMA_QUANT_BASE, quality),
        quantization_table(&CHROMA_QUANT_BASE, quality),
    ];
    for (plane, table) in planes.iter_mut().zip(&tables) {
        for by in (0..ph).step_by(N) {
            for bx in (0..pw).step_by(N) {
                let mut block = [0.0; 64];
                for y in 0..N {
                    let row = (by + y) * pw + bx;
                    block[y * N..y * N + N].copy_from_slice(&plane[row..row + N]);
                }
                let mut coeffs = forward(&block, &basis);
                for (c, q) in coeffs.iter_mut().zip(table) {
                    *c = libm::round(*c / q) * q;
                }
                let block = inverse(&coeffs, &basis);
                for y in 0..N {
                    let row = (by + y) * pw + bx;
                    plane[row..row + N].copy_from_slice(&block[y * N..y * N + N]);
                }
            }
        }
    }

    let mut data: Vec<f64> = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let i = y * pw + x;
            let luma = planes[0][i] + 128.0;
            let cb = planes[1][i];
            let cr = planes[2][i];
            data.push((luma + 1.402 * cr) / 255.0);
            data.push((luma - 0.344_136 * cb - 0.714_136 * cr) / 255.0);
            data.push((luma + 1.772 * cb) / 255.0);
        }
    }
    Ok(ImageBuffer::from_raw_clamped(w, h, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quality_scaling_matches_convention() {
        let q50 = quantization_table(&LUMA_QUANT_BASE, 50);
        assert_eq!(q50[0], 16.0);
        let q100 = quantization_table(&LUMA_QUANT_BASE, 100);
        assert!(q100.iter().all(|&q| q == 1.0));
        let q10 = quantization_table(&LUMA_QUANT_BASE, 10);
        assert_eq!(q10[0], 80.0); // 16 * 500 / 100
        let q1 = quantization_table(&CHROMA_QUANT_BASE, 1);
        assert_eq!(q1[63], 4950.0);
    }

    #[test]
    fn transform_pair_is_orthonormal() {
        let basis = dct_basis();
        let block: [f64; 64] = core::array::from_fn(|i| ((i * 37) % 255) as f64 - 128.0);
        let back = inverse(&forward(&block, &basis), &basis);
        for (a, b) in block.iter().zip(&back) {
            assert!((a - b).abs() < 1e-9);
        }
        let dc = forward(&[8.0; 64], &basis);
        assert!((dc[0] - 64.0).abs() < 1e-12);
        assert!(dc[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn mid_gray_is_bit_identical() {
        let img = ImageBuffer::filled(13, 9, [128.0 / 255.0; 3]).unwrap();
        for q in [1, 10, 50, 90, 100] {
            assert_eq!(dct_artifact(&img, q).unwrap(), img);
        }
    }

    #[test]
    fn quality_out_of_range() {
        let img = ImageBuffer::new(8, 8).unwrap();
        assert!(dct_artifact(&img, 0).is_err());
        assert!(dct_artifact(&img, 101).is_err());
    }

    #[test]
    fn odd_dims_are_cropped_back() {
        let img = ImageBuffer::from_fn(11, 5, |x, y| [x as f64 / 11.0, y as f64 / 5.0, 0.4]).unwrap();
        let out = dct_artifact(&img, 75).unwrap();
        assert_eq!(out.dims(), (11, 5));
    }
}
