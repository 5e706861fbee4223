use alloc::vec;
use alloc::vec::Vec;

use super::{Boundary, ImageBuffer, Kernel2D};

/// Per-channel correlation of `img` with `kernel`; output clamped to `[0, 1]`.
pub fn convolve2d(img: &ImageBuffer, kernel: &Kernel2D, boundary: Boundary) -> ImageBuffer {
    if kernel.size() == 1 && kernel.weights()[0] == 1.0 {
        return img.clone();
    }
    let out = correlate_raw(img.data(), img.width(), img.height(), kernel, boundary);
    ImageBuffer::from_raw_clamped(img.width(), img.height(), out)
}

/// Unclamped correlation over interleaved RGB data.
///
/// Only nonzero taps are visited, and each output row is accumulated while
/// it is hot in cache, which keeps long sparse motion kernels cheap.
/// Contributions are summed in kernel row-major order.
pub(crate) fn correlate_raw(
    src: &[f64],
    width: usize,
    height: usize,
    kernel: &Kernel2D,
    boundary: Boundary,
) -> Vec<f64> {
    debug_assert_eq!(src.len(), width * height * 3);
    let rows = tap_rows(kernel);
    let stride = width * 3;
    let mut out = vec![0.0; src.len()];
    for (y, orow) in out.chunks_exact_mut(stride).enumerate() {
        for (dy, taps) in &rows {
            let sy = boundary.resolve(y as isize + dy, height);
            let srow = &src[sy * stride..(sy + 1) * stride];
            for &(dx, w) in taps {
                accumulate_shifted(orow, srow, width, dx, w, boundary);
            }
        }
    }
    out
}

fn tap_rows(kernel: &Kernel2D) -> Vec<(isize, Vec<(isize, f64)>)> {
    let mut rows: Vec<(isize, Vec<(isize, f64)>)> = Vec::new();
    for (dy, dx, w) in kernel.taps() {
        match rows.last_mut() {
            Some((last, taps)) if *last == dy => taps.push((dx, w)),
            _ => rows.push((dy, vec![(dx, w)])),
        }
    }
    rows
}

/// `orow[x] += w * srow[resolve(x + dx)]` for every pixel `x`.
#[inline]
fn accumulate_shifted(
    orow: &mut [f64],
    srow: &[f64],
    width: usize,
    dx: isize,
    w: f64,
    boundary: Boundary,
) {
    let n = width as isize;
    let lo = (-dx).clamp(0, n) as usize;
    let hi = (n - dx).clamp(lo as isize, n) as usize;

    for x in (0..lo).chain(hi..width) {
        let sx = boundary.resolve(x as isize + dx, width);
        for c in 0..3 {
            orow[x * 3 + c] += w * srow[sx * 3 + c];
        }
    }
    if lo < hi {
        let s0 = (lo as isize + dx) as usize;
        let dst = &mut orow[lo * 3..hi * 3];
        let src = &srow[s0 * 3..s0 * 3 + dst.len()];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += w * s;
        }
    }
}
