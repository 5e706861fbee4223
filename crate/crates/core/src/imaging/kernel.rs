use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-6;
const SUPERSAMPLE: usize = 4;

/// A square, odd-sided, nonnegative kernel whose weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel2D {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::invalid(alloc::format!("kernel side {size} is not odd")));
        }
        if weights.len() != size * size {
            return Err(Error::invalid(alloc::format!(
                "kernel side {size} needs {} weights, got {}",
                size * size,
                weights.len()
            )));
        }
        let kernel = Self { size, weights };
        kernel.validate()?;
        Ok(kernel)
    }

    /// The 1×1 kernel `[[1.0]]`.
    pub fn identity() -> Self {
        Self {
            size: 1,
            weights: vec![1.0],
        }
    }

    /// Rechecks nonnegativity and normalization.
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("kernel weights must be finite and nonnegative"));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(alloc::format!(
                "kernel weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.size / 2
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at row `i`, column `j`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.size + j]
    }

    /// The kernel rotated by 180 degrees (the adjoint of correlation).
    pub fn rotated_180(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        Self {
            size: self.size,
            weights,
        }
    }

    /// Nonzero taps as `(dy, dx, weight)` offsets from the center, in
    /// row-major order.
    pub fn taps(&self) -> Vec<(isize, isize, f64)> {
        let r = self.radius() as isize;
        let mut taps = Vec::new();
        for i in 0..self.size {
            for j in 0..self.size {
                let w = self.at(i, j);
                if w != 0.0 {
                    taps.push((i as isize - r, j as isize - r, w));
                }
            }
        }
        taps
    }
}

/// Rasterizes a one-pixel-wide line segment of `length` pixels through the
/// kernel center at `angle_deg` (counter-clockwise, image y pointing down).
///
/// Each cell's weight is the fraction of its 4×4 subsamples that fall inside
/// the segment's rectangle; the side is the smallest odd integer not below
/// `length`.
pub fn motion_kernel(length: usize, angle_deg: f64) -> Result<Kernel2D> {
    if length < 1 {
        return Err(Error::invalid("motion kernel length must be at least 1"));
    }
    if !(0.0..360.0).contains(&angle_deg) {
        return Err(Error::invalid(alloc::format!(
            "motion kernel angle {angle_deg} outside [0, 360)"
        )));
    }
    if length == 1 {
        return Ok(Kernel2D::identity());
    }
    let size = if length % 2 == 1 { length } else { length + 1 };

    // A line is unchanged by a half turn; folding the angle makes α and
    // α + 180° rasterize through identical arithmetic.
    let folded = if angle_deg >= 180.0 { angle_deg - 180.0 } else { angle_deg };
    let theta = folded.to_radians();
    let (ux, uy) = (libm::cos(theta), -libm::sin(theta));
    let half_len = length as f64 / 2.0;
    let r = (size / 2) as f64;

    let mut counts = vec![0u32; size * size];
    for i in 0..size {
        for j in 0..size {
            let mut hits = 0;
            for si in 0..SUPERSAMPLE {
                let py = i as f64 - r + (si as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                for sj in 0..SUPERSAMPLE {
                    let px = j as f64 - r + (sj as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                    let along = px * ux + py * uy;
                    let across = px * uy - py * ux;
                    if along.abs() <= half_len && across.abs() <= 0.5 {
                        hits += 1;
                    }
                }
            }
            counts[i * size + j] = hits;
        }
    }
    let total: u32 = counts.iter().sum();
    debug_assert!(total > 0);
    let weights = counts
        .iter()
        .map(|&c| f64::from(c) / f64::from(total))
        .collect();
    Kernel2D::new(size, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_length_is_identity() {
        let k = motion_kernel(1, 137.0).unwrap();
        assert_eq!(k.size(), 1);
        assert_eq!(k.weights(), &[1.0]);
    }

    #[test]
    fn horizontal_length_five() {
        let k = motion_kernel(5, 0.0).unwrap();
        assert_eq!(k.size(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == 2 { 0.2 } else { 0.0 };
                assert_eq!(k.at(i, j), expect, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn vertical_line_is_transpose_of_horizontal() {
        let h = motion_kernel(7, 0.0).unwrap();
        let v = motion_kernel(7, 90.0).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert!((h.at(i, j) - v.at(j, i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn even_length_gets_odd_side() {
        assert_eq!(motion_kernel(4, 30.0).unwrap().size(), 5);
        assert_eq!(motion_kernel(40, 30.0).unwrap().size(), 41);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(motion_kernel(0, 0.0).is_err());
        assert!(motion_kernel(3, 360.0).is_err());
        assert!(motion_kernel(3, -1.0).is_err());
        assert!(Kernel2D::new(2, vec![0.25; 4]).is_err());
        assert!(Kernel2D::new(3, vec![0.1; 9]).is_err());
        assert!(Kernel2D::new(1, vec![-1.0]).is_err());
    }

    #[test]
    fn taps_skip_zero_weights() {
        let k = motion_kernel(5, 0.0).unwrap();
        let taps = k.taps();
        assert_eq!(taps.len(), 5);
        assert!(taps.iter().all(|&(dy, _, w)| dy == 0 && w == 0.2));
    }

    #[test]
    fn rotation_reverses_weights() {
        let k = Kernel2D::new(3, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let r = k.rotated_180();
        assert_eq!(r.at(2, 2), 0.5);
        assert_eq!(r.at(2, 1), 0.5);
        assert_eq!(r.rotated_180(), k);
    }
}
