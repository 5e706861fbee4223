//! Seeded procedural scenes with natural-image-like structure (smooth
//! illumination, hard-edged objects, broadband 1/f texture), for fixtures
//! and smoke tests.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::imaging::ImageBuffer;
use crate::sampling::{splitmix64_finalize, RngState};

enum Shape {
    Disc { cx: f64, cy: f64, r: f64 },
    Rect { cx: f64, cy: f64, hw: f64, hh: f64, cos: f64, sin: f64 },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Disc { cx, cy, r } => (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r,
            Shape::Rect { cx, cy, hw, hh, cos, sin } => {
                let (dx, dy) = (x - cx, y - cy);
                let u = dx * cos + dy * sin;
                let v = -dx * sin + dy * cos;
                u.abs() <= hw && v.abs() <= hh
            }
        }
    }
}

/// Multi-octave value noise; octave `o` has cell size `base / 2^o` and
/// amplitude proportional to the cell size.
struct Texture {
    key: u64,
    base: f64,
    amp: f64,
}

const OCTAVES: u32 = 6;

impl Texture {
    fn lattice(&self, octave: u32, ix: i64, iy: i64) -> f64 {
        let h = splitmix64_finalize(
            self.key ^ (octave as u64).wrapping_mul(0xA24B_AED4_963E_E407)
                ^ (ix as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25)
                ^ (iy as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93),
        );
        (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn sample(&self, x: f64, y: f64) -> f64 {
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let mut total = 0.0;
        let mut norm = 0.0;
        for o in 0..OCTAVES {
            let cell = self.base / (1u64 << o) as f64;
            let (gx, gy) = (x / cell, y / cell);
            let (fx, fy) = (libm::floor(gx), libm::floor(gy));
            let (tx, ty) = (smooth(gx - fx), smooth(gy - fy));
            let (ix, iy) = (fx as i64, fy as i64);
            let top = self.lattice(o, ix, iy) * (1.0 - tx) + self.lattice(o, ix + 1, iy) * tx;
            let bottom = self.lattice(o, ix, iy + 1) * (1.0 - tx) + self.lattice(o, ix + 1, iy + 1) * tx;
            let weight = cell / self.base;
            total += weight * (top * (1.0 - ty) + bottom * ty);
            norm += weight;
        }
        self.amp * total / norm
    }
}

/// A `width`×`height` scene determined entirely by `seed`.
pub fn synthetic_scene(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let mut rng = RngState::derive(seed, 0x5CE4E);
    let (w, h) = (width as f64, height as f64);
    let scale = w.max(h);

    let color = |rng: &mut RngState| -> [f64; 3] {
        [rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)]
    };
    let top = color(&mut rng);
    let bottom = color(&mut rng);
    let light = (rng.uniform(0.0, w), rng.uniform(0.0, h), rng.uniform(0.3, 0.8) * scale);

    let n_shapes = 14 + (rng.next_u64() % 10) as usize;
    let shapes: Vec<(Shape, [f64; 3])> = (0..n_shapes)
        .map(|_| {
            let cx = rng.uniform(-0.1, 1.1) * w;
            let cy = rng.uniform(-0.1, 1.1) * h;
            let size = rng.uniform(0.03, 0.2) * scale;
            let shape = if rng.next_unit() < 0.5 {
                Shape::Disc { cx, cy, r: size }
            } else {
                let a = rng.uniform(0.0, PI);
                Shape::Rect {
                    cx,
                    cy,
                    hw: size,
                    hh: size * rng.uniform(0.2, 1.0),
                    cos: libm::cos(a),
                    sin: libm::sin(a),
                }
            };
            (shape, color(&mut rng))
        })
        .collect();

    let textures: Vec<Texture> = (0..3)
        .map(|_| Texture { key: rng.next_u64(), base: rng.uniform(48.0, 96.0), amp: rng.uniform(0.04, 0.1) })
        .collect();
    let texture_mix = [rng.uniform(0.5, 1.0), 1.0, rng.uniform(0.5, 1.0)];

    const SS: usize = 2;
    ImageBuffer::from_fn(width, height, |x, y| {
        let mut acc = [0.0; 3];
        for sy in 0..SS {
            for sx in 0..SS {
                let px = x as f64 + (sx as f64 + 0.5) / SS as f64;
                let py = y as f64 + (sy as f64 + 0.5) / SS as f64;
                let v = py / h;
                let mut c: [f64; 3] = core::array::from_fn(|i| top[i] * (1.0 - v) + bottom[i] * v);
                for (shape, col) in &shapes {
                    if shape.contains(px, py) {
                        c = *col;
                    }
                }
                for (a, ci) in acc.iter_mut().zip(c) {
                    *a += ci;
                }
            }
        }
        let (lx, ly) = (x as f64 - light.0, y as f64 - light.1);
        let d2 = lx * lx + ly * ly;
        let shade = 0.7 + 0.3 * libm::exp(-d2 / (light.2 * light.2));
        let (fx, fy) = (x as f64, y as f64);
        let luminance = textures[0].sample(fx, fy);
        let mut out = [0.0; 3];
        for i in 0..3 {
            let base = acc[i] / (SS * SS) as f64 * shade;
            let tex = texture_mix[i] * luminance + 0.5 * textures[1 + i % 2].sample(fx, fy) * (i as f64 - 1.0);
            out[i] = (base + tex).clamp(0.02, 0.98);
        }
        out
    })
    .expect("positive dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = synthetic_scene(40, 30, 1);
        assert_eq!(a, synthetic_scene(40, 30, 1));
        assert_ne!(a, synthetic_scene(40, 30, 2));
    }

    #[test]
    fn has_contrast() {
        let img = synthetic_scene(64, 48, 9);
        let (lo, hi) = img
            .data()
            .iter()
            .fold((1.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        assert!(hi - lo > 0.3);
    }
}
