//! Full-reference quality metrics.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::imaging::{luma, ImageBuffer};
use crate::{Error, Result};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 1e-4;
pub const SSIM_C2: f64 = 9e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    Psnr,
    Ssim,
    /// A value supplied from outside (e.g. a learned perceptual distance).
    External,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Psnr, MetricKind::Ssim, MetricKind::External];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Psnr => "psnr_db",
            MetricKind::Ssim => "ssim",
            MetricKind::External => "external",
        }
    }

    /// External metrics are treated as distances by default.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, MetricKind::External)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psnr" | "psnr_db" => Ok(MetricKind::Psnr),
            "ssim" => Ok(MetricKind::Ssim),
            "external" | "lpips" => Ok(MetricKind::External),
            other => Err(Error::invalid(alloc::format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub kind: MetricKind,
    pub value: f64,
    pub higher_is_better: bool,
}

impl MetricValue {
    pub fn new(kind: MetricKind, value: f64) -> Self {
        Self { kind, value, higher_is_better: kind.higher_is_better() }
    }

    /// Whether `self` is at least as good as `other`.
    pub fn at_least_as_good_as(&self, other: f64) -> bool {
        weakly_better(self.value, other, self.higher_is_better)
    }
}

/// `a` is at least as good as `b`. `+∞` compares above every finite value.
#[inline]
pub fn weakly_better(a: f64, b: f64, higher_is_better: bool) -> bool {
    if higher_is_better {
        a >= b
    } else {
        a <= b
    }
}

/// Mean squared error over all pixels and channels.
pub fn mse(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    reference.same_dims(test)?;
    let sum: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / reference.data().len() as f64)
}

/// PSNR in dB with unit peak; identical images give `+∞`.
pub fn psnr(reference: &ImageBuffer, test: &ImageBuffer) -> Result<MetricValue> {
    let e = mse(reference, test)?;
    let value = if e == 0.0 { f64::INFINITY } else { 10.0 * libm::log10(1.0 / e) };
    Ok(MetricValue::new(MetricKind::Psnr, value))
}

/// Normalized 11-tap Gaussian (σ = 1.5) used as the separable SSIM window.
pub fn ssim_window() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w: [f64; SSIM_WINDOW] = core::array::from_fn(|i| {
        let d = i as f64 - r;
        libm::exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    });
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

fn luma_plane(img: &ImageBuffer) -> Vec<f64> {
    img.data().chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect()
}

/// Separable windowed mean over valid positions only.
fn window_mean(plane: &[f64], width: usize, height: usize, w: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = width - SSIM_WINDOW + 1;
    let oh = height - SSIM_WINDOW + 1;
    let mut tmp = vec![0.0; ow * height];
    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        for x in 0..ow {
            tmp[y * ow + x] = w.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..SSIM_WINDOW).map(|k| w[k] * tmp[(y + k) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM on Rec. 709 luma with an 11×11 Gaussian window, evaluated at
/// every position where the window fits inside the image.
pub fn ssim(reference: &ImageBuffer, test: &ImageBuffer) -> Result<MetricValue> {
    reference.same_dims(test)?;
    let (w, h) = reference.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::invalid(alloc::format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let win = ssim_window();
    let x = luma_plane(reference);
    let y = luma_plane(test);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();

    let mx = window_mean(&x, w, h, &win);
    let my = window_mean(&y, w, h, &win);
    let exx = window_mean(&xx, w, h, &win);
    let eyy = window_mean(&yy, w, h, &win);
    let exy = window_mean(&xy, w, h, &win);

    let mut total = 0.0;
    for i in 0..mx.len() {
        let (ux, uy) = (mx[i], my[i]);
        let vx = exx[i] - ux * ux;
        let vy = eyy[i] - uy * uy;
        let cov = exy[i] - ux * uy;
        let num = (2.0 * ux * uy + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (ux * ux + uy * uy + SSIM_C1) * (vx + vy + SSIM_C2);
        total += num / den;
    }
    Ok(MetricValue::new(MetricKind::Ssim, total / mx.len() as f64))
}
