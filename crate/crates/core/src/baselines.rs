//! Model-free trajectory generators: an analytic interpolation oracle and
//! classical per-task restorers.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::imaging::{
    correlate_raw, gaussian_blur, linear_to_srgb, srgb_to_linear, Boundary, ImageBuffer, Kernel2D,
};
use crate::{Error, Result, FRAME_COUNT};

const UNSHARP_SIGMA: f64 = 2.0;
const UNSHARP_MAX_AMOUNT: f64 = 1.5;
const EXPOSURE_LIFT_STOPS: f64 = 4.0;
/// Guard added to the RL divisor.
pub const RL_EPSILON: f64 = 1e-8;
pub const RL_ITERS_PER_STEP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    Interp,
    Unsharp,
    ExposureLift,
    RlDeconv,
}

impl TrajectoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryKind::Interp => "interp",
            TrajectoryKind::Unsharp => "unsharp",
            TrajectoryKind::ExposureLift => "exposure",
            TrajectoryKind::RlDeconv => "rl",
        }
    }
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrajectoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interp" => Ok(TrajectoryKind::Interp),
            "unsharp" => Ok(TrajectoryKind::Unsharp),
            "exposure" | "exposure-lift" => Ok(TrajectoryKind::ExposureLift),
            "rl" | "rl-deconv" => Ok(TrajectoryKind::RlDeconv),
            other => Err(Error::invalid(alloc::format!("unknown trajectory kind '{other}'"))),
        }
    }
}

/// Interpolation weight of frame `t0` (0-based): `t0 / 8`.
#[inline]
pub fn interp_lambda(t0: usize) -> f64 {
    t0 as f64 / (FRAME_COUNT - 1) as f64
}

/// Straight-line blend from `degraded` (frame 1) to `clean` (frame 9).
pub fn interp_oracle(degraded: &ImageBuffer, clean: &ImageBuffer) -> Result<Vec<ImageBuffer>> {
    degraded.same_dims(clean)?;
    let (w, h) = degraded.dims();
    Ok((0..FRAME_COUNT)
        .map(|t0| {
            let lambda = interp_lambda(t0);
            let data = degraded
                .data()
                .iter()
                .zip(clean.data())
                .map(|(d, c)| (1.0 - lambda) * d + lambda * c)
                .collect();
            ImageBuffer::from_raw_clamped(w, h, data)
        })
        .collect())
}

/// Classical single-image enhancement ramped up over the trajectory.
///
/// [`TrajectoryKind::Unsharp`] sharpens with amount `1.5·(t−1)/8`;
/// [`TrajectoryKind::ExposureLift`] applies a linear-light gain of
/// `2^(4·(t−1)/8)`. Other kinds are rejected.
pub fn classical_trajectory(degraded: &ImageBuffer, kind: TrajectoryKind) -> Result<Vec<ImageBuffer>> {
    let (w, h) = degraded.dims();
    match kind {
        TrajectoryKind::Unsharp => {
            let blurred = gaussian_blur(degraded, UNSHARP_SIGMA)?;
            Ok((0..FRAME_COUNT)
                .map(|t0| {
                    if t0 == 0 {
                        return degraded.clone();
                    }
                    let amount = UNSHARP_MAX_AMOUNT * interp_lambda(t0);
                    let data = degraded
                        .data()
                        .iter()
                        .zip(blurred.data())
                        .map(|(d, b)| d + amount * (d - b))
                        .collect();
                    ImageBuffer::from_raw_clamped(w, h, data)
                })
                .collect())
        }
        TrajectoryKind::ExposureLift => {
            let linear: Vec<f64> = degraded.data().iter().map(|&v| srgb_to_linear(v)).collect();
            Ok((0..FRAME_COUNT)
                .map(|t0| {
                    if t0 == 0 {
                        return degraded.clone();
                    }
                    let gain = libm::exp2(EXPOSURE_LIFT_STOPS * interp_lambda(t0));
                    let data = linear
                        .iter()
                        .map(|&v| linear_to_srgb((v * gain).min(1.0)))
                        .collect();
                    ImageBuffer::from_raw_clamped(w, h, data)
                })
                .collect())
        }
        other => Err(Error::invalid(alloc::format!("{other} is not a classical trajectory"))),
    }
}

/// Non-blind Richardson–Lucy deconvolution state with periodic boundaries.
///
/// The forward model is correlation with `kernel`, so each step is
/// `x ← x ⊙ corr(K̃, y ⊘ (corr(K, x) + ε))` with `K̃` the kernel rotated by
/// 180°. Iterates stay nonnegative and are never clamped.
#[derive(Debug, Clone)]
pub struct RichardsonLucy {
    width: usize,
    height: usize,
    observed: Vec<f64>,
    kernel: Kernel2D,
    adjoint: Kernel2D,
    estimate: Vec<f64>,
    iterations: usize,
}

impl RichardsonLucy {
    /// Starts from `x₀ = y`.
    pub fn new(observed: &ImageBuffer, kernel: &Kernel2D) -> Result<Self> {
        kernel.validate()?;
        Ok(Self {
            width: observed.width(),
            height: observed.height(),
            observed: observed.data().to_vec(),
            kernel: kernel.clone(),
            adjoint: kernel.rotated_180(),
            estimate: observed.data().to_vec(),
            iterations: 0,
        })
    }

    pub fn step(&mut self) {
        let (w, h) = (self.width, self.height);
        let predicted = correlate_raw(&self.estimate, w, h, &self.kernel, Boundary::Periodic);
        let ratio: Vec<f64> = self
            .observed
            .iter()
            .zip(&predicted)
            .map(|(y, p)| y / (p + RL_EPSILON))
            .collect();
        let correction = correlate_raw(&ratio, w, h, &self.adjoint, Boundary::Periodic);
        for (x, c) in self.estimate.iter_mut().zip(&correction) {
            *x *= c;
        }
        self.iterations += 1;
    }

    pub fn run(&mut self, iterations: usize) {
        for _ in 0..iterations {
            self.step();
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// The unclamped current iterate, interleaved RGB.
    pub fn estimate_raw(&self) -> &[f64] {
        &self.estimate
    }

    pub fn observed_raw(&self) -> &[f64] {
        &self.observed
    }

    /// The current iterate clamped into an image.
    pub fn materialize(&self) -> ImageBuffer {
        ImageBuffer::from_raw_clamped(self.width, self.height, self.estimate.clone())
    }
}

/// Frame `t` is the RL iterate after `(t−1)·iters_per_step` iterations.
pub fn rl_deconv_trajectory(
    degraded: &ImageBuffer,
    kernel: &Kernel2D,
    iters_per_step: usize,
) -> Result<Vec<ImageBuffer>> {
    let mut rl = RichardsonLucy::new(degraded, kernel)?;
    let mut frames = Vec::with_capacity(FRAME_COUNT);
    frames.push(degraded.clone());
    for _ in 1..FRAME_COUNT {
        rl.run(iters_per_step);
        frames.push(rl.materialize());
    }
    Ok(frames)
}
