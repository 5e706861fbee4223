//! Pure pixel pipelines for synthesizing progressive degradation clips and
//! scoring restoration trajectories frame by frame.
//!
//! Everything in this crate is a deterministic function of its inputs and
//! builds without `std`; transcendental math goes through `libm` so results
//! do not depend on the platform's math library.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod baselines;
pub mod degradation;
mod error;
pub mod evaluation;
pub mod imaging;
pub mod metrics;
pub mod sampling;
pub mod scene;

pub use error::{Error, Result};
pub use imaging::{Boundary, ImageBuffer, Kernel2D};

/// Number of frames in every clip and trajectory.
pub const FRAME_COUNT: usize = 9;
