//! File formats, dataset synthesis, trajectory import and the evaluation
//! harness around [`progdeg_core`].

pub mod cli;
pub mod dataset;
mod error;
pub mod external;
pub mod frames;
pub mod harness;
pub mod report;
pub mod trajectories;

pub use error::{Error, Result};
pub use progdeg_core as core;
