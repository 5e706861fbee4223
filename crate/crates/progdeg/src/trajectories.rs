//! Restoration trajectories stored as per-clip frame directories
//! (`<root>/<clip_id>/frame_01.png … frame_09.png`).

use std::path::{Path, PathBuf};

use progdeg_core::{ImageBuffer, FRAME_COUNT};

use crate::dataset::DatasetManifest;
use crate::frames::{frame_file_name, frame_path, png_dimensions, read_clip_frames, write_clip_frames};
use crate::{Error, Result};

/// Any source of nine-frame restoration sequences keyed by clip id.
pub trait TrajectoryProvider: Sync {
    fn frames(&self, clip_id: &str) -> Result<Vec<ImageBuffer>>;

    /// On-disk location of a frame, when there is one (needed by command-based
    /// external metrics).
    fn frame_path(&self, clip_id: &str, t: usize) -> Option<PathBuf>;
}

/// Trajectories imported from a directory tree, checked for coverage and
/// dimensions up front.
#[derive(Debug, Clone)]
pub struct DirectoryTrajectories {
    root: PathBuf,
}

impl TrajectoryProvider for DirectoryTrajectories {
    fn frames(&self, clip_id: &str) -> Result<Vec<ImageBuffer>> {
        read_clip_frames(&self.root.join(clip_id))
    }

    fn frame_path(&self, clip_id: &str, t: usize) -> Option<PathBuf> {
        Some(frame_path(&self.root.join(clip_id), t))
    }
}

/// Checks that `dir` holds all nine frames of every manifest clip at the
/// manifest's dimensions.
pub fn import_trajectories(dir: &Path, manifest: &DatasetManifest) -> Result<DirectoryTrajectories> {
    let mut missing = Vec::new();
    let mut mismatched = Vec::new();
    for entry in &manifest.clips {
        let id = entry.clip_id();
        let clip_dir = dir.join(id);
        for t in 1..=FRAME_COUNT {
            let path = frame_path(&clip_dir, t);
            if !path.is_file() {
                missing.push(format!("{id}/{}", frame_file_name(t)));
                continue;
            }
            let dims = png_dimensions(&path)?;
            if dims != (manifest.width, manifest.height) {
                mismatched.push(format!("{id}/{} is {}x{}", frame_file_name(t), dims.0, dims.1));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    if !mismatched.is_empty() {
        return Err(Error::InvalidInput(format!(
            "expected {}x{} frames: {}",
            manifest.width,
            manifest.height,
            mismatched.join(", ")
        )));
    }
    Ok(DirectoryTrajectories { root: dir.to_owned() })
}

pub fn write_trajectory(out_root: &Path, clip_id: &str, frames: &[ImageBuffer]) -> Result<()> {
    if frames.len() != FRAME_COUNT {
        return Err(Error::InvalidArgument(format!(
            "trajectory for {clip_id} has {} frames, expected {FRAME_COUNT}",
            frames.len()
        )));
    }
    write_clip_frames(&out_root.join(clip_id), frames)
}
