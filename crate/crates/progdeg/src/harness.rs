//! Dataset-level evaluation and baseline trajectory generation.

use std::path::Path;

use progdeg_core::baselines::{
    classical_trajectory, interp_oracle, rl_deconv_trajectory, TrajectoryKind, RL_ITERS_PER_STEP,
};
use progdeg_core::degradation::DegradationSpec;
use progdeg_core::evaluation::{evaluate_trajectory, FrameCurve};
use progdeg_core::imaging::motion_kernel;
use progdeg_core::metrics::MetricKind;
use progdeg_core::FRAME_COUNT;
use rayon::prelude::*;

use crate::dataset::{read_clip_meta, DatasetManifest};
use crate::external::ExternalMetric;
use crate::frames::{frame_path, read_png};
use crate::trajectories::{write_trajectory, TrajectoryProvider};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub metrics: Vec<MetricKind>,
    pub external: Option<ExternalMetric>,
}

impl EvalOptions {
    pub fn new(metrics: Vec<MetricKind>) -> Self {
        Self { metrics, external: None }
    }
}

/// Scores every manifest clip's trajectory against the clip's clean frame.
/// Curves come back in manifest order.
pub fn evaluate_dataset(
    manifest: &DatasetManifest,
    provider: &dyn TrajectoryProvider,
    opts: &EvalOptions,
) -> Result<Vec<FrameCurve>> {
    if opts.metrics.is_empty() {
        return Err(Error::InvalidArgument("no metrics selected".into()));
    }
    let wants_external = opts.metrics.contains(&MetricKind::External);
    if wants_external && opts.external.is_none() {
        return Err(Error::InvalidArgument("external metric requested without a source".into()));
    }
    manifest
        .clips
        .par_iter()
        .map(|entry| {
            let id = entry.clip_id();
            let clean_path = manifest.clean_frame_path(entry);
            let clean = read_png(&clean_path)?;
            let frames = provider.frames(id)?;
            let mut ext_error = None;
            let curve = evaluate_trajectory(id, &clean, &frames, &opts.metrics, |t| {
                let metric = opts.external.as_ref().expect("checked above");
                let test_path = provider.frame_path(id, t).unwrap_or_default();
                metric.measure(&clean_path, &test_path, id, t).map_err(|e| {
                    let msg = e.to_string();
                    ext_error = Some(e);
                    progdeg_core::Error::External(msg)
                })
            });
            match (curve, ext_error) {
                (Ok(c), _) => Ok(c),
                (Err(_), Some(e)) => Err(e),
                (Err(e), None) => Err(e.into()),
            }
        })
        .collect()
}

/// Generates a baseline trajectory for every clip into `out_dir`, starting
/// from the clip's first frame.
pub fn run_oracle(
    manifest: &DatasetManifest,
    kind: TrajectoryKind,
    iters_per_step: usize,
    out_dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    manifest.clips.par_iter().try_for_each(|entry| {
        let clip_dir = manifest.clip_dir(entry);
        let degraded = read_png(&frame_path(&clip_dir, 1))?;
        let frames = match kind {
            TrajectoryKind::Interp => {
                let clean = read_png(&frame_path(&clip_dir, FRAME_COUNT))?;
                interp_oracle(&degraded, &clean)?
            }
            TrajectoryKind::Unsharp | TrajectoryKind::ExposureLift => classical_trajectory(&degraded, kind)?,
            TrajectoryKind::RlDeconv => {
                let meta = read_clip_meta(&clip_dir)?;
                let DegradationSpec::Blur(blur) = meta.spec()? else {
                    return Err(Error::InvalidArgument(format!(
                        "clip {} is a {} clip; RL deconvolution needs blur metadata",
                        entry.clip_id(),
                        meta.task
                    )));
                };
                let kernel = motion_kernel(blur.kernel_length(1).max(1), blur.angle_deg)?;
                rl_deconv_trajectory(&degraded, &kernel, iters_per_step)?
            }
        };
        write_trajectory(out_dir, entry.clip_id(), &frames)
    })
}

pub const DEFAULT_RL_ITERS_PER_STEP: usize = RL_ITERS_PER_STEP;
