//! Frame-wise scoring of a trajectory against its clean target, and
//! corpus-level aggregation of the resulting curves.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::imaging::ImageBuffer;
use crate::metrics::{psnr, ssim, weakly_better, MetricKind};
use crate::{Error, Result, FRAME_COUNT};

/// One metric's values over frames `t = 1..=9`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub kind: MetricKind,
    pub values: [f64; FRAME_COUNT],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameCurve {
    pub clip_id: String,
    /// One series per configured metric, in configuration order.
    pub series: Vec<MetricSeries>,
}

impl FrameCurve {
    pub fn get(&self, kind: MetricKind) -> Option<&[f64; FRAME_COUNT]> {
        self.series.iter().find(|s| s.kind == kind).map(|s| &s.values)
    }

    pub fn metrics(&self) -> impl Iterator<Item = MetricKind> + '_ {
        self.series.iter().map(|s| s.kind)
    }
}

/// Scores `frames` against `clean` with each metric in `metrics`.
///
/// `external` is called with the 1-based frame index whenever
/// [`MetricKind::External`] is requested. Errors are annotated with the clip
/// and frame.
pub fn evaluate_trajectory<F>(
    clip_id: &str,
    clean: &ImageBuffer,
    frames: &[ImageBuffer],
    metrics: &[MetricKind],
    mut external: F,
) -> Result<FrameCurve>
where
    F: FnMut(usize) -> Result<f64>,
{
    if frames.len() != FRAME_COUNT {
        return Err(Error::invalid(alloc::format!(
            "clip {clip_id}: expected {FRAME_COUNT} frames, got {}",
            frames.len()
        )));
    }
    let at = |t: usize| {
        move |e: Error| Error::AtFrame { clip_id: String::from(clip_id), frame: t, source: Box::new(e) }
    };
    let mut series = Vec::with_capacity(metrics.len());
    for &kind in metrics {
        let mut values = [0.0; FRAME_COUNT];
        for (t0, frame) in frames.iter().enumerate() {
            let t = t0 + 1;
            values[t0] = match kind {
                MetricKind::Psnr => psnr(clean, frame).map_err(at(t))?.value,
                MetricKind::Ssim => ssim(clean, frame).map_err(at(t))?.value,
                MetricKind::External => external(t).map_err(at(t))?,
            };
        }
        series.push(MetricSeries { kind, values });
    }
    Ok(FrameCurve { clip_id: String::from(clip_id), series })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub kind: MetricKind,
    /// Mean over clips per frame. Infinite PSNR entries are left out of the
    /// mean; a frame whose entries are all infinite has mean `+∞`.
    pub per_frame_mean: [f64; FRAME_COUNT],
    /// Share of adjacent frame pairs, over all clips, that weakly improve.
    pub monotone_fraction: f64,
    /// Improvement from frame 1 to frame 9 of the mean curve (positive is better).
    pub net_delta: f64,
    /// 1-based best frame of the mean curve, earliest on ties.
    pub best_frame: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub metrics: Vec<MetricSummary>,
    pub clip_count: usize,
    /// Number of clips whose PSNR is infinite at each frame.
    pub psnr_inf_counts: [usize; FRAME_COUNT],
}

impl Summary {
    pub fn get(&self, kind: MetricKind) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.kind == kind)
    }
}

/// Aggregates curves that all carry the same metrics.
///
/// The result does not depend on the order of `curves`: per-frame sums are
/// taken over sorted values.
pub fn summarize(curves: &[FrameCurve]) -> Result<Summary> {
    let first = curves
        .first()
        .ok_or_else(|| Error::invalid("cannot summarize an empty set of curves"))?;
    let kinds: Vec<MetricKind> = first.metrics().collect();
    for c in curves {
        if !c.metrics().eq(kinds.iter().copied()) {
            return Err(Error::invalid(alloc::format!(
                "clip {} carries a different metric set",
                c.clip_id
            )));
        }
    }

    let mut psnr_inf_counts = [0usize; FRAME_COUNT];
    if let Some(pos) = kinds.iter().position(|&k| k == MetricKind::Psnr) {
        for c in curves {
            for (n, v) in psnr_inf_counts.iter_mut().zip(&c.series[pos].values) {
                if v.is_infinite() {
                    *n += 1;
                }
            }
        }
    }

    let metrics = kinds
        .iter()
        .enumerate()
        .map(|(pos, &kind)| summarize_metric(kind, curves.iter().map(|c| &c.series[pos].values)))
        .collect();
    Ok(Summary { metrics, clip_count: curves.len(), psnr_inf_counts })
}

fn summarize_metric<'a>(
    kind: MetricKind,
    curves: impl Iterator<Item = &'a [f64; FRAME_COUNT]> + Clone,
) -> MetricSummary {
    let higher = kind.higher_is_better();

    let per_frame_mean = core::array::from_fn(|t0| {
        let mut vals: Vec<f64> = curves.clone().map(|c| c[t0]).filter(|v| v.is_finite()).collect();
        if vals.is_empty() {
            return curves.clone().map(|c| c[t0]).next().unwrap_or(f64::NAN);
        }
        vals.sort_by(f64::total_cmp);
        vals.iter().sum::<f64>() / vals.len() as f64
    });

    let mut improving = 0usize;
    let mut pairs = 0usize;
    for c in curves {
        for w in c.windows(2) {
            pairs += 1;
            if weakly_better(w[1], w[0], higher) {
                improving += 1;
            }
        }
    }

    let (first, last) = (per_frame_mean[0], per_frame_mean[FRAME_COUNT - 1]);
    let net_delta = if first == last {
        0.0
    } else if higher {
        last - first
    } else {
        first - last
    };

    let mut best = 0;
    for t0 in 1..FRAME_COUNT {
        let (cand, cur) = (per_frame_mean[t0], per_frame_mean[best]);
        if cand != cur && weakly_better(cand, cur, higher) {
            best = t0;
        }
    }

    MetricSummary {
        kind,
        per_frame_mean,
        monotone_fraction: improving as f64 / pairs as f64,
        net_delta,
        best_frame: best + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn curve(id: &str, kind: MetricKind, values: [f64; 9]) -> FrameCurve {
        FrameCurve { clip_id: id.into(), series: vec![MetricSeries { kind, values }] }
    }

    #[allow(clippy::approx_constant)]
    const LPIPS_CURVE: [f64; 9] = [0.335, 0.330, 0.323, 0.319, 0.316, 0.318, 0.316, 0.317, 0.317];

    #[test]
    fn lpips_table_statistics() {
        let s = summarize(&[curve("c", MetricKind::External, LPIPS_CURVE)]).unwrap();
        let m = s.get(MetricKind::External).unwrap();
        assert_eq!(m.best_frame, 5);
        assert!((m.net_delta - 0.018).abs() < 1e-9);
        // 5→6 and 7→8 get worse; every other pair improves or ties.
        assert_eq!(m.monotone_fraction, 6.0 / 8.0);
        assert_eq!(m.per_frame_mean, LPIPS_CURVE);
    }

    #[test]
    fn constant_curve() {
        let s = summarize(&[curve("c", MetricKind::Ssim, [0.7; 9])]).unwrap();
        let m = &s.metrics[0];
        assert_eq!(m.net_delta, 0.0);
        assert_eq!(m.monotone_fraction, 1.0);
        assert_eq!(m.best_frame, 1);
    }

    #[test]
    fn strictly_improving_psnr() {
        let vals = core::array::from_fn(|i| 20.0 + i as f64);
        let s = summarize(&[curve("c", MetricKind::Psnr, vals)]).unwrap();
        assert_eq!(s.metrics[0].monotone_fraction, 1.0);
        assert_eq!(s.metrics[0].best_frame, 9);
        assert_eq!(s.metrics[0].net_delta, 8.0);
    }

    #[test]
    fn infinite_psnr_excluded_and_counted() {
        let mut a = [30.0; 9];
        a[8] = f64::INFINITY;
        let mut b = [32.0; 9];
        b[8] = 40.0;
        let s = summarize(&[curve("a", MetricKind::Psnr, a), curve("b", MetricKind::Psnr, b)]).unwrap();
        assert_eq!(s.psnr_inf_counts, [0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let m = &s.metrics[0];
        assert_eq!(m.per_frame_mean[0], 31.0);
        assert_eq!(m.per_frame_mean[8], 40.0);
        assert_eq!(m.best_frame, 9);

        let all_inf = summarize(&[curve("a", MetricKind::Psnr, a)]).unwrap();
        assert_eq!(all_inf.metrics[0].per_frame_mean[8], f64::INFINITY);
        assert_eq!(all_inf.metrics[0].net_delta, f64::INFINITY);
    }

    #[test]
    fn empty_and_mixed_inputs_rejected() {
        assert!(summarize(&[]).is_err());
        let a = curve("a", MetricKind::Psnr, [1.0; 9]);
        let b = curve("b", MetricKind::Ssim, [1.0; 9]);
        assert!(summarize(&[a, b]).is_err());
    }

    #[test]
    fn identity_trajectory() {
        let clean = crate::scene::synthetic_scene(24, 20, 4);
        let frames = vec![clean.clone(); 9];
        let c = evaluate_trajectory("id", &clean, &frames, &[MetricKind::Psnr, MetricKind::Ssim], |_| {
            unreachable!()
        })
        .unwrap();
        assert!(c.get(MetricKind::Psnr).unwrap().iter().all(|v| *v == f64::INFINITY));
        assert!(c.get(MetricKind::Ssim).unwrap().iter().all(|v| (*v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn errors_carry_clip_and_frame() {
        let clean = ImageBuffer::new(16, 16).unwrap();
        let frames = vec![clean.clone(); 9];
        let err = evaluate_trajectory("clip_000003", &clean, &frames, &[MetricKind::External], |t| {
            if t == 4 { Err(Error::External("boom".into())) } else { Ok(0.1) }
        })
        .unwrap_err();
        match err {
            Error::AtFrame { clip_id, frame, source } => {
                assert_eq!(clip_id, "clip_000003");
                assert_eq!(frame, 4);
                assert_eq!(*source, Error::External("boom".into()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(evaluate_trajectory("x", &clean, &frames[..8], &[MetricKind::Psnr], |_| Ok(0.0)).is_err());
    }
}
