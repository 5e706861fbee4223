//! The three progressive degradations (resolution, motion blur, low light),
//! their nine-frame schedules, and clip assembly.
//!
//! Every frame is rendered from the clean source directly; frame 9 is the
//! source itself for all three tasks.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::imaging::{
    blur_raw, dct_artifact, linear_to_srgb, motion_kernel, resize, srgb_to_linear, convolve2d,
    Boundary, ImageBuffer,
};
use crate::sampling::RngState;
use crate::{Error, Result, FRAME_COUNT};

/// Frames per second recorded in clip metadata.
pub const CLIP_FPS: u32 = 5;
/// Default clip width.
pub const CLIP_WIDTH: usize = 1360;
/// Default clip height.
pub const CLIP_HEIGHT: usize = 768;

pub const SCALE_MIN_RANGE: (f64, f64) = (0.05, 0.25);
pub const KERNEL_MAX_RANGE: (f64, f64) = (40.0, 200.0);
pub const NOISE_RANGE: (f64, f64) = (0.02, 0.08);

/// Block-compression artifacts are applied while the scale is below this.
pub const JPEG_SCALE_THRESHOLD: f64 = 0.5;

/// Stops of underexposure at full low-light strength.
const EXPOSURE_STOPS: f64 = 4.0;
const ROLLOFF: f64 = 0.5;
const WB_DRIFT: f64 = 0.15;
const LOWLIGHT_BLUR_SIGMA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Resolution,
    Blur,
    LowLight,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::Resolution, TaskKind::Blur, TaskKind::LowLight];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Resolution => "resolution",
            TaskKind::Blur => "blur",
            TaskKind::LowLight => "lowlight",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resolution" | "sr" => Ok(TaskKind::Resolution),
            "blur" | "deblur" => Ok(TaskKind::Blur),
            "lowlight" | "low-light" => Ok(TaskKind::LowLight),
            other => Err(Error::invalid(alloc::format!("unknown task '{other}'"))),
        }
    }
}

/// `t / 8` for `t = 0..=8`, the normalized frame position.
#[inline]
fn progress(t0: usize) -> f64 {
    t0 as f64 / (FRAME_COUNT - 1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionSchedule {
    /// Scale of the first frame.
    pub s1: f64,
    /// Per-frame scale, linear from `s1` to exactly 1.
    pub scales: [f64; FRAME_COUNT],
    /// Block-compression quality per frame, `None` where no artifacts are added.
    pub jpeg_quality: [Option<u8>; FRAME_COUNT],
}

impl ResolutionSchedule {
    pub fn new(s1: f64) -> Result<Self> {
        if !(s1 > 0.0 && s1 <= 1.0) {
            return Err(Error::invalid(alloc::format!("initial scale {s1} outside (0, 1]")));
        }
        let mut scales = core::array::from_fn(|t0| s1 + (1.0 - s1) * progress(t0));
        scales[FRAME_COUNT - 1] = 1.0;
        let jpeg_quality = core::array::from_fn(|t0| {
            (scales[t0] < JPEG_SCALE_THRESHOLD)
                .then(|| libm::round(30.0 + 65.0 * progress(t0)) as u8)
        });
        Ok(Self { s1, scales, jpeg_quality })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlurSchedule {
    /// Motion direction in degrees, `[0, 360)`.
    pub angle_deg: f64,
    pub k_max: f64,
    /// Kernel length per frame, `k_max · (1 − (t−1)/8)`.
    pub lengths: [f64; FRAME_COUNT],
}

impl BlurSchedule {
    pub fn new(angle_deg: f64, k_max: f64) -> Result<Self> {
        if !(0.0..360.0).contains(&angle_deg) {
            return Err(Error::invalid(alloc::format!("blur angle {angle_deg} outside [0, 360)")));
        }
        if !(k_max >= 0.0) || !k_max.is_finite() {
            return Err(Error::invalid(alloc::format!("kernel length {k_max} must be >= 0")));
        }
        let lengths = core::array::from_fn(|t0| k_max * (1.0 - progress(t0)));
        Ok(Self { angle_deg, k_max, lengths })
    }

    /// Rounded kernel length of frame `t` (1-based); `<= 1` means unblurred.
    pub fn kernel_length(&self, t: usize) -> usize {
        libm::round(self.lengths[t - 1]) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowLightSchedule {
    /// Noise standard deviation at full strength (display units).
    pub noise: f64,
    /// White-balance draw in `[0, 1]`.
    pub wb_u: f64,
    /// Per-frame strength, `1 − (t−1)/8`.
    pub strengths: [f64; FRAME_COUNT],
}

impl LowLightSchedule {
    pub fn new(noise: f64, wb_u: f64) -> Result<Self> {
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(Error::invalid(alloc::format!("noise level {noise} must be >= 0")));
        }
        if !(0.0..=1.0).contains(&wb_u) {
            return Err(Error::invalid(alloc::format!("white-balance draw {wb_u} outside [0, 1]")));
        }
        let strengths = core::array::from_fn(|t0| 1.0 - progress(t0));
        Ok(Self { noise, wb_u, strengths })
    }
}

/// Sampled parameters and per-frame schedule of one clip.
#[derive(Debug, Clone, PartialEq)]
pub enum DegradationSpec {
    Resolution(ResolutionSchedule),
    Blur(BlurSchedule),
    LowLight(LowLightSchedule),
}

impl DegradationSpec {
    pub fn task(&self) -> TaskKind {
        match self {
            DegradationSpec::Resolution(_) => TaskKind::Resolution,
            DegradationSpec::Blur(_) => TaskKind::Blur,
            DegradationSpec::LowLight(_) => TaskKind::LowLight,
        }
    }

    pub fn frame_count(&self) -> usize {
        FRAME_COUNT
    }
}

/// Draws the clip parameters for `task` from `rng` and fills in the schedule.
pub fn make_schedule(task: TaskKind, rng: &mut RngState) -> DegradationSpec {
    match task {
        TaskKind::Resolution => {
            let s1 = rng.uniform(SCALE_MIN_RANGE.0, SCALE_MIN_RANGE.1);
            assert!((SCALE_MIN_RANGE.0..=SCALE_MIN_RANGE.1).contains(&s1));
            DegradationSpec::Resolution(ResolutionSchedule::new(s1).expect("s1 in range"))
        }
        TaskKind::Blur => {
            let angle = rng.uniform(0.0, 360.0);
            let k_max = rng.uniform(KERNEL_MAX_RANGE.0, KERNEL_MAX_RANGE.1);
            assert!((0.0..360.0).contains(&angle));
            assert!((KERNEL_MAX_RANGE.0..=KERNEL_MAX_RANGE.1).contains(&k_max));
            DegradationSpec::Blur(BlurSchedule::new(angle, k_max).expect("blur params in range"))
        }
        TaskKind::LowLight => {
            let noise = rng.uniform(NOISE_RANGE.0, NOISE_RANGE.1);
            let wb_u = rng.next_unit();
            assert!((NOISE_RANGE.0..=NOISE_RANGE.1).contains(&noise));
            DegradationSpec::LowLight(LowLightSchedule::new(noise, wb_u).expect("low-light params in range"))
        }
    }
}

/// Renders frame `t` (1-based) of the progression from the clean `src`.
///
/// Only the low-light task draws from `rng` (one Gaussian per component,
/// row-major, R,G,B), and only when its strength is nonzero.
pub fn degrade_frame(
    src: &ImageBuffer,
    spec: &DegradationSpec,
    t: usize,
    rng: &mut RngState,
) -> Result<ImageBuffer> {
    if !(1..=FRAME_COUNT).contains(&t) {
        return Err(Error::invalid(alloc::format!("frame index {t} outside 1..={FRAME_COUNT}")));
    }
    match spec {
        DegradationSpec::Resolution(s) => resolution_frame(src, s.scales[t - 1], s.jpeg_quality[t - 1]),
        DegradationSpec::Blur(b) => {
            let len = b.kernel_length(t);
            if len <= 1 {
                return Ok(src.clone());
            }
            let kernel = motion_kernel(len, b.angle_deg)?;
            Ok(convolve2d(src, &kernel, Boundary::Clamp))
        }
        DegradationSpec::LowLight(l) => Ok(low_light_frame(src, l.strengths[t - 1], l.noise, l.wb_u, rng)),
    }
}

fn resolution_frame(src: &ImageBuffer, scale: f64, quality: Option<u8>) -> Result<ImageBuffer> {
    if scale >= 1.0 {
        return Ok(src.clone());
    }
    let (w, h) = src.dims();
    let dw = (libm::round(w as f64 * scale) as usize).max(1);
    let dh = (libm::round(h as f64 * scale) as usize).max(1);
    let small = resize(src, dw, dh)?;
    let restored = resize(&small, w, h)?;
    match quality {
        Some(q) => dct_artifact(&restored, q),
        None => Ok(restored),
    }
}

/// Low-light rendering at strength `s`: exposure drop with highlight
/// roll-off and white-balance drift in linear light, then sensor noise and
/// a mild blur in display space. `s = 0` is the identity.
pub fn low_light_frame(
    src: &ImageBuffer,
    s: f64,
    noise: f64,
    wb_u: f64,
    rng: &mut RngState,
) -> ImageBuffer {
    if s == 0.0 {
        return src.clone();
    }
    let linear: Vec<f64> = src.data().iter().map(|&v| srgb_to_linear(v)).collect();
    low_light_from_linear(src, &linear, s, noise, wb_u, rng)
}

/// `low_light_frame` with the sRGB decode of `src` precomputed.
fn low_light_from_linear(
    src: &ImageBuffer,
    linear: &[f64],
    s: f64,
    noise: f64,
    wb_u: f64,
    rng: &mut RngState,
) -> ImageBuffer {
    if s == 0.0 {
        return src.clone();
    }
    let exposure = libm::exp2(-EXPOSURE_STOPS * s);
    let gains = [1.0 + WB_DRIFT * s * wb_u, 1.0, 1.0 - WB_DRIFT * s * wb_u];
    let sigma = noise * s;

    let mut data: Vec<f64> = Vec::with_capacity(linear.len());
    for px in linear.chunks_exact(3) {
        for (&v, gain) in px.iter().zip(gains) {
            let lin = v * exposure;
            let rolled = lin / (1.0 + ROLLOFF * s * lin);
            data.push(linear_to_srgb((rolled * gain).clamp(0.0, 1.0)));
        }
    }
    if sigma > 0.0 {
        for v in data.iter_mut() {
            *v += sigma * rng.next_gaussian();
        }
    }
    let blurred = blur_raw(&data, src.width(), src.height(), LOWLIGHT_BLUR_SIGMA * s, Boundary::Clamp);
    ImageBuffer::from_raw_clamped(src.width(), src.height(), blurred)
}

/// One nine-frame degradation progression and its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    /// Frames `t = 1..=9`, most degraded first; the last is the clean source.
    pub frames: Vec<ImageBuffer>,
    pub spec: DegradationSpec,
    pub source_id: String,
    pub clip_seed: u64,
    pub fps: u32,
}

impl Clip {
    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn task(&self) -> TaskKind {
        self.spec.task()
    }
}

/// Renders the frames of one clip lazily, in order `t = 1..=9`.
#[derive(Debug, Clone)]
pub struct ClipFrames<'a> {
    src: &'a ImageBuffer,
    spec: DegradationSpec,
    rng: RngState,
    next_t: usize,
    linear: Option<Vec<f64>>,
}

impl<'a> ClipFrames<'a> {
    /// Samples the schedule from the stream seeded with `clip_seed`; the
    /// same stream then feeds the frames.
    pub fn new(src: &'a ImageBuffer, task: TaskKind, clip_seed: u64) -> Self {
        let mut rng = RngState::from_state(clip_seed);
        let spec = make_schedule(task, &mut rng);
        let linear = matches!(spec, DegradationSpec::LowLight(_))
            .then(|| src.data().iter().map(|&v| srgb_to_linear(v)).collect());
        Self { src, spec, rng, next_t: 1, linear }
    }

    pub fn spec(&self) -> &DegradationSpec {
        &self.spec
    }
}

impl Iterator for ClipFrames<'_> {
    type Item = Result<ImageBuffer>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_t > FRAME_COUNT {
            return None;
        }
        let t = self.next_t;
        self.next_t += 1;
        if let (DegradationSpec::LowLight(l), Some(linear)) = (&self.spec, &self.linear) {
            let s = l.strengths[t - 1];
            return Some(Ok(low_light_from_linear(self.src, linear, s, l.noise, l.wb_u, &mut self.rng)));
        }
        Some(degrade_frame(self.src, &self.spec, t, &mut self.rng))
    }
}

/// Samples a schedule from the stream seeded with `clip_seed` and renders all
/// nine frames from `src`, consuming the stream in frame order.
pub fn build_clip(src: &ImageBuffer, task: TaskKind, clip_seed: u64, source_id: &str) -> Result<Clip> {
    let mut frames_iter = ClipFrames::new(src, task, clip_seed);
    let spec = frames_iter.spec().clone();
    let frames = frames_iter.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(Clip {
        frames,
        spec,
        source_id: String::from(source_id),
        clip_seed,
        fps: CLIP_FPS,
    })
}
