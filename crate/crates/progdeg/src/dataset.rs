//! Corpus preparation, clip persistence and the dataset manifest files
//! (`videos.txt`, `prompt.txt`, `dataset.json`, per-clip `clip.json`).

use std::fs;
use std::path::{Path, PathBuf};

use progdeg_core::degradation::{
    BlurSchedule, ClipFrames, DegradationSpec, LowLightSchedule, ResolutionSchedule, TaskKind,
    CLIP_FPS,
};
use progdeg_core::imaging::resize;
use progdeg_core::sampling::derive_seed;
use progdeg_core::{ImageBuffer, FRAME_COUNT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frames::{frame_path, read_png, write_png};
use crate::{Error, Result};

pub const VIDEOS_FILE: &str = "videos.txt";
pub const PROMPTS_FILE: &str = "prompt.txt";
pub const DATASET_FILE: &str = "dataset.json";
pub const CLIP_META_FILE: &str = "clip.json";

/// Fixed per-task prompt used in uniform mode.
pub fn default_uniform_prompt(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Resolution => {
            "The image becomes sharper and higher in resolution. Nothing moves. Static image."
        }
        TaskKind::Blur => "The image becomes sharp and free of motion blur. Nothing moves. Static image.",
        TaskKind::LowLight => {
            "The image gradually brightens to normal lighting. Nothing moves. Static image."
        }
    }
}

pub fn clip_id(index: usize) -> String {
    format!("clip_{index:06}")
}

/// Scales to cover `target_w`×`target_h` and center-crops to exactly that size.
pub fn prepare_source(img: &ImageBuffer, target_w: usize, target_h: usize) -> Result<ImageBuffer> {
    let (w, h) = img.dims();
    if (w, h) == (target_w, target_h) {
        return Ok(img.clone());
    }
    let scale = (target_w as f64 / w as f64).max(target_h as f64 / h as f64);
    let sw = ((w as f64 * scale).round() as usize).max(target_w);
    let sh = ((h as f64 * scale).round() as usize).max(target_h);
    let scaled = resize(img, sw, sh)?;
    Ok(scaled.crop((sw - target_w) / 2, (sh - target_h) / 2, target_w, target_h)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    Uniform,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptRecord {
    pub clip_id: String,
    pub text: String,
    pub mode: PromptMode,
}

/// Where clip prompts come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptSource {
    /// One prompt for every clip; `None` selects the task default.
    Uniform(Option<String>),
    /// One prompt per line, in clip order.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClipEntry {
    /// Clip directory relative to the dataset root, forward slashes.
    pub path: String,
    pub prompt: PromptRecord,
    pub clip_seed: u64,
    pub source_id: String,
}

impl ClipEntry {
    pub fn clip_id(&self) -> &str {
        &self.prompt.clip_id
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub task: TaskKind,
    pub master_seed: u64,
    pub prompt_mode: PromptMode,
    pub width: usize,
    pub height: usize,
    pub fps: u32,
    pub clips: Vec<ClipEntry>,
}

impl DatasetManifest {
    pub fn clip_dir(&self, entry: &ClipEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    /// The clean target of a clip: its last frame.
    pub fn clean_frame_path(&self, entry: &ClipEntry) -> PathBuf {
        frame_path(&self.clip_dir(entry), FRAME_COUNT)
    }

    pub fn find(&self, clip_id: &str) -> Option<&ClipEntry> {
        self.clips.iter().find(|c| c.clip_id() == clip_id)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetFile {
    task: String,
    master_seed: u64,
    prompt_mode: PromptMode,
    fps: u32,
    width: usize,
    height: usize,
    clips: Vec<DatasetClip>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetClip {
    clip_id: String,
    clip_seed: u64,
    source_id: String,
}

/// Task-specific parameters stored in `clip.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClipParams {
    Resolution { s1: f64, s_t: Vec<f64>, q_t: Vec<Option<u8>> },
    Blur { alpha_deg: f64, k_max: f64, k_t: Vec<f64>, k_t_rounded: Vec<usize> },
    LowLight { n: f64, wb_u: f64, s_t: Vec<f64> },
}

impl ClipParams {
    pub fn from_spec(spec: &DegradationSpec) -> Self {
        match spec {
            DegradationSpec::Resolution(s) => ClipParams::Resolution {
                s1: s.s1,
                s_t: s.scales.to_vec(),
                q_t: s.jpeg_quality.to_vec(),
            },
            DegradationSpec::Blur(b) => ClipParams::Blur {
                alpha_deg: b.angle_deg,
                k_max: b.k_max,
                k_t: b.lengths.to_vec(),
                k_t_rounded: (1..=FRAME_COUNT).map(|t| b.kernel_length(t)).collect(),
            },
            DegradationSpec::LowLight(l) => ClipParams::LowLight {
                n: l.noise,
                wb_u: l.wb_u,
                s_t: l.strengths.to_vec(),
            },
        }
    }

    /// Rebuilds the schedule from the sampled parameters.
    pub fn to_spec(&self) -> Result<DegradationSpec> {
        Ok(match *self {
            ClipParams::Resolution { s1, .. } => DegradationSpec::Resolution(ResolutionSchedule::new(s1)?),
            ClipParams::Blur { alpha_deg, k_max, .. } => DegradationSpec::Blur(BlurSchedule::new(alpha_deg, k_max)?),
            ClipParams::LowLight { n, wb_u, .. } => DegradationSpec::LowLight(LowLightSchedule::new(n, wb_u)?),
        })
    }
}

/// Contents of `clip.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipMeta {
    pub clip_id: String,
    pub task: String,
    pub clip_seed: u64,
    pub source_id: String,
    pub fps: u32,
    pub width: usize,
    pub height: usize,
    pub params: ClipParams,
}

impl ClipMeta {
    pub fn task(&self) -> Result<TaskKind> {
        Ok(self.task.parse()?)
    }

    pub fn spec(&self) -> Result<DegradationSpec> {
        let spec = self.params.to_spec()?;
        if spec.task() != self.task()? {
            return Err(Error::Format(format!(
                "clip {}: parameters do not match task '{}'",
                self.clip_id, self.task
            )));
        }
        Ok(spec)
    }
}

pub fn read_clip_meta(clip_dir: &Path) -> Result<ClipMeta> {
    read_json(&clip_dir.join(CLIP_META_FILE))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_owned(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| Error::Json { path: path.to_owned(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_lines(path: &Path, lines: impl Iterator<Item = impl AsRef<str>>) -> Result<()> {
    let mut text = String::new();
    for line in lines {
        text.push_str(line.as_ref());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_owned()).collect())
}

/// Writes `videos.txt`, `prompt.txt` and `dataset.json` under `manifest.root`.
pub fn write_manifest(manifest: &DatasetManifest) -> Result<()> {
    for c in &manifest.clips {
        if c.prompt.text.is_empty() || c.prompt.text.contains(['\n', '\r']) {
            return Err(Error::InvalidArgument(format!(
                "prompt for {} must be a single nonempty line",
                c.clip_id()
            )));
        }
        if c.path.contains(['\n', '\r']) {
            return Err(Error::InvalidArgument(format!("clip path {:?} contains a line break", c.path)));
        }
    }
    fs::create_dir_all(&manifest.root).map_err(|e| Error::io(&manifest.root, e))?;
    write_lines(&manifest.root.join(VIDEOS_FILE), manifest.clips.iter().map(|c| &c.path))?;
    write_lines(&manifest.root.join(PROMPTS_FILE), manifest.clips.iter().map(|c| &c.prompt.text))?;
    let file = DatasetFile {
        task: manifest.task.as_str().to_owned(),
        master_seed: manifest.master_seed,
        prompt_mode: manifest.prompt_mode,
        fps: manifest.fps,
        width: manifest.width,
        height: manifest.height,
        clips: manifest
            .clips
            .iter()
            .map(|c| DatasetClip {
                clip_id: c.clip_id().to_owned(),
                clip_seed: c.clip_seed,
                source_id: c.source_id.clone(),
            })
            .collect(),
    };
    write_json(&manifest.root.join(DATASET_FILE), &file)
}

/// Loads a dataset root. Clip paths are normalized to forward slashes and
/// every referenced clip directory must exist.
pub fn load_manifest(root: &Path) -> Result<DatasetManifest> {
    let videos = read_lines(&root.join(VIDEOS_FILE))?;
    let prompts = read_lines(&root.join(PROMPTS_FILE))?;
    if videos.len() != prompts.len() {
        return Err(Error::Format(format!(
            "{VIDEOS_FILE} has {} lines but {PROMPTS_FILE} has {}",
            videos.len(),
            prompts.len()
        )));
    }
    let file: DatasetFile = read_json(&root.join(DATASET_FILE))?;
    let task: TaskKind = file.task.parse()?;

    let mut clips = Vec::with_capacity(videos.len());
    for (line_no, (path, text)) in videos.iter().zip(prompts).enumerate() {
        let path = path.replace('\\', "/").trim_end_matches('/').to_owned();
        if path.is_empty() {
            return Err(Error::Format(format!("{VIDEOS_FILE} line {} is empty", line_no + 1)));
        }
        if !root.join(&path).is_dir() {
            return Err(Error::DanglingReference(format!(
                "{VIDEOS_FILE} line {} references missing clip directory '{path}'",
                line_no + 1
            )));
        }
        let id = path.rsplit('/').next().unwrap_or(&path).to_owned();
        let meta = file.clips.iter().find(|c| c.clip_id == id).ok_or_else(|| {
            Error::Format(format!("clip '{id}' is listed in {VIDEOS_FILE} but not in {DATASET_FILE}"))
        })?;
        if text.is_empty() {
            return Err(Error::Format(format!("{PROMPTS_FILE} line {} is empty", line_no + 1)));
        }
        clips.push(ClipEntry {
            path,
            prompt: PromptRecord { clip_id: id, text, mode: file.prompt_mode },
            clip_seed: meta.clip_seed,
            source_id: meta.source_id.clone(),
        });
    }
    Ok(DatasetManifest {
        root: root.to_owned(),
        task,
        master_seed: file.master_seed,
        prompt_mode: file.prompt_mode,
        width: file.width,
        height: file.height,
        fps: file.fps,
        clips,
    })
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub input_dir: PathBuf,
    pub out_dir: PathBuf,
    pub task: TaskKind,
    pub master_seed: u64,
    pub clips_per_image: usize,
    pub width: usize,
    pub height: usize,
    pub prompts: PromptSource,
}

impl BuildOptions {
    pub fn new(input_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>, task: TaskKind) -> Self {
        Self {
            input_dir: input_dir.into(),
            out_dir: out_dir.into(),
            task,
            master_seed: 0,
            clips_per_image: 2,
            width: progdeg_core::degradation::CLIP_WIDTH,
            height: progdeg_core::degradation::CLIP_HEIGHT,
            prompts: PromptSource::Uniform(None),
        }
    }
}

/// PNG files directly inside `dir`, sorted by file name.
pub fn list_source_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn resolve_prompts(opts: &BuildOptions, clip_count: usize) -> Result<(PromptMode, Vec<String>)> {
    match &opts.prompts {
        PromptSource::Uniform(text) => {
            let text = text.clone().unwrap_or_else(|| default_uniform_prompt(opts.task).to_owned());
            if text.is_empty() || text.contains(['\n', '\r']) {
                return Err(Error::InvalidArgument("uniform prompt must be a single nonempty line".into()));
            }
            Ok((PromptMode::Uniform, vec![text; clip_count]))
        }
        PromptSource::File(path) => {
            let lines = read_lines(path)?;
            if lines.len() < clip_count {
                return Err(Error::InvalidArgument(format!(
                    "{} has {} prompt lines but {clip_count} clips are being built",
                    path.display(),
                    lines.len()
                )));
            }
            let lines: Vec<String> = lines.into_iter().take(clip_count).collect();
            if let Some(i) = lines.iter().position(|l| l.trim().is_empty()) {
                return Err(Error::InvalidArgument(format!("{} line {} is empty", path.display(), i + 1)));
            }
            Ok((PromptMode::Adaptive, lines))
        }
    }
}

/// Renders one clip into `clip_dir`: nine frames plus `clip.json`.
fn render_clip(
    src: &ImageBuffer,
    task: TaskKind,
    id: &str,
    clip_seed: u64,
    source_id: &str,
    clip_dir: &Path,
) -> Result<()> {
    fs::create_dir_all(clip_dir).map_err(|e| Error::io(clip_dir, e))?;
    let mut frames = ClipFrames::new(src, task, clip_seed);
    let meta = ClipMeta {
        clip_id: id.to_owned(),
        task: task.as_str().to_owned(),
        clip_seed,
        source_id: source_id.to_owned(),
        fps: CLIP_FPS,
        width: src.width(),
        height: src.height(),
        params: ClipParams::from_spec(frames.spec()),
    };
    for t in 1..=FRAME_COUNT {
        let frame = frames.next().expect("nine frames")?;
        write_png(&frame_path(clip_dir, t), &frame)?;
    }
    write_json(&clip_dir.join(CLIP_META_FILE), &meta)
}

/// Synthesizes a dataset from every PNG in `opts.input_dir`.
///
/// Clip `image_index·clips_per_image + j` draws from
/// `derive_seed(master_seed, clip_index)`, so output does not depend on
/// the rayon pool size or scheduling. Manifest files are written last.
pub fn build_dataset(opts: &BuildOptions) -> Result<DatasetManifest> {
    if opts.clips_per_image == 0 {
        return Err(Error::InvalidArgument("clips per image must be at least 1".into()));
    }
    if opts.width == 0 || opts.height == 0 {
        return Err(Error::InvalidArgument("target dimensions must be positive".into()));
    }
    let sources = list_source_images(&opts.input_dir)?;
    if sources.is_empty() {
        return Err(Error::EmptyInput(opts.input_dir.clone()));
    }
    let clip_count = sources.len() * opts.clips_per_image;
    let (prompt_mode, prompts) = resolve_prompts(opts, clip_count)?;
    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;

    let per_image: Vec<Vec<ClipEntry>> = sources
        .par_iter()
        .enumerate()
        .map(|(image_index, path)| {
            let source_id = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
            let prepared = prepare_source(&read_png(path)?, opts.width, opts.height)?;
            (0..opts.clips_per_image)
                .map(|j| {
                    let clip_index = image_index * opts.clips_per_image + j;
                    let id = clip_id(clip_index);
                    let seed = derive_seed(opts.master_seed, clip_index as u64);
                    render_clip(&prepared, opts.task, &id, seed, &source_id, &opts.out_dir.join(&id))?;
                    Ok(ClipEntry {
                        path: id.clone(),
                        prompt: PromptRecord { clip_id: id, text: prompts[clip_index].clone(), mode: prompt_mode },
                        clip_seed: seed,
                        source_id: source_id.clone(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let manifest = DatasetManifest {
        root: opts.out_dir.clone(),
        task: opts.task,
        master_seed: opts.master_seed,
        prompt_mode,
        width: opts.width,
        height: opts.height,
        fps: CLIP_FPS,
        clips: per_image.into_iter().flatten().collect(),
    };
    write_manifest(&manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_and_crop_dims() {
        let big = ImageBuffer::filled(2040, 1356, [0.4; 3]).unwrap();
        let scale = (1360.0f64 / 2040.0).max(768.0 / 1356.0);
        assert_eq!(((2040.0 * scale).round(), (1356.0 * scale).round()), (1360.0, 904.0));
        assert_eq!(prepare_source(&big, 1360, 768).unwrap().dims(), (1360, 768));

        let exact = progdeg_core::scene::synthetic_scene(136, 77, 1);
        assert_eq!(prepare_source(&exact, 136, 77).unwrap(), exact);

        let small = progdeg_core::scene::synthetic_scene(68, 38, 2);
        let up = prepare_source(&small, 136, 76).unwrap();
        assert_eq!(up, resize(&small, 136, 76).unwrap());
    }

    #[test]
    fn center_crop_offset() {
        // 8×4 → 4×4: scale 1, crop columns 2..6
        let img = ImageBuffer::from_fn(8, 4, |x, _| [x as f64 / 8.0; 3]).unwrap();
        let out = prepare_source(&img, 4, 4).unwrap();
        assert_eq!(out.pixel(0, 0), img.pixel(2, 0));
    }

    #[test]
    fn clip_params_reconstruct_spec() {
        let spec = DegradationSpec::Blur(BlurSchedule::new(12.5, 77.0).unwrap());
        let params = ClipParams::from_spec(&spec);
        let json = serde_json::to_string(&params).unwrap();
        let back: ClipParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_spec().unwrap(), spec);

        let low = DegradationSpec::LowLight(LowLightSchedule::new(0.03, 0.25).unwrap());
        let back: ClipParams = serde_json::from_str(&serde_json::to_string(&ClipParams::from_spec(&low)).unwrap()).unwrap();
        assert_eq!(back.to_spec().unwrap(), low);
    }

    #[test]
    fn uniform_prompts_per_task() {
        assert!(default_uniform_prompt(TaskKind::Resolution).ends_with("Nothing moves. Static image."));
        assert_eq!(clip_id(12), "clip_000012");
    }
}
