//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data or
//! IO error, 3 external-metric error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use progdeg_core::baselines::TrajectoryKind;
use progdeg_core::degradation::{TaskKind, CLIP_HEIGHT, CLIP_WIDTH};
use progdeg_core::evaluation::summarize;
use progdeg_core::metrics::MetricKind;

use crate::dataset::{build_dataset, load_manifest, read_clip_meta, BuildOptions, PromptSource};
use crate::external::ExternalMetric;
use crate::harness::{evaluate_dataset, run_oracle, EvalOptions, DEFAULT_RL_ITERS_PER_STEP};
use crate::report::{read_report_csv, write_report_csv, write_summary_json};
use crate::trajectories::import_trajectories;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "progdeg", version, about = "Progressive degradation datasets and frame-wise restoration evaluation")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a progressive degradation dataset from a folder of PNGs.
    Build(BuildArgs),
    /// Write baseline restoration trajectories for every clip of a dataset.
    Oracle(OracleArgs),
    /// Score trajectories frame by frame against each clip's clean frame.
    Eval(EvalArgs),
    /// Re-aggregate an existing report CSV into a summary.
    Report(ReportArgs),
    /// Print a clip's metadata and schedule.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Resolution,
    Blur,
    Lowlight,
}

impl From<TaskArg> for TaskKind {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Resolution => TaskKind::Resolution,
            TaskArg::Blur => TaskKind::Blur,
            TaskArg::Lowlight => TaskKind::LowLight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PromptModeArg {
    Uniform,
    File,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Folder of source PNGs.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    clips_per_image: u32,
    #[arg(long, default_value_t = CLIP_WIDTH as u32, value_parser = clap::value_parser!(u32).range(1..))]
    width: u32,
    #[arg(long, default_value_t = CLIP_HEIGHT as u32, value_parser = clap::value_parser!(u32).range(1..))]
    height: u32,
    #[arg(long, value_enum, default_value = "uniform")]
    prompt_mode: PromptModeArg,
    /// One prompt per line, in clip order (with --prompt-mode file).
    #[arg(long, conflicts_with = "uniform_text")]
    prompt_file: Option<PathBuf>,
    /// Replaces the task's default uniform prompt.
    #[arg(long)]
    uniform_text: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Interp,
    Unsharp,
    Exposure,
    Rl,
}

impl From<KindArg> for TrajectoryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Interp => TrajectoryKind::Interp,
            KindArg::Unsharp => TrajectoryKind::Unsharp,
            KindArg::Exposure => TrajectoryKind::ExposureLift,
            KindArg::Rl => TrajectoryKind::RlDeconv,
        }
    }
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    out: PathBuf,
    /// Richardson–Lucy iterations between consecutive frames.
    #[arg(long, default_value_t = DEFAULT_RL_ITERS_PER_STEP)]
    iters_per_step: usize,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    trajectories: PathBuf,
    /// Comma-separated subset of psnr, ssim, external.
    #[arg(long, value_delimiter = ',', default_value = "psnr,ssim")]
    metrics: Vec<String>,
    /// Command run as `<cmd> <ref.png> <test.png>`, printing one number.
    #[arg(long, conflicts_with = "external_csv")]
    external_cmd: Option<String>,
    /// CSV with columns clip_id,frame,value.
    #[arg(long)]
    external_csv: Option<PathBuf>,
    /// Per-frame report CSV.
    #[arg(long)]
    out: PathBuf,
    /// Summary JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct InspectArgs {
    /// Clip directory.
    #[arg(long)]
    clip: PathBuf,
}

/// Usage problems detected after parsing.
struct Usage(String);

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Run with --help for usage.");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> std::result::Result<(), Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n as usize);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Run(Error::InvalidArgument(format!("thread pool: {e}"))))?;
    pool.install(|| match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Report(a) => cmd_report(a),
        Command::Inspect(a) => cmd_inspect(a),
    })
}

fn require_dir(path: &Path, what: &str) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} '{}' is not a directory", path.display())))
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} '{}' does not exist", path.display())))
    }
}

fn cmd_build(a: BuildArgs) -> std::result::Result<(), Failure> {
    let prompts = match (a.prompt_mode, a.prompt_file, a.uniform_text) {
        (PromptModeArg::File, Some(file), None) => PromptSource::File(file),
        (PromptModeArg::File, None, _) => return Err(Usage("--prompt-mode file requires --prompt-file".into()).into()),
        (PromptModeArg::Uniform, Some(_), _) => {
            return Err(Usage("--prompt-file is only valid with --prompt-mode file".into()).into())
        }
        (PromptModeArg::Uniform, None, text) => PromptSource::Uniform(text),
        (PromptModeArg::File, Some(_), Some(_)) => unreachable!("rejected by clap"),
    };
    require_dir(&a.input, "input")?;
    if let PromptSource::File(f) = &prompts {
        require_file(f, "prompt file")?;
    }
    let opts = BuildOptions {
        input_dir: a.input,
        out_dir: a.out,
        task: a.task.into(),
        master_seed: a.seed,
        clips_per_image: a.clips_per_image as usize,
        width: a.width as usize,
        height: a.height as usize,
        prompts,
    };
    let manifest = build_dataset(&opts)?;
    eprintln!("built {} {} clips into {}", manifest.clips.len(), manifest.task, opts.out_dir.display());
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> std::result::Result<(), Failure> {
    require_dir(&a.dataset, "dataset")?;
    if a.iters_per_step == 0 {
        return Err(Usage("--iters-per-step must be positive".into()).into());
    }
    let manifest = load_manifest(&a.dataset)?;
    run_oracle(&manifest, a.kind.into(), a.iters_per_step, &a.out)?;
    eprintln!("wrote {} trajectories to {}", manifest.clips.len(), a.out.display());
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> std::result::Result<(), Failure> {
    let mut metrics = Vec::new();
    for name in &a.metrics {
        let kind: MetricKind = name.trim().parse().map_err(|e: progdeg_core::Error| Usage(e.to_string()))?;
        if !metrics.contains(&kind) {
            metrics.push(kind);
        }
    }
    metrics.sort();
    let wants_external = metrics.contains(&MetricKind::External);
    let external = match (&a.external_cmd, &a.external_csv) {
        (Some(cmd), None) => Some(ExternalMetric::exec(cmd).map_err(|e| Usage(e.to_string()))?),
        (None, Some(csv)) => {
            require_file(csv, "external CSV")?;
            Some(ExternalMetric::from_csv(csv)?)
        }
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("rejected by clap"),
    };
    if wants_external != external.is_some() {
        return Err(Usage(
            "the external metric needs exactly one of --external-cmd / --external-csv, and they need it listed in --metrics".into(),
        )
        .into());
    }
    require_dir(&a.dataset, "dataset")?;
    require_dir(&a.trajectories, "trajectories")?;

    let manifest = load_manifest(&a.dataset)?;
    let provider = import_trajectories(&a.trajectories, &manifest)?;
    let curves = evaluate_dataset(&manifest, &provider, &EvalOptions { metrics, external })?;
    write_report_csv(&a.out, &curves)?;
    if let Some(path) = &a.summary {
        write_summary_json(path, &summarize(&curves).map_err(Error::from)?)?;
    }
    eprintln!("evaluated {} clips", curves.len());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> std::result::Result<(), Failure> {
    require_file(&a.csv, "report")?;
    let curves = read_report_csv(&a.csv)?;
    write_summary_json(&a.out, &summarize(&curves).map_err(Error::from)?)?;
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> std::result::Result<(), Failure> {
    require_dir(&a.clip, "clip")?;
    let meta = read_clip_meta(&a.clip)?;
    let spec = meta.spec()?;
    println!("{}", serde_json::to_string_pretty(&meta).expect("metadata serializes"));
    println!("schedule ({}):", spec.task());
    println!("{spec:#?}");
    Ok(())
}
