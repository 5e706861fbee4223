mod common;

use std::fs;

use progdeg::core::degradation::TaskKind;
use progdeg::dataset::{
    build_dataset, default_uniform_prompt, load_manifest, read_clip_meta, BuildOptions, PromptMode,
    PromptSource, PROMPTS_FILE, VIDEOS_FILE,
};
use progdeg::Error;

use common::{snapshot, write_corpus};

fn small(input: &std::path::Path, out: &std::path::Path, task: TaskKind) -> BuildOptions {
    let mut opts = BuildOptions::new(input, out, task);
    opts.width = 48;
    opts.height = 32;
    opts
}

#[test]
fn two_clips_per_image_with_uniform_prompt() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 3, 64, 40);
    let opts = small(&tmp.path().join("in"), &tmp.path().join("out"), TaskKind::Blur);
    let built = build_dataset(&opts).unwrap();
    assert_eq!(built.clips.len(), 6);

    let videos = fs::read_to_string(tmp.path().join("out").join(VIDEOS_FILE)).unwrap();
    let prompts = fs::read_to_string(tmp.path().join("out").join(PROMPTS_FILE)).unwrap();
    assert_eq!(videos.lines().count(), 6);
    assert_eq!(prompts.lines().count(), 6);
    assert!(prompts.lines().all(|l| l == default_uniform_prompt(TaskKind::Blur)));
    assert!(!videos.contains('\r'));

    let loaded = load_manifest(&tmp.path().join("out")).unwrap();
    assert_eq!(loaded, built);
    assert_eq!(loaded.prompt_mode, PromptMode::Uniform);
    let sources: Vec<&str> = loaded.clips.iter().map(|c| c.source_id.as_str()).collect();
    assert_eq!(sources, ["scene_00.png", "scene_00.png", "scene_01.png", "scene_01.png", "scene_02.png", "scene_02.png"]);
}

#[test]
fn prompt_file_round_trips_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 2, 40, 40);
    let prompt_file = tmp.path().join("prompts.txt");
    fs::write(&prompt_file, "first\r\nsecond, with comma\nthird\nfourth\nunused\n").unwrap();
    let mut opts = small(&tmp.path().join("in"), &tmp.path().join("out"), TaskKind::LowLight);
    opts.prompts = PromptSource::File(prompt_file);
    build_dataset(&opts).unwrap();
    let loaded = load_manifest(&tmp.path().join("out")).unwrap();
    let texts: Vec<&str> = loaded.clips.iter().map(|c| c.prompt.text.as_str()).collect();
    assert_eq!(texts, ["first", "second, with comma", "third", "fourth"]);
    assert_eq!(loaded.prompt_mode, PromptMode::Adaptive);
}

#[test]
fn short_prompt_file_is_rejected_at_build() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 2, 40, 40);
    let prompt_file = tmp.path().join("prompts.txt");
    fs::write(&prompt_file, "one\ntwo\n").unwrap();
    let mut opts = small(&tmp.path().join("in"), &tmp.path().join("out"), TaskKind::Blur);
    opts.prompts = PromptSource::File(prompt_file);
    assert!(matches!(build_dataset(&opts), Err(Error::InvalidArgument(_))));
}

#[test]
fn mismatched_line_counts_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 3, 40, 40);
    let out = tmp.path().join("out");
    build_dataset(&small(&tmp.path().join("in"), &out, TaskKind::Resolution)).unwrap();
    let prompts = fs::read_to_string(out.join(PROMPTS_FILE)).unwrap();
    let truncated: String = prompts.lines().take(5).map(|l| format!("{l}\n")).collect();
    fs::write(out.join(PROMPTS_FILE), truncated).unwrap();
    match load_manifest(&out) {
        Err(Error::Format(msg)) => assert!(msg.contains('6') && msg.contains('5'), "{msg}"),
        other => panic!("expected format error, got {other:?}"),
    }
}

#[test]
fn backslash_paths_normalize_and_missing_dirs_dangle() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 1, 40, 40);
    let out = tmp.path().join("out");
    build_dataset(&small(&tmp.path().join("in"), &out, TaskKind::Blur)).unwrap();

    let nested = out.join("clips");
    fs::create_dir_all(&nested).unwrap();
    fs::rename(out.join("clip_000000"), nested.join("clip_000000")).unwrap();
    fs::write(out.join(VIDEOS_FILE), "clips\\clip_000000\nclip_000001\n").unwrap();
    let loaded = load_manifest(&out).unwrap();
    assert_eq!(loaded.clips[0].path, "clips/clip_000000");
    assert_eq!(loaded.clips[0].clip_id(), "clip_000000");

    fs::remove_dir_all(out.join("clip_000001")).unwrap();
    assert!(matches!(load_manifest(&out), Err(Error::DanglingReference(_))));
}

#[test]
fn empty_corpus_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir_all(tmp.path().join("in")).unwrap();
    fs::write(tmp.path().join("in").join("notes.txt"), "not an image").unwrap();
    let opts = small(&tmp.path().join("in"), &tmp.path().join("out"), TaskKind::Blur);
    assert!(matches!(build_dataset(&opts), Err(Error::EmptyInput(_))));
}

#[test]
fn rebuild_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 2, 70, 50);
    for task in TaskKind::ALL {
        let mut opts = small(&tmp.path().join("in"), &tmp.path().join(format!("a_{task}")), task);
        opts.master_seed = 99;
        build_dataset(&opts).unwrap();
        opts.out_dir = tmp.path().join(format!("b_{task}"));
        build_dataset(&opts).unwrap();
        assert_eq!(snapshot(&tmp.path().join(format!("a_{task}"))), snapshot(&opts.out_dir));
    }
}

#[test]
fn clip_metadata_describes_schedule() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), 1, 40, 40);
    let out = tmp.path().join("out");
    let built = build_dataset(&small(&tmp.path().join("in"), &out, TaskKind::Blur)).unwrap();
    let meta = read_clip_meta(&out.join("clip_000001")).unwrap();
    assert_eq!(meta.clip_seed, built.clips[1].clip_seed);
    assert_eq!((meta.width, meta.height, meta.fps), (48, 32, 5));
    assert_eq!(meta.task().unwrap(), TaskKind::Blur);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("clip_000001/clip.json")).unwrap()).unwrap();
    let k_t = json["params"]["k_t"].as_array().unwrap();
    assert_eq!(k_t.len(), 9);
    assert_eq!(k_t[8].as_f64(), Some(0.0));
}
