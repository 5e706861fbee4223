#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use progdeg::core::scene::synthetic_scene;
use progdeg::frames::write_png;

/// Writes `count` procedural scenes as `scene_00.png`, `scene_01.png`, ….
pub fn write_corpus(dir: &Path, count: usize, width: usize, height: usize) -> Vec<PathBuf> {
    fs::create_dir_all(dir).unwrap();
    (0..count)
        .map(|i| {
            let path = dir.join(format!("scene_{i:02}.png"));
            write_png(&path, &synthetic_scene(width, height, 1000 + i as u64)).unwrap();
            path
        })
        .collect()
}

/// Every file under `root` as (relative path, bytes), sorted by path.
pub fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn run_cli(args: &[&str]) -> i32 {
    let argv = std::iter::once("progdeg").chain(args.iter().copied());
    progdeg::cli::run(argv)
}
