//! Values of a metric computed outside this toolchain (a learned perceptual
//! distance, typically), either by running a command per frame pair or by
//! looking them up in a CSV table.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use serde::Deserialize;

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum ExternalMetric {
    /// Runs `program args… <ref_path> <test_path>`; stdout must hold one number.
    Exec { program: String, args: Vec<String> },
    /// Rows `clip_id,frame,value`.
    Table(HashMap<(String, usize), f64>),
}

#[derive(Debug, Deserialize)]
struct Row {
    clip_id: String,
    frame: usize,
    value: f64,
}

impl ExternalMetric {
    /// Splits `command` on whitespace into program and leading arguments.
    pub fn exec(command: &str) -> Result<Self> {
        let mut parts = command.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("external metric command is empty".into()))?;
        Ok(ExternalMetric::Exec { program, args: parts.collect() })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let csv_err = |source| Error::Csv { path: path.to_owned(), source };
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err)?;
        let mut table = HashMap::new();
        for row in reader.deserialize::<Row>() {
            let row = row.map_err(csv_err)?;
            table.insert((row.clip_id, row.frame), row.value);
        }
        Ok(ExternalMetric::Table(table))
    }

    pub fn measure(&self, ref_path: &Path, test_path: &Path, clip_id: &str, frame: usize) -> Result<f64> {
        match self {
            ExternalMetric::Exec { program, args } => run_command(program, args, ref_path, test_path),
            ExternalMetric::Table(table) => table
                .get(&(clip_id.to_owned(), frame))
                .copied()
                .ok_or_else(|| Error::Lookup(format!("no row for clip '{clip_id}', frame {frame}"))),
        }
    }
}

fn run_command(program: &str, args: &[String], ref_path: &Path, test_path: &Path) -> Result<f64> {
    let output = Command::new(program)
        .args(args)
        .arg(ref_path)
        .arg(test_path)
        .output()
        .map_err(|e| Error::External { message: format!("could not run '{program}': {e}"), output: String::new() })?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    if !output.status.success() {
        return Err(Error::External {
            message: format!("'{program}' exited with {}", output.status),
            output: stderr.trim_end().to_owned(),
        });
    }
    stdout.trim().parse::<f64>().map_err(|_| Error::External {
        message: format!("'{program}' printed no single number"),
        output: format!("stdout: {}\nstderr: {}", stdout.trim_end(), stderr.trim_end()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lpips.csv");
        std::fs::write(&path, "clip_id,frame,value\nclip_000001,5,0.316\nclip_000001,6,0.318\n").unwrap();
        let m = ExternalMetric::from_csv(&path).unwrap();
        let p = Path::new("unused");
        assert_eq!(m.measure(p, p, "clip_000001", 5).unwrap(), 0.316);
        let err = m.measure(p, p, "clip_000001", 7).unwrap_err();
        assert!(matches!(err, Error::Lookup(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn malformed_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "clip_id,frame,value\nclip_000001,five,0.3\n").unwrap();
        assert!(matches!(ExternalMetric::from_csv(&path), Err(Error::Csv { .. })));
    }

    #[cfg(unix)]
    #[test]
    fn exec_contract() {
        let p = Path::new("/dev/null");
        let ok = ExternalMetric::Exec { program: "sh".into(), args: vec!["-c".into(), "printf '0.25\\n'".into(), "sh".into()] };
        assert_eq!(ok.measure(p, p, "c", 1).unwrap(), 0.25);

        let fail = ExternalMetric::Exec { program: "sh".into(), args: vec!["-c".into(), "echo broken >&2; exit 1".into(), "sh".into()] };
        match fail.measure(p, p, "c", 1).unwrap_err() {
            Error::External { output, .. } => assert!(output.contains("broken")),
            other => panic!("unexpected {other:?}"),
        }

        let garbage = ExternalMetric::Exec { program: "sh".into(), args: vec!["-c".into(), "echo not-a-number".into(), "sh".into()] };
        assert!(matches!(garbage.measure(p, p, "c", 1), Err(Error::External { .. })));

        let missing = ExternalMetric::exec("/nonexistent/metric-tool").unwrap();
        assert_eq!(missing.measure(p, p, "c", 1).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn empty_command_rejected() {
        assert!(ExternalMetric::exec("   ").is_err());
    }
}
