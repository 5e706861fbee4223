//! Per-frame report CSV and summary JSON.

use std::collections::BTreeMap;
use std::path::Path;

use progdeg_core::evaluation::{FrameCurve, MetricSeries, Summary};
use progdeg_core::metrics::MetricKind;
use progdeg_core::FRAME_COUNT;
use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

pub const REPORT_HEADER: [&str; 5] = ["clip_id", "frame", "psnr_db", "ssim", "external"];
const METRIC_COLUMNS: [MetricKind; 3] = [MetricKind::Psnr, MetricKind::Ssim, MetricKind::External];

/// Formats a metric value; `+∞` becomes `inf`.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_owned()
    } else {
        v.to_string()
    }
}

pub fn write_report_csv(path: &Path, curves: &[FrameCurve]) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_owned(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(REPORT_HEADER).map_err(csv_err)?;
    for curve in curves {
        for t0 in 0..FRAME_COUNT {
            let mut record = vec![curve.clip_id.clone(), (t0 + 1).to_string()];
            for kind in METRIC_COLUMNS {
                record.push(curve.get(kind).map(|v| format_value(v[t0])).unwrap_or_default());
            }
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a report back into curves, in order of first appearance. A metric
/// column counts as present when its first row is nonempty, and must then be
/// filled on every row.
pub fn read_report_csv(path: &Path) -> Result<Vec<FrameCurve>> {
    let csv_err = |source| Error::Csv { path: path.to_owned(), source };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != REPORT_HEADER {
        return Err(Error::Format(format!(
            "{}: expected header {}",
            path.display(),
            REPORT_HEADER.join(",")
        )));
    }

    let mut present: Option<Vec<bool>> = None;
    let mut order: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, Vec<Option<[Option<f64>; 3]>>> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let bad = |what: &str| Error::Format(format!("{} row {}: {what}", path.display(), line + 2));
        let clip = record[0].to_owned();
        let frame: usize = record[1].parse().map_err(|_| bad("frame is not an integer"))?;
        if !(1..=FRAME_COUNT).contains(&frame) {
            return Err(bad("frame outside 1..=9"));
        }
        let mut vals = [None; 3];
        for (i, v) in vals.iter_mut().enumerate() {
            let field = record[2 + i].trim();
            if !field.is_empty() {
                *v = Some(field.parse::<f64>().map_err(|_| bad("unparseable metric value"))?);
            }
        }
        let mask: Vec<bool> = vals.iter().map(Option::is_some).collect();
        match &present {
            None => present = Some(mask),
            Some(p) if *p != mask => return Err(bad("metric columns filled inconsistently")),
            _ => {}
        }
        let slots = rows.entry(clip.clone()).or_insert_with(|| {
            order.push(clip.clone());
            vec![None; FRAME_COUNT]
        });
        if slots[frame - 1].replace(vals).is_some() {
            return Err(bad("duplicate clip/frame row"));
        }
    }
    let present = present.ok_or_else(|| Error::Format(format!("{} has no rows", path.display())))?;

    order
        .into_iter()
        .map(|clip| {
            let slots = &rows[&clip];
            let mut series = Vec::new();
            for (i, kind) in METRIC_COLUMNS.into_iter().enumerate() {
                if !present[i] {
                    continue;
                }
                let mut values = [0.0; FRAME_COUNT];
                for (t0, slot) in slots.iter().enumerate() {
                    let vals = slot.ok_or_else(|| {
                        Error::Format(format!("{}: clip {clip} lacks frame {}", path.display(), t0 + 1))
                    })?;
                    values[t0] = vals[i].expect("mask checked");
                }
                series.push(MetricSeries { kind, values });
            }
            Ok(FrameCurve { clip_id: clip, series })
        })
        .collect()
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    } else if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        Value::Null
    }
}

#[derive(Debug, Serialize)]
struct SummaryJson {
    per_frame_mean: BTreeMap<&'static str, Vec<Value>>,
    monotone_fraction: BTreeMap<&'static str, Value>,
    net_delta: BTreeMap<&'static str, Value>,
    best_frame: BTreeMap<&'static str, usize>,
    clip_count: usize,
    psnr_inf_counts: [usize; FRAME_COUNT],
}

pub fn summary_to_json(summary: &Summary) -> Value {
    let mut s = SummaryJson {
        per_frame_mean: BTreeMap::new(),
        monotone_fraction: BTreeMap::new(),
        net_delta: BTreeMap::new(),
        best_frame: BTreeMap::new(),
        clip_count: summary.clip_count,
        psnr_inf_counts: summary.psnr_inf_counts,
    };
    for m in &summary.metrics {
        let name = m.kind.name();
        s.per_frame_mean.insert(name, m.per_frame_mean.iter().map(|&v| json_number(v)).collect());
        s.monotone_fraction.insert(name, json_number(m.monotone_fraction));
        s.net_delta.insert(name, json_number(m.net_delta));
        s.best_frame.insert(name, m.best_frame);
    }
    serde_json::to_value(s).expect("summary serializes")
}

pub fn write_summary_json(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&summary_to_json(summary))
        .map_err(|source| Error::Json { path: path.to_owned(), source })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use progdeg_core::evaluation::summarize;

    fn sample() -> Vec<FrameCurve> {
        let mut p = [25.0; 9];
        p[8] = f64::INFINITY;
        vec![
            FrameCurve {
                clip_id: "clip_000001".into(),
                series: vec![
                    MetricSeries { kind: MetricKind::Psnr, values: p },
                    MetricSeries { kind: MetricKind::Ssim, values: [0.5; 9] },
                ],
            },
            FrameCurve {
                clip_id: "clip_000000".into(),
                series: vec![
                    MetricSeries { kind: MetricKind::Psnr, values: core::array::from_fn(|i| 20.0 + i as f64 * 0.1) },
                    MetricSeries { kind: MetricKind::Ssim, values: core::array::from_fn(|i| 0.3 + i as f64 * 0.01) },
                ],
            },
        ]
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        write_report_csv(&path, &sample()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("clip_id,frame,psnr_db,ssim,external\n"));
        assert!(text.contains("clip_000001,9,inf,0.5,\n"));
        assert_eq!(read_report_csv(&path).unwrap(), sample());
    }

    #[test]
    fn inconsistent_columns_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "clip_id,frame,psnr_db,ssim,external\nc,1,20,,\nc,2,,0.5,\n").unwrap();
        assert!(matches!(read_report_csv(&path), Err(Error::Format(_))));
        std::fs::write(&path, "clip,frame\nc,1\n").unwrap();
        assert!(matches!(read_report_csv(&path), Err(Error::Format(_))));
    }

    #[test]
    fn summary_json_shape() {
        let summary = summarize(&sample()).unwrap();
        let v = summary_to_json(&summary);
        assert_eq!(v["clip_count"], 2);
        assert_eq!(v["psnr_inf_counts"][8], 1);
        assert_eq!(v["per_frame_mean"]["psnr_db"].as_array().unwrap().len(), 9);
        // frame 9 averages only the finite entry (20.8), so frame 8 wins
        assert_eq!(v["best_frame"]["psnr_db"], 8);
        assert!(v["per_frame_mean"].get("external").is_none());
    }
}
