//! Versioned report assembly and emission.
//!
//! JSON objects are emitted with sorted keys and floats in shortest
//! round-trip form, so identical inputs give identical bytes.

use std::fs;
use std::path::Path;

use deidkit::identity::{DistanceRow, MeanStd};
use deidkit::keypoint::{EvalMode, HISTOGRAM_BINS};
use serde_json::{json, Map, Value};

use crate::config::ReportFormat;
use crate::deid::{StageLogs, TrainSummary};
use crate::error::{CliError, CliResult};
use crate::eval::{IdentityReport, KeypointReport};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub provenance: Provenance,
    pub stages: StageLogs,
    pub swap_training: Option<TrainSummary>,
    pub keypoints: Option<KeypointReport>,
    pub identity: Option<IdentityReport>,
}

fn mean_std(m: &MeanStd<f64>) -> Value {
    json!({ "mean": m.mean, "std": m.std })
}

fn row_json(r: &DistanceRow<f64>) -> Value {
    json!({
        "subset": r.subset,
        "kind": r.kind,
        "count": r.count,
        "intra": mean_std(&r.intra),
        "to_original": r.to_original.as_ref().map(mean_std),
        "to_average_original": r.to_average_original.as_ref().map(mean_std),
        "to_average_target": mean_std(&r.to_average_target),
    })
}

fn mode_name(mode: EvalMode) -> &'static str {
    match mode {
        EvalMode::Fraction => "fraction",
        EvalMode::Ranked => "ranked",
    }
}

fn keypoints_json(k: &KeypointReport) -> Value {
    let mut methods = Map::new();
    for (name, m) in &k.methods {
        let s = &m.summary;
        methods.insert(
            name.clone(),
            json!({
                "ap": s.ap_mean,
                "ar": s.ar_mean,
                "per_threshold": s.per_threshold.iter()
                    .map(|t| json!({ "threshold": t.threshold, "ap": t.ap, "ar": t.ar }))
                    .collect::<Vec<_>>(),
                "evaluable": s.evaluable,
                "unevaluable": s.unevaluable,
                "unmatched": m.unmatched,
                "oks_histogram": s.oks_histogram.counts,
                "per_keypoint": s.per_keypoint.iter()
                    .map(|h| json!({ "keypoint": h.keypoint, "counts": h.histogram.counts }))
                    .collect::<Vec<_>>(),
            }),
        );
    }
    json!({
        "mode": mode_name(k.mode),
        "histogram_bins": HISTOGRAM_BINS,
        "original_frames": k.original_frames,
        "methods": methods,
    })
}

fn identity_json(i: &IdentityReport) -> Value {
    json!({
        "target_subset": i.table.target_subset,
        "pairing_mode": i.table.pairing_mode,
        "threshold": i.threshold,
        "descriptors": i.descriptors,
        "dimension": i.dimension,
        "swap_sources": i.swap_sources,
        "distance_table": i.table.rows.iter().map(row_json).collect::<Vec<_>>(),
        "roc": {
            "auc": i.roc.auc,
            "points": i.roc.points.iter()
                .map(|p| json!({ "threshold": p.threshold, "far": p.far, "tar": p.tar }))
                .collect::<Vec<_>>(),
        },
        "at_threshold": { "tar": i.tar, "far": i.far },
    })
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut inputs = Map::new();
        if let Some(k) = &self.keypoints {
            inputs.insert("original_pose_frames".into(), json!(k.original_frames));
        }
        if let Some(i) = &self.identity {
            inputs.insert("descriptors".into(), json!(i.descriptors));
        }
        if let Some(first) = self.stages.values().next() {
            inputs.insert("frames".into(), json!(first.input_frames));
        }
        let mut root = Map::new();
        root.insert("schema_version".into(), json!(SCHEMA_VERSION));
        root.insert(
            "provenance".into(),
            json!({
                "tool": "deidkit",
                "tool_version": env!("CARGO_PKG_VERSION"),
                "config_sha256": self.provenance.config_sha256,
                "seed": self.provenance.seed,
                "inputs": inputs,
            }),
        );
        if !self.stages.is_empty() {
            let stages: Map<String, Value> = self
                .stages
                .values()
                .map(|s| (s.method.name().to_owned(), serde_json::to_value(s).expect("log serializes")))
                .collect();
            root.insert("stages".into(), Value::Object(stages));
        }
        if let Some(t) = &self.swap_training {
            root.insert("swap_training".into(), serde_json::to_value(t).expect("summary serializes"));
        }
        if let Some(k) = &self.keypoints {
            root.insert("keypoints".into(), keypoints_json(k));
        }
        if let Some(i) = &self.identity {
            root.insert("identity".into(), identity_json(i));
        }
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        text.push('\n');
        text
    }

    /// Writes `report.json` and/or the CSV tables under `report/`.
    pub fn emit(&self, out_dir: &Path, formats: &[ReportFormat]) -> CliResult<()> {
        fs::create_dir_all(out_dir).map_err(|e| CliError::write(out_dir, e))?;
        if formats.contains(&ReportFormat::Json) {
            let path = out_dir.join("report.json");
            fs::write(&path, self.to_json_string()).map_err(|e| CliError::write(&path, e))?;
        }
        if formats.contains(&ReportFormat::Csv) {
            let dir = out_dir.join("report");
            fs::create_dir_all(&dir).map_err(|e| CliError::write(&dir, e))?;
            self.write_csv(&dir)?;
        }
        Ok(())
    }

    fn write_csv(&self, dir: &Path) -> CliResult<()> {
        if let Some(k) = &self.keypoints {
            let mut metrics = vec![vec!["method".into(), "threshold".into(), "ap".into(), "ar".into()]];
            let mut instances = vec![vec!["method".into(), "frame_id".into(), "oks".into()]];
            for (name, m) in &k.methods {
                for t in &m.summary.per_threshold {
                    metrics.push(vec![name.clone(), t.threshold.to_string(), t.ap.to_string(), t.ar.to_string()]);
                }
                metrics.push(vec![
                    name.clone(),
                    "mean".into(),
                    m.summary.ap_mean.to_string(),
                    m.summary.ar_mean.to_string(),
                ]);
                for (id, v) in &m.summary.instance_oks {
                    instances.push(vec![name.clone(), id.clone(), v.to_string()]);
                }
            }
            write_table(&dir.join("keypoint_metrics.csv"), &metrics)?;
            write_table(&dir.join("instance_oks.csv"), &instances)?;
        }
        if let Some(i) = &self.identity {
            let opt = |m: &Option<MeanStd<f64>>, f: fn(&MeanStd<f64>) -> f64| m.as_ref().map(|v| f(v).to_string()).unwrap_or_default();
            let mut rows = vec![[
                "subset", "kind", "count", "intra_mean", "intra_std", "to_original_mean", "to_original_std",
                "to_average_original_mean", "to_average_original_std", "to_average_target_mean", "to_average_target_std",
            ]
            .map(String::from)
            .to_vec()];
            for r in &i.table.rows {
                rows.push(vec![
                    r.subset.clone(),
                    serde_json::to_value(r.kind).expect("kind serializes").as_str().unwrap_or_default().to_owned(),
                    r.count.to_string(),
                    r.intra.mean.to_string(),
                    r.intra.std.to_string(),
                    opt(&r.to_original, |m| m.mean),
                    opt(&r.to_original, |m| m.std),
                    opt(&r.to_average_original, |m| m.mean),
                    opt(&r.to_average_original, |m| m.std),
                    r.to_average_target.mean.to_string(),
                    r.to_average_target.std.to_string(),
                ]);
            }
            write_table(&dir.join("distance_table.csv"), &rows)?;
            let mut roc = vec![vec!["threshold".into(), "far".into(), "tar".into()]];
            for p in &i.roc.points {
                roc.push(vec![p.threshold.to_string(), p.far.to_string(), p.tar.to_string()]);
            }
            write_table(&dir.join("roc.csv"), &roc)?;
        }
        Ok(())
    }
}

fn write_table(path: &Path, rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::write(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::write(path, e))?;
    }
    w.flush().map_err(|e| CliError::write(path, e))
}
