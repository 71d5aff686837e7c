//! Keypoint and identity evaluation over the configured inputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use deidkit::formats::{parse_pose_json, read_descriptor_csv, read_pairing_csv};
use deidkit::identity::{
    acceptance_distances, distance_table, infer_swap_sources, roc, DistanceReport, PairingMode, RocCurve,
};
use deidkit::keypoint::{evaluate_set, map_body25_to_coco17, EvalMode, EvalSummary, KeypointInstance, OksConfig, Skeleton};
use rayon::prelude::*;

use crate::config::{IdentitySection, PoseSection};
use crate::error::CliResult;

/// Pose files of one directory keyed by frame id, mapped to COCO17.
pub fn load_pose_dir(dir: &Path, select_largest: bool) -> CliResult<BTreeMap<String, KeypointInstance<f64>>> {
    let entries = fs::read_dir(dir).map_err(|e| deidkit::Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| deidkit::Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    let parsed = paths
        .par_iter()
        .map(|p| -> CliResult<KeypointInstance<f64>> {
            let inst = parse_pose_json::<f64>(p, select_largest)?;
            Ok(match inst.skeleton() {
                Skeleton::Coco17 => inst,
                Skeleton::Body25 => map_body25_to_coco17(&inst)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = BTreeMap::new();
    for (inst, path) in parsed.into_iter().zip(&paths) {
        let id = inst.frame_id().to_owned();
        if out.insert(id.clone(), inst).is_some() {
            return Err(deidkit::Error::format(path, format!("duplicate frame id {id:?} in {}", dir.display())).into());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodEval {
    pub summary: EvalSummary<f64>,
    /// Frame ids present on only one side of the join.
    pub unmatched: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeypointReport {
    pub mode: EvalMode,
    pub original_frames: usize,
    pub methods: BTreeMap<String, MethodEval>,
}

/// Joins each method's poses to the originals by frame id and scores them.
pub fn run_keypoint_eval(pose: &PoseSection, cfg: &OksConfig<f64>, mode: EvalMode) -> CliResult<KeypointReport> {
    let original = load_pose_dir(&pose.original, pose.select_largest)?;
    let mut methods = BTreeMap::new();
    for (name, dir) in &pose.methods {
        let predicted = load_pose_dir(dir, pose.select_largest)?;
        let mut pairs = Vec::new();
        let mut unmatched = Vec::new();
        for (id, gt) in &original {
            match predicted.get(id) {
                Some(p) => pairs.push((gt.clone(), p.clone())),
                None => unmatched.push(id.clone()),
            }
        }
        unmatched.extend(predicted.keys().filter(|id| !original.contains_key(*id)).cloned());
        unmatched.sort();
        if !unmatched.is_empty() {
            log::warn!("{name}: {} frame ids without a partner excluded", unmatched.len());
        }
        if pairs.is_empty() {
            return Err(deidkit::Error::EmptyInput("no frame ids shared between original and method poses").into());
        }
        let summary = evaluate_set(&pairs, cfg, mode)?;
        methods.insert(name.clone(), MethodEval { summary, unmatched });
    }
    Ok(KeypointReport {
        mode,
        original_frames: original.len(),
        methods,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub threshold: f64,
    pub descriptors: usize,
    pub dimension: usize,
    pub swap_sources: BTreeMap<String, String>,
    pub table: DistanceReport<f64>,
    pub roc: RocCurve<f64>,
    /// Share of swapped descriptors accepted as the target at `threshold`.
    pub tar: f64,
    /// Share of swapped descriptors accepted as their original at `threshold`.
    pub far: f64,
}

fn accepted_share(distances: &[f64], threshold: f64) -> f64 {
    distances.iter().filter(|&&d| d < threshold).count() as f64 / distances.len() as f64
}

pub fn run_identity_eval(section: &IdentitySection) -> CliResult<IdentityReport> {
    let descriptors = read_descriptor_csv::<f64>(&section.descriptors)?;
    let pairing = match &section.pairing {
        Some(p) => read_pairing_csv(p)?,
        None => BTreeMap::new(),
    };
    let sources = infer_swap_sources(descriptors.iter().map(|d| d.subset.as_str()))?;
    if sources.is_empty() {
        return Err(deidkit::Error::EmptyInput("no swapped_* subsets among the descriptors").into());
    }
    let mode: PairingMode = section.pairing_mode.into();
    let table = distance_table(&descriptors, &pairing, &sources, &section.target_subset, mode)?;
    let (genuine, impostor) = acceptance_distances(&descriptors, &sources, &section.target_subset)?;
    let curve = roc(&genuine, &impostor)?;
    Ok(IdentityReport {
        threshold: section.threshold,
        descriptors: descriptors.len(),
        dimension: descriptors.first().map_or(0, |d| d.dim()),
        swap_sources: sources,
        table,
        roc: curve,
        tar: accepted_share(&genuine, section.threshold),
        far: accepted_share(&impostor, section.threshold),
    })
}
