//! Frame-tree stages: mask/blur de-identification and the desk-scale swap.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use deidkit::faceswap::{
    read_checkpoint, swap, train, write_checkpoint, SwapModel, IMAGE_SIDE,
};
use deidkit::formats::parse_facebox_manifest;
use deidkit::raster::{apply_blur, apply_mask, read_raster, write_raster, FaceBox, RasterFormat, RasterImage, Region};
use deidkit::synth::{gen_identity_dataset, IdentitySpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{FramesSection, SwapSection};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeidMethod {
    Mask,
    Blur,
    Swap,
}

impl DeidMethod {
    pub fn name(self) -> &'static str {
        match self {
            DeidMethod::Mask => "mask",
            DeidMethod::Blur => "blur",
            DeidMethod::Swap => "swap",
        }
    }
}

/// Bookkeeping for one pass over a frame directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageLog {
    pub method: DeidMethod,
    pub input_frames: usize,
    pub processed: usize,
    /// Frame ids with no face box.
    pub skipped: Vec<String>,
}

/// Raster files in `dir`, sorted by name.
pub fn list_frames(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| deidkit::Error::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| deidkit::Error::io(dir, e))?.path();
        if path.is_file() && RasterFormat::from_path(&path).is_some() {
            frames.push(path);
        }
    }
    frames.sort();
    Ok(frames)
}

fn frame_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

type Plan = (Vec<(PathBuf, FaceBox)>, Vec<String>, usize);

/// Frames paired with their face box; frames absent from the manifest are
/// returned separately.
fn plan(frames: &FramesSection) -> CliResult<Plan> {
    let boxes = parse_facebox_manifest(&frames.manifest)?;
    let paths = list_frames(&frames.dir)?;
    let total = paths.len();
    let mut work = Vec::new();
    let mut skipped = Vec::new();
    for p in paths {
        let id = frame_id(&p);
        match boxes.get(&id) {
            Some(b) => work.push((p, b.clone())),
            None => skipped.push(id),
        }
    }
    Ok((work, skipped, total))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))
}

fn write_log(log: &StageLog, dir: &Path) -> CliResult<()> {
    let path = dir.join("log.json");
    let mut text = serde_json::to_string_pretty(log).expect("log serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::write(&path, e))
}

fn run_frames(
    frames: &FramesSection,
    method: DeidMethod,
    out_dir: &Path,
    transform: impl Fn(&RasterImage, &FaceBox) -> RasterImage + Sync,
) -> CliResult<StageLog> {
    let (work, skipped, total) = plan(frames)?;
    let stage_dir = out_dir.join(method.name());
    let frame_dir = stage_dir.join("frames");
    create_dir(&frame_dir)?;
    work.par_iter().try_for_each(|(path, face)| -> CliResult<()> {
        let img = read_raster(path)?;
        let out = transform(&img, face);
        let dest = frame_dir.join(path.file_name().expect("listed files have names"));
        write_raster(&out, &dest).map_err(|e| CliError::write(&dest, e))
    })?;
    for id in &skipped {
        log::warn!("{}: no face box for frame {id}, skipped", method.name());
    }
    let log = StageLog {
        method,
        input_frames: total,
        processed: work.len(),
        skipped,
    };
    write_log(&log, &stage_dir)?;
    Ok(log)
}

/// Masks or blurs every frame with a face box into `<out>/<method>/frames`.
pub fn run_deid(frames: &FramesSection, method: DeidMethod, out_dir: &Path) -> CliResult<StageLog> {
    match method {
        DeidMethod::Mask => run_frames(frames, method, out_dir, apply_mask),
        DeidMethod::Blur => run_frames(frames, method, out_dir, apply_blur),
        DeidMethod::Swap => Err(CliError::Internal("swap frames need a model; use run_swap_apply".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub seed: u64,
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub samples_per_identity: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// Trains the toy swap model on synthetic identities and writes
/// `<out>/swap/model.ckpt` and `<out>/swap/losses.csv`.
pub fn run_swap_train(section: &SwapSection, seed: u64, out_dir: &Path) -> CliResult<(SwapModel<f64>, TrainSummary)> {
    let cfg = section.train_config(seed)?;
    let data = gen_identity_dataset::<f64>(
        &IdentitySpec::default_x(),
        &IdentitySpec::default_y(),
        section.samples_per_identity,
        seed,
    )?;
    let mut model = SwapModel::init(seed);
    let history = train(&mut model, &data, &cfg)?;
    let dir = out_dir.join("swap");
    create_dir(&dir)?;
    let ckpt = dir.join("model.ckpt");
    write_checkpoint(&model, &ckpt).map_err(|e| CliError::write(&ckpt, e))?;
    let losses = dir.join("losses.csv");
    let mut w = csv::Writer::from_path(&losses).map_err(|e| CliError::write(&losses, e))?;
    w.write_record(["step", "loss_x", "loss_y"]).map_err(|e| CliError::write(&losses, e))?;
    for (i, l) in history.iter().enumerate() {
        w.write_record([i.to_string(), l.loss_x.to_string(), l.loss_y.to_string()])
            .map_err(|e| CliError::write(&losses, e))?;
    }
    w.flush().map_err(|e| CliError::write(&losses, e))?;
    let summary = TrainSummary {
        seed,
        steps: cfg.steps,
        batch_size: cfg.batch_size,
        learning_rate: cfg.learning_rate,
        samples_per_identity: section.samples_per_identity,
        initial_loss: history.first().map_or(f64::NAN, |l| l.combined()),
        final_loss: history.last().map_or(f64::NAN, |l| l.combined()),
    };
    Ok((model, summary))
}

fn cell(offset: usize, extent: usize) -> usize {
    (offset * IMAGE_SIDE / extent).min(IMAGE_SIDE - 1)
}

/// Nearest-neighbour resample of the face region to the model's gray input.
fn face_pixels(img: &RasterImage, r: &Region) -> Vec<f64> {
    let (w, h) = (r.x1 - r.x0, r.y1 - r.y0);
    let mut out = Vec::with_capacity(IMAGE_SIDE * IMAGE_SIDE);
    for j in 0..IMAGE_SIDE {
        let y = r.y0 + ((2 * j + 1) * h / (2 * IMAGE_SIDE)).min(h - 1);
        for i in 0..IMAGE_SIDE {
            let x = r.x0 + ((2 * i + 1) * w / (2 * IMAGE_SIDE)).min(w - 1);
            let sum: u32 = (0..img.channels()).map(|c| u32::from(img.get(x, y, c))).sum();
            out.push(f64::from(sum) / (255.0 * img.channels() as f64));
        }
    }
    out
}

/// Replaces the face region by the model's swap of it, upsampled by nearest neighbour.
pub fn swap_face(model: &SwapModel<f64>, img: &RasterImage, face: &FaceBox) -> RasterImage {
    let mut out = img.clone();
    let Some(r) = face.clip(img.width(), img.height()) else {
        return out;
    };
    let swapped = swap(model, &face_pixels(img, &r));
    let (w, h) = (r.x1 - r.x0, r.y1 - r.y0);
    for y in r.y0..r.y1 {
        for x in r.x0..r.x1 {
            let v = swapped[cell(y - r.y0, h) * IMAGE_SIDE + cell(x - r.x0, w)];
            let byte = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            for c in 0..img.channels() {
                out.set(x, y, c, byte);
            }
        }
    }
    out
}

/// Applies a trained swap model to every boxed frame into `<out>/swap/frames`.
pub fn run_swap_apply(frames: &FramesSection, model: &SwapModel<f64>, out_dir: &Path) -> CliResult<StageLog> {
    run_frames(frames, DeidMethod::Swap, out_dir, |img, face| swap_face(model, img, face))
}

pub fn load_model(path: &Path) -> CliResult<SwapModel<f64>> {
    Ok(read_checkpoint(path)?)
}

/// Stage logs keyed by method, for the report.
pub type StageLogs = BTreeMap<DeidMethod, StageLog>;

#[cfg(test)]
mod tests {
    use super::*;
    use deidkit::formats::write_facebox_manifest;

    fn tree() -> (tempfile::TempDir, FramesSection) {
        let dir = tempfile::tempdir().unwrap();
        let frames = dir.path().join("frames");
        fs::create_dir(&frames).unwrap();
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            let img = RasterImage::from_fn(12, 10, 3, |x, y, c| (x * x * 2 + y * 3 + c + i) as u8).unwrap();
            write_raster(&img, frames.join(format!("{name}.ppm"))).unwrap();
        }
        let boxes = [FaceBox::new("a", 2, 2, 6, 6).unwrap(), FaceBox::new("c", -3, 4, 8, 9).unwrap()];
        let manifest = dir.path().join("boxes.csv");
        write_facebox_manifest(&boxes, &manifest).unwrap();
        (dir, FramesSection { dir: frames, manifest })
    }

    #[test]
    fn skips_frames_without_boxes() {
        let (dir, frames) = tree();
        let out = dir.path().join("out");
        let log = run_deid(&frames, DeidMethod::Mask, &out).unwrap();
        assert_eq!((log.input_frames, log.processed), (3, 2));
        assert_eq!(log.skipped, vec!["b".to_string()]);
        assert_eq!(list_frames(&out.join("mask/frames")).unwrap().len(), 2);
        assert!(out.join("mask/log.json").is_file());
    }

    #[test]
    fn mask_rerun_is_bit_identical() {
        let (dir, frames) = tree();
        let out = dir.path().join("out");
        run_deid(&frames, DeidMethod::Mask, &out).unwrap();
        let first = fs::read(out.join("mask/frames/a.ppm")).unwrap();
        run_deid(&frames, DeidMethod::Mask, &out).unwrap();
        assert_eq!(fs::read(out.join("mask/frames/a.ppm")).unwrap(), first);
    }

    #[test]
    fn blur_changes_only_box_pixels() {
        let (dir, frames) = tree();
        let out = dir.path().join("out");
        run_deid(&frames, DeidMethod::Blur, &out).unwrap();
        let before = read_raster(frames.dir.join("a.ppm")).unwrap();
        let after = read_raster(out.join("blur/frames/a.ppm")).unwrap();
        let mut inside_changed = false;
        for y in 0..10 {
            for x in 0..12 {
                for c in 0..3 {
                    let inside = (2..8).contains(&x) && (2..8).contains(&y);
                    if !inside {
                        assert_eq!(before.get(x, y, c), after.get(x, y, c));
                    } else if before.get(x, y, c) != after.get(x, y, c) {
                        inside_changed = true;
                    }
                }
            }
        }
        assert!(inside_changed);
    }

    #[test]
    fn swap_touches_only_the_box() {
        let model = SwapModel::<f64>::zeros(0);
        let img = RasterImage::from_fn(20, 20, 1, |x, y, _| (x + y) as u8).unwrap();
        let face = FaceBox::new("f", 4, 4, 8, 8).unwrap();
        let out = swap_face(&model, &img, &face);
        for y in 0..20 {
            for x in 0..20 {
                let inside = (4..12).contains(&x) && (4..12).contains(&y);
                // A zero model outputs 0.5 everywhere.
                let expected = if inside { 128 } else { img.get(x, y, 0) };
                assert_eq!(out.get(x, y, 0), expected);
            }
        }
    }
}
