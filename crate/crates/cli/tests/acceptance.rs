//! Acceptance criteria, one PASS/FAIL line each. Run with `cargo test --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use deidkit::faceswap::{
    read_checkpoint, reconstruction_loss, swap, train, write_checkpoint, Identity, SwapModel, TrainConfig,
};
use deidkit::formats::{
    parse_facebox_manifest, parse_pose_json, read_descriptor_csv, write_descriptor_csv, write_facebox_manifest,
    write_pose_json,
};
use deidkit::identity::{
    acceptance_distances, centroid, distance_table, euclidean_distance, infer_swap_sources, roc, FaceDescriptor,
    PairingMode,
};
use deidkit::keypoint::{
    evaluate_set, oks, threshold_metrics, EvalMode, Keypoint, KeypointInstance, OksConfig, Skeleton,
};
use deidkit::raster::{apply_blur, apply_mask, read_raster, write_raster, FaceBox, RasterImage};
use deidkit::synth::{
    gen_descriptor_clusters, gen_identity_dataset, gen_keypoint_instances, perturb_keypoints, stream_rng,
    IdentitySpec, PerturbationModel, PlantedGeometry,
};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()))
    }
}

// ---- 1 ---------------------------------------------------------------------

/// COCO per-keypoint standard deviations, typed independently of the library.
const SIGMAS: [f64; 17] = [
    0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072, 0.062, 0.062, 0.107, 0.107, 0.087, 0.087,
    0.089, 0.089,
];

/// Straight transcription of the OKS definition.
fn brute_force_oks(gt: &[(f64, f64, f64)], pred: &[(f64, f64)]) -> f64 {
    let visible: Vec<usize> = (0..17).filter(|&i| gt[i].2 > 0.0).collect();
    let xs: Vec<f64> = visible.iter().map(|&i| gt[i].0).collect();
    let ys: Vec<f64> = visible.iter().map(|&i| gt[i].1).collect();
    let w = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
    let h = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
    let s2 = 0.53 * w * h;
    let mut total = 0.0;
    for &i in &visible {
        let dx = gt[i].0 - pred[i].0;
        let dy = gt[i].1 - pred[i].1;
        let k = 2.0 * SIGMAS[i];
        total += (-(dx * dx + dy * dy) / (2.0 * s2 * k * k)).exp();
    }
    total / visible.len() as f64
}

fn criterion_1() -> Outcome {
    let mut rng = stream_rng(101, 0);
    let mut cases = Vec::with_capacity(1000);
    while cases.len() < 1000 {
        let gt: Vec<(f64, f64, f64)> = (0..17)
            .map(|_| {
                let c = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.05..1.0) };
                (rng.random_range(0.0..640.0), rng.random_range(0.0..480.0), c)
            })
            .collect();
        if gt.iter().filter(|p| p.2 > 0.0).count() < 2 {
            continue;
        }
        let spread = rng.random_range(0.0..40.0);
        let pred: Vec<(f64, f64)> = gt
            .iter()
            .map(|&(x, y, _)| (x + rng.random_range(-spread..=spread), y + rng.random_range(-spread..=spread)))
            .collect();
        cases.push((gt, pred));
    }
    let cfg = OksConfig::<f64>::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (k, (gt, pred)) in cases.iter().enumerate() {
        let g = KeypointInstance::new(
            format!("{k}"),
            Skeleton::Coco17,
            gt.iter().map(|&(x, y, c)| Keypoint::new(x, y, c)).collect(),
        )
        .map_err(|e| e.to_string())?;
        let p = KeypointInstance::new(
            format!("{k}"),
            Skeleton::Coco17,
            pred.iter().map(|&(x, y)| Keypoint::new(x, y, 1.0)).collect(),
        )
        .map_err(|e| e.to_string())?;
        let lib = oks(&g, &p, &cfg).map_err(|e| e.to_string())?.oks;
        worst = worst.max((lib - brute_force_oks(gt, pred)).abs());
    }
    let elapsed = start.elapsed();
    check!(worst < 1e-12, "max |dOKS| = {worst:e}");
    within(elapsed, 1.0)?;
    Ok(format!("max |dOKS| = {worst:.1e} over 1000 pairs in {:.3}s", elapsed.as_secs_f64()))
}

// ---- 2 ---------------------------------------------------------------------

/// A pair whose OKS is `target` when every κ equals `kappa`: all keypoints
/// shifted by the same distance.
fn pair_with_oks(id: &str, target: f64, kappa: f64) -> (KeypointInstance<f64>, KeypointInstance<f64>) {
    let gt_pts: Vec<Keypoint<f64>> = (0..17)
        .map(|i| Keypoint::new(100.0 + 10.0 * (i % 5) as f64, 50.0 + 8.0 * i as f64, 1.0))
        .collect();
    let (w, h) = (40.0, 128.0);
    let s = (0.53f64 * w * h).sqrt();
    let d = s * kappa * (-2.0 * target.ln()).sqrt();
    let pred_pts = gt_pts.iter().map(|p| Keypoint::new(p.x + d, p.y, 1.0)).collect();
    (
        KeypointInstance::new(id, Skeleton::Coco17, gt_pts).unwrap(),
        KeypointInstance::new(id, Skeleton::Coco17, pred_pts).unwrap(),
    )
}

fn criterion_2() -> Outcome {
    let cfg = OksConfig::<f64>::default();
    let mut rng = stream_rng(202, 0);
    for trial in 0..200 {
        let n = rng.random_range(1..80);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let m = threshold_metrics(&values, &cfg.thresholds).map_err(|e| e.to_string())?;
        for w in m.windows(2) {
            check!(w[1].ap <= w[0].ap && w[1].ar <= w[0].ar, "trial {trial}: AP/AR rise with threshold");
        }
    }
    let gts = gen_keypoint_instances::<f64>(300, (640.0, 480.0), 3).map_err(|e| e.to_string())?;
    let preds = perturb_keypoints(&gts, &PerturbationModel::new(12.0, 4.0), 4).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = gts.into_iter().zip(preds).collect();
    for mode in [EvalMode::Fraction, EvalMode::Ranked] {
        let s = evaluate_set(&pairs, &cfg, mode).map_err(|e| e.to_string())?;
        check!(s.per_threshold.len() == 10, "expected ten thresholds");
        let mut sum = 0.0;
        for m in &s.per_threshold {
            sum += m.ap;
        }
        check!(s.ap_mean == sum / 10.0, "{mode:?}: AP mean {} != {}", s.ap_mean, sum / 10.0);
        for w in s.per_threshold.windows(2) {
            check!(w[1].ap <= w[0].ap && w[1].ar <= w[0].ar, "{mode:?}: not monotone");
        }
    }

    let kappa = 0.1;
    let flat = OksConfig {
        kappas: [kappa; 17],
        thresholds: vec![0.95],
        ..OksConfig::default()
    };
    let list = [0.96, 0.70, 0.99];
    let pairs: Vec<_> = list.iter().enumerate().map(|(i, &v)| pair_with_oks(&format!("f{i}"), v, kappa)).collect();
    let s = evaluate_set(&pairs, &flat, EvalMode::Fraction).map_err(|e| e.to_string())?;
    for ((_, v), want) in s.instance_oks.iter().zip(list) {
        check!((v - want).abs() < 1e-12, "constructed OKS {v} != {want}");
    }
    let at = s.at(0.95).ok_or("no metric at 0.95")?;
    check!(at.ap == 2.0 / 3.0 && at.ar == 2.0 / 3.0, "AP at 0.95 = {}", at.ap);
    let direct = threshold_metrics(&list, &[0.95]).map_err(|e| e.to_string())?;
    check!(direct[0].ap == 2.0 / 3.0, "list AP = {}", direct[0].ap);
    Ok("monotone over 200 lists; mean exact; [0.96, 0.70, 0.99] @0.95 -> 2/3".into())
}

// ---- 3 ---------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cfg = OksConfig::<f64>::default();
    let gts = gen_keypoint_instances::<f64>(1000, (640.0, 480.0), 2024).map_err(|e| e.to_string())?;
    let mut ap = BTreeMap::new();
    for (name, model, seed) in [
        ("swap", PerturbationModel::new(0.5, 0.5), 11),
        ("mask", PerturbationModel::new(25.0, 0.5), 12),
        ("blur", PerturbationModel::new(25.0, 0.5), 13),
    ] {
        let preds = perturb_keypoints(&gts, &model, seed).map_err(|e| e.to_string())?;
        let pairs: Vec<_> = gts.iter().cloned().zip(preds).collect();
        let s = evaluate_set(&pairs, &cfg, EvalMode::Fraction).map_err(|e| e.to_string())?;
        ap.insert(name, (s.at(0.5).unwrap().ap, s.at(0.95).unwrap().ap));
    }
    let elapsed = start.elapsed();
    for (name, (a50, _)) in &ap {
        check!(*a50 >= 0.99, "{name}: AP@0.5 = {a50}");
    }
    let gap = ap["swap"].1 - ap["mask"].1;
    check!(gap >= 0.3, "AP@0.95 swap - mask = {gap}");
    within(elapsed, 10.0)?;
    Ok(format!(
        "AP@0.5 swap/mask/blur = {}/{}/{}; AP@0.95 swap {} vs mask {} (gap {gap:.3}) in {:.2}s",
        ap["swap"].0, ap["mask"].0, ap["blur"].0, ap["swap"].1, ap["mask"].1, elapsed.as_secs_f64()
    ))
}

// ---- 4 ---------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let geo = PlantedGeometry::study_like(128, 500);
    let ds = gen_descriptor_clusters(&geo.cluster_spec::<f64>().map_err(|e| e.to_string())?, 2024)
        .map_err(|e| e.to_string())?;
    let sources = infer_swap_sources(ds.iter().map(|d| d.subset.as_str())).map_err(|e| e.to_string())?;
    let target = geo.target_label();
    let table =
        distance_table(&ds, &geo.pairing(), &sources, &target, PairingMode::FramePaired).map_err(|e| e.to_string())?;
    let members = |label: &str| -> Vec<&[f64]> {
        ds.iter().filter(|d| d.subset == label).map(|d| d.vector.as_slice()).collect()
    };
    let target_c = centroid(members(&target)).map_err(|e| e.to_string())?;
    // Members scatter around their centroid with total noise power σ²D.
    let noise = geo.sigma().powi(2) * 128.0;
    let mut worst = 0.0f64;
    let mut note = |got: f64, want: f64| worst = worst.max((got - want).abs());
    for row in &table.rows {
        note(row.intra.mean, geo.intra_mean);
    }
    for p in &geo.patients {
        let row = table.row(&format!("swapped_{p}")).ok_or("missing swapped row")?;
        note(row.to_average_target.mean, (geo.swapped_to_target.powi(2) + noise).sqrt());
        note(row.to_average_original.unwrap().mean, (geo.swapped_to_original.powi(2) + noise).sqrt());
        note(row.to_original.unwrap().mean, (geo.swapped_to_original.powi(2) + 2.0 * noise).sqrt());
        let sc = centroid(members(&format!("swapped_{p}"))).map_err(|e| e.to_string())?;
        let oc = centroid(members(&format!("original_{p}"))).map_err(|e| e.to_string())?;
        note(euclidean_distance(&sc, &target_c).unwrap(), geo.swapped_to_target);
        note(euclidean_distance(&sc, &oc).unwrap(), geo.swapped_to_original);
        note(euclidean_distance(&oc, &target_c).unwrap(), geo.original_to_target);
    }
    let (genuine, impostor) = acceptance_distances(&ds, &sources, &target).map_err(|e| e.to_string())?;
    let auc = roc(&genuine, &impostor).map_err(|e| e.to_string())?.auc;
    let elapsed = start.elapsed();
    check!(worst < 0.02, "largest deviation from planted geometry {worst}");
    check!(auc > 0.999, "AUC {auc}");
    let to_target = genuine.iter().filter(|&&d| d < 0.6).count();
    let to_original = impostor.iter().filter(|&&d| d < 0.6).count();
    check!(to_target == genuine.len(), "{} of {} swapped match the target", to_target, genuine.len());
    check!(to_original == 0, "{to_original} swapped match their original");
    within(elapsed, 5.0)?;
    Ok(format!(
        "max deviation {worst:.4}; AUC {auc}; {}/{} match target, 0 match original; {:.2}s",
        to_target,
        genuine.len(),
        elapsed.as_secs_f64()
    ))
}

// ---- 5 ---------------------------------------------------------------------

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn golden_case(stem: &str, face: FaceBox, transform: fn(&RasterImage, &FaceBox) -> RasterImage, dir: &Path) -> Result<(), String> {
    let input = read_raster(golden(&format!("{stem}_input.pgm"))).map_err(|e| e.to_string())?;
    let out = dir.join(format!("{stem}.pgm"));
    write_raster(&transform(&input, &face), &out).map_err(|e| e.to_string())?;
    let want = fs::read(golden(&format!("{stem}_expected.pgm"))).map_err(|e| e.to_string())?;
    check!(fs::read(&out).map_err(|e| e.to_string())? == want, "{stem}: output differs from golden file");
    Ok(())
}

fn criterion_5() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    golden_case("mask_4x4", FaceBox::new("f", 1, 1, 2, 2).unwrap(), apply_mask, dir.path())?;
    golden_case("blur_5x5", FaceBox::new("f", -1, -1, 7, 7).unwrap(), apply_blur, dir.path())?;
    golden_case("blur_3x3", FaceBox::new("f", -2, -2, 7, 7).unwrap(), apply_blur, dir.path())?;

    let mut rng = stream_rng(505, 0);
    for trial in 0..300 {
        let (w, h, c) = (rng.random_range(1..40), rng.random_range(1..40), if rng.random_bool(0.5) { 1 } else { 3 });
        let data: Vec<u8> = (0..w * h * c).map(|_| rng.random()).collect();
        let img = RasterImage::new(w, h, c, data).unwrap();
        let face = FaceBox::new(
            "f",
            rng.random_range(-10..40),
            rng.random_range(-10..40),
            rng.random_range(1..30),
            rng.random_range(1..30),
        )
        .unwrap();
        let masked = apply_mask(&img, &face);
        check!(apply_mask(&masked, &face) == masked, "trial {trial}: mask not idempotent");
        let blurred = apply_blur(&img, &face);
        let region = face.clip(w, h);
        for y in 0..h {
            for x in 0..w {
                if region.is_some_and(|r| r.contains(x, y)) {
                    continue;
                }
                for ch in 0..c {
                    check!(
                        masked.get(x, y, ch) == img.get(x, y, ch) && blurred.get(x, y, ch) == img.get(x, y, ch),
                        "trial {trial}: pixel ({x},{y}) outside the box changed"
                    );
                }
            }
        }
        if face.w.min(face.h) <= 3 {
            check!(blurred == img, "trial {trial}: blur with min side <= 3 changed pixels");
        }
        let uniform = RasterImage::filled(w, h, c, rng.random()).unwrap();
        check!(apply_blur(&uniform, &face) == uniform, "trial {trial}: blur changed a uniform image");
    }
    Ok("golden 4x4 mask, 5x5 and 3x3 blur match; 300 random idempotence/locality/identity trials".into())
}

// ---- 6 ---------------------------------------------------------------------

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let model = SwapModel::<f64>::init(5);
    let data: Vec<Vec<f64>> = gen_identity_dataset::<f64>(&IdentitySpec::default_x(), &IdentitySpec::default_y(), 2, 11)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|s| s.identity == Identity::X)
        .map(|s| s.pixels)
        .collect();
    let batch: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
    let (_, analytic) = model.loss_and_gradients(&batch, Identity::X);
    let eps = 1e-5;
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let grads = analytic.tensors();
    for (t, grad) in grads.iter().enumerate() {
        for (i, &a) in grad.iter().enumerate() {
            let orig = probe.tensors()[t][i];
            probe.tensors_mut()[t][i] = orig + eps;
            let up = reconstruction_loss(&probe, &batch, Identity::X).unwrap();
            probe.tensors_mut()[t][i] = orig - eps;
            let down = reconstruction_loss(&probe, &batch, Identity::X).unwrap();
            probe.tensors_mut()[t][i] = orig;
            let numeric = (up - down) / (2.0 * eps);
            // Gradients below 1e-6 are compared absolutely; difference noise is ~1e-11.
            worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6));
            checked += 1;
        }
    }
    let separated = analytic.decoder_y.tensors().iter().all(|t| t.iter().all(|&v| v == 0.0));
    let elapsed = start.elapsed();
    check!(checked == model.parameter_count(), "checked {checked} parameters");
    check!(worst < 1e-4, "max relative error {worst:e}");
    check!(separated, "decoder Y received gradient from an X batch");
    within(elapsed, 30.0)?;
    Ok(format!(
        "max relative error {worst:.2e} over {checked} parameters; decoder Y gradient exactly 0; {:.2}s",
        elapsed.as_secs_f64()
    ))
}

// ---- 7 ---------------------------------------------------------------------

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let spec = (IdentitySpec::default_x(), IdentitySpec::default_y());
    let data = gen_identity_dataset::<f64>(&spec.0, &spec.1, 256, 1).map_err(|e| e.to_string())?;
    let held_out = gen_identity_dataset::<f64>(&spec.0, &spec.1, 100, 2).map_err(|e| e.to_string())?;
    let mut model = SwapModel::<f64>::init(3);
    let cfg = TrainConfig {
        steps: 500,
        batch_size: 64,
        seed: 3,
        ..TrainConfig::default()
    };
    let history = train(&mut model, &data, &cfg).map_err(|e| e.to_string())?;
    let (first, last) = (history[0].combined(), history[history.len() - 1].combined());
    let class = |id: Identity| -> Vec<&[f64]> {
        data.iter().filter(|s| s.identity == id).map(|s| s.pixels.as_slice()).collect()
    };
    let cx = centroid(class(Identity::X)).unwrap();
    let cy = centroid(class(Identity::Y)).unwrap();
    let xs: Vec<_> = held_out.iter().filter(|s| s.identity == Identity::X).collect();
    let nearer_y = xs
        .iter()
        .filter(|s| {
            let out = swap(&model, &s.pixels);
            euclidean_distance(&out, &cy).unwrap() < euclidean_distance(&out, &cx).unwrap()
        })
        .count();
    let elapsed = start.elapsed();
    check!(history.len() == 500, "{} steps", history.len());
    check!(last <= 0.5 * first, "loss {first} -> {last}");
    check!(nearer_y * 10 >= xs.len() * 9, "{nearer_y}/{} swaps nearer Y", xs.len());
    within(elapsed, 300.0)?;
    Ok(format!(
        "combined loss {first:.4} -> {last:.4}; {nearer_y}/{} held-out swaps nearer Y; {:.2}s",
        xs.len(),
        elapsed.as_secs_f64()
    ))
}

// ---- 8 ---------------------------------------------------------------------

/// Sweeps every distinct threshold, accepting distances strictly below it,
/// and integrates TAR over FAR with the trapezoid rule.
fn exhaustive_auc(genuine: &[f64], impostor: &[f64]) -> f64 {
    let mut ts: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
    ts.push(f64::NEG_INFINITY);
    ts.push(f64::INFINITY);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let rate = |v: &[f64], t: f64| v.iter().filter(|&&d| d < t).count() as f64 / v.len() as f64;
    let pts: Vec<(f64, f64)> = ts.iter().map(|&t| (rate(impostor, t), rate(genuine, t))).collect();
    pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum()
}

fn criterion_8() -> Outcome {
    let (g, i) = ([0.1, 0.2], [0.15, 0.3]);
    let auc = roc(&g, &i).map_err(|e| e.to_string())?.auc;
    let sweep = exhaustive_auc(&g, &i);
    check!(auc == 0.75 && sweep == 0.75, "AUC {auc}, sweep {sweep}");
    let mut rng = stream_rng(808, 0);
    let mut worst_swap = 0.0f64;
    let mut worst_sweep = 0.0f64;
    for _ in 0..300 {
        let ng = rng.random_range(1..60);
        let ni = rng.random_range(1..60);
        // Coarse values force ties.
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| f64::from(rng.random_range(0..40u32)) / 40.0).collect() };
        let (g, i) = (draw(ng), draw(ni));
        let a = roc(&g, &i).unwrap().auc;
        let b = roc(&i, &g).unwrap().auc;
        worst_swap = worst_swap.max((a - (1.0 - b)).abs());
        worst_sweep = worst_sweep.max((a - exhaustive_auc(&g, &i)).abs());
    }
    check!(worst_swap < 1e-12, "AUC(swapped) vs 1 - AUC: {worst_swap:e}");
    check!(worst_sweep < 1e-12, "AUC vs sweep: {worst_sweep:e}");
    Ok(format!("worked example 0.75; swap symmetry {worst_swap:.1e}, sweep agreement {worst_sweep:.1e} over 300 lists"))
}

// ---- 9 ---------------------------------------------------------------------

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn deidkit(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_deidkit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check!(out.status.success(), "deidkit {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    Ok(())
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let s = |p: &Path| p.to_string_lossy().into_owned();
    deidkit(&["synth", "--seed", "42", "--out", &s(&data)])?;
    let config = data.join("config.toml");
    let (a, b) = (tmp.path().join("run_a"), tmp.path().join("run_b"));
    deidkit(&["run-all", "--config", &s(&config), "--seed", "42", "--out", &s(&a)])?;
    deidkit(&["run-all", "--config", &s(&config), "--seed", "42", "--out", &s(&b)])?;
    let (ta, tb) = (tree(&a), tree(&b));
    let count = |ext: &str| ta.keys().filter(|p| p.extension().is_some_and(|e| e == ext)).count();
    check!(count("json") >= 1 && count("ppm") >= 1 && count("svg") >= 1, "missing outputs: {:?}", ta.keys());
    check!(ta.keys().eq(tb.keys()), "file sets differ");
    for (path, bytes) in &ta {
        check!(tb[path] == *bytes, "{} differs between runs", path.display());
    }
    Ok(format!(
        "{} files identical ({} reports/logs, {} rasters, {} SVGs)",
        ta.len(),
        count("json"),
        count("ppm"),
        count("svg")
    ))
}

// ---- 10 --------------------------------------------------------------------

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();

    let poses = gen_keypoint_instances::<f64>(20, (1920.0, 1080.0), 10).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for inst in &poses {
        let path = dir.join(format!("{}_keypoints.json", inst.frame_id()));
        write_pose_json(std::slice::from_ref(inst), &path).map_err(|e| e.to_string())?;
        let back = parse_pose_json::<f64>(&path, false).map_err(|e| e.to_string())?;
        check!(back.frame_id() == inst.frame_id() && back.skeleton() == inst.skeleton(), "pose identity changed");
        for (a, b) in inst.points().iter().zip(back.points()) {
            worst = worst.max((a.x - b.x).abs()).max((a.y - b.y).abs()).max((a.confidence - b.confidence).abs());
        }
    }
    check!(worst <= 1e-9, "pose JSON drift {worst:e}");

    let mut rng = stream_rng(1010, 0);
    let descriptors: Vec<FaceDescriptor<f64>> = (0..30)
        .map(|i| {
            FaceDescriptor::new(
                format!("d{i}"),
                if i % 2 == 0 { "original_A" } else { "swapped_B" },
                (0..128).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
        })
        .collect();
    let csv_path = dir.join("descriptors.csv");
    write_descriptor_csv(&descriptors, &csv_path).map_err(|e| e.to_string())?;
    check!(read_descriptor_csv::<f64>(&csv_path).map_err(|e| e.to_string())? == descriptors, "descriptor CSV changed");

    let boxes: Vec<FaceBox> = (0..25)
        .map(|i| FaceBox::new(format!("frame_{i:03}"), rng.random_range(-50..500), rng.random_range(-50..500), rng.random_range(1..300), rng.random_range(1..300)).unwrap())
        .collect();
    let manifest = dir.join("boxes.csv");
    write_facebox_manifest(&boxes, &manifest).map_err(|e| e.to_string())?;
    let parsed = parse_facebox_manifest(&manifest).map_err(|e| e.to_string())?;
    check!(parsed.len() == boxes.len() && boxes.iter().all(|b| parsed[&b.frame_id] == *b), "manifest changed");

    let model = SwapModel::<f64>::init(77);
    let ckpt = dir.join("model.ckpt");
    write_checkpoint(&model, &ckpt).map_err(|e| e.to_string())?;
    let back = read_checkpoint::<f64>(&ckpt).map_err(|e| e.to_string())?;
    let bits = |m: &SwapModel<f64>| -> Vec<u64> { m.tensors().iter().flat_map(|t| t.iter().map(|v| v.to_bits())).collect() };
    check!(bits(&back) == bits(&model) && back.seed == model.seed, "checkpoint not bit-exact");
    let ckpt32 = dir.join("model32.ckpt");
    let model32 = SwapModel::<f32>::init(77);
    write_checkpoint(&model32, &ckpt32).map_err(|e| e.to_string())?;
    check!(read_checkpoint::<f32>(&ckpt32).map_err(|e| e.to_string())? == model32, "f32 checkpoint changed");

    Ok(format!("pose JSON max drift {worst:.1e}; descriptor CSV, manifest, checkpoints exact"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 OKS oracle equivalence", criterion_1),
        ("2 AP/AR structure", criterion_2),
        ("3 synthetic keypoint table shape", criterion_3),
        ("4 synthetic distance table and ROC shape", criterion_4),
        ("5 transform exactness", criterion_5),
        ("6 toy-faceswap gradients", criterion_6),
        ("7 toy-faceswap training", criterion_7),
        ("8 ROC oracle", criterion_8),
        ("9 end-to-end determinism", criterion_9),
        ("10 format round-trips", criterion_10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  criterion {name}: {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
