//! Self-contained synthetic dataset: frames with face boxes, pose files for
//! the original and three de-identified conditions, planted descriptors, and
//! a config tying them together.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use deidkit::faceswap::{Identity, IMAGE_SIDE};
use deidkit::formats::{write_descriptor_csv, write_facebox_manifest, write_pairing_csv, write_pose_json};
use deidkit::keypoint::{Keypoint, KeypointInstance, Skeleton, BODY25_TO_COCO17};
use deidkit::raster::{write_raster, FaceBox, RasterImage};
use deidkit::synth::{
    gen_descriptor_clusters, gen_identity_dataset, gen_keypoint_instances, perturb_keypoints, stream_rng,
    IdentitySpec, PerturbationModel, PlantedGeometry,
};
use rand::{Rng, RngCore};

use crate::config::{FramesSection, IdentitySection, PairingName, PipelineConfig, PoseSection, SwapSection};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub seed: u64,
    pub pose_frames: usize,
    pub raster_frames: usize,
    pub frame_size: (usize, usize),
    pub descriptor_dim: usize,
    pub descriptors_per_subset: usize,
    pub swap_steps: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            seed: 0,
            pose_frames: 200,
            raster_frames: 24,
            frame_size: (96, 72),
            descriptor_dim: 128,
            descriptors_per_subset: 100,
            swap_steps: 200,
        }
    }
}

/// Perturbation per de-identified condition: swaps move every keypoint a
/// little, masks and blurs scatter the head keypoints.
pub fn condition_models() -> [(&'static str, PerturbationModel); 3] {
    [
        ("swapped", PerturbationModel::new(0.5, 0.5)),
        ("masked", PerturbationModel::new(25.0, 0.5)),
        ("blurred", PerturbationModel::new(25.0, 0.5)),
    ]
}

/// Re-expresses a COCO17 instance in BODY25 order, deriving neck and mid-hip
/// and leaving the feet undetected.
pub fn coco17_to_body25(inst: &KeypointInstance<f64>) -> CliResult<KeypointInstance<f64>> {
    let p = inst.points();
    let mut points = vec![Keypoint::missing(); 25];
    for (coco, &body) in BODY25_TO_COCO17.iter().enumerate() {
        points[body] = p[coco];
    }
    let mid = |a: &Keypoint<f64>, b: &Keypoint<f64>| {
        Keypoint::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0, a.confidence.min(b.confidence))
    };
    points[1] = mid(&p[5], &p[6]);
    points[8] = mid(&p[11], &p[12]);
    Ok(KeypointInstance::new(inst.frame_id(), Skeleton::Body25, points)?)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))
}

fn write_pose_dir(dir: &Path, instances: &[KeypointInstance<f64>]) -> CliResult<()> {
    create_dir(dir)?;
    for inst in instances {
        let path = dir.join(format!("{}_keypoints.json", inst.frame_id()));
        write_pose_json(std::slice::from_ref(inst), &path).map_err(|e| CliError::write(&path, e))?;
    }
    Ok(())
}

/// Frame with a textured background and a face of identity X pasted into its box.
fn render_frame(face: &[f64], face_box: &FaceBox, size: (usize, usize), rng: &mut impl Rng) -> CliResult<RasterImage> {
    let (w, h) = size;
    let noise: Vec<u8> = (0..w * h).map(|_| rng.random_range(0..24)).collect();
    let scale = face_box.w as usize / IMAGE_SIDE;
    let img = RasterImage::from_fn(w, h, 3, |x, y, c| {
        let (fx, fy) = (x as i64 - face_box.x, y as i64 - face_box.y);
        if (0..i64::from(face_box.w)).contains(&fx) && (0..i64::from(face_box.h)).contains(&fy) {
            let v = face[(fy as usize / scale) * IMAGE_SIDE + fx as usize / scale];
            let tint = [1.0, 0.86, 0.78][c];
            (v * tint * 255.0).round() as u8
        } else {
            let base = 40 + (x * 120 / w + y * 60 / h) as u8;
            base.saturating_add(noise[y * w + x]).saturating_add(10 * c as u8)
        }
    })?;
    Ok(img)
}

/// Writes the dataset under `out` and returns the path of its config.
pub fn write_bundle(opts: &SynthOptions, out: &Path) -> CliResult<PathBuf> {
    if opts.pose_frames == 0 || opts.raster_frames == 0 || opts.descriptors_per_subset == 0 {
        return Err(CliError::config("synthetic frame and descriptor counts must be positive"));
    }
    let mut seeds = stream_rng(opts.seed, 99);
    let mut next_seed = move || seeds.next_u64();
    create_dir(out)?;

    let frames_dir = out.join("frames");
    create_dir(&frames_dir)?;
    let (fw, fh) = opts.frame_size;
    let side = 2 * IMAGE_SIDE;
    if fw < side || fh < side {
        return Err(CliError::config(format!("frames must be at least {side}x{side}")));
    }
    let faces = gen_identity_dataset::<f64>(
        &IdentitySpec::default_x(),
        &IdentitySpec::default_y(),
        opts.raster_frames,
        next_seed(),
    )?;
    let mut rng = stream_rng(next_seed(), 0);
    let mut boxes = Vec::new();
    for (i, sample) in faces.iter().filter(|s| s.identity == Identity::X).enumerate() {
        let id = format!("frame_{i:05}");
        let x = rng.random_range(0..=(fw - side)) as i64;
        let y = rng.random_range(0..=(fh - side)) as i64;
        let face_box = FaceBox::new(&id, x, y, side as u32, side as u32)?;
        let img = render_frame(&sample.pixels, &face_box, opts.frame_size, &mut rng)?;
        let path = frames_dir.join(format!("{id}.ppm"));
        write_raster(&img, &path).map_err(|e| CliError::write(&path, e))?;
        // The last frame plays an undetected face.
        if i + 1 < opts.raster_frames {
            boxes.push(face_box);
        }
    }
    write_facebox_manifest(&boxes, out.join("boxes.csv")).map_err(|e| CliError::write(&out.join("boxes.csv"), e))?;

    let originals = gen_keypoint_instances::<f64>(opts.pose_frames, (640.0, 480.0), next_seed())?;
    let body25 = originals.iter().map(coco17_to_body25).collect::<CliResult<Vec<_>>>()?;
    write_pose_dir(&out.join("pose/original"), &body25)?;
    let mut methods = BTreeMap::new();
    for (name, model) in condition_models() {
        let perturbed = perturb_keypoints(&originals, &model, next_seed())?;
        write_pose_dir(&out.join("pose").join(name), &perturbed)?;
        methods.insert(name.to_owned(), PathBuf::from("pose").join(name));
    }

    let geometry = PlantedGeometry::study_like(opts.descriptor_dim, opts.descriptors_per_subset);
    let descriptors = gen_descriptor_clusters(&geometry.cluster_spec::<f64>()?, next_seed())?;
    write_descriptor_csv(&descriptors, out.join("descriptors.csv"))
        .map_err(|e| CliError::write(&out.join("descriptors.csv"), e))?;
    write_pairing_csv(&geometry.pairing(), out.join("pairing.csv"))
        .map_err(|e| CliError::write(&out.join("pairing.csv"), e))?;

    let config = PipelineConfig {
        seed: Some(opts.seed),
        output_dir: None,
        frames: Some(FramesSection {
            dir: "frames".into(),
            manifest: "boxes.csv".into(),
        }),
        pose: Some(PoseSection {
            original: "pose/original".into(),
            methods,
            select_largest: false,
        }),
        identity: Some(IdentitySection {
            descriptors: "descriptors.csv".into(),
            pairing: Some("pairing.csv".into()),
            target_subset: geometry.target_label(),
            threshold: deidkit::identity::DEFAULT_MATCH_THRESHOLD,
            pairing_mode: PairingName::FramePaired,
        }),
        swap: Some(SwapSection {
            samples_per_identity: 128,
            steps: opts.swap_steps,
            batch_size: 32,
            ..SwapSection::default()
        }),
        ..PipelineConfig::default()
    };
    let path = out.join("config.toml");
    fs::write(&path, config.to_toml()).map_err(|e| CliError::write(&path, e))?;
    Ok(path)
}
