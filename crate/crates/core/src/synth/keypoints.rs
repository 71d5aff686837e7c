use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::stream_rng;
use crate::error::{Error, Result};
use crate::keypoint::{is_head_keypoint, Keypoint, KeypointInstance, Skeleton};
use crate::scalar::Scalar;

/// Upright COCO17 skeleton, unit height, x centred on 0, y pointing down.
pub const SKELETON_TEMPLATE: [(f64, f64); 17] = [
    (0.0, 0.07),
    (0.03, 0.05),
    (-0.03, 0.05),
    (0.06, 0.06),
    (-0.06, 0.06),
    (0.12, 0.20),
    (-0.12, 0.20),
    (0.16, 0.36),
    (-0.16, 0.36),
    (0.17, 0.50),
    (-0.17, 0.50),
    (0.08, 0.52),
    (-0.08, 0.52),
    (0.09, 0.74),
    (-0.09, 0.74),
    (0.09, 0.95),
    (-0.09, 0.95),
];

/// `n` skeletons placed by a random similarity transform (height 40–90% of
/// the frame, tilt up to ±0.15 rad) that keeps every point inside the frame.
/// Frame ids are `frame_<index>` with five digits.
pub fn gen_keypoint_instances<T: Scalar>(
    n: usize,
    frame_size: (f64, f64),
    seed: u64,
) -> Result<Vec<KeypointInstance<T>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one instance".into()));
    }
    let (fw, fh) = frame_size;
    if !(fw > 0.0 && fh > 0.0) {
        return Err(Error::InvalidArgument("frame size must be positive".into()));
    }
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|i| {
            let mut height = fh * rng.random_range(0.4..0.9);
            let angle: f64 = rng.random_range(-0.15..0.15);
            let (sin, cos) = angle.sin_cos();
            let rotated: Vec<(f64, f64)> = SKELETON_TEMPLATE
                .iter()
                .map(|&(x, y)| (cos * x - sin * y, sin * x + cos * y))
                .collect();
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for &(x, y) in &rotated {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
            // Shrink if the figure would not fit the frame.
            height = height.min(0.98 * fw / (x1 - x0)).min(0.98 * fh / (y1 - y0));
            let tx = rng.random_range(0.0..=(fw - height * (x1 - x0))) - height * x0;
            let ty = rng.random_range(0.0..=(fh - height * (y1 - y0))) - height * y0;
            let points = rotated
                .iter()
                .map(|&(x, y)| {
                    let c: f64 = rng.random_range(0.3..=1.0);
                    Keypoint::new(T::lit(height * x + tx), T::lit(height * y + ty), T::lit(c))
                })
                .collect();
            KeypointInstance::new(format!("frame_{i:05}"), Skeleton::Coco17, points)
        })
        .collect()
}

/// Gaussian displacement of detected keypoints, separately for head
/// (nose, eyes, ears) and body, with optional per-group dropout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationModel {
    pub head_sigma: f64,
    pub body_sigma: f64,
    pub head_dropout: f64,
    pub body_dropout: f64,
}

impl PerturbationModel {
    pub fn new(head_sigma: f64, body_sigma: f64) -> Self {
        PerturbationModel {
            head_sigma,
            body_sigma,
            head_dropout: 0.0,
            body_dropout: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("head_sigma", self.head_sigma), ("body_sigma", self.body_sigma)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0")));
            }
        }
        for (name, p) in [("head_dropout", self.head_dropout), ("body_dropout", self.body_dropout)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Adds `N(0, σ²)` noise to each coordinate. A dropped keypoint becomes
/// `(0, 0)` with confidence 0, as the pose tool reports misses. Every
/// keypoint consumes the same number of draws whatever the outcome.
pub fn perturb_keypoints<T: Scalar>(
    instances: &[KeypointInstance<T>],
    model: &PerturbationModel,
    seed: u64,
) -> Result<Vec<KeypointInstance<T>>> {
    model.validate()?;
    let mut rng = stream_rng(seed, 1);
    instances
        .iter()
        .map(|inst| {
            if inst.skeleton() != Skeleton::Coco17 {
                return Err(Error::WrongSkeleton {
                    expected: Skeleton::Coco17.name(),
                    found: inst.skeleton().name(),
                });
            }
            inst.map_points(|i, p| {
                let (sigma, dropout) = if is_head_keypoint(i) {
                    (model.head_sigma, model.head_dropout)
                } else {
                    (model.body_sigma, model.body_dropout)
                };
                let zx: f64 = StandardNormal.sample(&mut rng);
                let zy: f64 = StandardNormal.sample(&mut rng);
                let u: f64 = rng.random();
                if u < dropout {
                    Keypoint::missing()
                } else {
                    Keypoint::new(p.x + T::lit(sigma * zx), p.y + T::lit(sigma * zy), p.confidence)
                }
            })
        })
        .collect()
}
