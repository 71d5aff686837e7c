use serde::{Deserialize, Serialize};

use super::instance::{KeypointInstance, Skeleton};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// COCO per-keypoint standard deviations; the falloff constants are `2σ`.
pub const COCO17_SIGMAS: [f64; 17] = [
    0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072, 0.062, 0.062, 0.107, 0.107,
    0.087, 0.087, 0.089, 0.089,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OksConfig<T> {
    /// Per-keypoint falloff constants κᵢ, in COCO17 order.
    pub kappas: [T; 17],
    /// A ground-truth keypoint counts as visible when its confidence exceeds this.
    pub visibility_threshold: T,
    /// Multiplier turning keypoint-box area into an object-area estimate.
    pub scale_factor: T,
    /// OKS thresholds for AP/AR, strictly increasing in `(0, 1]`.
    pub thresholds: Vec<T>,
}

impl<T: Scalar> Default for OksConfig<T> {
    fn default() -> Self {
        OksConfig {
            kappas: COCO17_SIGMAS.map(|s| T::lit(2.0 * s)),
            visibility_threshold: T::zero(),
            scale_factor: T::lit(0.53),
            thresholds: (0..10).map(|i| T::lit(f64::from(50 + 5 * i) / 100.0)).collect(),
        }
    }
}

impl<T: Scalar> OksConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.kappas.iter().position(|k| !(*k > T::zero() && k.is_finite())) {
            return Err(Error::InvalidConfig(format!("kappa[{i}] must be positive")));
        }
        if !(self.visibility_threshold >= T::zero() && self.visibility_threshold < T::one()) {
            return Err(Error::InvalidConfig(
                "visibility_threshold must lie in [0, 1)".into(),
            ));
        }
        if !(self.scale_factor > T::zero() && self.scale_factor.is_finite()) {
            return Err(Error::InvalidConfig("scale_factor must be positive".into()));
        }
        if self.thresholds.is_empty() {
            return Err(Error::InvalidConfig("at least one OKS threshold required".into()));
        }
        if self
            .thresholds
            .iter()
            .any(|t| !(*t > T::zero() && *t <= T::one()))
        {
            return Err(Error::InvalidConfig("OKS thresholds must lie in (0, 1]".into()));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "OKS thresholds must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn is_visible(&self, confidence: T) -> bool {
        confidence > self.visibility_threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OksResult<T> {
    /// Similarity per COCO17 keypoint; `None` where the ground truth is not visible.
    pub per_keypoint: Vec<Option<T>>,
    pub oks: T,
    pub visible_count: usize,
    pub scale: T,
}

/// Object scale `sqrt(scale_factor · w · h)` of the tight box around the
/// visible ground-truth keypoints.
pub fn estimate_scale<T: Scalar>(gt: &KeypointInstance<T>, cfg: &OksConfig<T>) -> Result<T> {
    gt.ensure_skeleton(Skeleton::Coco17)?;
    let visible = gt
        .points()
        .iter()
        .filter(|p| cfg.is_visible(p.confidence))
        .count();
    if visible < 2 {
        return Err(Error::Unevaluable(format!(
            "frame {}: {visible} visible keypoint(s), need at least 2 for object scale",
            gt.frame_id()
        )));
    }
    let (x0, y0, x1, y1) = gt
        .visible_extent(cfg.visibility_threshold)
        .expect("at least two visible points");
    let area = (x1 - x0) * (y1 - y0);
    if !(area > T::zero()) {
        return Err(Error::Unevaluable(format!(
            "frame {}: visible keypoints span zero area",
            gt.frame_id()
        )));
    }
    Ok((cfg.scale_factor * area).sqrt())
}

/// Gaussian falloff `exp(-d² / (2 s² κ²))` for one keypoint.
pub fn keypoint_similarity<T: Scalar>(d: T, s: T, kappa: T) -> Result<T> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("object scale must be positive, got {s}")));
    }
    if !(kappa > T::zero()) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if !(d >= T::zero()) {
        return Err(Error::InvalidArgument(format!("distance must be non-negative, got {d}")));
    }
    let two = T::lit(2.0);
    Ok((-(d * d) / (two * s * s * kappa * kappa)).exp())
}

/// OKS with the object scale estimated from the ground truth.
pub fn oks<T: Scalar>(
    gt: &KeypointInstance<T>,
    pred: &KeypointInstance<T>,
    cfg: &OksConfig<T>,
) -> Result<OksResult<T>> {
    check_pair(gt, pred)?;
    let scale = estimate_scale(gt, cfg)?;
    oks_with_scale(gt, pred, scale, cfg)
}

/// OKS for an externally supplied object scale. Only a single visible
/// ground-truth keypoint is required here.
///
/// Undetected predicted keypoints are scored at their stored coordinates.
pub fn oks_with_scale<T: Scalar>(
    gt: &KeypointInstance<T>,
    pred: &KeypointInstance<T>,
    scale: T,
    cfg: &OksConfig<T>,
) -> Result<OksResult<T>> {
    check_pair(gt, pred)?;
    let mut per_keypoint = Vec::with_capacity(17);
    let mut sum = T::zero();
    let mut visible_count = 0usize;
    for ((g, p), kappa) in gt.points().iter().zip(pred.points()).zip(&cfg.kappas) {
        if cfg.is_visible(g.confidence) {
            let sim = keypoint_similarity(g.distance(p), scale, *kappa)?;
            sum = sum + sim;
            visible_count += 1;
            per_keypoint.push(Some(sim));
        } else {
            per_keypoint.push(None);
        }
    }
    if visible_count == 0 {
        return Err(Error::Unevaluable(format!(
            "frame {}: no visible ground-truth keypoints",
            gt.frame_id()
        )));
    }
    Ok(OksResult {
        per_keypoint,
        oks: sum / T::from_count(visible_count),
        visible_count,
        scale,
    })
}

fn check_pair<T: Scalar>(gt: &KeypointInstance<T>, pred: &KeypointInstance<T>) -> Result<()> {
    gt.ensure_skeleton(Skeleton::Coco17)?;
    pred.ensure_skeleton(Skeleton::Coco17)?;
    if gt.frame_id() != pred.frame_id() {
        return Err(Error::FrameMismatch {
            gt: gt.frame_id().to_owned(),
            pred: pred.frame_id().to_owned(),
        });
    }
    Ok(())
}
