use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Skeleton {
    /// 17-point COCO evaluation skeleton.
    Coco17,
    /// 25-point skeleton emitted by the pose tool.
    Body25,
}

impl Skeleton {
    pub fn point_count(self) -> usize {
        match self {
            Skeleton::Coco17 => 17,
            Skeleton::Body25 => 25,
        }
    }

    pub fn from_point_count(n: usize) -> Option<Self> {
        match n {
            17 => Some(Skeleton::Coco17),
            25 => Some(Skeleton::Body25),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Skeleton::Coco17 => "COCO17",
            Skeleton::Body25 => "BODY25",
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const COCO17_NAMES: [&str; 17] = [
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
];

/// Nose, eyes and ears.
pub fn is_head_keypoint(coco_index: usize) -> bool {
    coco_index < 5
}

/// `BODY25_TO_COCO17[i]` is the BODY25 index feeding COCO17 slot `i`.
/// BODY25 neck (1), mid-hip (8) and the six foot points (19..=24) are dropped.
pub const BODY25_TO_COCO17: [usize; 17] = [0, 16, 15, 18, 17, 5, 2, 6, 3, 7, 4, 12, 9, 13, 10, 14, 11];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint<T> {
    pub x: T,
    pub y: T,
    /// Detector confidence in `[0, 1]`; exactly 0 marks an undetected point.
    pub confidence: T,
}

impl<T: Scalar> Keypoint<T> {
    pub fn new(x: T, y: T, confidence: T) -> Self {
        Keypoint { x, y, confidence }
    }

    pub fn missing() -> Self {
        Keypoint::new(T::zero(), T::zero(), T::zero())
    }

    pub fn distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// One person's keypoints in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeypointInstance<T> {
    frame_id: String,
    skeleton: Skeleton,
    points: Vec<Keypoint<T>>,
}

impl<T: Scalar> KeypointInstance<T> {
    pub fn new(
        frame_id: impl Into<String>,
        skeleton: Skeleton,
        points: Vec<Keypoint<T>>,
    ) -> Result<Self> {
        if points.len() != skeleton.point_count() {
            return Err(Error::InvalidInstance(format!(
                "{skeleton} needs {} points, got {}",
                skeleton.point_count(),
                points.len()
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "keypoint {i} has non-finite coordinates"
                )));
            }
            if !(p.confidence >= T::zero() && p.confidence <= T::one()) {
                return Err(Error::InvalidInstance(format!(
                    "keypoint {i} confidence {} outside [0, 1]",
                    p.confidence
                )));
            }
        }
        Ok(KeypointInstance {
            frame_id: frame_id.into(),
            skeleton,
            points,
        })
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }

    pub fn skeleton(&self) -> Skeleton {
        self.skeleton
    }

    pub fn points(&self) -> &[Keypoint<T>] {
        &self.points
    }

    pub fn with_frame_id(mut self, frame_id: impl Into<String>) -> Self {
        self.frame_id = frame_id.into();
        self
    }

    /// Applies `f` to every point, revalidating the result.
    pub fn map_points(&self, f: impl FnMut(usize, &Keypoint<T>) -> Keypoint<T>) -> Result<Self> {
        let mut f = f;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| f(i, p))
            .collect();
        Self::new(self.frame_id.clone(), self.skeleton, points)
    }

    /// Area of the tight box around points with confidence above `threshold`.
    pub fn visible_extent(&self, threshold: T) -> Option<(T, T, T, T)> {
        let mut visible = self.points.iter().filter(|p| p.confidence > threshold);
        let first = visible.next()?;
        let init = (first.x, first.y, first.x, first.y);
        Some(visible.fold(init, |(x0, y0, x1, y1), p| {
            (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y))
        }))
    }

    pub(crate) fn ensure_skeleton(&self, expected: Skeleton) -> Result<()> {
        if self.skeleton != expected {
            return Err(Error::WrongSkeleton {
                expected: expected.name(),
                found: self.skeleton.name(),
            });
        }
        Ok(())
    }
}

/// Converts a BODY25 detection to the COCO17 skeleton used by the metric.
pub fn map_body25_to_coco17<T: Scalar>(kp: &KeypointInstance<T>) -> Result<KeypointInstance<T>> {
    kp.ensure_skeleton(Skeleton::Body25)?;
    let points = BODY25_TO_COCO17.iter().map(|&i| kp.points[i]).collect();
    KeypointInstance::new(kp.frame_id.clone(), Skeleton::Coco17, points)
}
