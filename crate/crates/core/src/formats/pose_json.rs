//! Pose-tool JSON: `{"version": .., "people": [{"pose_keypoints_2d": [x, y, c, ...]}]}`.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::keypoint::{Keypoint, KeypointInstance, Skeleton};
use crate::scalar::Scalar;

pub const POSE_JSON_VERSION: f64 = 1.3;

/// Frame id of a pose file: the file stem without a trailing `_keypoints`.
pub fn pose_frame_id(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.strip_suffix("_keypoints") {
        Some(s) => s.to_owned(),
        None => stem,
    }
}

fn person_points<T: Scalar>(path: &Path, idx: usize, person: &Value) -> Result<Vec<Keypoint<T>>> {
    let flat = person
        .get("pose_keypoints_2d")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::format(path, format!("people[{idx}] has no pose_keypoints_2d array")))?;
    if flat.len() % 3 != 0 || Skeleton::from_point_count(flat.len() / 3).is_none() {
        return Err(Error::format(
            path,
            format!(
                "people[{idx}]: {} values, expected 51 (COCO17) or 75 (BODY25)",
                flat.len()
            ),
        ));
    }
    flat.chunks_exact(3)
        .enumerate()
        .map(|(k, triple)| {
            let num = |v: &Value| {
                v.as_f64().ok_or_else(|| {
                    Error::format(path, format!("people[{idx}] keypoint {k}: non-numeric value"))
                })
            };
            Ok(Keypoint::new(
                T::lit(num(&triple[0])?),
                T::lit(num(&triple[1])?),
                T::lit(num(&triple[2])?),
            ))
        })
        .collect()
}

fn detected_area<T: Scalar>(points: &[Keypoint<T>]) -> f64 {
    let mut it = points.iter().filter(|p| p.confidence > T::zero());
    let Some(first) = it.next() else {
        return 0.0;
    };
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
    for p in it {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    ((x1 - x0) * (y1 - y0)).as_f64()
}

/// Reads the single person in a pose file. With `select_largest`, multiple
/// people are resolved by the largest keypoint bounding box (first wins ties).
pub fn parse_pose_json<T: Scalar>(path: impl AsRef<Path>, select_largest: bool) -> Result<KeypointInstance<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Error::format(path, format!("malformed JSON: {e}")))?;
    let people = doc
        .get("people")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::format(path, "missing people array"))?;
    let candidates = people
        .iter()
        .enumerate()
        .map(|(i, p)| person_points::<T>(path, i, p))
        .collect::<Result<Vec<_>>>()?;
    let points = match candidates.len() {
        0 => return Err(Error::format(path, "no people detected")),
        1 => candidates.into_iter().next().expect("one person"),
        n if !select_largest => {
            return Err(Error::format(
                path,
                format!("{n} people detected; pass --select-largest to pick one"),
            ))
        }
        _ => {
            let mut best = 0;
            for (i, c) in candidates.iter().enumerate() {
                if detected_area(c) > detected_area(&candidates[best]) {
                    best = i;
                }
            }
            candidates.into_iter().nth(best).expect("index in range")
        }
    };
    let skeleton = Skeleton::from_point_count(points.len()).expect("checked count");
    KeypointInstance::new(pose_frame_id(path), skeleton, points)
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Writes one pose file holding `people` in order.
pub fn write_pose_json<T: Scalar>(people: &[KeypointInstance<T>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let people: Vec<Value> = people
        .iter()
        .map(|inst| {
            let flat: Vec<f64> = inst
                .points()
                .iter()
                .flat_map(|p| [p.x.as_f64(), p.y.as_f64(), p.confidence.as_f64()])
                .collect();
            json!({ "person_id": [-1], "pose_keypoints_2d": flat })
        })
        .collect();
    let doc = json!({ "version": POSE_JSON_VERSION, "people": people });
    let text = serde_json::to_string(&doc).expect("JSON values serialize");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
