//! Keypoint-invariance metrics. Detections on the original frames act as
//! ground truth; detections on de-identified frames are the predictions.

mod eval;
mod instance;
mod oks;

pub use eval::{
    evaluate_set, per_keypoint_distribution, threshold_metrics, EvalMode, EvalSummary,
    Histogram, KeypointHistogram, ThresholdMetric, Unevaluable, HISTOGRAM_BINS,
};
pub use instance::{
    is_head_keypoint, map_body25_to_coco17, Keypoint, KeypointInstance, Skeleton,
    BODY25_TO_COCO17, COCO17_NAMES,
};
pub use oks::{
    estimate_scale, keypoint_similarity, oks, oks_with_scale, OksConfig, OksResult,
    COCO17_SIGMAS,
};
