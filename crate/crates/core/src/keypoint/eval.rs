use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::instance::{KeypointInstance, COCO17_NAMES};
use super::oks::{oks, OksConfig, OksResult};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// AP = AR = share of pairs whose OKS reaches the threshold.
    #[default]
    Fraction,
    /// COCO-style ranking by mean prediction confidence with 101-point
    /// interpolated precision.
    Ranked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMetric<T> {
    pub threshold: T,
    pub ap: T,
    pub ar: T,
}

pub const HISTOGRAM_BINS: usize = 100;

/// Fixed 100-bin histogram over `[0, 1]`; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Default for Histogram {
    fn default() -> Self {
        Histogram {
            counts: vec![0; HISTOGRAM_BINS],
        }
    }
}

impl Histogram {
    pub fn edge(i: usize) -> f64 {
        i as f64 / HISTOGRAM_BINS as f64
    }

    pub fn edges() -> Vec<f64> {
        (0..=HISTOGRAM_BINS).map(Self::edge).collect()
    }

    pub fn bin_of(value: f64) -> usize {
        let last = HISTOGRAM_BINS - 1;
        if !(value > 0.0) {
            return 0;
        }
        let mut idx = ((value * HISTOGRAM_BINS as f64).floor() as usize).min(last);
        if idx < last && value >= Self::edge(idx + 1) {
            idx += 1;
        } else if idx > 0 && value < Self::edge(idx) {
            idx -= 1;
        }
        idx
    }

    pub fn add(&mut self, value: f64) {
        self.counts[Self::bin_of(value)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeypointHistogram {
    pub keypoint: String,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unevaluable {
    pub frame_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary<T> {
    pub mode: EvalMode,
    pub per_threshold: Vec<ThresholdMetric<T>>,
    /// Mean of the per-threshold AP values.
    pub ap_mean: T,
    pub ar_mean: T,
    pub evaluable: usize,
    pub unevaluable: Vec<Unevaluable>,
    /// `(frame_id, OKS)` per evaluable pair, sorted by frame id.
    pub instance_oks: Vec<(String, T)>,
    pub oks_histogram: Histogram,
    pub per_keypoint: Vec<KeypointHistogram>,
}

impl<T: Scalar> EvalSummary<T> {
    pub fn at(&self, threshold: T) -> Option<&ThresholdMetric<T>> {
        self.per_threshold.iter().find(|m| m.threshold == threshold)
    }
}

/// Fraction-mode AP/AR for a list of instance OKS values.
pub fn threshold_metrics<T: Scalar>(oks_values: &[T], thresholds: &[T]) -> Result<Vec<ThresholdMetric<T>>> {
    if oks_values.is_empty() {
        return Err(Error::EmptyInput("no OKS values"));
    }
    let n = T::from_count(oks_values.len());
    Ok(thresholds
        .iter()
        .map(|&t| {
            let hits = oks_values.iter().filter(|&&v| v >= t).count();
            let rate = T::from_count(hits) / n;
            ThresholdMetric {
                threshold: t,
                ap: rate,
                ar: rate,
            }
        })
        .collect())
}

struct Scored<'a, T> {
    score: T,
    frame_id: &'a str,
    oks: T,
}

fn ranked_metrics<T: Scalar>(entries: &mut [Scored<'_, T>], thresholds: &[T]) -> Vec<ThresholdMetric<T>> {
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.frame_id.cmp(b.frame_id))
    });
    let total = entries.len();
    let recall_points: Vec<T> = (0..=100).map(|i| T::from_count(i) / T::lit(100.0)).collect();
    thresholds
        .iter()
        .map(|&t| {
            let mut tp = 0usize;
            let mut precision = Vec::with_capacity(total);
            let mut recall = Vec::with_capacity(total);
            for (rank, e) in entries.iter().enumerate() {
                if e.oks >= t {
                    tp += 1;
                }
                precision.push(T::from_count(tp) / T::from_count(rank + 1));
                recall.push(T::from_count(tp) / T::from_count(total));
            }
            // Monotone precision envelope from the right.
            for i in (1..precision.len()).rev() {
                if precision[i] > precision[i - 1] {
                    precision[i - 1] = precision[i];
                }
            }
            let mut area = T::zero();
            for &r in &recall_points {
                let idx = recall.partition_point(|&rc| rc < r);
                if idx < precision.len() {
                    area = area + precision[idx];
                }
            }
            ThresholdMetric {
                threshold: t,
                ap: area / T::from_count(recall_points.len()),
                ar: T::from_count(tp) / T::from_count(total),
            }
        })
        .collect()
}

struct PairOutcome<'a, T> {
    frame_id: &'a str,
    score: T,
    result: OksResult<T>,
}

fn score_pairs<'a, T: Scalar>(
    pairs: &'a [(KeypointInstance<T>, KeypointInstance<T>)],
    cfg: &OksConfig<T>,
) -> Result<(Vec<PairOutcome<'a, T>>, Vec<Unevaluable>)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no keypoint pairs"));
    }
    cfg.validate()?;
    let mut outcomes = Vec::with_capacity(pairs.len());
    let mut skipped = Vec::new();
    for (gt, pred) in pairs {
        match oks(gt, pred, cfg) {
            Ok(result) => {
                let visible: Vec<T> = gt
                    .points()
                    .iter()
                    .zip(pred.points())
                    .filter(|(g, _)| cfg.is_visible(g.confidence))
                    .map(|(_, p)| p.confidence)
                    .collect();
                let score = visible.iter().copied().sum::<T>() / T::from_count(visible.len());
                outcomes.push(PairOutcome {
                    frame_id: gt.frame_id(),
                    score,
                    result,
                });
            }
            Err(Error::Unevaluable(reason)) => skipped.push(Unevaluable {
                frame_id: gt.frame_id().to_owned(),
                reason,
            }),
            Err(e) => return Err(e),
        }
    }
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("no evaluable keypoint pairs"));
    }
    skipped.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    Ok((outcomes, skipped))
}

fn keypoint_histograms<T: Scalar>(outcomes: &[PairOutcome<'_, T>]) -> Vec<KeypointHistogram> {
    let mut hists: Vec<KeypointHistogram> = COCO17_NAMES
        .iter()
        .map(|name| KeypointHistogram {
            keypoint: (*name).to_owned(),
            histogram: Histogram::default(),
        })
        .collect();
    for o in outcomes {
        for (h, sim) in hists.iter_mut().zip(&o.result.per_keypoint) {
            if let Some(sim) = sim {
                h.histogram.add(sim.as_f64());
            }
        }
    }
    hists
}

/// Compares every `(ground truth, prediction)` pair and aggregates AP/AR over
/// the configured OKS thresholds.
///
/// Pairs whose ground truth cannot be scored (too few visible keypoints, zero
/// extent) are listed in [`EvalSummary::unevaluable`] and left out.
pub fn evaluate_set<T: Scalar>(
    pairs: &[(KeypointInstance<T>, KeypointInstance<T>)],
    cfg: &OksConfig<T>,
    mode: EvalMode,
) -> Result<EvalSummary<T>> {
    let (outcomes, unevaluable) = score_pairs(pairs, cfg)?;
    let per_threshold = match mode {
        EvalMode::Fraction => {
            let values: Vec<T> = outcomes.iter().map(|o| o.result.oks).collect();
            threshold_metrics(&values, &cfg.thresholds)?
        }
        EvalMode::Ranked => {
            let mut entries: Vec<Scored<'_, T>> = outcomes
                .iter()
                .map(|o| Scored {
                    score: o.score,
                    frame_id: o.frame_id,
                    oks: o.result.oks,
                })
                .collect();
            ranked_metrics(&mut entries, &cfg.thresholds)
        }
    };
    let count = T::from_count(per_threshold.len());
    let ap_mean = per_threshold.iter().map(|m| m.ap).sum::<T>() / count;
    let ar_mean = per_threshold.iter().map(|m| m.ar).sum::<T>() / count;

    let mut instance_oks: Vec<(String, T)> = outcomes
        .iter()
        .map(|o| (o.frame_id.to_owned(), o.result.oks))
        .collect();
    instance_oks.sort_by(|a, b| a.0.cmp(&b.0));
    let mut oks_histogram = Histogram::default();
    for (_, v) in &instance_oks {
        oks_histogram.add(v.as_f64());
    }

    Ok(EvalSummary {
        mode,
        per_threshold,
        ap_mean,
        ar_mean,
        evaluable: outcomes.len(),
        unevaluable,
        instance_oks,
        oks_histogram,
        per_keypoint: keypoint_histograms(&outcomes),
    })
}

/// Per-keypoint similarity histograms over every pair where that keypoint is
/// visible in the ground truth.
pub fn per_keypoint_distribution<T: Scalar>(
    pairs: &[(KeypointInstance<T>, KeypointInstance<T>)],
    cfg: &OksConfig<T>,
) -> Result<Vec<KeypointHistogram>> {
    let (outcomes, _) = score_pairs(pairs, cfg)?;
    Ok(keypoint_histograms(&outcomes))
}
