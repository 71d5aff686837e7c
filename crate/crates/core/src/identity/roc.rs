use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint<T> {
    pub threshold: T,
    pub far: T,
    pub tar: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve<T> {
    /// Ordered by increasing threshold, hence non-decreasing FAR and TAR.
    pub points: Vec<RocPoint<T>>,
    pub auc: T,
}

/// Acceptance-rate curve for descriptor distances.
///
/// At threshold `τ` the true acceptance rate is the share of `genuine`
/// distances below `τ` and the false acceptance rate the share of `impostor`
/// distances below `τ`. Thresholds are every observed distance plus one
/// sentinel below the minimum and one above the maximum, so the curve runs
/// from (0, 0) to (1, 1). The area is the trapezoidal integral over FAR.
pub fn roc<T: Scalar>(genuine: &[T], impostor: &[T]) -> Result<RocCurve<T>> {
    if genuine.is_empty() {
        return Err(Error::EmptyInput("no genuine distances"));
    }
    if impostor.is_empty() {
        return Err(Error::EmptyInput("no impostor distances"));
    }
    if genuine.iter().chain(impostor).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("distances must be finite".into()));
    }
    let sorted = |v: &[T]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v
    };
    let g = sorted(genuine);
    let i = sorted(impostor);
    let mut thresholds: Vec<T> = g.iter().chain(&i).copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    thresholds.dedup();
    let lo = thresholds[0] - T::one();
    let hi = thresholds[thresholds.len() - 1] + T::one();
    thresholds.insert(0, lo);
    thresholds.push(hi);

    let (ng, ni) = (g.len(), i.len());
    let counts: Vec<(usize, usize)> = thresholds
        .iter()
        .map(|&t| (g.partition_point(|&v| v < t), i.partition_point(|&v| v < t)))
        .collect();
    // Twice the area in units of 1/(ng·ni), accumulated exactly in integers.
    let mut twice_area: u128 = 0;
    for w in counts.windows(2) {
        let (g0, i0) = w[0];
        let (g1, i1) = w[1];
        twice_area += (i1 - i0) as u128 * (g0 + g1) as u128;
    }
    let auc = T::from_u128(twice_area).expect("area fits")
        / (T::lit(2.0) * T::from_count(ng) * T::from_count(ni));
    let points = thresholds
        .iter()
        .zip(&counts)
        .map(|(&threshold, &(gc, ic))| RocPoint {
            threshold,
            far: T::from_count(ic) / T::from_count(ni),
            tar: T::from_count(gc) / T::from_count(ng),
        })
        .collect();
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive sweep: evaluate the rates on a dense grid of candidate
    /// thresholds placed between and around every observed value.
    fn sweep_auc(genuine: &[f64], impostor: &[f64]) -> f64 {
        let mut cuts: Vec<f64> = genuine.iter().chain(impostor).copied().collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut taus = vec![cuts[0] - 1.0];
        for w in cuts.windows(2) {
            taus.push(w[0]);
            taus.push(0.5 * (w[0] + w[1]));
        }
        taus.push(*cuts.last().unwrap());
        taus.push(cuts.last().unwrap() + 1.0);
        let rate = |v: &[f64], t: f64| v.iter().filter(|&&x| x < t).count() as f64 / v.len() as f64;
        let pts: Vec<(f64, f64)> = taus.iter().map(|&t| (rate(impostor, t), rate(genuine, t))).collect();
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
            .sum()
    }

    #[test]
    fn small_example_against_sweep() {
        let (g, i) = ([0.1, 0.2], [0.15, 0.3]);
        let curve = roc(&g, &i).unwrap();
        assert_eq!(curve.auc, 0.75);
        assert_eq!(sweep_auc(&g, &i), 0.75);
        let fr: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.far, p.tar)).collect();
        assert_eq!(
            fr,
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn separated_and_identical() {
        let perfect = roc(&[0.1, 0.2, 0.3], &[0.5, 0.6]).unwrap();
        assert_eq!(perfect.auc, 1.0);
        assert!(perfect.points.iter().any(|p| p.far == 0.0 && p.tar == 1.0));
        let same = [0.3, 0.1, 0.7, 0.7];
        assert_eq!(roc(&same, &same).unwrap().auc, 0.5);
        assert!(roc::<f64>(&[], &[1.0]).is_err());
        assert!(roc(&[1.0], &[]).is_err());
    }
}
