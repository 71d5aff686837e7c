use super::distance::{euclidean_distance, intra_stats};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and eigenvectors stored as columns of a row-major
/// `n × n` matrix.
fn symmetric_eigen<T: Scalar>(mut a: Vec<T>, n: usize) -> (Vec<T>, Vec<T>) {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let total: T = a.iter().map(|&x| x * x).sum::<T>();
    let tol = total * T::epsilon() * T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    (values, v)
}

/// Projects descriptors onto their top two principal components.
///
/// Each component is sign-normalised so that its largest-magnitude
/// coordinate is positive; the output is deterministic for a given input.
pub fn pca_embed_2d<T: Scalar>(vectors: &[&[T]]) -> Result<Vec<[T; 2]>> {
    if vectors.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 descriptors for a 2-D embedding, got {}",
            vectors.len()
        )));
    }
    let dim = vectors[0].len();
    if dim < 2 {
        return Err(Error::InvalidArgument("descriptor dimension must be at least 2".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: v.len(),
        });
    }
    if vectors.iter().all(|v| *v == vectors[0]) {
        return Err(Error::Degenerate("all descriptors are identical".into()));
    }

    let n = T::from_count(vectors.len());
    let mut mean = vec![T::zero(); dim];
    for v in vectors {
        for (m, &x) in mean.iter_mut().zip(*v) {
            *m = *m + x;
        }
    }
    for m in &mut mean {
        *m = *m / n;
    }
    let centered: Vec<Vec<T>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(&x, &m)| x - m).collect())
        .collect();

    let mut cov = vec![T::zero(); dim * dim];
    for row in &centered {
        for i in 0..dim {
            let ri = row[i];
            if ri == T::zero() {
                continue;
            }
            for j in i..dim {
                cov[i * dim + j] = cov[i * dim + j] + ri * row[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let c = cov[i * dim + j] / n;
            cov[i * dim + j] = c;
            cov[j * dim + i] = c;
        }
    }

    let (values, vecs) = symmetric_eigen(cov, dim);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    if !(values[order[0]] > T::zero()) {
        return Err(Error::Degenerate("descriptor covariance is zero".into()));
    }

    let components: Vec<Vec<T>> = order[..2]
        .iter()
        .map(|&col| {
            let mut c: Vec<T> = (0..dim).map(|r| vecs[r * dim + col]).collect();
            let mut best = 0;
            for (i, x) in c.iter().enumerate() {
                if x.abs() > c[best].abs() {
                    best = i;
                }
            }
            if c[best] < T::zero() {
                for x in &mut c {
                    *x = -*x;
                }
            }
            c
        })
        .collect();

    Ok(centered
        .iter()
        .map(|row| {
            let proj = |c: &[T]| row.iter().zip(c).map(|(&x, &w)| x * w).sum::<T>();
            [proj(&components[0]), proj(&components[1])]
        })
        .collect())
}

/// Worst-case separation of descriptor subsets: the smallest centroid
/// distance between any two subsets over the largest subset radius
/// (`intra_mean + 2·intra_std`).
///
/// Returns `+∞` when every subset has zero radius and centroids differ, and
/// 0 whenever two centroids coincide.
pub fn cluster_separation<T: Scalar>(subsets: &[Vec<&[T]>]) -> Result<T> {
    if subsets.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 subsets".into()));
    }
    let stats = subsets
        .iter()
        .map(|s| intra_stats("", s.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let mut min_gap = T::infinity();
    for (i, a) in stats.iter().enumerate() {
        for b in &stats[i + 1..] {
            min_gap = min_gap.min(euclidean_distance(&a.centroid, &b.centroid)?);
        }
    }
    let radius = stats
        .iter()
        .map(|s| s.intra_mean + T::lit(2.0) * s.intra_std)
        .fold(T::zero(), T::max);
    if min_gap == T::zero() {
        return Ok(T::zero());
    }
    if radius == T::zero() {
        return Ok(T::infinity());
    }
    Ok(min_gap / radius)
}
