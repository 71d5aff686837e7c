use std::collections::{BTreeMap, HashSet};

use rand_distr::{Distribution, StandardNormal};

use super::stream_rng;
use crate::error::{Error, Result};
use crate::identity::FaceDescriptor;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSubset<T> {
    pub label: String,
    pub centroid: Vec<T>,
    /// Isotropic per-coordinate standard deviation.
    pub sigma: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorClusterSpec<T> {
    pub dim: usize,
    pub subsets: Vec<ClusterSubset<T>>,
}

impl<T: Scalar> DescriptorClusterSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let mut labels = HashSet::new();
        for s in &self.subsets {
            if !labels.insert(s.label.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate subset label {:?}", s.label)));
            }
            if s.centroid.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    left: self.dim,
                    right: s.centroid.len(),
                });
            }
            if !(s.sigma >= T::zero() && s.sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("subset {}: sigma must be >= 0", s.label)));
            }
            if s.count == 0 {
                return Err(Error::InvalidArgument(format!("subset {}: count must be >= 1", s.label)));
            }
        }
        Ok(())
    }
}

/// Draws every subset i.i.d. from `N(centroid, σ² I)`. Ids are
/// `<label>_<index>` with a four-digit zero-padded index.
pub fn gen_descriptor_clusters<T: Scalar>(
    spec: &DescriptorClusterSpec<T>,
    seed: u64,
) -> Result<Vec<FaceDescriptor<T>>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.subsets.iter().map(|s| s.count).sum());
    for (k, s) in spec.subsets.iter().enumerate() {
        let mut rng = stream_rng(seed, k as u64);
        for i in 0..s.count {
            let vector = s
                .centroid
                .iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + s.sigma * T::lit(z)
                })
                .collect();
            out.push(FaceDescriptor::new(format!("{}_{i:04}", s.label), s.label.clone(), vector));
        }
    }
    Ok(out)
}

/// Mean of the chi distribution with `dim` degrees of freedom, i.e. the
/// expected norm of a standard normal vector in `dim` dimensions.
pub fn chi_mean(dim: usize) -> f64 {
    assert!(dim >= 1);
    // r(d) = Γ((d+1)/2) / Γ(d/2), stepped two dimensions at a time.
    let (mut d, mut r) = if dim % 2 == 1 {
        (1usize, 1.0 / std::f64::consts::PI.sqrt())
    } else {
        (2usize, std::f64::consts::PI.sqrt() / 2.0)
    };
    while d < dim {
        r *= (d as f64 + 1.0) / d as f64;
        d += 2;
    }
    std::f64::consts::SQRT_2 * r
}

/// Descriptor layout mimicking a de-identification study: a target subject,
/// and per patient an original subset plus a swapped subset.
///
/// Distances here are between subset centroids. Member-level table means
/// come out near `sqrt(d² + σ² D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGeometry {
    pub dim: usize,
    pub count: usize,
    /// Expected member-to-own-centroid distance.
    pub intra_mean: f64,
    pub swapped_to_original: f64,
    pub swapped_to_target: f64,
    pub original_to_target: f64,
    pub patients: Vec<String>,
    pub target: String,
}

impl PlantedGeometry {
    /// Typical de-identification proportions: tight subsets (≈0.19), swapped
    /// faces ≈0.46 from the target and ≈0.63 from their source, originals
    /// ≈0.75 from the target.
    pub fn study_like(dim: usize, count: usize) -> Self {
        PlantedGeometry {
            dim,
            count,
            intra_mean: 0.19,
            swapped_to_original: 0.63,
            swapped_to_target: 0.46,
            original_to_target: 0.75,
            patients: vec!["F".into(), "M".into()],
            target: "A".into(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.intra_mean / chi_mean(self.dim)
    }

    pub fn target_label(&self) -> String {
        format!("original_{}", self.target)
    }

    /// Centroids per label. The target sits at the origin, patient `k`'s
    /// original on axis `2k`, and its swapped subset in the plane of axes
    /// `2k` and `2k + 1`.
    pub fn centroids(&self) -> Result<BTreeMap<String, Vec<f64>>> {
        if self.dim < 2 * self.patients.len() {
            return Err(Error::InvalidArgument(format!(
                "dimension {} too small for {} patients",
                self.dim,
                self.patients.len()
            )));
        }
        let (dt, dor, dot) = (
            self.swapped_to_target,
            self.swapped_to_original,
            self.original_to_target,
        );
        let along = (dt * dt - dor * dor + dot * dot) / (2.0 * dot);
        let across2 = dt * dt - along * along;
        if !(across2 >= 0.0) || dot <= 0.0 {
            return Err(Error::InvalidArgument(
                "planted distances violate the triangle inequality".into(),
            ));
        }
        let mut out = BTreeMap::new();
        out.insert(self.target_label(), vec![0.0; self.dim]);
        for (k, p) in self.patients.iter().enumerate() {
            let mut original = vec![0.0; self.dim];
            original[2 * k] = dot;
            let mut swapped = vec![0.0; self.dim];
            swapped[2 * k] = along;
            swapped[2 * k + 1] = across2.sqrt();
            out.insert(format!("original_{p}"), original);
            out.insert(format!("swapped_{p}"), swapped);
        }
        Ok(out)
    }

    pub fn cluster_spec<T: Scalar>(&self) -> Result<DescriptorClusterSpec<T>> {
        let sigma = T::lit(self.sigma());
        let subsets = self
            .centroids()?
            .into_iter()
            .map(|(label, c)| ClusterSubset {
                label,
                centroid: c.into_iter().map(T::lit).collect(),
                sigma,
                count: self.count,
            })
            .collect();
        Ok(DescriptorClusterSpec {
            dim: self.dim,
            subsets,
        })
    }

    /// Frame pairing `swapped_<p>_<i>` → `original_<p>_<i>`.
    pub fn pairing(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for p in &self.patients {
            for i in 0..self.count {
                out.insert(format!("swapped_{p}_{i:04}"), format!("original_{p}_{i:04}"));
            }
        }
        out
    }
}
