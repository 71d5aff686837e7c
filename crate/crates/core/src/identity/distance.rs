use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::descriptor::{group_by_subset, FaceDescriptor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Descriptor distance below which two faces are taken as the same person.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.6;

pub fn euclidean_distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt())
}

/// Componentwise mean of a non-empty set of equal-length vectors.
pub fn centroid<'a, T: Scalar>(vectors: impl IntoIterator<Item = &'a [T]>) -> Result<Vec<T>> {
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::EmptyInput("centroid of empty set"))?;
    let mut acc = first.to_vec();
    let mut n = 1usize;
    for v in iter {
        if v.len() != acc.len() {
            return Err(Error::DimensionMismatch {
                left: acc.len(),
                right: v.len(),
            });
        }
        for (a, &x) in acc.iter_mut().zip(v) {
            *a = *a + x;
        }
        n += 1;
    }
    let n = T::from_count(n);
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Mean and population standard deviation (divisor `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Scalar> MeanStd<T> {
    pub fn of(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("statistics of empty list"));
        }
        let n = T::from_count(values.len());
        let mean = values.iter().copied().sum::<T>() / n;
        let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        Ok(MeanStd {
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetStats<T> {
    pub subset: String,
    pub centroid: Vec<T>,
    /// Mean member-to-centroid distance.
    pub intra_mean: T,
    pub intra_std: T,
}

pub fn intra_stats<'a, T: Scalar>(
    subset: &str,
    vectors: impl IntoIterator<Item = &'a [T]> + Clone,
) -> Result<SubsetStats<T>> {
    let c = centroid(vectors.clone())?;
    let dists = distances_to(vectors, &c)?;
    let ms = MeanStd::of(&dists)?;
    Ok(SubsetStats {
        subset: subset.to_owned(),
        centroid: c,
        intra_mean: ms.mean,
        intra_std: ms.std,
    })
}

fn distances_to<'a, T: Scalar>(vectors: impl IntoIterator<Item = &'a [T]>, point: &[T]) -> Result<Vec<T>> {
    vectors
        .into_iter()
        .map(|v| euclidean_distance(v, point))
        .collect()
}

/// Same-person decision: distance to the reference strictly below `threshold`.
pub fn verify_identity<T: Scalar>(descriptor: &[T], reference: &[T], threshold: T) -> Result<bool> {
    Ok(euclidean_distance(descriptor, reference)? < threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// Each swapped descriptor against the original of its own frame.
    #[default]
    FramePaired,
    /// Every swapped descriptor against every original descriptor.
    AllPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetKind {
    Swapped,
    Original,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow<T> {
    pub subset: String,
    pub kind: SubsetKind,
    pub count: usize,
    pub intra: MeanStd<T>,
    /// Swapped subsets only.
    pub to_original: Option<MeanStd<T>>,
    /// Swapped subsets only.
    pub to_average_original: Option<MeanStd<T>>,
    pub to_average_target: MeanStd<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport<T> {
    pub target_subset: String,
    pub pairing_mode: PairingMode,
    /// Swapped subsets first, then originals, each in label order.
    pub rows: Vec<DistanceRow<T>>,
}

impl<T> DistanceReport<T> {
    pub fn row(&self, subset: &str) -> Option<&DistanceRow<T>> {
        self.rows.iter().find(|r| r.subset == subset)
    }
}

/// Maps every `swapped_<name>` label to `original_<name>`.
pub fn infer_swap_sources<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, String>> {
    let labels: Vec<&str> = labels.into_iter().collect();
    let mut out = BTreeMap::new();
    for label in &labels {
        if let Some(name) = label.strip_prefix("swapped_") {
            let original = format!("original_{name}");
            if !labels.contains(&original.as_str()) {
                return Err(Error::UnknownSubset(original));
            }
            out.insert((*label).to_owned(), original);
        }
    }
    Ok(out)
}

/// Builds the per-subset distance table.
///
/// `swap_sources` maps each swapped subset to the original subset it was
/// generated from; every other subset is reported as an original. `pairing`
/// maps swapped descriptor ids to original descriptor ids and is only read in
/// [`PairingMode::FramePaired`].
pub fn distance_table<T: Scalar>(
    descriptors: &[FaceDescriptor<T>],
    pairing: &BTreeMap<String, String>,
    swap_sources: &BTreeMap<String, String>,
    target_subset: &str,
    mode: PairingMode,
) -> Result<DistanceReport<T>> {
    let groups = group_by_subset(descriptors)?;
    let target = groups
        .get(target_subset)
        .ok_or_else(|| Error::UnknownSubset(target_subset.to_owned()))?;
    let target_centroid = centroid(target.iter().map(|d| d.vector.as_slice()))?;
    for (swapped, original) in swap_sources {
        for label in [swapped, original] {
            if !groups.contains_key(label.as_str()) {
                return Err(Error::UnknownSubset(label.clone()));
            }
        }
    }

    let by_id: BTreeMap<&str, &FaceDescriptor<T>> =
        descriptors.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut swapped_rows = Vec::new();
    let mut original_rows = Vec::new();
    for (&label, members) in &groups {
        let vecs = || members.iter().map(|d| d.vector.as_slice());
        let stats = intra_stats(label, vecs())?;
        let to_average_target = MeanStd::of(&distances_to(vecs(), &target_centroid)?)?;
        let intra = MeanStd {
            mean: stats.intra_mean,
            std: stats.intra_std,
        };
        match swap_sources.get(label) {
            Some(original_label) => {
                let originals = &groups[original_label.as_str()];
                let original_centroid = centroid(originals.iter().map(|d| d.vector.as_slice()))?;
                let to_original = match mode {
                    PairingMode::FramePaired => {
                        frame_paired(members, original_label, pairing, &by_id)?
                    }
                    PairingMode::AllPairs => {
                        let mut out = Vec::with_capacity(members.len() * originals.len());
                        for s in members {
                            for o in originals {
                                out.push(euclidean_distance(&s.vector, &o.vector)?);
                            }
                        }
                        out
                    }
                };
                swapped_rows.push(DistanceRow {
                    subset: label.to_owned(),
                    kind: SubsetKind::Swapped,
                    count: members.len(),
                    intra,
                    to_original: Some(MeanStd::of(&to_original)?),
                    to_average_original: Some(MeanStd::of(&distances_to(vecs(), &original_centroid)?)?),
                    to_average_target,
                });
            }
            None => original_rows.push(DistanceRow {
                subset: label.to_owned(),
                kind: SubsetKind::Original,
                count: members.len(),
                intra,
                to_original: None,
                to_average_original: None,
                to_average_target,
            }),
        }
    }
    swapped_rows.extend(original_rows);
    Ok(DistanceReport {
        target_subset: target_subset.to_owned(),
        pairing_mode: mode,
        rows: swapped_rows,
    })
}

fn frame_paired<T: Scalar>(
    members: &[&FaceDescriptor<T>],
    original_label: &str,
    pairing: &BTreeMap<String, String>,
    by_id: &BTreeMap<&str, &FaceDescriptor<T>>,
) -> Result<Vec<T>> {
    let mut missing = Vec::new();
    let mut out = Vec::with_capacity(members.len());
    for s in members {
        let partner = pairing
            .get(&s.id)
            .and_then(|oid| by_id.get(oid.as_str()))
            .filter(|o| o.subset == original_label);
        match partner {
            Some(o) => out.push(euclidean_distance(&s.vector, &o.vector)?),
            None => missing.push(s.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPairing(missing));
    }
    Ok(out)
}

/// Distances of every swapped descriptor to the target centroid (genuine)
/// and to the centroid of its own original subset (impostor).
pub fn acceptance_distances<T: Scalar>(
    descriptors: &[FaceDescriptor<T>],
    swap_sources: &BTreeMap<String, String>,
    target_subset: &str,
) -> Result<(Vec<T>, Vec<T>)> {
    let groups = group_by_subset(descriptors)?;
    let subset_centroid = |label: &str| -> Result<Vec<T>> {
        let members = groups
            .get(label)
            .ok_or_else(|| Error::UnknownSubset(label.to_owned()))?;
        centroid(members.iter().map(|d| d.vector.as_slice()))
    };
    let target = subset_centroid(target_subset)?;
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for (swapped, original) in swap_sources {
        let original_centroid = subset_centroid(original)?;
        let members = groups
            .get(swapped.as_str())
            .ok_or_else(|| Error::UnknownSubset(swapped.clone()))?;
        for d in members {
            genuine.push(euclidean_distance(&d.vector, &target)?);
            impostor.push(euclidean_distance(&d.vector, &original_centroid)?);
        }
    }
    if genuine.is_empty() {
        return Err(Error::EmptyInput("no swapped descriptors"));
    }
    Ok((genuine, impostor))
}
