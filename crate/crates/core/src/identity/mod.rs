//! De-identification reliability over precomputed face descriptors.

mod descriptor;
mod distance;
mod embed;
mod roc;

pub use descriptor::{group_by_subset, FaceDescriptor};
pub use distance::{
    acceptance_distances, centroid, distance_table, euclidean_distance, infer_swap_sources, intra_stats,
    verify_identity, DistanceReport, DistanceRow, MeanStd, PairingMode, SubsetKind,
    SubsetStats, DEFAULT_MATCH_THRESHOLD,
};
pub use embed::{cluster_separation, pca_embed_2d};
pub use roc::{roc, RocCurve, RocPoint};
