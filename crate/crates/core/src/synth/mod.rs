//! Seeded generators that plant known structure for every metric.
//!
//! All generators draw from ChaCha8 streams (`rand_chacha`), whose output is
//! specified bit-for-bit, so a seed reproduces the same data on every
//! platform.

mod descriptors;
mod faces;
mod keypoints;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use descriptors::{
    chi_mean, gen_descriptor_clusters, ClusterSubset, DescriptorClusterSpec, PlantedGeometry,
};
pub use faces::{gen_identity_dataset, render_face, FaceJitter, FaceParams, IdentitySpec};
pub use keypoints::{
    gen_keypoint_instances, perturb_keypoints, PerturbationModel, SKELETON_TEMPLATE,
};

/// ChaCha8 generator for `seed`, on an independent `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
