//! De-identification transforms for face regions in video frames, plus the
//! metrics used to judge them: keypoint invariance (OKS, AP/AR) and identity
//! separation over face descriptors. A desk-scale shared-encoder face-swap
//! network and seeded synthetic data generators complete the toolkit.
//!
//! Metric and training code is generic over [`Scalar`] (`f32` or `f64`);
//! the `*64` aliases at the crate root fix the common `f64` instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod faceswap;
pub mod formats;
pub mod identity;
pub mod keypoint;
pub mod raster;
pub mod synth;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Keypoint64 = keypoint::Keypoint<f64>;
pub type KeypointInstance64 = keypoint::KeypointInstance<f64>;
pub type OksConfig64 = keypoint::OksConfig<f64>;
pub type OksResult64 = keypoint::OksResult<f64>;
pub type EvalSummary64 = keypoint::EvalSummary<f64>;
pub type FaceDescriptor64 = identity::FaceDescriptor<f64>;
pub type DistanceReport64 = identity::DistanceReport<f64>;
pub type RocCurve64 = identity::RocCurve<f64>;
pub type SwapModel64 = faceswap::SwapModel<f64>;
pub type TrainConfig64 = faceswap::TrainConfig<f64>;
pub type TinyFaceSample64 = faceswap::TinyFaceSample<f64>;
