//! Desk-scale face swap: one encoder shared by two identities, one decoder
//! per identity. Swapping encodes a face of X and decodes it with Y's decoder.

mod checkpoint;
mod model;
mod train;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_VERSION};
pub use model::{
    Dense, Identity, Stack, SwapGradients, SwapModel, TinyFaceSample, HIDDEN, IMAGE_SIDE,
    LATENT, LEAKY_SLOPE, PIXELS,
};
pub use train::{
    reconstruction_loss, swap, train, StepLosses, TrainConfig, Trainer,
};
