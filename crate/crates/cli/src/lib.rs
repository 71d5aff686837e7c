//! Pipeline orchestration for the `deidkit` command: de-identify frame trees,
//! evaluate keypoint and identity invariance, and emit reports and plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod cli;
pub mod config;
pub mod deid;
pub mod error;
pub mod eval;
pub mod plots;
pub mod report;

pub use error::{CliError, CliResult};
