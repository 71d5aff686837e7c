//! File formats shared by ingestion and the synthetic generators.

mod descriptor_csv;
mod manifest;
mod pose_json;

pub use descriptor_csv::{read_descriptor_csv, read_pairing_csv, write_descriptor_csv, write_pairing_csv};
pub use manifest::{parse_facebox_manifest, write_facebox_manifest};
pub use pose_json::{parse_pose_json, pose_frame_id, write_pose_json, POSE_JSON_VERSION};
