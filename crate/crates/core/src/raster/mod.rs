//! 8-bit raster frames and the two traditional face de-identification
//! transforms (solid mask, box blur) applied to a face region.

mod image;
mod io;
mod transform;

pub use self::image::{FaceBox, RasterImage, Region};
pub use self::io::{read_raster, write_raster, RasterFormat};
pub use self::transform::{apply_blur, apply_mask, blur_kernel_size};
