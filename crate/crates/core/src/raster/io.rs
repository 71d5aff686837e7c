use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ColorType, DynamicImage, ImageFormat};

use super::image::RasterImage;
use crate::error::{Error, Result};

/// On-disk raster encodings. Netpbm is binary `P5` (gray) / `P6` (RGB) with maxval 255.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    Netpbm,
    Png,
}

impl RasterFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "ppm" | "pgm" | "pnm" => Some(RasterFormat::Netpbm),
            "png" => Some(RasterFormat::Png),
            _ => None,
        }
    }
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads a Netpbm (`P5`/`P6`) or PNG file, detected from its leading bytes.
pub fn read_raster(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(path, &bytes)
    } else if bytes.first() == Some(&b'P') {
        decode_netpbm(path, &bytes)
    } else {
        Err(Error::MalformedRaster {
            path: path.to_path_buf(),
            offset: 0,
            reason: "unrecognised file signature".into(),
        })
    }
}

/// Writes `img` in the format implied by the file extension.
pub fn write_raster(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = RasterFormat::from_path(path).ok_or_else(|| {
        Error::format(path, "unknown raster extension (expected .ppm, .pgm, .pnm or .png)")
    })?;
    let bytes = match format {
        RasterFormat::Netpbm => encode_netpbm(img),
        RasterFormat::Png => encode_png(path, img)?,
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn encode_netpbm(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

struct HeaderCursor<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::MalformedRaster {
            path: self.path.to_path_buf(),
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                self.pos = start;
                self.err(format!("{what} out of range"))
            })
    }
}

fn decode_netpbm(path: &Path, bytes: &[u8]) -> Result<RasterImage> {
    let mut cur = HeaderCursor {
        path,
        bytes,
        pos: 0,
    };
    if bytes.len() < 2 {
        return Err(cur.err("truncated magic number"));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        b"P1" | b"P2" | b"P3" | b"P4" | b"P7" => {
            return Err(Error::UnsupportedChannels {
                path: path.to_path_buf(),
                reason: format!(
                    "netpbm variant {} (only binary P5/P6 supported)",
                    String::from_utf8_lossy(&bytes[..2])
                ),
            })
        }
        _ => return Err(cur.err("bad magic number")),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.err("zero image dimension"));
    }
    if maxval != 255 {
        return Err(cur.err(format!("maxval {maxval} unsupported (expected 255)")));
    }
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(cur.err("expected single whitespace after maxval"));
    }
    cur.pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let available = bytes.len() - cur.pos;
    if available < need {
        cur.pos = bytes.len();
        return Err(cur.err(format!(
            "truncated pixel data: expected {need} bytes, found {available}"
        )));
    }
    if available > need {
        cur.pos += need;
        return Err(cur.err("trailing bytes after pixel data"));
    }
    RasterImage::new(width, height, channels, bytes[cur.pos..].to_vec())
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<RasterImage> {
    let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(|e| {
        Error::MalformedRaster {
            path: path.to_path_buf(),
            offset: 0,
            reason: e.to_string(),
        }
    })?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => RasterImage::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => RasterImage::new(w, h, 3, buf.into_raw()),
        other => Err(Error::UnsupportedChannels {
            path: path.to_path_buf(),
            reason: format!(
                "PNG color type {:?} (expected 8-bit gray or RGB)",
                other.color()
            ),
        }),
    }
}

fn encode_png(path: &Path, img: &RasterImage) -> Result<Vec<u8>> {
    let color = if img.channels() == 1 {
        ColorType::L8
    } else {
        ColorType::Rgb8
    };
    let mut out = Cursor::new(Vec::new());
    image::write_buffer_with_format(
        &mut out,
        img.data(),
        img.width() as u32,
        img.height() as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| Error::format(path, e.to_string()))?;
    Ok(out.into_inner())
}
