//! Binary model checkpoints.
//!
//! Layout (little-endian): magic `DKSWAPCK`, `u32` format version, `u8`
//! scalar width in bytes, `u64` init seed, `u32` tensor count, then per
//! tensor a `u16`-prefixed UTF-8 name, `u8` rank, `u32` dims and the raw
//! values.

use std::fs;
use std::path::Path;

use super::model::{SwapModel, TENSOR_NAMES};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"DKSWAPCK";

pub fn write_checkpoint<T: Scalar>(model: &SwapModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(8 * model.parameter_count() + 1024);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.push(T::WIDTH as u8);
    out.extend_from_slice(&model.seed.to_le_bytes());
    let tensors = model.tensors();
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for ((name, shape), data) in TENSOR_NAMES.iter().zip(model.tensor_shapes()).zip(tensors) {
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.push(shape.len() as u8);
        for d in &shape {
            out.extend_from_slice(&(*d as u32).to_le_bytes());
        }
        for &v in data {
            if T::WIDTH == 4 {
                out.extend_from_slice(&v.to_f32().expect("f32 scalar").to_le_bytes());
            } else {
                out.extend_from_slice(&v.as_f64().to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(self.err(format!("truncated checkpoint at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn err(&self, reason: String) -> Error {
        Error::format(self.path, reason)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn read_checkpoint<T: Scalar>(path: impl AsRef<Path>) -> Result<SwapModel<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = Reader {
        path,
        bytes: &bytes,
        pos: 0,
    };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(r.err("not a face-swap checkpoint (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(r.err(format!("unsupported checkpoint version {version}")));
    }
    let width = r.u8()? as usize;
    if width != T::WIDTH {
        return Err(r.err(format!(
            "checkpoint stores {}-byte scalars, model expects {}",
            width,
            T::WIDTH
        )));
    }
    let seed = r.u64()?;
    let mut model = SwapModel::<T>::zeros(seed);
    let shapes = model.tensor_shapes();
    let count = r.u32()? as usize;
    if count != shapes.len() {
        return Err(r.err(format!("expected {} tensors, found {count}", shapes.len())));
    }
    for ((name, shape), tensor) in TENSOR_NAMES.iter().zip(&shapes).zip(model.tensors_mut()) {
        let len = r.u16()? as usize;
        let found = r.take(len)?;
        if found != name.as_bytes() {
            return Err(r.err(format!(
                "expected tensor {name}, found {}",
                String::from_utf8_lossy(found)
            )));
        }
        let rank = r.u8()? as usize;
        let dims = (0..rank).map(|_| r.u32().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
        if &dims != shape {
            return Err(r.err(format!("tensor {name}: shape {dims:?}, expected {shape:?}")));
        }
        for v in tensor.iter_mut() {
            *v = if width == 4 {
                T::from_f32(f32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes")))
                    .expect("f32 converts")
            } else {
                T::lit(f64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes")))
            };
        }
    }
    if r.pos != bytes.len() {
        return Err(r.err(format!("trailing bytes after offset {}", r.pos)));
    }
    Ok(model)
}
