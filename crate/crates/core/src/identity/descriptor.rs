use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity embedding of one face crop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceDescriptor<T> {
    pub id: String,
    /// Subset label such as `swapped_F`, `original_F` or `original_A`.
    pub subset: String,
    pub vector: Vec<T>,
}

impl<T> FaceDescriptor<T> {
    pub fn new(id: impl Into<String>, subset: impl Into<String>, vector: Vec<T>) -> Self {
        FaceDescriptor {
            id: id.into(),
            subset: subset.into(),
            vector,
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Groups descriptors by subset label, checking that every vector has the
/// same dimension and that ids are unique.
pub fn group_by_subset<T>(descriptors: &[FaceDescriptor<T>]) -> Result<BTreeMap<&str, Vec<&FaceDescriptor<T>>>> {
    let Some(first) = descriptors.first() else {
        return Err(Error::EmptyInput("no descriptors"));
    };
    let dim = first.dim();
    let mut seen = std::collections::HashSet::new();
    let mut groups: BTreeMap<&str, Vec<&FaceDescriptor<T>>> = BTreeMap::new();
    for d in descriptors {
        if d.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: d.dim(),
            });
        }
        if !seen.insert(d.id.as_str()) {
            return Err(Error::InvalidArgument(format!("duplicate descriptor id {:?}", d.id)));
        }
        groups.entry(d.subset.as_str()).or_default().push(d);
    }
    Ok(groups)
}
