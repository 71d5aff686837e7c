//! Descriptor CSV (`id,subset,d0,...,d{D-1}`) and frame pairing CSV
//! (`swapped_id,original_id`).

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::identity::FaceDescriptor;
use crate::scalar::Scalar;

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn read_descriptor_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<FaceDescriptor<T>>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "subset" {
        return Err(Error::format(path, "header must start with id,subset,d0"));
    }
    let dim = headers.len() - 2;
    for (k, h) in headers.iter().skip(2).enumerate() {
        if h != format!("d{k}") {
            return Err(Error::format(path, format!("header column {} should be d{k}, found {h:?}", k + 2)));
        }
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = line_of(&record);
        if record.len() != dim + 2 {
            return Err(Error::format(path, format!("line {line}: expected {} fields, found {}", dim + 2, record.len())));
        }
        let vector = record
            .iter()
            .skip(2)
            .map(|f| {
                f.trim()
                    .parse::<T>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::format(path, format!("line {line}: bad number {f:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        out.push(FaceDescriptor::new(&record[0], &record[1], vector));
    }
    Ok(out)
}

pub fn write_descriptor_csv<T: Scalar>(descriptors: &[FaceDescriptor<T>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dim = descriptors.first().map_or(0, |d| d.dim());
    if let Some(d) = descriptors.iter().find(|d| d.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: d.dim(),
        });
    }
    if dim == 0 {
        return Err(Error::EmptyInput("descriptors to write"));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["id".to_owned(), "subset".to_owned()];
    header.extend((0..dim).map(|k| format!("d{k}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for d in descriptors {
        let mut row = vec![d.id.clone(), d.subset.clone()];
        row.extend(d.vector.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_pairing_csv(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "swapped_id" || &headers[1] != "original_id" {
        return Err(Error::format(path, "header must be swapped_id,original_id"));
    }
    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = line_of(&record);
        if out.insert(record[0].to_owned(), record[1].to_owned()).is_some() {
            return Err(Error::format(path, format!("line {line}: duplicate swapped_id {:?}", &record[0])));
        }
    }
    Ok(out)
}

pub fn write_pairing_csv(pairing: &BTreeMap<String, String>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["swapped_id", "original_id"]).map_err(|e| csv_err(path, e))?;
    for (s, o) in pairing {
        w.write_record([s, o]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use std::fs;

    use super::*;

    #[test]
    fn descriptor_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let ds = vec![
            FaceDescriptor::new("a_0", "original_A", vec![0.1, -1.0 / 3.0, 1e-300]),
            FaceDescriptor::new("s,1", "swapped_F", vec![f64::MAX, 0.0, -0.0]),
        ];
        write_descriptor_csv(&ds, &p).unwrap();
        let back: Vec<FaceDescriptor<f64>> = read_descriptor_csv(&p).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn descriptor_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        fs::write(&p, "id,subset,d0,d2\na,b,1,2\n").unwrap();
        assert!(read_descriptor_csv::<f64>(&p).is_err());
        fs::write(&p, "id,subset,d0\na,b,zz\n").unwrap();
        let err = read_descriptor_csv::<f64>(&p).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        fs::write(&p, "id,subset,d0\na,b,1,4\n").unwrap();
        assert!(read_descriptor_csv::<f64>(&p).is_err());
    }

    #[test]
    fn pairing_round_trip_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.csv");
        let pairing: BTreeMap<String, String> =
            [("s1", "o1"), ("s2", "o2")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        write_pairing_csv(&pairing, &p).unwrap();
        assert_eq!(read_pairing_csv(&p).unwrap(), pairing);
        fs::write(&p, "swapped_id,original_id\ns1,o1\ns1,o2\n").unwrap();
        assert!(read_pairing_csv(&p).is_err());
    }
}
