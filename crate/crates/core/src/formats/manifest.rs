//! Face-box manifest CSV: `frame_id,x,y,w,h`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::FaceBox;

pub fn parse_facebox_manifest(path: impl AsRef<Path>) -> Result<BTreeMap<String, FaceBox>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["frame_id", "x", "y", "w", "h"] {
        return Err(Error::format(path, "header must be frame_id,x,y,w,h"));
    }
    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record[i].trim();
        let bad = |what: &str| Error::format(path, format!("line {line}: invalid {what} {:?}", field(idx(what))));
        let x: i64 = field(1).parse().map_err(|_| bad("x"))?;
        let y: i64 = field(2).parse().map_err(|_| bad("y"))?;
        let w: u32 = field(3).parse().map_err(|_| bad("w"))?;
        let h: u32 = field(4).parse().map_err(|_| bad("h"))?;
        let face = FaceBox::new(field(0), x, y, w, h)
            .map_err(|e| Error::format(path, format!("line {line}: {e}")))?;
        if out.contains_key(&face.frame_id) {
            return Err(Error::format(
                path,
                format!("line {line}: duplicate frame_id {:?}", face.frame_id),
            ));
        }
        out.insert(face.frame_id.clone(), face);
    }
    Ok(out)
}

fn idx(what: &str) -> usize {
    match what {
        "x" => 1,
        "y" => 2,
        "w" => 3,
        _ => 4,
    }
}

pub fn write_facebox_manifest<'a>(
    boxes: impl IntoIterator<Item = &'a FaceBox>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let err = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(["frame_id", "x", "y", "w", "h"]).map_err(err)?;
    for b in boxes {
        w.write_record([
            b.frame_id.clone(),
            b.x.to_string(),
            b.y.to_string(),
            b.w.to_string(),
            b.h.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use std::fs;

    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("boxes.csv");
        fs::write(&p, "frame_id,x,y,w,h\nf1,10,-4,30,40\nf2,0,0,1,1\n").unwrap();
        let m = parse_facebox_manifest(&p).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["f1"], FaceBox::new("f1", 10, -4, 30, 40).unwrap());
        let q = dir.path().join("again.csv");
        write_facebox_manifest(m.values(), &q).unwrap();
        assert_eq!(parse_facebox_manifest(&q).unwrap(), m);
    }

    #[test]
    fn rejects_bad_manifests() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("boxes.csv");
        fs::write(&p, "frame_id,x,y,w,h\nf1,1,1,2,2\nf1,3,3,2,2\n").unwrap();
        let err = parse_facebox_manifest(&p).unwrap_err().to_string();
        assert!(err.contains("duplicate frame_id \"f1\""), "{err}");
        fs::write(&p, "f1,1,1,2,2\n").unwrap();
        assert!(parse_facebox_manifest(&p).is_err());
        fs::write(&p, "frame_id,x,y,w,h\nf1,1,1,0,2\n").unwrap();
        assert!(parse_facebox_manifest(&p).is_err());
        fs::write(&p, "frame_id,x,y,w,h\nf1,a,1,2,2\n").unwrap();
        assert!(parse_facebox_manifest(&p).unwrap_err().to_string().contains("invalid x"));
    }
}
