//! Feature matrix files: a CSV with header
//! `schema_version,source_id,label,x_0001..x_<d>` and a compact binary
//! form (magic "NSCF", u32 version, u32 d, row-major little-endian f64).

use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::corpus::{read_sequence, CorpusManifest};
use crate::experiments::worker_pool;
use crate::stringology::{extract_features, FeatureSchema};

pub const NSCF_MAGIC: &[u8; 4] = b"NSCF";
pub const NSCF_VERSION: u32 = 1;

/// One labeled feature row tied to a manifest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub schema_version: String,
    pub source_id: String,
    pub label: u8,
    pub values: Vec<f64>,
}

/// Extracts features for every manifest entry, in manifest order.
pub fn extract_corpus_features(
    manifest: &CorpusManifest,
    corpus_dir: &Path,
    schema: &FeatureSchema,
) -> Result<Vec<FeatureRow>> {
    worker_pool().install(|| {
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let bits = read_sequence(corpus_dir, entry)?;
                let fv = extract_features(&bits, schema)?;
                Ok(FeatureRow {
                    schema_version: fv.schema_version,
                    source_id: entry.id.clone(),
                    label: entry.label,
                    values: fv.values,
                })
            })
            .collect()
    })
}

pub fn write_features_csv(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let d = rows.first().map_or(0, |r| r.values.len());
    let mut out = String::from("schema_version,source_id,label");
    for j in 1..=d {
        out.push_str(&format!(",x_{j:04}"));
    }
    out.push('\n');
    for row in rows {
        if row.values.len() != d {
            return Err(Error::InvalidInput("rows have mixed dimensions".into()));
        }
        out.push_str(&row.schema_version);
        out.push(',');
        out.push_str(&row.source_id);
        out.push(',');
        out.push_str(&row.label.to_string());
        for v in &row.values {
            // shortest round-trip formatting: deterministic and lossless
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(path, "empty file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 4 || columns[..3] != ["schema_version", "source_id", "label"] {
        return Err(Error::format(path, format!("unexpected header {header:?}")));
    }
    let d = columns.len() - 3;

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 3 {
            return Err(Error::format(
                path,
                format!("line {}: expected {} fields, found {}", lineno + 2, d + 3, fields.len()),
            ));
        }
        let label: u8 = fields[2]
            .parse()
            .map_err(|_| Error::format(path, format!("line {}: bad label", lineno + 2)))?;
        let values = fields[3..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::format(path, format!("line {}: bad float", lineno + 2)))?;
        rows.push(FeatureRow {
            schema_version: fields[0].to_string(),
            source_id: fields[1].to_string(),
            label,
            values,
        });
    }
    Ok(rows)
}

pub fn write_features_nscf(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let d = rows.first().map_or(0, |r| r.values.len()) as u32;
    let file = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(format!("writing {}", path.display()), e);
    w.write_all(NSCF_MAGIC).map_err(io_err)?;
    w.write_all(&NSCF_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&d.to_le_bytes()).map_err(io_err)?;
    for row in rows {
        if row.values.len() != d as usize {
            return Err(Error::InvalidInput("rows have mixed dimensions".into()));
        }
        for v in &row.values {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// Reads the binary matrix back as (dimension, row-major values).
pub fn read_features_nscf(path: &Path) -> Result<(usize, Vec<Vec<f64>>)> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    if bytes.len() < 12 || &bytes[..4] != NSCF_MAGIC {
        return Err(Error::format(path, "missing NSCF magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != NSCF_VERSION {
        return Err(Error::format(path, format!("unsupported version {version}")));
    }
    let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if d == 0 {
        return Err(Error::format(path, "zero dimension"));
    }
    let payload = &bytes[12..];
    let row_bytes = d * 8;
    if payload.len() % row_bytes != 0 {
        return Err(Error::format(
            path,
            format!("payload of {} bytes is not a whole number of rows", payload.len()),
        ));
    }
    let rows = payload
        .chunks_exact(row_bytes)
        .map(|chunk| {
            chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect()
        })
        .collect();
    Ok((d, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<FeatureRow> {
        vec![
            FeatureRow {
                schema_version: "v1".into(),
                source_id: "a-000001".into(),
                label: 1,
                values: vec![0.25, -1.5e-7, 3.0],
            },
            FeatureRow {
                schema_version: "v1".into(),
                source_id: "b-000002".into(),
                label: 0,
                values: vec![1.0 / 3.0, 0.0, f64::MIN_POSITIVE],
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let rows = sample_rows();
        write_features_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("schema_version,source_id,label,x_0001,x_0002,x_0003\n"));
        let back = read_features_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn csv_rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        let rows = sample_rows();
        write_features_csv(&p1, &rows).unwrap();
        write_features_csv(&p2, &rows).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn nscf_round_trip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.nscf");
        let rows = sample_rows();
        write_features_nscf(&path, &rows).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"NSCF");
        let (d, values) = read_features_nscf(&path).unwrap();
        assert_eq!(d, 3);
        assert_eq!(values.len(), 2);
        assert_eq!(values[0], rows[0].values);
        assert_eq!(values[1], rows[1].values);
    }

    #[test]
    fn nscf_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.nscf");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_features_nscf(&path).is_err());
        // truncated payload
        std::fs::write(
            &path,
            [NSCF_MAGIC.as_slice(), &1u32.to_le_bytes(), &2u32.to_le_bytes(), &[0u8; 9]].concat(),
        )
        .unwrap();
        assert!(read_features_nscf(&path).is_err());
    }
}
