//! Report tables and their CSV forms. Metric cells that are undefined
//! (zero denominators) are written as the literal `undefined`, never NaN.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::neural::RocCurve;

/// One experimental condition's test-split results.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub condition: String,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    pub advantage: Option<f64>,
    pub ci: Option<(f64, f64)>,
}

impl ReportRow {
    /// The 0.50 random-guessing reference row.
    pub fn random_guessing() -> Self {
        ReportRow {
            condition: "random-guessing".into(),
            accuracy: 0.5,
            precision: Some(0.5),
            recall: Some(0.5),
            f1: Some(0.5),
            auc: Some(0.5),
            advantage: Some(0.0),
            ci: None,
        }
    }

    pub fn has_undefined(&self) -> bool {
        self.precision.is_none() || self.recall.is_none() || self.f1.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub title: String,
    pub rows: Vec<ReportRow>,
}

pub const TABLE_CSV_HEADER: &str =
    "condition,accuracy,precision,recall,f1,auc,advantage,ci_lo,ci_hi";

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "undefined".to_string(),
    }
}

impl ReportTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let (lo, hi) = match row.ci {
                Some((lo, hi)) => (Some(lo), Some(hi)),
                None => (None, None),
            };
            let _ = writeln!(
                out,
                "{},{:.6},{},{},{},{},{},{},{}",
                row.condition,
                row.accuracy,
                cell(row.precision),
                cell(row.recall),
                cell(row.f1),
                cell(row.auc),
                cell(row.advantage),
                cell(lo),
                cell(hi),
            );
        }
        out
    }

    pub fn has_undefined(&self) -> bool {
        self.rows.iter().any(ReportRow::has_undefined)
    }
}

pub fn roc_to_csv(roc: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        let _ = writeln!(out, "{fpr:.6},{tpr:.6}");
    }
    out
}

/// Mean peak m-gram frequency on the 2^-m scale, per source class.
#[derive(Debug, Clone, PartialEq)]
pub struct MgramComparison {
    pub lengths: Vec<u32>,
    pub cipher: Vec<f64>,
    pub uniform: Vec<f64>,
}

impl MgramComparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,cipher,uniform\n");
        for (i, m) in self.lengths.iter().enumerate() {
            let _ = writeln!(out, "{m},{:.6},{:.6}", self.cipher[i], self.uniform[i]);
        }
        out
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_csv_has_pinned_columns_and_markers() {
        let table = ReportTable {
            title: "t".into(),
            rows: vec![
                ReportRow {
                    condition: "neural".into(),
                    accuracy: 0.86,
                    precision: Some(0.85),
                    recall: Some(0.87),
                    f1: Some(0.86),
                    auc: Some(0.9),
                    advantage: Some(0.72),
                    ci: Some((0.6, 0.8)),
                },
                ReportRow {
                    condition: "degenerate".into(),
                    accuracy: 1.0,
                    precision: None,
                    recall: None,
                    f1: None,
                    auc: None,
                    advantage: None,
                    ci: None,
                },
            ],
        };
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TABLE_CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("neural,0.860000,0.850000,0.870000,0.860000,0.900000,0.720000,0.600000,0.800000")
        );
        let degenerate = lines.next().unwrap();
        assert!(degenerate.contains("undefined"));
        assert!(!csv.contains("NaN"));
        assert!(table.has_undefined());
    }

    #[test]
    fn roc_csv_shape() {
        let roc = RocCurve {
            points: vec![(0.0, 0.0), (1.0, 1.0)],
            auc: 0.5,
        };
        assert_eq!(roc_to_csv(&roc), "fpr,tpr\n0.000000,0.000000\n1.000000,1.000000\n");
    }
}
