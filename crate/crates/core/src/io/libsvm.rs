//! The libsvm sparse text format: `label idx:val idx:val ...` with 1-based,
//! strictly ascending indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{io_error, Result, SascError};
use crate::problems::{LabeledSparseDataset, SparseRow};

/// Parses libsvm text. Blank lines and lines starting with `#` are skipped.
/// `dim` defaults to the largest index seen; an explicit `dim` smaller than
/// that is an error.
pub fn parse_libsvm_str(
    text: &str,
    source_name: &str,
    dim: Option<usize>,
) -> Result<LabeledSparseDataset> {
    let err = |line: usize, message: String| SascError::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(line_no, format!("non-numeric label '{label_tok}'")))?;
        let mut row = SparseRow::default();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| err(line_no, format!("expected index:value, got '{tok}'")))?;
            let idx: usize = i
                .parse()
                .map_err(|_| err(line_no, format!("non-numeric index '{i}'")))?;
            let val: f64 = v
                .parse()
                .map_err(|_| err(line_no, format!("non-numeric value '{v}'")))?;
            if idx < 1 {
                return Err(err(line_no, "index < 1".into()));
            }
            let idx0 = idx - 1;
            if let Some(&last) = row.indices.last() {
                if idx0 == last {
                    return Err(err(line_no, format!("duplicate index {idx}")));
                }
                if idx0 < last {
                    return Err(err(line_no, format!("non-ascending index {idx}")));
                }
            }
            max_index = max_index.max(idx);
            row.indices.push(idx0);
            row.values.push(val);
        }
        rows.push(row);
        labels.push(label);
    }
    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(SascError::InvalidInput(format!(
                "{source_name}: index {max_index} exceeds the requested dimension {d}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };
    LabeledSparseDataset::new(rows, labels, dim)
}

pub fn parse_libsvm(path: &Path, dim: Option<usize>) -> Result<LabeledSparseDataset> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_libsvm_str(&text, &path.display().to_string(), dim)
}

/// Serializes with shortest round-trip float formatting.
pub fn to_libsvm_string(ds: &LabeledSparseDataset) -> String {
    let mut out = String::new();
    for (row, label) in ds.rows.iter().zip(&ds.labels) {
        write!(out, "{label}").unwrap();
        for (i, v) in row.indices.iter().zip(&row.values) {
            write!(out, " {}:{}", i + 1, v).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_libsvm(ds: &LabeledSparseDataset, path: &Path) -> Result<()> {
    fs::write(path, to_libsvm_string(ds)).map_err(|e| io_error(path, e))
}
