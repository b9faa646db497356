//! Return matrices as CSV: one row per period, one column per asset. A first
//! row that is not entirely numeric is treated as a header.

use std::path::Path;

use crate::error::{io_error, Result, SascError};

pub fn parse_returns_csv(text: &str, source_name: &str) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let err = |message: String| SascError::Parse {
            source_name: source_name.into(),
            line: i + 1,
            message,
        };
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                if let Some(first) = rows.first() {
                    if first.len() != v.len() {
                        return Err(err(format!(
                            "expected {} columns, got {}",
                            first.len(),
                            v.len()
                        )));
                    }
                }
                rows.push(v);
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(err(format!("non-numeric field: {e}"))),
        }
    }
    Ok(rows)
}

pub fn read_returns_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_returns_csv(&text, &path.display().to_string())
}

/// Writes a header `a1,...,ad` followed by the rows.
pub fn write_returns_csv(rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    let d = rows.first().map_or(0, Vec::len);
    w.write_record((1..=d).map(|j| format!("a{j}")))
        .map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(f64::to_string))
            .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}
