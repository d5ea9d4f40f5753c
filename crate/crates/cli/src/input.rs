//! Value files: one number per line, or a single-column CSV with an optional
//! header. Blank lines are skipped; `inf` parses as +infinity.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

pub struct ValueFile {
    pub values: Vec<f64>,
    pub sha256: String,
}

pub fn read_values(path: &Path) -> Result<ValueFile, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| format!("{}: not valid UTF-8", path.display()))?;
    let values = parse_values(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(ValueFile { values, sha256 })
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    let mut seen_row = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim().trim_end_matches(',').trim();
        if line.is_empty() {
            continue;
        }
        if line.contains(',') {
            return Err(format!("line {line_no}: expected a single column, got '{line}'"));
        }
        let field = line.trim_matches('"').trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_nan() => return Err(format!("line {line_no}: NaN is not a valid value")),
            Ok(v) => values.push(v),
            Err(_) if !seen_row && looks_like_header(field) => {}
            Err(_) => return Err(format!("line {line_no}: cannot parse '{field}' as a number")),
        }
        seen_row = true;
    }
    if values.is_empty() {
        return Err("no values".into());
    }
    Ok(values)
}

fn looks_like_header(field: &str) -> bool {
    field.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
}
