//! Dataset files: CSV (comma or whitespace separated, optional header) or
//! JSON (`{"dim": d, "points": [...]}` or `{"classes": [[...], ...]}`).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tverberg_core::PointSet;

use crate::error::CliError;

pub struct InputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub fn read_input(path: &Path) -> Result<InputFile, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(InputFile {
        name: path.display().to_string(),
        bytes,
    })
}

/// `sha256:<hex>` of one file, or of the newline-joined hex digests of
/// several files in order.
pub fn digest(files: &[InputFile]) -> String {
    let hexes: Vec<String> = files.iter().map(|f| hex::encode(Sha256::digest(&f.bytes))).collect();
    if hexes.len() == 1 {
        return format!("sha256:{}", hexes[0]);
    }
    format!("sha256:{}", hex::encode(Sha256::digest(hexes.join("\n").as_bytes())))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassesJson {
    pub classes: Vec<Vec<Vec<f64>>>,
}

fn looks_like_json(bytes: &[u8]) -> bool {
    bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{')
}

fn text(file: &InputFile) -> Result<&str, CliError> {
    std::str::from_utf8(&file.bytes)
        .map_err(|e| CliError::Parse(format!("{}: not UTF-8: {e}", file.name)))
}

fn rows_to_set(name: &str, rows: &[Vec<f64>], dim: Option<usize>) -> Result<PointSet, CliError> {
    let d = dim.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    if rows.is_empty() {
        return Err(CliError::Parse(format!("{name}: no points")));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(CliError::Parse(format!(
                "{name}: point {i} has {} coordinates, expected {d}",
                r.len()
            )));
        }
    }
    PointSet::from_rows(rows).map_err(|e| CliError::Parse(format!("{name}: {e}")))
}

pub fn parse_points(file: &InputFile) -> Result<PointSet, CliError> {
    if looks_like_json(&file.bytes) {
        let doc: PointsJson = serde_json::from_slice(&file.bytes)
            .map_err(|e| CliError::Parse(format!("{}: {e}", file.name)))?;
        return rows_to_set(&file.name, &doc.points, doc.dim);
    }
    let rows = parse_csv(&file.name, text(file)?)?;
    rows_to_set(&file.name, &rows, None)
}

pub fn parse_classes(file: &InputFile) -> Result<Vec<PointSet>, CliError> {
    let doc: ClassesJson = serde_json::from_slice(&file.bytes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", file.name)))?;
    if doc.classes.is_empty() {
        return Err(CliError::Parse(format!("{}: no classes", file.name)));
    }
    let d = doc.classes[0].first().map(Vec::len).unwrap_or(0);
    doc.classes
        .iter()
        .enumerate()
        .map(|(a, rows)| rows_to_set(&format!("{} class {a}", file.name), rows, Some(d)))
        .collect()
}

/// Rows of numbers; a first row that does not parse is taken as a header.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_csv(name: &str, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let comma = text.contains(',');
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first = true;
    if comma {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        for record in reader.records() {
            let record = record.map_err(|e| CliError::Parse(format!("{name}: {e}")))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            let fields: Vec<&str> = record.iter().collect();
            push_row(name, line, &fields, &mut rows, &mut first)?;
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            push_row(name, i as u64 + 1, &fields, &mut rows, &mut first)?;
        }
    }
    Ok(rows)
}

fn push_row(
    name: &str,
    line: u64,
    fields: &[&str],
    rows: &mut Vec<Vec<f64>>,
    first: &mut bool,
) -> Result<(), CliError> {
    let parsed: Result<Vec<f64>, String> = fields
        .iter()
        .map(|f| match f.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(format!("non-finite value {f:?}")),
            Err(_) => Err(format!("not a number: {f:?}")),
        })
        .collect();
    let is_first = std::mem::replace(first, false);
    match parsed {
        Ok(row) => {
            if let Some(prev) = rows.first() {
                if prev.len() != row.len() {
                    return Err(CliError::Parse(format!(
                        "{name}: line {line}: {} fields, expected {}",
                        row.len(),
                        prev.len()
                    )));
                }
            }
            rows.push(row);
            Ok(())
        }
        Err(_) if is_first => Ok(()),
        Err(e) => Err(CliError::Parse(format!("{name}: line {line}: {e}"))),
    }
}

pub fn write_csv(rows: &[Vec<f64>], dim: usize) -> String {
    let mut out = (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
