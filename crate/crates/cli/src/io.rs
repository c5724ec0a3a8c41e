//! File formats.
//!
//! Matrix files are headerless UTF-8 CSV with one instance per row. Feature
//! files hold decimal reals; attribute and code files hold only `1` and `-1`.

use std::fs;
use std::io::Write;
use std::path::Path;

use attrmeaning::keywords::{NamingTable, TruthTable};
use attrmeaning::{AttributeMatrix, FeatureMatrix, LabelVector};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn records(path: &Path, has_headers: bool) -> CliResult<Vec<Vec<String>>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn rectangular(path: &Path, rows: &[Vec<String>]) -> CliResult<usize> {
    let width = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| CliError::input(format!("{}: file has no rows", path.display())))?;
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(CliError::input(format!(
            "{}: row {} has {} columns, expected {width}",
            path.display(),
            i + 1,
            r.len()
        )));
    }
    Ok(width)
}

pub fn read_features(path: &Path) -> CliResult<FeatureMatrix> {
    let rows = records(path, false)?;
    let width = rectangular(path, &rows)?;
    let mut m = DMatrix::zeros(rows.len(), width);
    for (i, row) in rows.iter().enumerate() {
        for (j, tok) in row.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| {
                CliError::input(format!(
                    "{}: row {}, column {}: '{tok}' is not a number",
                    path.display(),
                    i + 1,
                    j + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::input(format!(
                    "{}: row {}, column {}: value is not finite",
                    path.display(),
                    i + 1,
                    j + 1
                )));
            }
            m[(i, j)] = v;
        }
    }
    FeatureMatrix::new(m).map_err(Into::into)
}

pub fn read_attributes(path: &Path) -> CliResult<AttributeMatrix> {
    let rows = records(path, false)?;
    rectangular(path, &rows)?;
    let mut bits = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, tok) in row.iter().enumerate() {
            r.push(match tok.as_str() {
                "1" => 1,
                "-1" => -1,
                _ => {
                    return Err(CliError::input(format!(
                        "{}: row {}, column {}: token '{tok}' is not 1 or -1",
                        path.display(),
                        i + 1,
                        j + 1
                    )))
                }
            });
        }
        bits.push(r);
    }
    AttributeMatrix::from_rows(&bits).map_err(Into::into)
}

/// One non-negative integer label per line.
pub fn read_labels(path: &Path) -> CliResult<LabelVector> {
    let rows = records(path, false)?;
    let labels = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != 1 {
                return Err(CliError::input(format!(
                    "{}: row {} must hold exactly one label",
                    path.display(),
                    i + 1
                )));
            }
            r[0].parse::<usize>().map_err(|_| {
                CliError::input(format!(
                    "{}: row {}: '{}' is not a non-negative integer label",
                    path.display(),
                    i + 1,
                    r[0]
                ))
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    LabelVector::new(labels).map_err(Into::into)
}

/// One item identifier per line.
pub fn read_item_ids(path: &Path) -> CliResult<Vec<String>> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn check_header(path: &Path, expected: &[&str]) -> CliResult<()> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(CliError::input(format!(
            "{}: header must be '{}', found '{}'",
            path.display(),
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

/// `bit,positive_name`; an empty name marks the bit as unnameable.
pub fn read_naming_table(path: &Path, bits: usize) -> CliResult<NamingTable> {
    check_header(path, &["bit", "positive_name"])?;
    let rows = records(path, true)?;
    let mut entries = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let line = i + 2;
        let (bit, name) = match r.as_slice() {
            [bit] => (bit, ""),
            [bit, name] => (bit, name.as_str()),
            _ => {
                return Err(CliError::input(format!(
                    "{}: line {line} must have 2 fields",
                    path.display()
                )))
            }
        };
        let bit: usize = bit.parse().map_err(|_| {
            CliError::input(format!("{}: line {line}: '{bit}' is not a bit index", path.display()))
        })?;
        entries.push((bit, name.to_string()));
    }
    NamingTable::new(bits, entries).map_err(Into::into)
}

/// `item_id,keyword,suitable` plus optional `item_id,action`.
pub fn read_truth(path: &Path, actions: Option<&Path>) -> CliResult<TruthTable> {
    check_header(path, &["item_id", "keyword", "suitable"])?;
    let mut judgments = Vec::new();
    for (i, r) in records(path, true)?.into_iter().enumerate() {
        let line = i + 2;
        let [item, kw, ok]: [String; 3] = r.try_into().map_err(|_| {
            CliError::input(format!("{}: line {line} must have 3 fields", path.display()))
        })?;
        let ok = match ok.as_str() {
            "1" => true,
            "0" => false,
            other => {
                return Err(CliError::input(format!(
                    "{}: line {line}: suitable must be 0 or 1, got '{other}'",
                    path.display()
                )))
            }
        };
        judgments.push((item, kw, ok));
    }
    let mut action_rows = Vec::new();
    if let Some(apath) = actions {
        check_header(apath, &["item_id", "action"])?;
        for (i, r) in records(apath, true)?.into_iter().enumerate() {
            let [item, action]: [String; 2] = r.try_into().map_err(|_| {
                CliError::input(format!("{}: line {} must have 2 fields", apath.display(), i + 2))
            })?;
            action_rows.push((item, action));
        }
    }
    TruthTable::new(judgments, action_rows).map_err(Into::into)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn codes_csv(z: &AttributeMatrix) -> String {
    let mut out = String::with_capacity(z.n() * z.k() * 3);
    for i in 0..z.n() {
        let row: Vec<&str> = (0..z.k())
            .map(|j| if z.get(i, j) == 1 { "1" } else { "-1" })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
