//! Report emission: JSON, CSV (scalars only, matrices to hash-named side files) and text.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::{CliError, Outcome};
use crate::{Format, Global};

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(outcome: &Outcome, g: &Global) -> Result<(), CliError> {
    let body = match g.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&outcome.value).expect("value serialises")),
        Format::Text => format!("{}\n", outcome.text),
        Format::Csv => {
            let side_dir = g
                .output
                .as_ref()
                .and_then(|p| p.parent())
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            csv_body(outcome, &side_dir)?
        }
    };
    match &g.output {
        Some(path) => write_atomic(path, body.as_bytes()),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn csv_body(outcome: &Outcome, side_dir: &Path) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Input(e.to_string());
    if let Some((header, rows)) = &outcome.table {
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
    } else {
        let mut flat = Vec::new();
        flatten("", &outcome.value, &mut flat, side_dir)?;
        w.write_record(["field", "value"]).map_err(err)?;
        for (k, v) in flat {
            w.write_record([k, v]).map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn is_matrix(v: &Value) -> bool {
    matches!(v, Value::Array(rows) if !rows.is_empty() && rows.iter().all(|r| matches!(r, Value::Array(_))))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>, side_dir: &Path) -> Result<(), CliError> {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out, side_dir)?;
            }
        }
        Value::Array(_) if is_matrix(v) => {
            let bytes = serde_json::to_vec(v).expect("value serialises");
            let hash = hex(&Sha256::digest(&bytes));
            let name = format!("matrix-{}.json", &hash[..16]);
            write_atomic(&side_dir.join(&name), &bytes)?;
            out.push((prefix.to_string(), format!("sha256:{hash} ({name})")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out, side_dir)?;
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
