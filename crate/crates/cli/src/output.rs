use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// CSV text with a header row.
pub struct Table(String);

impl Table {
    pub fn from_rows<T: Serialize>(rows: &[T]) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Resource(format!("writing CSV: {e}")))?;
        Ok(Self(String::from_utf8(bytes).expect("CSV output is UTF-8")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Report with the provenance header every JSON output carries.
pub fn document<C: Serialize, O: Serialize>(command: &C, opts: &O, pass: bool, result: Value) -> Value {
    json!({
        "provenance": {
            "tool": "orbital-heat",
            "version": env!("CARGO_PKG_VERSION"),
            "library_version": orbital_heat::VERSION,
            "command": command,
            "config": opts,
        },
        "pass": pass,
        "result": result,
    })
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_outputs(
    stem: &Path,
    doc: &Value,
    table: Option<&Table>,
    extra: &[(String, String)],
) -> Result<(), CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Resource(format!("writing {}: {e}", p.display()));
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    let json_path = with_suffix(stem, "json");
    fs::write(&json_path, serde_json::to_string_pretty(doc)? + "\n").map_err(|e| io(&json_path, e))?;
    if let Some(t) = table {
        let p = with_suffix(stem, "csv");
        fs::write(&p, t.as_str()).map_err(|e| io(&p, e))?;
    }
    for (suffix, contents) in extra {
        let p = with_suffix(stem, suffix);
        fs::write(&p, contents).map_err(|e| io(&p, e))?;
    }
    Ok(())
}
