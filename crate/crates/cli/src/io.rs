use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub fn read_json<T: DeserializeOwned>(file: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(file).map_err(|source| CliError::Io {
        file: file.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        file: file.to_path_buf(),
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    // round-trip through Value: its maps are ordered by key
    let value: Value = serde_json::to_value(doc)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(file: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(file, contents).map_err(|source| CliError::Io {
        file: file.to_path_buf(),
        source,
    })
}

pub fn print(contents: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(contents.as_bytes())
        .map_err(|e| CliError::Output(e.to_string()))
}

pub fn csv_string(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

/// Digits of a vector as `"d d d"`.
pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
