//! The canonical API JSON interchange file.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apimap_core::corpus::ApiLibrary;
use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonFileError {
    #[error("{file}: schema violation at {path}: {message}")]
    SchemaViolation { file: PathBuf, path: String, message: String },
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: io::Error },
}

impl JsonFileError {
    /// Field path of a schema violation.
    pub fn field_path(&self) -> Option<&str> {
        match self {
            JsonFileError::SchemaViolation { path, .. } => Some(path),
            JsonFileError::Io { .. } => None,
        }
    }
}

/// Deserializes `bytes`, reporting failures with the JSON path of the
/// offending field. Missing fields are reported at the field itself.
pub(crate) fn from_slice_with_path<T: DeserializeOwned>(bytes: &[u8], file: &Path) -> Result<T, JsonFileError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.inner().to_string();
        if let Some(field) = message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
            path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
        }
        JsonFileError::SchemaViolation { file: file.to_path_buf(), path, message }
    })
}

pub(crate) fn read(file: &Path) -> Result<Vec<u8>, JsonFileError> {
    fs::read(file).map_err(|source| JsonFileError::Io { file: file.to_path_buf(), source })
}

pub(crate) fn write_pretty<T: serde::Serialize>(value: &T, file: &Path) -> Result<(), JsonFileError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("domain types always serialize");
    bytes.push(b'\n');
    fs::write(file, bytes).map_err(|source| JsonFileError::Io { file: file.to_path_buf(), source })
}

pub fn to_json(lib: &ApiLibrary) -> String {
    serde_json::to_string_pretty(lib).expect("library always serializes")
}

pub fn save_api_json(lib: &ApiLibrary, file: &Path) -> Result<(), JsonFileError> {
    write_pretty(lib, file)
}

pub fn load_api_json(file: &Path) -> Result<ApiLibrary, JsonFileError> {
    from_slice_with_path(&read(file)?, file)
}
