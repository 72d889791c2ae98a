//! Versioned JSON model files.

use std::path::{Path, PathBuf};

use apimap_core::learner::GbdtModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::api_json::{self, JsonFileError};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Json(#[from] JsonFileError),
    #[error("{file}: model format version {found:?} is not supported (expected {FORMAT_VERSION})")]
    VersionMismatch { file: PathBuf, found: Option<u64> },
    #[error("{file}: {reason}")]
    Malformed { file: PathBuf, reason: String },
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format_version: u64,
    #[serde(flatten)]
    model: &'a GbdtModel,
}

#[derive(Deserialize)]
struct ModelFile {
    #[allow(dead_code)]
    format_version: u64,
    #[serde(flatten)]
    model: GbdtModel,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<u64>,
}

pub fn to_bytes(model: &GbdtModel) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&ModelFileRef { format_version: FORMAT_VERSION, model })
        .expect("model always serializes");
    bytes.push(b'\n');
    bytes
}

pub fn from_bytes(bytes: &[u8], file: &Path) -> Result<GbdtModel, ModelFileError> {
    let probe: VersionProbe = api_json::from_slice_with_path(bytes, file)?;
    if probe.format_version != Some(FORMAT_VERSION) {
        return Err(ModelFileError::VersionMismatch { file: file.to_path_buf(), found: probe.format_version });
    }
    let parsed: ModelFile = api_json::from_slice_with_path(bytes, file)?;
    parsed
        .model
        .validate()
        .map_err(|e| ModelFileError::Malformed { file: file.to_path_buf(), reason: e.to_string() })?;
    Ok(parsed.model)
}

pub fn save_model(model: &GbdtModel, file: &Path) -> Result<(), ModelFileError> {
    std::fs::write(file, to_bytes(model))
        .map_err(|source| JsonFileError::Io { file: file.to_path_buf(), source }.into())
}

pub fn load_model(file: &Path) -> Result<GbdtModel, ModelFileError> {
    from_bytes(&api_json::read(file)?, file)
}
