//! The labeled mapping dataset CSV.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apimap_core::corpus::{ApiLibrary, DatasetError, MappingDataset, MappingRecord, MappingRow};
use thiserror::Error;

pub const HEADER: [&str; 4] = ["rule_id", "source_method_id", "target_method_id", "label"];

#[derive(Debug, Error)]
pub enum DatasetFileError {
    #[error("{file}: {source}")]
    Dataset { file: PathBuf, source: DatasetError },
    #[error("{file}: {source}")]
    Csv { file: PathBuf, source: csv::Error },
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: io::Error },
}

impl DatasetFileError {
    pub fn dataset_error(&self) -> Option<&DatasetError> {
        match self {
            DatasetFileError::Dataset { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Reads raw rows; rows are numbered by their line in the file.
pub fn read_rows<R: io::Read>(input: R, file: &Path) -> Result<Vec<MappingRow>, DatasetFileError> {
    let csv_err = |source| DatasetFileError::Csv { file: file.to_path_buf(), source };
    let malformed = |row, reason| DatasetFileError::Dataset {
        file: file.to_path_buf(),
        source: DatasetError::MalformedRow { row, reason },
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(malformed(1, format!("expected header {}", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec.position().map_or(rows.len() + 2, |p| p.line() as usize);
        if rec.len() != HEADER.len() {
            return Err(malformed(row, format!("expected {} fields, found {}", HEADER.len(), rec.len())));
        }
        rows.push(MappingRow {
            row,
            rule_id: rec[0].to_string(),
            source_method_id: rec[1].to_string(),
            target_method_id: rec[2].to_string(),
            label: rec[3].to_string(),
        });
    }
    Ok(rows)
}

/// Loads and resolves a mapping dataset against `libraries`.
pub fn load_mapping_dataset(file: &Path, libraries: &[ApiLibrary]) -> Result<MappingDataset, DatasetFileError> {
    let input = fs::File::open(file).map_err(|source| DatasetFileError::Io { file: file.to_path_buf(), source })?;
    let rows = read_rows(io::BufReader::new(input), file)?;
    MappingDataset::resolve(rows, libraries)
        .map_err(|source| DatasetFileError::Dataset { file: file.to_path_buf(), source })
}

pub fn write_records<'a, W: io::Write>(
    out: W,
    records: impl IntoIterator<Item = &'a MappingRecord>,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([&r.rule_id, &r.source_method_id, &r.target_method_id, r.label.as_str()])?;
    }
    w.flush()?;
    Ok(())
}
