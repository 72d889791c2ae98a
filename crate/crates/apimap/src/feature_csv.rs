//! Feature vectors as CSV, one row per pair in pair-key order.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apimap_core::corpus::Label;
use apimap_core::features::{FeatureVector, PairKey, NUM_FEATURES};
use thiserror::Error;

pub const HEADER: [&str; 14] = [
    "rule_id",
    "source_id",
    "target_id",
    "phi1",
    "phi2",
    "phi3",
    "phi4",
    "phi5",
    "phi6",
    "phi7",
    "phi8",
    "phi9",
    "phix",
    "label",
];

#[derive(Debug, Error)]
pub enum FeatureFileError {
    #[error("{file}: line {line}: {reason}")]
    Malformed { file: PathBuf, line: u64, reason: String },
    #[error("{file}: {source}")]
    Csv { file: PathBuf, source: csv::Error },
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: io::Error },
}

/// Writes vectors sorted by pair key. Floats use the shortest
/// representation that reads back to the same value.
pub fn write_features<W: io::Write>(out: W, vectors: &[FeatureVector]) -> Result<(), csv::Error> {
    let mut sorted: Vec<&FeatureVector> = vectors.iter().collect();
    sorted.sort_by(|a, b| a.pair.cmp(&b.pair));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for v in sorted {
        let mut rec: Vec<String> = vec![v.pair.rule_id.clone(), v.pair.source_id.clone(), v.pair.target_id.clone()];
        rec.extend(v.phi.iter().map(|x| x.to_string()));
        rec.push(v.label.map_or(String::new(), |l| l.as_str().to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_features(file: &Path, vectors: &[FeatureVector]) -> Result<(), FeatureFileError> {
    let out = fs::File::create(file).map_err(|source| FeatureFileError::Io { file: file.to_path_buf(), source })?;
    write_features(io::BufWriter::new(out), vectors)
        .map_err(|source| FeatureFileError::Csv { file: file.to_path_buf(), source })
}

/// Reads vectors back. A file with no content at all holds zero vectors.
pub fn read_features<R: io::Read>(input: R, file: &Path) -> Result<Vec<FeatureVector>, FeatureFileError> {
    let malformed = |line: u64, reason: String| FeatureFileError::Malformed { file: file.to_path_buf(), line, reason };
    let csv_err = |source| FeatureFileError::Csv { file: file.to_path_buf(), source };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.is_empty() {
        return Ok(Vec::new());
    }
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(malformed(1, format!("expected header {}", HEADER.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != HEADER.len() {
            return Err(malformed(line, format!("expected {} fields, found {}", HEADER.len(), rec.len())));
        }
        let mut phi = [0.0; NUM_FEATURES];
        for (k, x) in phi.iter_mut().enumerate() {
            let raw = &rec[3 + k];
            let value: f64 =
                raw.parse().map_err(|_| malformed(line, format!("{}: not a number: {raw:?}", HEADER[3 + k])))?;
            if !value.is_finite() {
                return Err(malformed(line, format!("{}: not finite", HEADER[3 + k])));
            }
            *x = value;
        }
        let label = match &rec[13] {
            "" => None,
            s => Some(s.parse::<Label>().map_err(|reason| malformed(line, reason))?),
        };
        out.push(FeatureVector {
            phi,
            label,
            pair: PairKey { rule_id: rec[0].to_string(), source_id: rec[1].to_string(), target_id: rec[2].to_string() },
        });
    }
    Ok(out)
}

pub fn load_features(file: &Path) -> Result<Vec<FeatureVector>, FeatureFileError> {
    let input = fs::File::open(file).map_err(|source| FeatureFileError::Io { file: file.to_path_buf(), source })?;
    read_features(io::BufReader::new(input), file)
}
