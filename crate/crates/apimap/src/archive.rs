//! Zip extraction that refuses entries escaping the output directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use zip::result::ZipError;
use zip::ZipArchive;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("{path}: corrupt archive: {reason}")]
    CorruptArchive { path: PathBuf, reason: String },
    #[error("archive entry {0:?} would be written outside the output directory")]
    UnsafeEntryPath(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> ArchiveError + '_ {
    move |source| ArchiveError::Io { path: path.to_path_buf(), source }
}

/// Extracts every entry under `out_dir`, preserving relative paths, and
/// returns the number of files written. All entry names are checked before
/// anything is written.
pub fn extract_archive(archive: &Path, out_dir: &Path) -> Result<usize, ArchiveError> {
    let corrupt = |e: ZipError| match e {
        ZipError::Io(source) => ArchiveError::Io { path: archive.to_path_buf(), source },
        other => ArchiveError::CorruptArchive { path: archive.to_path_buf(), reason: other.to_string() },
    };
    let file = fs::File::open(archive).map_err(io_at(archive))?;
    let mut zip = ZipArchive::new(file).map_err(corrupt)?;

    let mut entries = Vec::with_capacity(zip.len());
    for i in 0..zip.len() {
        let entry = zip.by_index_raw(i).map_err(corrupt)?;
        let rel = entry.enclosed_name().ok_or_else(|| ArchiveError::UnsafeEntryPath(entry.name().to_string()))?;
        entries.push((i, rel, entry.is_dir()));
    }

    fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    let mut written = 0;
    for (i, rel, is_dir) in entries {
        let dest = out_dir.join(&rel);
        if is_dir {
            fs::create_dir_all(&dest).map_err(io_at(&dest))?;
            continue;
        }
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent).map_err(io_at(parent))?;
        }
        let mut entry = zip.by_index(i).map_err(corrupt)?;
        let mut out = fs::File::create(&dest).map_err(io_at(&dest))?;
        io::copy(&mut entry, &mut out).map_err(|e| match e.kind() {
            io::ErrorKind::InvalidData | io::ErrorKind::UnexpectedEof => {
                ArchiveError::CorruptArchive { path: archive.to_path_buf(), reason: e.to_string() }
            }
            _ => ArchiveError::Io { path: dest.clone(), source: e },
        })?;
        written += 1;
    }
    Ok(written)
}
