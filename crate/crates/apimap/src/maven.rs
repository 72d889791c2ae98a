//! Downloads `-javadoc.jar` archives from a Maven repository.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apimap_core::corpus::{MavenCoordinates, MAVEN_CENTRAL};
use thiserror::Error;

/// Overrides the repository base URL when set.
pub const BASE_URL_ENV: &str = "APIMAP_MAVEN_BASE_URL";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("no javadoc archive at {url}")]
    RemoteNotFound { url: String },
    #[error("fetching {url}: {reason}")]
    NetworkFailure { url: String, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

pub fn default_base_url() -> String {
    std::env::var(BASE_URL_ENV).ok().filter(|s| !s.trim().is_empty()).unwrap_or_else(|| MAVEN_CENTRAL.to_string())
}

pub fn javadoc_url(coords: &MavenCoordinates) -> String {
    coords.javadoc_url(&default_base_url())
}

/// Downloads into `dest_dir/{artifact}-{version}-javadoc.jar` and returns
/// that path. The file only appears once the download has completed.
pub fn fetch_javadoc_archive(coords: &MavenCoordinates, dest_dir: &Path) -> Result<PathBuf, FetchError> {
    fetch_from(coords, &default_base_url(), dest_dir)
}

pub fn fetch_from(coords: &MavenCoordinates, base_url: &str, dest_dir: &Path) -> Result<PathBuf, FetchError> {
    let url = coords.javadoc_url(base_url);
    log::info!("fetching {url}");
    let mut response = match ureq::get(&url).call() {
        Ok(r) => r,
        Err(ureq::Error::StatusCode(404)) => return Err(FetchError::RemoteNotFound { url }),
        Err(e) => return Err(FetchError::NetworkFailure { url, reason: e.to_string() }),
    };
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| FetchError::Io { path, source }
    };
    fs::create_dir_all(dest_dir).map_err(io_err(dest_dir))?;
    let dest = dest_dir.join(coords.javadoc_file_name());
    let partial = dest.with_extension("jar.part");
    let mut file = fs::File::create(&partial).map_err(io_err(&partial))?;
    let mut body = response.body_mut().with_config().limit(u64::MAX).reader();
    io::copy(&mut body, &mut file)
        .map_err(|e| FetchError::NetworkFailure { url: url.clone(), reason: e.to_string() })?;
    file.sync_all().map_err(io_err(&partial))?;
    fs::rename(&partial, &dest).map_err(io_err(&dest))?;
    Ok(dest)
}
