//! Documentation ingestion, file formats, reports, the command line and the
//! HTTP service around `apimap-core`.

pub mod api_json;
pub mod archive;
pub mod cli;
pub mod dataset;
pub mod feature_csv;
pub mod javadoc;
pub mod maven;
pub mod model_io;
pub mod report;
pub mod service;

pub use apimap_core as core;
