//! Core algorithms for recommending method-level API migration mappings.
//!
//! Given the documentation of a retired library and its replacement, this
//! crate turns every candidate (source method, target method) pair into a
//! vector of signature and documentation similarities, classifies pairs with
//! a gradient-boosted tree ensemble, and scores them with three reference
//! baselines. Everything here is pure computation over in-memory values; file
//! formats, network access and the command line live in the `apimap` crate.
//!
//! The crate is `no_std` and only requires `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod learner;
mod math;
pub mod textops;
pub mod vsm;

pub use corpus::{ApiLibrary, ApiMethod, ApiParam, Label, MappingDataset, MappingRecord};
pub use features::{FeatureExtractor, FeatureVector, MethodProfile};
pub use learner::{GbdtHyperparams, GbdtModel};
