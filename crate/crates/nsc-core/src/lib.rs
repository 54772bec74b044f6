//! Neural stringology cryptanalysis workbench.
//!
//! The crate is organized along the pipeline it implements:
//!
//! - [`cipher`]: round-parameterized EChaCha20 and reference ChaCha20
//!   keystream generators built from shared ARX primitives.
//! - [`bits`]: packed bit strings with O(1) bit indexing, the common
//!   representation for keystreams under analysis.
//! - [`stringology`]: exact pattern matching (naive/KMP/BM), m-gram
//!   statistics, repeat detection, and the feature map from bit strings
//!   to fixed-dimension real vectors.
//! - [`neural`]: a small feed-forward distinguisher trained with
//!   mini-batch gradient descent, plus metrics, ROC/AUC, and the
//!   distinguishing-advantage estimator.
//! - [`experiments`]: corpus generation with provenance manifests,
//!   stratified splits, the three experiment tasks, and CSV/SVG report
//!   emission.

pub mod bits;
pub mod cipher;
pub mod error;
pub mod experiments;
pub mod neural;
pub mod rng;
pub mod stringology;

pub use error::{Error, Result};
