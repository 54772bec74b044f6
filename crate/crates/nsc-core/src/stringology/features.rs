//! The feature map from bit strings to fixed-dimension real vectors.
//!
//! Schema v1 (d = 280):
//! - group A, 256 values: normalized 8-gram frequencies (they sum to 1);
//! - group B, 12 values: per m in {8, 16, 32}, the chi-square z-score,
//!   the entropy ratio H/m, the distinct-window ratio, and the peak
//!   multiplicity normalized by its uniform-model scale;
//! - group C, 1 value: longest repeated substring / (2 log2 n);
//! - group D, 8 values: serial correlations at the configured lags;
//! - group E, 3 values: block-density variance, min, max over 64 blocks.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::stringology::ngram::{
    chi_square_uniform, collision_stats_from_histogram, ngram_histogram, shannon_entropy,
    NGRAM_LENGTHS,
};
use crate::stringology::repeats::longest_repeated_substring;
use crate::stringology::stats::{block_density, serial_correlation, SERIAL_CORRELATION_LAGS};

/// Shortest string schema v1 accepts, in bits.
pub const SCHEMA_V1_MIN_BITS: usize = 1 << 12;

/// Block count for the group E densities.
pub const DENSITY_BLOCKS: usize = 64;

/// A named contiguous slice of the feature vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureGroup {
    pub name: &'static str,
    pub dim: usize,
}

/// Versioned description of the feature layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    version: &'static str,
    groups: Vec<FeatureGroup>,
}

impl FeatureSchema {
    /// The v1 layout described in the module docs.
    pub fn v1() -> Self {
        FeatureSchema {
            version: "v1",
            groups: vec![
                FeatureGroup { name: "ngram8_freq", dim: 256 },
                FeatureGroup { name: "mgram_summary", dim: 12 },
                FeatureGroup { name: "lrs_ratio", dim: 1 },
                FeatureGroup { name: "serial_correlation", dim: SERIAL_CORRELATION_LAGS.len() },
                FeatureGroup { name: "block_density", dim: 3 },
            ],
        }
    }

    /// Looks a schema up by version string.
    pub fn by_version(version: &str) -> Result<Self> {
        match version {
            "v1" => Ok(Self::v1()),
            other => Err(Error::Config(format!("unsupported schema version {other:?}"))),
        }
    }

    pub fn version(&self) -> &'static str {
        self.version
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    /// Total dimension, the sum of group dimensions.
    pub fn dimension(&self) -> usize {
        self.groups.iter().map(|g| g.dim).sum()
    }

    /// Index of the first value that is not part of group A; groups B-E
    /// are the z-scored region during training.
    pub fn standardized_from(&self) -> usize {
        self.groups[0].dim
    }
}

/// A d-dimensional extraction result tied to a schema version and source.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_version: String,
    pub source_id: String,
}

impl FeatureVector {
    pub fn with_source(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }
}

/// Scale of the peak multiplicity under the uniform model: mean bin load
/// plus a deviation term of order sqrt(2 mu ln(bins)), clamped to >= 1.
fn expected_max_multiplicity(m: u32, windows: u64) -> f64 {
    let mu = windows as f64 / (m as f64).exp2();
    let bins_log = f64::from(m) * std::f64::consts::LN_2;
    (mu + (2.0 * mu * bins_log).sqrt()).max(1.0)
}

/// Applies the feature map to `s` under `schema`.
pub fn extract_features(s: &BitString, schema: &FeatureSchema) -> Result<FeatureVector> {
    if schema.version != "v1" {
        return Err(Error::Config(format!(
            "unsupported schema version {:?}",
            schema.version
        )));
    }
    let n = s.len();
    if n < SCHEMA_V1_MIN_BITS {
        return Err(Error::InvalidInput(format!(
            "schema v1 needs at least {SCHEMA_V1_MIN_BITS} bits, got {n}"
        )));
    }

    let mut values = Vec::with_capacity(schema.dimension());

    // group A: normalized 8-gram frequencies
    let hist8 = ngram_histogram(s, 8)?;
    let windows8 = hist8.windows() as f64;
    for value in 0..256u64 {
        values.push(hist8.count(value) as f64 / windows8);
    }

    // group B: per-m summaries
    for m in NGRAM_LENGTHS {
        let hist = if m == 8 { hist8.clone() } else { ngram_histogram(s, m)? };
        let windows = hist.windows();
        let chi = chi_square_uniform(&hist);
        let dof = (hist.bins() - 1.0).min(windows as f64 - 1.0);
        values.push((chi - dof) / (2.0 * dof).sqrt());
        values.push(shannon_entropy(&hist) / f64::from(m));
        let collisions = collision_stats_from_histogram(&hist);
        values.push(collisions.distinct_ratio);
        values.push(collisions.max_multiplicity as f64 / expected_max_multiplicity(m, windows));
    }

    // group C: repeat length on the 2 log2 n scale of uniform strings
    let lrs = longest_repeated_substring(s)?;
    values.push(lrs as f64 / (2.0 * (n as f64).log2()));

    // group D: lagged correlations
    for lag in SERIAL_CORRELATION_LAGS {
        values.push(serial_correlation(s, lag)?);
    }

    // group E: density spread
    let density = block_density(s, DENSITY_BLOCKS)?;
    values.push(density.variance);
    values.push(density.min);
    values.push(density.max);

    debug_assert_eq!(values.len(), schema.dimension());
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Internal(format!(
            "feature extraction produced a non-finite value {bad}"
        )));
    }

    Ok(FeatureVector {
        values,
        schema_version: schema.version.to_string(),
        source_id: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_string(seed: u64, n_bytes: usize) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bytes = vec![0u8; n_bytes];
        rng.fill_bytes(&mut bytes);
        BitString::from_bytes(bytes)
    }

    #[test]
    fn schema_v1_dimension_is_the_sum_of_groups() {
        let schema = FeatureSchema::v1();
        let sum: usize = schema.groups().iter().map(|g| g.dim).sum();
        assert_eq!(schema.dimension(), sum);
        assert_eq!(schema.dimension(), 280);
        assert_eq!(schema.standardized_from(), 256);
    }

    #[test]
    fn unknown_schema_version_is_a_config_error() {
        assert!(FeatureSchema::by_version("v0").is_err());
        assert!(FeatureSchema::by_version("v1").is_ok());
    }

    #[test]
    fn group_a_is_normalized() {
        let s = random_string(3, 1024);
        let x = extract_features(&s, &FeatureSchema::v1()).unwrap();
        let mass: f64 = x.values[..256].iter().sum();
        assert!((mass - 1.0).abs() < 1e-9, "group A mass {mass}");
    }

    #[test]
    fn extraction_is_deterministic() {
        let s = random_string(17, 1024);
        let schema = FeatureSchema::v1();
        let a = extract_features(&s, &schema).unwrap();
        let b = extract_features(&s, &schema).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn short_strings_are_rejected() {
        let s = random_string(1, 64);
        assert!(extract_features(&s, &FeatureSchema::v1()).is_err());
    }

    #[test]
    fn all_values_finite_on_degenerate_input() {
        // constant string exercises the zero-entropy / zero-variance paths
        let s = BitString::from_bytes(vec![0u8; 1024]);
        let x = extract_features(&s, &FeatureSchema::v1()).unwrap();
        assert!(x.values.iter().all(|v| v.is_finite()));
        assert_eq!(x.values.len(), 280);
    }
}
