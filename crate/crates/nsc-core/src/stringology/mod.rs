//! Keystreams as symbolic strings: exact matching, m-gram statistics,
//! repeat detection, positional statistics, and the feature map.

mod features;
mod matching;
mod ngram;
mod repeats;
mod stats;

pub use features::{
    extract_features, FeatureGroup, FeatureSchema, FeatureVector, DENSITY_BLOCKS,
    SCHEMA_V1_MIN_BITS,
};
pub use matching::{bm_search, count_occurrences, kmp_search};
pub use ngram::{
    chi_square_uniform, collision_stats, ngram_histogram, shannon_entropy, CollisionStats,
    NgramHistogram, NGRAM_LENGTHS,
};
pub use repeats::longest_repeated_substring;
pub use stats::{block_density, serial_correlation, BlockDensity, SERIAL_CORRELATION_LAGS};
