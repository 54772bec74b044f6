//! Python bindings: keystream generation, string-pattern statistics, the
//! feature map, and distinguisher training/scoring.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use nsc_core::bits::BitString;
use nsc_core::cipher;
use nsc_core::cipher::{Key256, Nonce128, RoundCount};
use nsc_core::neural;
use nsc_core::stringology;
use nsc_core::stringology::FeatureSchema;

fn err(e: nsc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn key_from(bytes: &[u8]) -> PyResult<Key256> {
    let arr: &[u8; 32] = bytes
        .try_into()
        .map_err(|_| PyValueError::new_err("key must be exactly 32 bytes"))?;
    Ok(Key256::from_bytes(arr))
}

fn nonce_from(bytes: &[u8]) -> PyResult<Nonce128> {
    let arr: &[u8; 16] = bytes
        .try_into()
        .map_err(|_| PyValueError::new_err("nonce must be exactly 16 bytes"))?;
    Ok(Nonce128::from_bytes(arr))
}

fn bits01(s: &str) -> PyResult<BitString> {
    BitString::parse01(s).map_err(err)
}

/// EChaCha20 keystream bytes for (key, nonce, rounds, n_bits).
#[pyfunction]
fn echacha_keystream<'py>(
    py: Python<'py>,
    key: &[u8],
    nonce: &[u8],
    rounds: u32,
    n_bits: usize,
) -> PyResult<Bound<'py, PyBytes>> {
    let rounds = RoundCount::new(rounds).map_err(err)?;
    let ks = cipher::echacha_keystream(&key_from(key)?, &nonce_from(nonce)?, rounds, n_bits)
        .map_err(err)?;
    Ok(PyBytes::new(py, ks.as_bytes()))
}

/// One 96-byte EChaCha20 block at the given counter.
#[pyfunction]
fn echacha_block<'py>(
    py: Python<'py>,
    key: &[u8],
    nonce: &[u8],
    counter: u64,
    rounds: u32,
) -> PyResult<Bound<'py, PyBytes>> {
    let rounds = RoundCount::new(rounds).map_err(err)?;
    let block = cipher::echacha_block(&key_from(key)?, &nonce_from(nonce)?, counter, rounds);
    Ok(PyBytes::new(py, &block))
}

/// The six-word extended quarter-round.
#[pyfunction]
fn echacha_qr6(words: Vec<u32>) -> PyResult<Vec<u32>> {
    let arr: [u32; 6] = words
        .try_into()
        .map_err(|_| PyValueError::new_err("expected exactly 6 words"))?;
    Ok(cipher::qr6(arr).to_vec())
}

/// One 64-byte ChaCha20 block (96-bit nonce, 32-bit counter).
#[pyfunction]
fn chacha20_block<'py>(
    py: Python<'py>,
    key: &[u8],
    nonce: &[u8],
    counter: u32,
) -> PyResult<Bound<'py, PyBytes>> {
    let nonce: &[u8; 12] = nonce
        .try_into()
        .map_err(|_| PyValueError::new_err("nonce must be exactly 12 bytes"))?;
    let block = cipher::chacha20_block(&key_from(key)?, nonce, counter);
    Ok(PyBytes::new(py, &block))
}

/// XOR data with a keystream prefix (applying it twice restores the data).
#[pyfunction]
fn xor_combine<'py>(py: Python<'py>, keystream: &[u8], data: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    if keystream.len() < data.len() {
        return Err(PyValueError::new_err("keystream shorter than data"));
    }
    let out: Vec<u8> = data.iter().zip(keystream).map(|(d, k)| d ^ k).collect();
    Ok(PyBytes::new(py, &out))
}

/// Occurrences of a 0/1 pattern string in a 0/1 text string (overlapping).
#[pyfunction]
fn count_occurrences(pattern: &str, text: &str) -> PyResult<usize> {
    stringology::count_occurrences(&bits01(pattern)?, &bits01(text)?).map_err(err)
}

/// KMP match positions of a 0/1 pattern in a 0/1 text.
#[pyfunction]
fn kmp_search(pattern: &str, text: &str) -> PyResult<Vec<usize>> {
    stringology::kmp_search(&bits01(pattern)?, &bits01(text)?).map_err(err)
}

/// Boyer-Moore match positions of a 0/1 pattern in a 0/1 text.
#[pyfunction]
fn bm_search(pattern: &str, text: &str) -> PyResult<Vec<usize>> {
    stringology::bm_search(&bits01(pattern)?, &bits01(text)?).map_err(err)
}

/// Chi-square statistic of the m-gram histogram against uniformity.
#[pyfunction]
fn ngram_chi_square(data: &[u8], m: u32) -> PyResult<f64> {
    let bits = BitString::from_bytes(data.to_vec());
    let hist = stringology::ngram_histogram(&bits, m).map_err(err)?;
    Ok(stringology::chi_square_uniform(&hist))
}

/// Shannon entropy (bits) of the m-gram histogram.
#[pyfunction]
fn ngram_entropy(data: &[u8], m: u32) -> PyResult<f64> {
    let bits = BitString::from_bytes(data.to_vec());
    let hist = stringology::ngram_histogram(&bits, m).map_err(err)?;
    Ok(stringology::shannon_entropy(&hist))
}

/// (distinct_ratio, max_multiplicity) of the m-bit windows.
#[pyfunction]
fn collision_stats(data: &[u8], m: u32) -> PyResult<(f64, u64)> {
    let bits = BitString::from_bytes(data.to_vec());
    let stats = stringology::collision_stats(&bits, m).map_err(err)?;
    Ok((stats.distinct_ratio, stats.max_multiplicity))
}

/// Length of the longest repeated substring of the bit sequence.
#[pyfunction]
fn longest_repeated_substring(data: &[u8]) -> PyResult<usize> {
    let bits = BitString::from_bytes(data.to_vec());
    stringology::longest_repeated_substring(&bits).map_err(err)
}

/// Lagged Pearson correlation of the bit sequence with itself.
#[pyfunction]
fn serial_correlation(data: &[u8], lag: usize) -> PyResult<f64> {
    let bits = BitString::from_bytes(data.to_vec());
    stringology::serial_correlation(&bits, lag).map_err(err)
}

/// Schema v1 feature vector of the bit sequence.
#[pyfunction]
fn extract_features(data: &[u8]) -> PyResult<Vec<f64>> {
    let bits = BitString::from_bytes(data.to_vec());
    let fv = stringology::extract_features(&bits, &FeatureSchema::v1()).map_err(err)?;
    Ok(fv.values)
}

/// Total dimension of schema v1.
#[pyfunction]
fn feature_dimension() -> usize {
    FeatureSchema::v1().dimension()
}

/// (group name, dimension) pairs of schema v1, in vector order.
#[pyfunction]
fn feature_groups() -> Vec<(String, usize)> {
    FeatureSchema::v1()
        .groups()
        .iter()
        .map(|g| (g.name.to_string(), g.dim))
        .collect()
}

/// A trained distinguisher plus its feature standardization.
#[pyclass]
struct Distinguisher {
    inner: neural::Distinguisher,
}

#[pymethods]
impl Distinguisher {
    /// Loads a checkpoint file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let inner = neural::Distinguisher::load(std::path::Path::new(path)).map_err(err)?;
        Ok(Distinguisher { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(std::path::Path::new(path)).map_err(err)
    }

    /// Trains on explicit train/validation matrices and returns the model.
    #[staticmethod]
    #[pyo3(signature = (
        features, labels, val_features, val_labels,
        seed = 0, epochs = 100, learning_rate = 0.01, batch_size = 32, l2 = 1e-4,
        logistic = false,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn fit(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        val_features: Vec<Vec<f64>>,
        val_labels: Vec<u8>,
        seed: u64,
        epochs: usize,
        learning_rate: f64,
        batch_size: usize,
        l2: f64,
        logistic: bool,
    ) -> PyResult<Self> {
        let schema = FeatureSchema::v1();
        let standardize_from = if features.first().map(Vec::len) == Some(schema.dimension()) {
            schema.standardized_from()
        } else {
            0
        };
        let standardizer = neural::Standardizer::fit(&features, standardize_from).map_err(err)?;
        let train = neural::LabeledDataset::new(
            features.iter().map(|r| standardizer.apply(r)).collect(),
            labels,
        )
        .map_err(err)?;
        let val = neural::LabeledDataset::new(
            val_features.iter().map(|r| standardizer.apply(r)).collect(),
            val_labels,
        )
        .map_err(err)?;
        let cfg = neural::TrainConfig {
            learning_rate,
            epochs,
            batch_size,
            seed,
            l2,
        };
        let (params, _history) = if logistic {
            neural::logistic_baseline(&train, &val, &cfg).map_err(err)?
        } else {
            neural::train_mlp(&train, &val, &cfg).map_err(err)?
        };
        Ok(Distinguisher {
            inner: neural::Distinguisher {
                params,
                standardizer,
            },
        })
    }

    /// Probability that a raw feature row is cipher-generated (class 1).
    fn score(&self, features: Vec<f64>) -> PyResult<f64> {
        self.inner.score(&features).map_err(err)
    }

    /// Extracts schema v1 features from raw bytes and scores them.
    fn score_bytes(&self, data: &[u8]) -> PyResult<f64> {
        let bits = BitString::from_bytes(data.to_vec());
        let fv = stringology::extract_features(&bits, &FeatureSchema::v1()).map_err(err)?;
        self.inner.score(&fv.values).map_err(err)
    }

    /// Hard decision at threshold 0.5.
    fn decide(&self, features: Vec<f64>) -> PyResult<u8> {
        self.inner.decide(&features).map_err(err)
    }

    #[getter]
    fn layer_sizes(&self) -> Vec<usize> {
        self.inner.params.layer_sizes().to_vec()
    }
}

#[pymodule]
fn nsc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(echacha_keystream, m)?)?;
    m.add_function(wrap_pyfunction!(echacha_block, m)?)?;
    m.add_function(wrap_pyfunction!(echacha_qr6, m)?)?;
    m.add_function(wrap_pyfunction!(chacha20_block, m)?)?;
    m.add_function(wrap_pyfunction!(xor_combine, m)?)?;
    m.add_function(wrap_pyfunction!(count_occurrences, m)?)?;
    m.add_function(wrap_pyfunction!(kmp_search, m)?)?;
    m.add_function(wrap_pyfunction!(bm_search, m)?)?;
    m.add_function(wrap_pyfunction!(ngram_chi_square, m)?)?;
    m.add_function(wrap_pyfunction!(ngram_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(collision_stats, m)?)?;
    m.add_function(wrap_pyfunction!(longest_repeated_substring, m)?)?;
    m.add_function(wrap_pyfunction!(serial_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(feature_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(feature_groups, m)?)?;
    m.add_class::<Distinguisher>()?;
    Ok(())
}
