//! m-gram window statistics over bit strings.
//!
//! Windows are fully overlapping (stride 1 bit). The m = 8 histogram is
//! dense over 256 bins; m = 16 and m = 32 are stored sparse, and the
//! chi-square statistic accounts for absent bins in closed form instead of
//! iterating 2^m bins.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Pattern lengths the histogram accepts.
pub const NGRAM_LENGTHS: [u32; 3] = [8, 16, 32];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Counts {
    Dense(Box<[u64; 256]>),
    Sparse(HashMap<u64, u64>),
}

/// Occurrence counts of every m-bit window value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramHistogram {
    m: u32,
    windows: u64,
    counts: Counts,
}

impl NgramHistogram {
    /// Builds a histogram from explicit (value, count) pairs, mainly for
    /// tests and report tooling. `windows` is the sum of counts.
    pub fn from_counts(m: u32, entries: &[(u64, u64)]) -> Result<Self> {
        if !NGRAM_LENGTHS.contains(&m) {
            return Err(Error::InvalidInput(format!(
                "m must be one of {NGRAM_LENGTHS:?}, got {m}"
            )));
        }
        let limit = 1u64.checked_shl(m).unwrap_or(u64::MAX);
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut windows = 0u64;
        for &(value, count) in entries {
            if value >= limit {
                return Err(Error::InvalidInput(format!(
                    "value {value:#x} does not fit in {m} bits"
                )));
            }
            if count > 0 {
                *counts.entry(value).or_insert(0) += count;
                windows += count;
            }
        }
        if windows == 0 {
            return Err(Error::InvalidInput("histogram has no windows".into()));
        }
        Ok(if m == 8 {
            let mut dense = Box::new([0u64; 256]);
            for (v, c) in counts {
                dense[v as usize] = c;
            }
            NgramHistogram {
                m,
                windows,
                counts: Counts::Dense(dense),
            }
        } else {
            NgramHistogram {
                m,
                windows,
                counts: Counts::Sparse(counts),
            }
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Total window count, always n - m + 1 for a built histogram.
    pub fn windows(&self) -> u64 {
        self.windows
    }

    /// Number of possible m-bit values, as a float (2^32 exceeds usize on
    /// 32-bit hosts and only ever enters floating-point formulas).
    pub fn bins(&self) -> f64 {
        (self.m as f64).exp2()
    }

    pub fn count(&self, value: u64) -> u64 {
        match &self.counts {
            Counts::Dense(d) => d.get(value as usize).copied().unwrap_or(0),
            Counts::Sparse(s) => s.get(&value).copied().unwrap_or(0),
        }
    }

    /// Occupied bins sorted by value; the deterministic iteration order for
    /// every floating-point reduction over the histogram.
    pub fn occupied_sorted(&self) -> Vec<(u64, u64)> {
        let mut entries: Vec<(u64, u64)> = match &self.counts {
            Counts::Dense(d) => d
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(v, &c)| (v as u64, c))
                .collect(),
            Counts::Sparse(s) => s.iter().map(|(&v, &c)| (v, c)).collect(),
        };
        entries.sort_unstable_by_key(|e| e.0);
        entries
    }

    /// Number of distinct window values observed.
    pub fn occupied_len(&self) -> u64 {
        match &self.counts {
            Counts::Dense(d) => d.iter().filter(|&&c| c > 0).count() as u64,
            Counts::Sparse(s) => s.len() as u64,
        }
    }

    /// Largest count of any single window value.
    pub fn max_multiplicity(&self) -> u64 {
        match &self.counts {
            Counts::Dense(d) => d.iter().copied().max().unwrap_or(0),
            Counts::Sparse(s) => s.values().copied().max().unwrap_or(0),
        }
    }
}

/// Counts all n - m + 1 overlapping m-bit windows of `s`.
pub fn ngram_histogram(s: &BitString, m: u32) -> Result<NgramHistogram> {
    if !NGRAM_LENGTHS.contains(&m) {
        return Err(Error::InvalidInput(format!(
            "m must be one of {NGRAM_LENGTHS:?}, got {m}"
        )));
    }
    let mu = m as usize;
    if mu > s.len() {
        return Err(Error::InvalidInput(format!(
            "pattern length {m} exceeds string length {}",
            s.len()
        )));
    }

    let windows = (s.len() - mu + 1) as u64;
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut value = s.window_value(0, mu);

    Ok(if m == 8 {
        let mut dense = Box::new([0u64; 256]);
        dense[value as usize] += 1;
        for i in 1..windows as usize {
            value = ((value << 1) | u64::from(s.get(i + mu - 1))) & mask;
            dense[value as usize] += 1;
        }
        NgramHistogram {
            m,
            windows,
            counts: Counts::Dense(dense),
        }
    } else {
        let mut sparse: HashMap<u64, u64> = HashMap::with_capacity(windows as usize);
        *sparse.entry(value).or_insert(0) += 1;
        for i in 1..windows as usize {
            value = ((value << 1) | u64::from(s.get(i + mu - 1))) & mask;
            *sparse.entry(value).or_insert(0) += 1;
        }
        NgramHistogram {
            m,
            windows,
            counts: Counts::Sparse(sparse),
        }
    })
}

/// Chi-square statistic against the uniform expectation windows * 2^-m.
///
/// Absent bins each contribute the expected count; for sparse histograms
/// that term is (2^m - occupied) * expected, computed without iteration.
pub fn chi_square_uniform(h: &NgramHistogram) -> f64 {
    let expected = h.windows() as f64 / h.bins();
    let mut stat = 0.0f64;
    for (_, count) in h.occupied_sorted() {
        let diff = count as f64 - expected;
        stat += diff * diff / expected;
    }
    stat += (h.bins() - h.occupied_len() as f64) * expected;
    // exact-expectation histograms should report exactly zero, not rounding dust
    stat.max(0.0)
}

/// Shannon entropy in bits over the window-value distribution.
pub fn shannon_entropy(h: &NgramHistogram) -> f64 {
    let windows = h.windows() as f64;
    let mut entropy = 0.0f64;
    for (_, count) in h.occupied_sorted() {
        let p = count as f64 / windows;
        entropy -= p * p.log2();
    }
    entropy.max(0.0)
}

/// Window recurrence aggregates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionStats {
    /// Distinct windows / min(windows, 2^m).
    pub distinct_ratio: f64,
    /// Largest count of any single m-gram.
    pub max_multiplicity: u64,
}

pub(crate) fn collision_stats_from_histogram(h: &NgramHistogram) -> CollisionStats {
    let capacity = (h.windows() as f64).min(h.bins());
    CollisionStats {
        distinct_ratio: h.occupied_len() as f64 / capacity,
        max_multiplicity: h.max_multiplicity(),
    }
}

/// Distinct-window ratio and peak multiplicity of the m-bit windows of `s`.
pub fn collision_stats(s: &BitString, m: u32) -> Result<CollisionStats> {
    Ok(collision_stats_from_histogram(&ngram_histogram(s, m)?))
}
