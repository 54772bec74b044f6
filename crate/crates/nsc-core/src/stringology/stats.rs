//! Positional pattern statistics: lagged correlations and block densities.

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Lags probed by the feature map: the QR6 rotation schedule plus powers
/// of two up to the word size.
pub const SERIAL_CORRELATION_LAGS: [usize; 8] = [1, 2, 4, 7, 8, 12, 16, 32];

/// Pearson correlation between the bit sequence and its `lag`-shifted self,
/// with bits encoded as -1/+1. Returns 0 when either marginal is constant.
pub fn serial_correlation(s: &BitString, lag: usize) -> Result<f64> {
    let n = s.len();
    if lag == 0 {
        return Err(Error::InvalidInput("lag must be positive".into()));
    }
    if lag >= n {
        return Err(Error::InvalidInput(format!(
            "lag {lag} must be smaller than the string length {n}"
        )));
    }
    let pairs = n - lag;

    // exact integer sums over the +/-1 encoding, then one float division
    let mut sum_x = 0i64;
    let mut sum_y = 0i64;
    let mut sum_xy = 0i64;
    for i in 0..pairs {
        let x = i64::from(s.get(i)) * 2 - 1;
        let y = i64::from(s.get(i + lag)) * 2 - 1;
        sum_x += x;
        sum_y += y;
        sum_xy += x * y;
    }
    let k = pairs as i64;
    // sum of squares of +/-1 values is the pair count
    let var_x = k * k - sum_x * sum_x;
    let var_y = k * k - sum_y * sum_y;
    if var_x == 0 || var_y == 0 {
        return Ok(0.0);
    }
    let numerator = (k * sum_xy - sum_x * sum_y) as f64;
    // equal variance terms (every exact +/-1 case) divide out exactly
    let denominator = if var_x == var_y {
        var_x as f64
    } else {
        ((var_x as f64) * (var_y as f64)).sqrt()
    };
    Ok((numerator / denominator).clamp(-1.0, 1.0))
}

/// Ones-fractions of `blocks` near-equal contiguous blocks plus their
/// population variance and extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensity {
    pub fractions: Vec<f64>,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

pub fn block_density(s: &BitString, blocks: usize) -> Result<BlockDensity> {
    let n = s.len();
    if blocks == 0 {
        return Err(Error::InvalidInput("need at least one block".into()));
    }
    if blocks > n {
        return Err(Error::InvalidInput(format!(
            "{blocks} blocks exceed the string length {n}"
        )));
    }

    let mut fractions = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let start = b * n / blocks;
        let end = (b + 1) * n / blocks;
        let ones: usize = (start..end).map(|i| s.get(i) as usize).sum();
        fractions.push(ones as f64 / (end - start) as f64);
    }

    let mean = fractions.iter().sum::<f64>() / blocks as f64;
    let variance = fractions.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / blocks as f64;
    let min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BlockDensity {
        fractions,
        variance,
        min,
        max,
    })
}
