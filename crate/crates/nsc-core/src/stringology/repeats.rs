//! Longest repeated substring by rolling-hash binary search.
//!
//! "Has a repeat of length L" is monotone in L, so the answer is found by
//! binary search; each probe hashes all L-bit windows with a fixed-base
//! polynomial hash mod 2^61 - 1 and verifies hash buckets by exact bit
//! comparison, so hash collisions can never produce a wrong answer.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::error::{Error, Result};

const MOD: u64 = (1 << 61) - 1;
const BASE: u64 = 1_000_000_007;

#[inline]
fn mul_mod(x: u64, y: u64) -> u64 {
    let t = u128::from(x) * u128::from(y);
    let folded = ((t >> 61) + (t & u128::from(MOD))) as u64;
    if folded >= MOD {
        folded - MOD
    } else {
        folded
    }
}

#[inline]
fn add_mod(x: u64, y: u64) -> u64 {
    let s = x + y;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

/// Symbols are bit + 1 so leading zeros contribute to the hash.
#[inline]
fn symbol(s: &BitString, i: usize) -> u64 {
    u64::from(s.get(i)) + 1
}

/// True when some `len`-bit substring occurs at two distinct positions.
fn has_repeat(s: &BitString, len: usize) -> bool {
    let n = s.len();
    debug_assert!(len >= 1 && len <= n);
    let window_count = n - len + 1;

    let mut top_power = 1u64; // BASE^(len-1)
    for _ in 1..len {
        top_power = mul_mod(top_power, BASE);
    }

    let mut hash = 0u64;
    for i in 0..len {
        hash = add_mod(mul_mod(hash, BASE), symbol(s, i));
    }

    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    for i in 0..window_count {
        if i > 0 {
            let outgoing = mul_mod(symbol(s, i - 1), top_power);
            hash = add_mod(hash, MOD - outgoing);
            hash = add_mod(mul_mod(hash, BASE), symbol(s, i + len - 1));
        }
        // representatives are pairwise-distinct windows within the bucket
        let reps = buckets.entry(hash).or_default();
        for &rep in reps.iter() {
            if s.ranges_equal(rep as usize, i, len) {
                return true;
            }
        }
        reps.push(i as u32);
    }
    false
}

/// Maximum L such that some L-bit substring occurs at two or more
/// positions (overlaps allowed); 0 when no nonempty substring repeats.
pub fn longest_repeated_substring(s: &BitString) -> Result<usize> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 bits, got {n}"
        )));
    }
    let mut lo = 0usize; // length 0 trivially repeats
    let mut hi = n - 1;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if has_repeat(s, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        BitString::parse01(s).unwrap()
    }

    /// O(n^2 log n)-ish oracle: enumerate all substrings per length.
    fn brute_force_lrs(s: &BitString) -> usize {
        let n = s.len();
        for len in (1..n).rev() {
            let mut seen = std::collections::HashSet::new();
            for i in 0..=n - len {
                let key: Vec<u8> = (i..i + len).map(|j| s.get(j)).collect();
                if !seen.insert(key) {
                    return len;
                }
            }
        }
        0
    }

    #[test]
    fn known_small_cases() {
        assert_eq!(longest_repeated_substring(&bs("0101")).unwrap(), 2);
        assert_eq!(longest_repeated_substring(&bs("01")).unwrap(), 0);
        assert_eq!(longest_repeated_substring(&bs("00")).unwrap(), 1);
    }

    #[test]
    fn all_zeros_repeats_at_shift_one() {
        for n in [2usize, 3, 17, 64, 200] {
            let s = BitString::from_bits(&vec![0u8; n]);
            assert_eq!(longest_repeated_substring(&s).unwrap(), n - 1);
        }
    }

    #[test]
    fn too_short_input_is_rejected() {
        assert!(longest_repeated_substring(&bs("1")).is_err());
    }

    #[test]
    fn agrees_with_brute_force_on_random_strings() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..60 {
            let n = rng.random_range(2..=128);
            let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            let s = BitString::from_bits(&bits);
            assert_eq!(
                longest_repeated_substring(&s).unwrap(),
                brute_force_lrs(&s),
                "mismatch on {bits:?}"
            );
        }
    }
}
