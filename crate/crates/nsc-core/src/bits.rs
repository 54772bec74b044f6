//! Packed bit strings.
//!
//! Keystream files hold raw bytes; analysis treats them as strings over
//! {0, 1}. Bit `i` lives in byte `i / 8` at position `i % 8` counted from
//! the least significant bit, matching the little-endian convention of the
//! generators. Multi-bit windows read the earliest bit as the most
//! significant bit of the window value.

use crate::error::{Error, Result};

/// A sequence over {0, 1}, packed 8 bits per byte, indexable in O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString {
    bytes: Vec<u8>,
    n_bits: usize,
}

impl BitString {
    /// Wraps packed bytes; the bit length is 8 times the byte length.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let n_bits = bytes.len() * 8;
        BitString { bytes, n_bits }
    }

    /// Builds from individual bit values (0 or 1).
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut bytes = vec![0u8; bits.len().div_ceil(8)];
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            bytes[i / 8] |= (b & 1) << (i % 8);
        }
        BitString {
            bytes,
            n_bits: bits.len(),
        }
    }

    /// Parses a string of '0' and '1' characters; handy in tests.
    pub fn parse01(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidInput(format!(
                    "expected '0' or '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    /// Number of bits.
    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    /// Bit at position `i`, as 0 or 1.
    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.n_bits);
        (self.bytes[i / 8] >> (i % 8)) & 1
    }

    /// Underlying packed bytes (the final byte may carry unused high bits).
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Count of one bits.
    pub fn count_ones(&self) -> usize {
        if self.n_bits % 8 == 0 {
            self.bytes.iter().map(|b| b.count_ones() as usize).sum()
        } else {
            (0..self.n_bits).map(|i| self.get(i) as usize).sum()
        }
    }

    /// The `m`-bit window starting at `i`, earliest bit most significant.
    ///
    /// Requires `m <= 64` and `i + m <= len`.
    pub fn window_value(&self, i: usize, m: usize) -> u64 {
        debug_assert!(m >= 1 && m <= 64);
        debug_assert!(i + m <= self.n_bits);
        let mut v = 0u64;
        for j in 0..m {
            v = (v << 1) | u64::from(self.get(i + j));
        }
        v
    }

    /// True when the `len`-bit ranges at `a` and `b` are identical.
    pub fn ranges_equal(&self, a: usize, b: usize, len: usize) -> bool {
        debug_assert!(a + len <= self.n_bits && b + len <= self.n_bits);
        // compare 64-bit chunks, then the tail
        let chunks = len / 64;
        for c in 0..chunks {
            if self.window_value(a + c * 64, 64) != self.window_value(b + c * 64, 64) {
                return false;
            }
        }
        let done = chunks * 64;
        let tail = len - done;
        tail == 0 || self.window_value(a + done, tail) == self.window_value(b + done, tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_order_is_lsb_first_within_bytes() {
        let s = BitString::from_bytes(vec![0b0000_0001, 0b1000_0000]);
        assert_eq!(s.len(), 16);
        assert_eq!(s.get(0), 1);
        assert_eq!(s.get(1), 0);
        assert_eq!(s.get(15), 1);
        assert_eq!(s.count_ones(), 2);
    }

    #[test]
    fn parse_and_window_values() {
        let s = BitString::parse01("10110").unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.window_value(0, 3), 0b101);
        assert_eq!(s.window_value(1, 4), 0b0110);
        assert!(BitString::parse01("10x").is_err());
    }

    #[test]
    fn from_bits_round_trips_through_get() {
        let bits = [1u8, 0, 0, 1, 1, 1, 0, 1, 0, 1];
        let s = BitString::from_bits(&bits);
        let back: Vec<u8> = (0..s.len()).map(|i| s.get(i)).collect();
        assert_eq!(back, bits);
    }

    #[test]
    fn ranges_equal_handles_long_and_tail_cases() {
        let s = BitString::parse01(&"10".repeat(100)).unwrap();
        assert!(s.ranges_equal(0, 2, 150));
        assert!(!s.ranges_equal(0, 1, 150));
        assert!(s.ranges_equal(0, 4, 64));
        assert!(s.ranges_equal(3, 5, 3));
    }
}
