//! Exact pattern matching over bit strings.
//!
//! Three routes with one contract: a definitional scan (`count_occurrences`),
//! Knuth-Morris-Pratt, and a Boyer-Moore-Horspool variant. Skip heuristics
//! are vacuous on a two-symbol alphabet, so the BM route repacks the text
//! into the 256-symbol byte alphabet: for each of the 8 bit phases it
//! searches the fully-determined interior bytes of the pattern and verifies
//! the up-to-7 head and tail bits around each candidate. Positions are
//! always reported in bit coordinates.

use crate::bits::BitString;
use crate::error::{Error, Result};

fn validate(pattern: &BitString) -> Result<()> {
    if pattern.is_empty() {
        return Err(Error::InvalidInput("pattern must be non-empty".into()));
    }
    Ok(())
}

/// Bit-by-bit comparison of the pattern against the text at position `i`.
#[inline]
fn matches_at(pattern: &BitString, text: &BitString, i: usize) -> bool {
    (0..pattern.len()).all(|j| pattern.get(j) == text.get(i + j))
}

/// Number of (possibly overlapping) occurrences, by definitional scan.
pub fn count_occurrences(pattern: &BitString, text: &BitString) -> Result<usize> {
    validate(pattern)?;
    let (m, n) = (pattern.len(), text.len());
    if m > n {
        return Ok(0);
    }
    Ok((0..=n - m).filter(|&i| matches_at(pattern, text, i)).count())
}

/// All match positions in increasing order, via KMP prefix tables.
pub fn kmp_search(pattern: &BitString, text: &BitString) -> Result<Vec<usize>> {
    validate(pattern)?;
    let (m, n) = (pattern.len(), text.len());
    if m > n {
        return Ok(Vec::new());
    }

    let pat: Vec<u8> = (0..m).map(|i| pattern.get(i)).collect();
    let mut fail = vec![0usize; m];
    for i in 1..m {
        let mut k = fail[i - 1];
        while k > 0 && pat[i] != pat[k] {
            k = fail[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        fail[i] = k;
    }

    let mut out = Vec::new();
    let mut k = 0usize;
    for i in 0..n {
        let bit = text.get(i);
        while k > 0 && bit != pat[k] {
            k = fail[k - 1];
        }
        if bit == pat[k] {
            k += 1;
        }
        if k == m {
            out.push(i + 1 - m);
            k = fail[k - 1];
        }
    }
    Ok(out)
}

/// Horspool scan over packed bytes; returns every byte offset where the
/// byte pattern occurs (overlaps included).
fn horspool_byte_positions(text: &[u8], pat: &[u8]) -> Vec<usize> {
    let k = pat.len();
    debug_assert!(k >= 1);
    if text.len() < k {
        return Vec::new();
    }
    let mut shift = [k; 256];
    for (j, &c) in pat[..k - 1].iter().enumerate() {
        shift[c as usize] = k - 1 - j;
    }
    let mut out = Vec::new();
    let mut pos = 0usize;
    while pos + k <= text.len() {
        if text[pos..pos + k] == *pat {
            out.push(pos);
        }
        pos += shift[text[pos + k - 1] as usize];
    }
    out
}

/// All match positions in increasing order, via byte-alphabet Boyer-Moore.
pub fn bm_search(pattern: &BitString, text: &BitString) -> Result<Vec<usize>> {
    validate(pattern)?;
    let (m, n) = (pattern.len(), text.len());
    if m > n {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for phase in 0..8usize {
        let head_len = if phase == 0 { 0 } else { (8 - phase).min(m) };
        let rem = m - head_len;
        let interior_len = rem / 8;
        let tail_len = rem % 8;

        if interior_len == 0 {
            // no fully-determined byte at this phase; scan candidates directly
            let mut i = phase;
            while i + m <= n {
                if matches_at(pattern, text, i) {
                    out.push(i);
                }
                i += 8;
            }
            continue;
        }

        let interior: Vec<u8> = (0..interior_len)
            .map(|j| {
                let mut byte = 0u8;
                for t in 0..8 {
                    byte |= pattern.get(head_len + 8 * j + t) << t;
                }
                byte
            })
            .collect();

        for byte_pos in horspool_byte_positions(text.as_bytes(), &interior) {
            let start = byte_pos * 8;
            if start < head_len {
                continue;
            }
            let i = start - head_len;
            if i + m > n {
                continue;
            }
            let head_ok = (0..head_len).all(|t| pattern.get(t) == text.get(i + t));
            let tail_base = head_len + 8 * interior_len;
            let tail_ok = (0..tail_len)
                .all(|t| pattern.get(tail_base + t) == text.get(i + tail_base + t));
            if head_ok && tail_ok {
                out.push(i);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        BitString::parse01(s).unwrap()
    }

    #[test]
    fn overlapping_occurrences_are_counted() {
        assert_eq!(count_occurrences(&bs("101"), &bs("10101")).unwrap(), 2);
    }

    #[test]
    fn pattern_longer_than_text_has_no_window() {
        assert_eq!(count_occurrences(&bs("1111"), &bs("11")).unwrap(), 0);
        assert!(kmp_search(&bs("1111"), &bs("11")).unwrap().is_empty());
        assert!(bm_search(&bs("1111"), &bs("11")).unwrap().is_empty());
    }

    #[test]
    fn empty_pattern_is_rejected_everywhere() {
        let empty = BitString::from_bits(&[]);
        let text = bs("0101");
        assert!(count_occurrences(&empty, &text).is_err());
        assert!(kmp_search(&empty, &text).is_err());
        assert!(bm_search(&empty, &text).is_err());
    }

    #[test]
    fn kmp_known_positions() {
        assert_eq!(kmp_search(&bs("101"), &bs("10101")).unwrap(), vec![0, 2]);
        assert_eq!(kmp_search(&bs("1011"), &bs("1011")).unwrap(), vec![0]);
        assert!(kmp_search(&bs("11"), &bs("000000")).unwrap().is_empty());
    }

    #[test]
    fn bm_known_positions() {
        assert_eq!(bm_search(&bs("101"), &bs("10101")).unwrap(), vec![0, 2]);
        assert_eq!(bm_search(&bs("1"), &bs("0110")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn bm_crosses_byte_boundaries() {
        // 13-bit pattern at every phase of a 64-bit text
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pat_bits: Vec<u8> = (0..13).map(|_| rng.random_range(0..2u8)).collect();
        let pattern = BitString::from_bits(&pat_bits);
        for phase in 0..8 {
            let mut text_bits = vec![0u8; 64];
            for (j, &b) in pat_bits.iter().enumerate() {
                text_bits[phase + j] = b;
            }
            let text = BitString::from_bits(&text_bits);
            let hits = bm_search(&pattern, &text).unwrap();
            assert!(hits.contains(&phase), "phase {phase} missed: {hits:?}");
            assert_eq!(hits, kmp_search(&pattern, &text).unwrap());
        }
    }

    #[test]
    fn three_routes_agree_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(401);
        for _ in 0..300 {
            let n = rng.random_range(1..=512);
            let m = rng.random_range(1..=24.min(n));
            let text = BitString::from_bits(
                &(0..n).map(|_| rng.random_range(0..2u8)).collect::<Vec<_>>(),
            );
            let pattern = BitString::from_bits(
                &(0..m).map(|_| rng.random_range(0..2u8)).collect::<Vec<_>>(),
            );
            let kmp = kmp_search(&pattern, &text).unwrap();
            let bm = bm_search(&pattern, &text).unwrap();
            let count = count_occurrences(&pattern, &text).unwrap();
            assert_eq!(kmp, bm);
            assert_eq!(kmp.len(), count);
        }
    }
}
