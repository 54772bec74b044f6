//! Reference ChaCha20 block function (RFC 8439 conventions), used as the
//! comparison variant: 96-bit nonce, 32-bit block counter, 20 rounds.

use super::{GeneratorKind, Key256, Keystream, KeystreamMeta};
use crate::error::{Error, Result};

const CHACHA_CONSTANTS: [u32; 4] = [0x6170_7865, 0x3320_646e, 0x7962_2d32, 0x6b20_6574];

/// The four-word ChaCha quarter-round with rotations (16, 12, 8, 7).
#[inline]
pub fn chacha20_quarter_round(state: [u32; 4]) -> [u32; 4] {
    let [mut a, mut b, mut c, mut d] = state;
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(16);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(12);
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(8);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(7);
    [a, b, c, d]
}

#[inline]
fn quarter(state: &mut [u32; 16], a: usize, b: usize, c: usize, d: usize) {
    let out = chacha20_quarter_round([state[a], state[b], state[c], state[d]]);
    state[a] = out[0];
    state[b] = out[1];
    state[c] = out[2];
    state[d] = out[3];
}

/// One 512-bit (64-byte) ChaCha20 block: 10 column/diagonal double rounds
/// plus feed-forward, serialized little-endian.
pub fn chacha20_block(key: &Key256, nonce: &[u8; 12], counter: u32) -> [u8; 64] {
    let mut state = [0u32; 16];
    state[..4].copy_from_slice(&CHACHA_CONSTANTS);
    state[4..12].copy_from_slice(key.words());
    state[12] = counter;
    for i in 0..3 {
        state[13 + i] = u32::from_le_bytes(nonce[i * 4..i * 4 + 4].try_into().unwrap());
    }

    let initial = state;
    for _ in 0..10 {
        quarter(&mut state, 0, 4, 8, 12);
        quarter(&mut state, 1, 5, 9, 13);
        quarter(&mut state, 2, 6, 10, 14);
        quarter(&mut state, 3, 7, 11, 15);
        quarter(&mut state, 0, 5, 10, 15);
        quarter(&mut state, 1, 6, 11, 12);
        quarter(&mut state, 2, 7, 8, 13);
        quarter(&mut state, 3, 4, 9, 14);
    }
    for (word, init) in state.iter_mut().zip(initial) {
        *word = word.wrapping_add(init);
    }

    let mut out = [0u8; 64];
    for (i, w) in state.iter().enumerate() {
        out[i * 4..i * 4 + 4].copy_from_slice(&w.to_le_bytes());
    }
    out
}

/// Keystream of `n_bits` bits from blocks at counter 0, 1, 2, ...
pub fn chacha20_keystream(key: &Key256, nonce: &[u8; 12], n_bits: usize) -> Result<Keystream> {
    if n_bits == 0 || n_bits % 8 != 0 {
        return Err(Error::InvalidInput(format!(
            "keystream length must be a positive multiple of 8 bits, got {n_bits}"
        )));
    }
    let n_bytes = n_bits / 8;
    let mut bytes = Vec::with_capacity(n_bytes);
    let mut counter = 0u32;
    while bytes.len() < n_bytes {
        let block = chacha20_block(key, nonce, counter);
        let take = (n_bytes - bytes.len()).min(block.len());
        bytes.extend_from_slice(&block[..take]);
        counter = counter.checked_add(1).ok_or_else(|| {
            Error::InvalidInput("requested keystream exhausts the 32-bit block counter".into())
        })?;
    }
    Keystream::new(
        bytes,
        KeystreamMeta {
            generator: GeneratorKind::ChaCha20,
            rounds: Some(20),
            sequence_index: 0,
        },
    )
}
