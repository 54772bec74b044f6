//! Keystream generators and the ARX primitives they share.

mod chacha20;
mod echacha;

pub use chacha20::{chacha20_block, chacha20_keystream, chacha20_quarter_round};
pub use echacha::{
    diagonal_schedule, echacha_block, echacha_keystream, qr6, rotl32, row_schedule, EChaChaState,
    QR6_ROTATIONS, STATE_CONSTANTS,
};

use crate::error::{Error, Result};

/// 256-bit key held as 8 little-endian-loaded words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Key256([u32; 8]);

impl Key256 {
    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        let mut words = [0u32; 8];
        for (i, w) in words.iter_mut().enumerate() {
            *w = u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        }
        Key256(words)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes: [u8; 32] = hex::decode(s)
            .map_err(|e| Error::InvalidInput(format!("bad key hex: {e}")))?
            .try_into()
            .map_err(|_| Error::InvalidInput("key must be exactly 32 bytes".into()))?;
        Ok(Self::from_bytes(&bytes))
    }

    pub fn words(&self) -> &[u32; 8] {
        &self.0
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, w) in self.0.iter().enumerate() {
            out[i * 4..i * 4 + 4].copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

/// 128-bit nonce held as 4 little-endian-loaded words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nonce128([u32; 4]);

impl Nonce128 {
    pub fn from_bytes(bytes: &[u8; 16]) -> Self {
        let mut words = [0u32; 4];
        for (i, w) in words.iter_mut().enumerate() {
            *w = u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        }
        Nonce128(words)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes: [u8; 16] = hex::decode(s)
            .map_err(|e| Error::InvalidInput(format!("bad nonce hex: {e}")))?
            .try_into()
            .map_err(|_| Error::InvalidInput("nonce must be exactly 16 bytes".into()))?;
        Ok(Self::from_bytes(&bytes))
    }

    pub fn words(&self) -> &[u32; 4] {
        &self.0
    }

    pub fn to_bytes(&self) -> [u8; 16] {
        let mut out = [0u8; 16];
        for (i, w) in self.0.iter().enumerate() {
            out[i * 4..i * 4 + 4].copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    /// Low 96 bits, the standard ChaCha20 nonce width.
    pub fn truncate96(&self) -> [u8; 12] {
        let bytes = self.to_bytes();
        bytes[..12].try_into().unwrap()
    }
}

/// Number of single rounds (a row round or a diagonal round each count as one).
///
/// Must be even and at least 2; `r = 20` is the full-round default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundCount(u32);

impl RoundCount {
    pub const FULL: RoundCount = RoundCount(20);

    pub fn new(r: u32) -> Result<Self> {
        if r < 2 || r % 2 != 0 {
            return Err(Error::Config(format!(
                "round count must be even and >= 2, got {r}"
            )));
        }
        Ok(RoundCount(r))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of row/diagonal round pairs realized.
    pub fn pairs(self) -> u32 {
        self.0 / 2
    }
}

/// Which generator produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    EChaCha20,
    ChaCha20,
    Urandom,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::EChaCha20 => "echacha20",
            GeneratorKind::ChaCha20 => "chacha20",
            GeneratorKind::Urandom => "urandom",
        }
    }
}

/// Provenance carried alongside generated keystream bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeystreamMeta {
    pub generator: GeneratorKind,
    /// Single-round count for cipher sources; `None` for uniform sources.
    pub rounds: Option<u32>,
    /// Index of the sequence within the corpus that produced it.
    pub sequence_index: u64,
}

/// A generated bit sequence; byte-aligned so it can be written to `.ks` files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keystream {
    bytes: Vec<u8>,
    meta: KeystreamMeta,
}

impl Keystream {
    pub fn new(bytes: Vec<u8>, meta: KeystreamMeta) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::InvalidInput("keystream must be non-empty".into()));
        }
        Ok(Keystream { bytes, meta })
    }

    pub fn len_bits(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn meta(&self) -> &KeystreamMeta {
        &self.meta
    }
}

/// XORs `data` with the leading bytes of the keystream.
///
/// Applying the same keystream twice restores the input.
pub fn xor_combine(keystream: &Keystream, data: &[u8]) -> Result<Vec<u8>> {
    if keystream.bytes.len() < data.len() {
        return Err(Error::InvalidInput(format!(
            "keystream of {} bits is shorter than data of {} bits",
            keystream.len_bits(),
            data.len() * 8
        )));
    }
    Ok(data
        .iter()
        .zip(&keystream.bytes)
        .map(|(d, k)| d ^ k)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_keystream(bytes: Vec<u8>) -> Keystream {
        Keystream::new(
            bytes,
            KeystreamMeta {
                generator: GeneratorKind::Urandom,
                rounds: None,
                sequence_index: 0,
            },
        )
        .unwrap()
    }

    #[test]
    fn key_nonce_hex_round_trip() {
        let key = Key256::from_bytes(&core::array::from_fn(|i| i as u8));
        assert_eq!(Key256::from_hex(&key.to_hex()).unwrap(), key);
        let nonce = Nonce128::from_bytes(&core::array::from_fn(|i| (i * 3) as u8));
        assert_eq!(Nonce128::from_hex(&nonce.to_hex()).unwrap(), nonce);
    }

    #[test]
    fn round_count_rejects_odd_and_zero() {
        assert!(RoundCount::new(0).is_err());
        assert!(RoundCount::new(3).is_err());
        assert_eq!(RoundCount::new(20).unwrap().pairs(), 10);
    }

    #[test]
    fn xor_combine_is_an_involution() {
        let ks = test_keystream(vec![0x5a, 0xc3, 0x7f, 0x01, 0xee]);
        let data = [1u8, 2, 3, 4];
        let once = xor_combine(&ks, &data).unwrap();
        let twice = xor_combine(&ks, &once).unwrap();
        assert_eq!(twice, data);
    }

    #[test]
    fn xor_combine_identity_and_complement() {
        let data = [0x12u8, 0x34, 0x56];
        let zeros = test_keystream(vec![0u8; 3]);
        assert_eq!(xor_combine(&zeros, &data).unwrap(), data);
        let ones = test_keystream(vec![0xffu8; 3]);
        assert_eq!(
            xor_combine(&ones, &data).unwrap(),
            data.iter().map(|b| !b).collect::<Vec<_>>()
        );
    }

    #[test]
    fn xor_combine_rejects_short_keystream() {
        let ks = test_keystream(vec![0u8; 2]);
        assert!(xor_combine(&ks, &[0u8; 3]).is_err());
    }
}
