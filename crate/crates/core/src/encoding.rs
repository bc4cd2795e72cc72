//! The Notary's transcript encoder.
//!
//! Every plaintext bit of the transcript has a 0-label derived from a secret
//! seed; its 1-label is the 0-label XOR the session offset `delta_N`. The
//! Notary uses these as preset input labels when garbling record blocks, so
//! the labels the Client ends up holding are a binding encoding of the
//! plaintext. Once the seed is published anyone can recompute them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commit::SALT_LEN;
use crate::garble::Label;
use crate::prg::Prg;

/// Which half of the TLS transcript a byte belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Client to server.
    Sent,
    /// Server to client.
    Received,
}

impl Direction {
    pub fn tag(self) -> u8 {
        match self {
            Direction::Sent => 0,
            Direction::Received => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Sent => "sent",
            Direction::Received => "received",
        }
    }
}

/// The encoder of one session.
#[derive(Clone)]
pub struct Encoder {
    seed: [u8; 32],
    delta: Label,
}

impl Encoder {
    pub fn new(seed: [u8; 32]) -> Self {
        let delta = Label::random_delta(&mut Prg::new(&seed, "encoder/delta"));
        Self { seed, delta }
    }

    pub fn seed(&self) -> &[u8; 32] {
        &self.seed
    }

    pub fn delta(&self) -> Label {
        self.delta
    }

    /// 0-label of bit `bit` (MSB-first) of byte `pos`.
    pub fn zero_label(&self, dir: Direction, pos: u64, bit: u8) -> Label {
        let mut h = Sha256::new();
        h.update(b"desk-encoder");
        h.update(self.seed);
        h.update([dir.tag(), bit]);
        h.update(pos.to_le_bytes());
        let d = h.finalize();
        Label::from_bytes(d[..16].try_into().expect("digest width"))
    }

    pub fn encode_bit(&self, dir: Direction, pos: u64, bit: u8, value: bool) -> Label {
        self.zero_label(dir, pos, bit).select(value, self.delta)
    }

    /// Active labels of a whole byte, MSB first.
    pub fn encode_byte(&self, dir: Direction, pos: u64, byte: u8) -> [Label; 8] {
        std::array::from_fn(|j| self.encode_bit(dir, pos, j as u8, byte >> (7 - j) & 1 == 1))
    }
}

impl std::fmt::Debug for Encoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Encoder(..)")
    }
}

/// Active label of one plaintext bit: `label0 ^ value * delta_N`.
pub fn derive_plaintext_encoding(seed: &[u8; 32], dir: Direction, pos: u64, bit: u8, value: bool) -> Label {
    Encoder::new(*seed).encode_bit(dir, pos, bit, value)
}

/// Where bit `t` (little-endian) of 16-bit block `block` lives in the
/// transcript: `(byte position, MSB-first bit index)`.
pub fn block_bit_position(block: usize, t: usize) -> (u64, u8) {
    if t >= 8 {
        ((2 * block) as u64, (15 - t) as u8)
    } else {
        ((2 * block + 1) as u64, (7 - t) as u8)
    }
}

/// Hiding commitment to the encoding of one transcript byte.
pub fn leaf_digest(dir: Direction, pos: u64, labels: &[Label; 8], salt: &[u8; SALT_LEN]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"desk-leaf");
    h.update([dir.tag()]);
    h.update(pos.to_le_bytes());
    for l in labels {
        h.update(l.to_bytes());
    }
    h.update(salt);
    h.finalize().into()
}
