//! SHA-256 in counter mode, used wherever randomness must be replayable from
//! a committed seed.

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

/// Output block `i` is `SHA-256(seed || len(domain) || domain || i)` with
/// little-endian length and counter.
#[derive(Clone)]
pub struct Prg {
    prefix: Sha256,
    counter: u64,
    buf: [u8; 32],
    pos: usize,
}

impl Prg {
    pub fn new(seed: &[u8; 32], domain: &str) -> Self {
        let mut prefix = Sha256::new();
        prefix.update(seed);
        prefix.update((domain.len() as u32).to_le_bytes());
        prefix.update(domain.as_bytes());
        Self {
            prefix,
            counter: 0,
            buf: [0; 32],
            pos: 32,
        }
    }

    /// A seed derived from this seed and a label, for sub-streams.
    pub fn derive_seed(seed: &[u8; 32], domain: &str) -> [u8; 32] {
        let mut out = [0u8; 32];
        Prg::new(seed, domain).fill_bytes(&mut out);
        out
    }

    fn refill(&mut self) {
        let mut h = self.prefix.clone();
        h.update(self.counter.to_le_bytes());
        self.buf = h.finalize().into();
        self.counter += 1;
        self.pos = 0;
    }
}

impl RngCore for Prg {
    fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        self.fill_bytes(&mut b);
        u32::from_le_bytes(b)
    }

    fn next_u64(&mut self) -> u64 {
        let mut b = [0u8; 8];
        self.fill_bytes(&mut b);
        u64::from_le_bytes(b)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        let mut off = 0;
        while off < dest.len() {
            if self.pos == 32 {
                self.refill();
            }
            let n = (32 - self.pos).min(dest.len() - off);
            dest[off..off + n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
            self.pos += n;
            off += n;
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

impl CryptoRng for Prg {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block_is_hash_of_seed_domain_counter() {
        let seed = [7u8; 32];
        let mut out = [0u8; 32];
        Prg::new(&seed, "ot").fill_bytes(&mut out);
        let mut h = Sha256::new();
        h.update(seed);
        h.update(2u32.to_le_bytes());
        h.update(b"ot");
        h.update(0u64.to_le_bytes());
        assert_eq!(out, <[u8; 32]>::from(h.finalize()));
    }

    #[test]
    fn chunking_does_not_change_stream() {
        let seed = [1u8; 32];
        let mut a = [0u8; 100];
        Prg::new(&seed, "x").fill_bytes(&mut a);
        let mut p = Prg::new(&seed, "x");
        let mut b = [0u8; 100];
        for chunk in b.chunks_mut(7) {
            p.fill_bytes(chunk);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn domains_separate_streams() {
        let seed = [1u8; 32];
        assert_ne!(Prg::derive_seed(&seed, "a"), Prg::derive_seed(&seed, "b"));
    }
}
