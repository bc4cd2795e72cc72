//! Salted hash commitments: `SHA-256(payload || salt)` with a 16-byte salt.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SALT_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Commitment {
    #[serde(with = "hex::serde")]
    pub digest: [u8; 32],
}

pub fn commit_payload(payload: &[u8], salt: &[u8; SALT_LEN]) -> Commitment {
    let mut h = Sha256::new();
    h.update(payload);
    h.update(salt);
    Commitment {
        digest: h.finalize().into(),
    }
}

pub fn random_salt<R: RngCore + ?Sized>(rng: &mut R) -> [u8; SALT_LEN] {
    let mut s = [0u8; SALT_LEN];
    rng.fill_bytes(&mut s);
    s
}

impl Commitment {
    pub fn opens_to(&self, payload: &[u8], salt: &[u8; SALT_LEN]) -> bool {
        commit_payload(payload, salt) == *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn deterministic_and_salt_sensitive() {
        let salt = [3u8; SALT_LEN];
        assert_eq!(commit_payload(b"x", &salt), commit_payload(b"x", &salt));
        assert!(!commit_payload(b"x", &salt).opens_to(b"x", &[4u8; SALT_LEN]));
    }

    #[test]
    fn single_bit_changes_never_collide() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let mut p: Vec<u8> = (0..rng.gen_range(1..64)).map(|_| rng.gen()).collect();
            let salt = random_salt(&mut rng);
            let c = commit_payload(&p, &salt);
            let i = rng.gen_range(0..p.len());
            p[i] ^= 1 << rng.gen_range(0..8);
            assert_ne!(commit_payload(&p, &salt), c);
        }
    }
}
