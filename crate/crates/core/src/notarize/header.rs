//! The Notary-signed session header.

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use serde::{Deserialize, Serialize};

use super::merkle::{Digest32, MerkleTree};
use super::{Hex, NotarizeError};
use crate::codec::Writer;

const DOMAIN: &str = "desk-notary/session-header/v1";

/// Anything that can sign canonical header bytes.
pub trait HeaderSigner {
    fn sign(&self, msg: &[u8]) -> Result<[u8; 64], NotarizeError>;
    fn verifying_key(&self) -> [u8; 32];
}

/// Ed25519 signer; deterministic for a fixed seed.
pub struct Ed25519Signer(SigningKey);

impl Ed25519Signer {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self(SigningKey::from_bytes(&seed))
    }
}

impl HeaderSigner for Ed25519Signer {
    fn sign(&self, msg: &[u8]) -> Result<[u8; 64], NotarizeError> {
        self.0
            .try_sign(msg)
            .map(|s| s.to_bytes())
            .map_err(|e| NotarizeError::SignerFailure(e.to_string()))
    }

    fn verifying_key(&self) -> [u8; 32] {
        self.0.verifying_key().to_bytes()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionMetadata {
    /// Seconds since the epoch, taken from the session configuration.
    pub time: u64,
    pub profile: String,
    /// Padded leaf count of the commitment tree.
    pub leaf_count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionHeader {
    pub merkle_root: Hex<32>,
    pub server_identity_commitment: Hex<32>,
    pub encoder_seed_commitment: Hex<32>,
    pub metadata: SessionMetadata,
    pub signature: Hex<64>,
}

impl SessionHeader {
    /// Builds and signs a header over already padded leaves.
    pub fn build(
        leaves: &[Digest32],
        server_identity_commitment: Digest32,
        encoder_seed_commitment: Digest32,
        time: u64,
        profile: &str,
        signer: &dyn HeaderSigner,
    ) -> Result<Self, NotarizeError> {
        let tree = MerkleTree::new(leaves)?;
        let mut h = Self {
            merkle_root: Hex(tree.root()),
            server_identity_commitment: Hex(server_identity_commitment),
            encoder_seed_commitment: Hex(encoder_seed_commitment),
            metadata: SessionMetadata {
                time,
                profile: profile.to_owned(),
                leaf_count: leaves.len() as u32,
            },
            signature: Hex([0; 64]),
        };
        h.signature = Hex(signer.sign(&h.canonical_bytes())?);
        Ok(h)
    }

    /// Signed bytes: every field except the signature, fixed order,
    /// little-endian length prefixes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(DOMAIN)
            .fixed(&self.merkle_root.0)
            .fixed(&self.server_identity_commitment.0)
            .fixed(&self.encoder_seed_commitment.0)
            .u64(self.metadata.time)
            .str(&self.metadata.profile)
            .u32(self.metadata.leaf_count);
        w.finish()
    }

    pub fn verify_signature(&self, key: &[u8; 32]) -> bool {
        let Ok(vk) = VerifyingKey::from_bytes(key) else {
            return false;
        };
        vk.verify_strict(&self.canonical_bytes(), &Signature::from_bytes(&self.signature.0))
            .is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(leaves: &[Digest32], signer: &Ed25519Signer) -> SessionHeader {
        SessionHeader::build(leaves, [1; 32], [2; 32], 1_700_000_000, "toy", signer).unwrap()
    }

    #[test]
    fn signature_verifies_and_binds_every_field() {
        let s = Ed25519Signer::from_seed([9; 32]);
        let h = header(&[[0; 32], [1; 32]], &s);
        assert!(h.verify_signature(&s.verifying_key()));
        assert_eq!(h.canonical_bytes(), header(&[[0; 32], [1; 32]], &s).canonical_bytes());

        let other = Ed25519Signer::from_seed([8; 32]);
        assert!(!h.verify_signature(&other.verifying_key()));

        let mut t = h.clone();
        t.metadata.time += 1;
        assert!(!t.verify_signature(&s.verifying_key()));
        let mut t = h.clone();
        t.metadata.profile = "p256".into();
        assert!(!t.verify_signature(&s.verifying_key()));
    }

    #[test]
    fn changed_leaf_invalidates_old_signature() {
        let s = Ed25519Signer::from_seed([9; 32]);
        let h = header(&[[0; 32], [1; 32]], &s);
        let h2 = header(&[[0; 32], [3; 32]], &s);
        assert_ne!(h.merkle_root, h2.merkle_root);
        let mut forged = h2.clone();
        forged.signature = h.signature;
        assert!(!forged.verify_signature(&s.verifying_key()));
    }

    #[test]
    fn canonical_layout() {
        let s = Ed25519Signer::from_seed([9; 32]);
        let b = header(&[[0; 32]], &s).canonical_bytes();
        assert_eq!(&b[..4], &(DOMAIN.len() as u32).to_le_bytes());
        assert_eq!(b.len(), 4 + DOMAIN.len() + 96 + 8 + 4 + 3 + 4);
        assert_eq!(&b[b.len() - 4..], &1u32.to_le_bytes());
    }
}
