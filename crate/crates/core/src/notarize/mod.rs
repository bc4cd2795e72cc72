//! Notarization artifacts: the Merkle tree of encoding commitments, the
//! signed session header, attestations with selective disclosure, and the
//! verifier.

mod attestation;
mod header;
mod hexser;
pub mod merkle;
mod protocol;
mod verify;

pub use attestation::{Attestation, Disclosure, Range, SeedOpening, ServerIdentity, ATTESTATION_VERSION};
pub use header::{Ed25519Signer, HeaderSigner, SessionHeader, SessionMetadata};
pub use hexser::{Hex, HexVec};
pub use merkle::{pad_leaves, verify_inclusion, MerkleTree};
pub use protocol::{
    client_await_seed_commitment, client_notarize, decode_leaves, encode_leaves, notary_commit_encoder,
    notary_notarize, ClientNotarization, MSG_HEADER, MSG_LEAVES, MSG_SEED_COM, MSG_SEED_OPEN, MSG_SERVER_ID,
};
pub use verify::{verify_attestation, CheckOutcome, VerificationReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotarizeError {
    #[error("signer failure: {0}")]
    SignerFailure(String),
    #[error("ranges {0} and {1} overlap")]
    RangeOverlap(Range, Range),
    #[error("range {0} is outside the transcript of {1} bytes")]
    RangeOutOfBounds(Range, u64),
    #[error("merkle tree needs a power-of-two leaf count, got {0}")]
    LeafCount(usize),
    #[error("invalid attestation: {0}")]
    Schema(String),
}
