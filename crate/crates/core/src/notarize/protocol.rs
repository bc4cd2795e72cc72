//! Message flow that turns a finished record layer into a signed header.
//!
//! The Client commits to its encodings before the encoder seed is opened,
//! since the seed lets anyone derive every label.

use rand::RngCore;

use super::merkle::{pad_leaves, Digest32, MerkleTree};
use super::{Attestation, HeaderSigner, Hex, HexVec, SeedOpening, ServerIdentity, SessionHeader};
use crate::codec::{Reader, Writer};
use crate::commit::{commit_payload, random_salt, SALT_LEN};
use crate::encoding::{leaf_digest, Direction, Encoder};
use crate::error::{AbortCause, ProtocolError};
use crate::record::{ClientRecordLayer, NotaryRecordLayer};
use crate::transport::Link;

pub const MSG_SEED_COM: &str = "nz.seed_com";
pub const MSG_LEAVES: &str = "nz.leaves";
pub const MSG_SERVER_ID: &str = "nz.server_id";
pub const MSG_SEED_OPEN: &str = "nz.seed_open";
pub const MSG_HEADER: &str = "nz.header";

/// Notary: draws the encoder seed and sends its commitment.
pub fn notary_commit_encoder<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    rng: &mut R,
) -> Result<(Encoder, [u8; SALT_LEN]), ProtocolError> {
    link.set_phase("notarize/setup");
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let salt = random_salt(rng);
    link.send(MSG_SEED_COM, commit_payload(&seed, &salt).digest.to_vec())?;
    Ok((Encoder::new(seed), salt))
}

pub fn client_await_seed_commitment(link: &mut Link<'_>) -> Result<Digest32, ProtocolError> {
    link.set_phase("notarize/setup");
    let b = link.recv(MSG_SEED_COM)?;
    b.as_slice()
        .try_into()
        .map_err(|_| ProtocolError::Malformed("seed commitment width".into()))
}

pub fn encode_leaves(leaves: &[Digest32]) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(leaves.len() as u32);
    for l in leaves {
        w.fixed(l);
    }
    w.finish()
}

pub fn decode_leaves(buf: &[u8]) -> Result<Vec<Digest32>, ProtocolError> {
    let mut r = Reader::new(buf);
    let n = r.u32()? as usize;
    if n.checked_mul(32) != Some(r.remaining()) {
        return Err(ProtocolError::Malformed("leaf frame length".into()));
    }
    let leaves = (0..n).map(|_| r.array()).collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    Ok(leaves)
}

pub struct ClientNotarization {
    pub attestation: Attestation,
}

/// Client: commit, check the seed opening, run every deferred check, and
/// assemble the full-disclosure attestation.
pub fn client_notarize<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    rl: &mut ClientRecordLayer,
    seed_commitment: &Digest32,
    server_identity: &[u8],
    notary_key: &[u8; 32],
    tls_closed: bool,
    rng: &mut R,
) -> Result<ClientNotarization, ProtocolError> {
    link.set_phase("notarize/commit");
    let mut salts = Vec::new();
    let mut leaves = Vec::new();
    for dir in [Direction::Sent, Direction::Received] {
        for (pos, labels) in rl.labels(dir).iter().enumerate() {
            let salt = random_salt(rng);
            leaves.push(leaf_digest(dir, pos as u64, labels, &salt));
            salts.push(salt);
        }
    }
    let leaves = pad_leaves(leaves, rng);
    let root = MerkleTree::new(&leaves).expect("padded").root();
    link.send(MSG_LEAVES, encode_leaves(&leaves))?;
    let id_salt = random_salt(rng);
    let id_com = commit_payload(server_identity, &id_salt).digest;
    link.send(MSG_SERVER_ID, id_com.to_vec())?;

    link.set_phase("notarize/reveal");
    let open = link.recv(MSG_SEED_OPEN)?;
    let mut r = Reader::new(&open);
    let seed: [u8; 32] = r.array()?;
    let seed_salt: [u8; SALT_LEN] = r.array()?;
    r.finish()?;
    if commit_payload(&seed, &seed_salt).digest != *seed_commitment {
        return Err(ProtocolError::ClientAbort(AbortCause::CommitmentOpenFailure));
    }
    let encoder = Encoder::new(seed);
    rl.finalize(link, &encoder, tls_closed, rng)?;

    link.set_phase("notarize/sign");
    let header: SessionHeader = serde_json::from_slice(&link.recv(MSG_HEADER)?)
        .map_err(|e| ProtocolError::Malformed(format!("header: {e}")))?;
    if !header.verify_signature(notary_key)
        || header.merkle_root.0 != root
        || header.server_identity_commitment.0 != id_com
        || header.encoder_seed_commitment.0 != *seed_commitment
        || header.metadata.leaf_count as usize != leaves.len()
    {
        return Err(ProtocolError::Malformed(
            "session header does not match the commitments".into(),
        ));
    }
    let attestation = Attestation::draft(
        header,
        SeedOpening {
            seed: Hex(seed),
            salt: Hex(seed_salt),
        },
        ServerIdentity {
            blob: HexVec(server_identity.to_vec()),
            salt: Hex(id_salt),
        },
        rl.plaintext(Direction::Sent),
        rl.plaintext(Direction::Received),
        &salts,
        &leaves,
    )
    .map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    Ok(ClientNotarization { attestation })
}

/// Notary: accept the commitments, open the seed, run every deferred
/// check, then sign.
#[allow(clippy::too_many_arguments)]
pub fn notary_notarize(
    link: &mut Link<'_>,
    rl: &mut NotaryRecordLayer,
    seed_salt: &[u8; SALT_LEN],
    signer: &dyn HeaderSigner,
    time: u64,
    profile: &str,
    tls_closed: bool,
) -> Result<SessionHeader, ProtocolError> {
    link.set_phase("notarize/commit");
    let leaves = decode_leaves(&link.recv(MSG_LEAVES)?)?;
    let bytes = rl.ciphertext(Direction::Sent).len() + rl.ciphertext(Direction::Received).len();
    if !leaves.len().is_power_of_two() || leaves.len() < bytes {
        return Err(ProtocolError::Malformed(format!(
            "{} leaves for {bytes} bytes",
            leaves.len()
        )));
    }
    let id_com: Digest32 = link
        .recv(MSG_SERVER_ID)?
        .as_slice()
        .try_into()
        .map_err(|_| ProtocolError::Malformed("server identity commitment width".into()))?;

    link.set_phase("notarize/reveal");
    let mut w = Writer::new();
    w.fixed(rl.encoder().seed()).fixed(seed_salt);
    link.send(MSG_SEED_OPEN, w.finish())?;
    rl.finalize(link, tls_closed)?;

    link.set_phase("notarize/sign");
    let seed_com = commit_payload(rl.encoder().seed(), seed_salt).digest;
    let header = SessionHeader::build(&leaves, id_com, seed_com, time, profile, signer)
        .map_err(|e| ProtocolError::Precondition(e.to_string()))?;
    link.send(MSG_HEADER, serde_json::to_vec(&header).expect("header serializes"))?;
    Ok(header)
}
