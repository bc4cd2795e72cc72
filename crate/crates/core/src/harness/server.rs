//! The mock TLS server: plain single-party ECDH and the single-party cipher.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::algebra::{Curve, Field};
use crate::circuits::spn;
use crate::encoding::Direction;
use crate::error::ProtocolError;
use crate::handshake::server_premaster;
use crate::mac::{toy_gcm_open, toy_gcm_seal};
use crate::record::{EncryptedRecord, RECORD_NONCE};
use crate::transport::{Endpoint, Party};

pub const MSG_SERVER_HELLO: &str = "tls.server_key";
pub const MSG_CLIENT_KEY: &str = "tls.client_key";
pub const MSG_REQUEST: &str = "tls.request";
pub const MSG_RESPONSE: &str = "tls.response";
pub const MSG_CLOSE: &str = "tls.close";

#[derive(Clone, Debug)]
pub struct ServerOutcome {
    pub premaster: Vec<u8>,
    pub request: Vec<u8>,
    pub public_key: Vec<u8>,
}

/// Serves one request with `response`. Rejects requests whose tag fails.
pub fn mock_server(
    ep: &mut Endpoint,
    curve: &Curve,
    response: &[u8],
    seed: u64,
) -> Result<ServerOutcome, ProtocolError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut link = ep.link(Party::Client);
    link.set_phase("tls/hello");
    let sk = curve.random_scalar(&mut rng);
    let pk = curve.generator().mul(&sk);
    link.send(MSG_SERVER_HELLO, pk.encode())?;
    let client_pk = curve.decode_point(&link.recv(MSG_CLIENT_KEY)?)?;
    let pms = server_premaster(&sk, &client_pk)?.to_bytes();
    let (cw, sw) = spn::derive_keys(&pms);

    link.set_phase("tls/request");
    let req = EncryptedRecord::decode(&link.recv(MSG_REQUEST)?)?;
    let request = match req.tag {
        Some(t) => toy_gcm_open(cw, RECORD_NONCE, &req.ciphertext, t)?,
        None if req.ciphertext.is_empty() => Vec::new(),
        None => return Err(ProtocolError::MacMismatch),
    };

    link.set_phase("tls/response");
    let (ciphertext, tag) = toy_gcm_seal(sw, RECORD_NONCE, response);
    let rec = EncryptedRecord {
        direction: Direction::Received,
        seq: 0,
        tag: (!ciphertext.is_empty()).then_some(tag),
        ciphertext,
    };
    link.send(MSG_RESPONSE, rec.encode())?;
    link.set_phase("tls/close");
    link.recv(MSG_CLOSE)?;
    Ok(ServerOutcome {
        premaster: pms,
        request,
        public_key: pk.encode(),
    })
}
