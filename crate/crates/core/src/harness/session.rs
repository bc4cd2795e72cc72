//! Full three-party sessions.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::config::SessionConfig;
use super::server::{
    mock_server, ServerOutcome, MSG_CLIENT_KEY, MSG_CLOSE, MSG_REQUEST, MSG_RESPONSE, MSG_SERVER_HELLO,
};
use crate::algebra::Field;
use crate::error::ProtocolError;
use crate::handshake::{client_handshake, notary_handshake};
use crate::notarize::{
    client_await_seed_commitment, client_notarize, notary_commit_encoder, notary_notarize, Attestation, HeaderSigner,
};
use crate::record::{ClientRecordLayer, EncryptedRecord, NotaryRecordLayer};
use crate::transport::{AdversaryScript, Endpoint, HubConfig, Party, PartyFault, Transcript};

/// A party stopped: where, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbortReport {
    pub party: Party,
    pub phase: String,
    #[serde(serialize_with = "display")]
    pub error: ProtocolError,
}

fn display<S: serde::Serializer>(e: &ProtocolError, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

impl AbortReport {
    /// Aborts that merely follow from a peer stopping.
    pub fn is_secondary(&self) -> bool {
        matches!(
            self.error,
            ProtocolError::Channel(crate::transport::ChannelError::Closed { .. })
        )
    }
}

/// Per-party secrets kept for audits; never part of any message.
#[derive(Clone, Debug, Default)]
pub struct SessionSecrets {
    pub client_keys: Option<(u32, u32)>,
    pub notary_keys: Option<(u32, u32)>,
    pub client_pms_share: Option<Vec<u8>>,
    pub notary_pms_share: Option<Vec<u8>>,
}

#[derive(Debug)]
pub struct SessionResult {
    /// The attestation after the configured redactions.
    pub attestation: Option<Attestation>,
    pub transcript: Transcript,
    pub aborts: Vec<AbortReport>,
    pub notary_key: [u8; 32],
    pub server: Option<ServerOutcome>,
    pub secrets: SessionSecrets,
    pub handshake_attempts: usize,
}

impl SessionResult {
    pub fn succeeded(&self) -> bool {
        self.aborts.is_empty() && self.attestation.is_some()
    }

    /// The abort that caused the others, preferring explicit checks over
    /// closed channels.
    pub fn primary_abort(&self) -> Option<&AbortReport> {
        self.aborts.iter().find(|a| !a.is_secondary()).or(self.aborts.first())
    }
}

struct ClientOut {
    attestation: Attestation,
    keys: (u32, u32),
    pms_share: Vec<u8>,
    attempts: usize,
}

struct NotaryOut {
    keys: (u32, u32),
    pms_share: Vec<u8>,
}

fn run_client(ep: &mut Endpoint, cfg: &SessionConfig, notary_key: [u8; 32]) -> Result<ClientOut, ProtocolError> {
    let curve = cfg.curve().map_err(|e| ProtocolError::Precondition(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seeds.client);
    let seed_com = client_await_seed_commitment(&mut ep.link(Party::Notary))?;

    let server_pk = {
        let mut s = ep.link(Party::Server);
        s.set_phase("tls/hello");
        curve.decode_point(&s.recv(MSG_SERVER_HELLO)?)?
    };
    let hs = client_handshake(&mut ep.link(Party::Notary), &curve, &server_pk, &mut rng)?;
    {
        let mut s = ep.link(Party::Server);
        s.set_phase("tls/hello");
        s.send(MSG_CLIENT_KEY, hs.session_pk.encode())?;
    }

    let mut rl = ClientRecordLayer::setup(&mut ep.link(Party::Notary), &hs.pms_share, &mut rng)?;
    let request = rl.encrypt(&mut ep.link(Party::Notary), &cfg.request.0, &mut rng)?;
    let response = {
        let mut s = ep.link(Party::Server);
        s.set_phase("tls/request");
        s.send(MSG_REQUEST, request.encode())?;
        s.set_phase("tls/response");
        EncryptedRecord::decode(&s.recv(MSG_RESPONSE)?)?
    };
    rl.verify_response_mac(&mut ep.link(Party::Notary), &response, &mut rng)?;
    rl.decrypt_response(&mut ep.link(Party::Notary), &mut rng)?;
    {
        let mut s = ep.link(Party::Server);
        s.set_phase("tls/close");
        s.send(MSG_CLOSE, Vec::new())?;
    }

    let mut identity = cfg.server_name.as_bytes().to_vec();
    identity.push(0);
    identity.extend(server_pk.encode());
    let n = client_notarize(
        &mut ep.link(Party::Notary),
        &mut rl,
        &seed_com,
        &identity,
        &notary_key,
        true,
        &mut rng,
    )?;
    let attestation = n
        .attestation
        .redact(&cfg.redactions)
        .map_err(|e| ProtocolError::Precondition(e.to_string()))?;
    Ok(ClientOut {
        attestation,
        keys: rl.key_shares(),
        pms_share: hs.pms_share.to_bytes(),
        attempts: hs.attempts,
    })
}

fn run_notary(ep: &mut Endpoint, cfg: &SessionConfig, signer: &dyn HeaderSigner) -> Result<NotaryOut, ProtocolError> {
    let curve = cfg.curve().map_err(|e| ProtocolError::Precondition(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seeds.notary);
    let mut link = ep.link(Party::Client);
    let (encoder, seed_salt) = notary_commit_encoder(&mut link, &mut rng)?;
    let hs = notary_handshake(&mut link, &curve, None, &mut rng)?;
    let mut rl = NotaryRecordLayer::setup(&mut link, &hs.pms_share, encoder, &mut rng)?;
    rl.encrypt(&mut link, &mut rng)?;
    rl.decrypt(&mut link, &mut rng)?;
    // The only request/response pair is done, so the connection is closed.
    notary_notarize(&mut link, &mut rl, &seed_salt, signer, cfg.time, &cfg.profile, true)?;
    Ok(NotaryOut {
        keys: rl.key_shares(),
        pms_share: hs.pms_share.to_bytes(),
    })
}

fn reported<T>(ep: &mut Endpoint, r: Result<T, ProtocolError>) -> Result<T, AbortReport> {
    r.map_err(|error| AbortReport {
        party: ep.party(),
        phase: ep.phase().to_owned(),
        error,
    })
}

/// Runs a session with scripted message mutations and party faults.
pub fn inject_adversary(cfg: &SessionConfig, script: AdversaryScript, faults: Vec<PartyFault>) -> SessionResult {
    let signer = cfg.notary_signer();
    let notary_key = signer.verifying_key();
    let hub = HubConfig {
        session: cfg.seeds.client,
        scheduler: cfg.scheduler,
        script,
        faults,
    };
    let curve = cfg.curve();
    let (c, n, s, transcript) = crate::transport::run_three(
        &hub,
        |ep: &mut Endpoint| {
            let r = run_client(ep, cfg, notary_key);
            reported(ep, r)
        },
        |ep: &mut Endpoint| {
            let r = run_notary(ep, cfg, &signer);
            reported(ep, r)
        },
        |ep: &mut Endpoint| {
            let r = match &curve {
                Ok(curve) => mock_server(ep, curve, &cfg.response.0, cfg.seeds.server),
                Err(e) => Err(ProtocolError::Precondition(e.to_string())),
            };
            reported(ep, r)
        },
    );
    let mut aborts = Vec::new();
    let mut secrets = SessionSecrets::default();
    let mut attestation = None;
    let mut handshake_attempts = 0;
    match c {
        Ok(o) => {
            secrets.client_keys = Some(o.keys);
            secrets.client_pms_share = Some(o.pms_share);
            handshake_attempts = o.attempts;
            attestation = Some(o.attestation);
        }
        Err(a) => aborts.push(a),
    }
    match n {
        Ok(o) => {
            secrets.notary_keys = Some(o.keys);
            secrets.notary_pms_share = Some(o.pms_share);
        }
        Err(a) => aborts.push(a),
    }
    let server = s.map_err(|a| aborts.push(a)).ok();
    if !aborts.is_empty() {
        attestation = None;
    }
    SessionResult {
        attestation,
        transcript,
        aborts,
        notary_key,
        server,
        secrets,
        handshake_attempts,
    }
}

/// Runs an honest session.
pub fn run_session(cfg: &SessionConfig) -> SessionResult {
    inject_adversary(cfg, AdversaryScript::none(), Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notarize::verify_attestation;

    #[test]
    fn default_session_verifies_and_is_deterministic() {
        let cfg = SessionConfig::default();
        let a = run_session(&cfg);
        assert!(a.succeeded(), "{:?}", a.aborts);
        let att = a.attestation.as_ref().unwrap();
        let report = verify_attestation(att, &a.notary_key, None);
        assert!(report.accepted, "{:?}", report.failed());
        let server = a.server.as_ref().unwrap();
        assert_eq!(server.request, cfg.request.0);
        let b = run_session(&cfg);
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(att.to_json(), b.attestation.unwrap().to_json());
    }
}
