use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::Curve;
use crate::notarize::{Ed25519Signer, HexVec, Range};
use crate::transport::Scheduler;

/// The only cipher profile: toy SPN block cipher in a 16-bit GCM mode.
pub const PROFILE: &str = "toy-spn-gcm16";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown curve {0:?}")]
    Curve(String),
    #[error("unsupported cipher profile {0:?}")]
    Profile(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub client: u64,
    pub notary: u64,
    pub server: u64,
    /// Seeds the Notary's long-term signing key.
    pub notary_key: u64,
}

impl Seeds {
    /// Per-party seeds for session `n`; the signing key seed stays fixed.
    pub fn from_session(n: u64) -> Self {
        Self {
            client: n.wrapping_mul(3),
            notary: n.wrapping_mul(3).wrapping_add(1),
            server: n.wrapping_mul(3).wrapping_add(2),
            notary_key: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub curve: String,
    #[serde(default = "default_profile")]
    pub profile: String,
    pub request: HexVec,
    pub response: HexVec,
    #[serde(default = "default_identity")]
    pub server_name: String,
    /// Header timestamp; sessions use no wall-clock time.
    #[serde(default)]
    pub time: u64,
    pub seeds: Seeds,
    #[serde(default)]
    pub redactions: Vec<Range>,
    #[serde(default)]
    pub scheduler: Scheduler,
}

fn default_profile() -> String {
    PROFILE.into()
}

fn default_identity() -> String {
    "server.test".into()
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            curve: "toy".into(),
            profile: default_profile(),
            request: HexVec(b"GET /balance HTTP/1.1\r\n\r\n".to_vec()),
            response: HexVec(b"HTTP/1.1 200 OK\r\n\r\nbalance=1024".to_vec()),
            server_name: default_identity(),
            time: 1_700_000_000,
            seeds: Seeds::from_session(0),
            redactions: Vec::new(),
            scheduler: Scheduler::default(),
        }
    }
}

impl SessionConfig {
    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(s)?;
        c.curve()?;
        if c.profile != PROFILE {
            return Err(ConfigError::Profile(c.profile));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn curve(&self) -> Result<Curve, ConfigError> {
        Curve::by_name(&self.curve).ok_or_else(|| ConfigError::Curve(self.curve.clone()))
    }

    pub fn with_session_seed(mut self, n: u64) -> Self {
        let key = self.seeds.notary_key;
        self.seeds = Seeds::from_session(n);
        self.seeds.notary_key = key;
        self
    }

    pub fn notary_signer(&self) -> Ed25519Signer {
        let mut h = Sha256::new();
        h.update(b"desk-notary/signing-key");
        h.update(self.seeds.notary_key.to_le_bytes());
        Ed25519Signer::from_seed(h.finalize().into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notarize::HeaderSigner;

    #[test]
    fn json_round_trip_and_validation() {
        let c = SessionConfig::default();
        assert_eq!(SessionConfig::from_json(&c.to_json()).unwrap(), c);
        let bad = c.to_json().replace("\"toy\"", "\"ed448\"");
        assert!(matches!(SessionConfig::from_json(&bad), Err(ConfigError::Curve(_))));
        let bad = c.to_json().replace(PROFILE, "aes-gcm");
        assert!(matches!(SessionConfig::from_json(&bad), Err(ConfigError::Profile(_))));
        let minimal = r#"{"curve":"p256","request":"00","response":"","seeds":{"client":1,"notary":2,"server":3,"notary_key":4}}"#;
        let m = SessionConfig::from_json(minimal).unwrap();
        assert_eq!(m.profile, PROFILE);
        assert!(m.response.0.is_empty());
    }

    #[test]
    fn signer_depends_only_on_key_seed() {
        let a = SessionConfig::default();
        let b = a.clone().with_session_seed(9);
        assert_ne!(a.seeds.client, b.seeds.client);
        assert_eq!(a.notary_signer().verifying_key(), b.notary_signer().verifying_key());
    }
}
