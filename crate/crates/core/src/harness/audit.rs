//! Byte-pattern privacy audits over party views.

use super::session::SessionResult;
use crate::transport::{Direction, Party};

/// First phase in which the Notary opens anything to the Client.
pub const REVEAL_PHASE: &str = "notarize/reveal";

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && hay.len() >= needle.len() && hay.windows(needle.len()).any(|w| w == needle)
}

fn key_patterns(keys: (u32, u32)) -> [Vec<u8>; 2] {
    let k = u64::from(keys.0) | u64::from(keys.1) << 32;
    [k.to_le_bytes().to_vec(), k.to_be_bytes().to_vec()]
}

/// Patterns wide enough that a chance match in a session's traffic is
/// negligible (at least 8 bytes).
fn plaintext_patterns(p: &[u8]) -> Vec<Vec<u8>> {
    if p.len() < 8 {
        return Vec::new();
    }
    p.windows(8).map(<[u8]>::to_vec).collect()
}

/// Findings for the Notary's view: frames typed as plaintext, frames equal
/// to a whole plaintext record, any 8-byte window of the plaintexts, and
/// the Client's or combined key material.
pub fn notary_view_findings(r: &SessionResult, request: &[u8], response: &[u8]) -> Vec<String> {
    let mut exact: Vec<Vec<u8>> = Vec::new();
    let mut windows = Vec::new();
    // Exact matches are only meaningful for payloads of at least 8 bytes:
    // a 16-bit share collides with some 2-byte block about once per 2^16
    // frames. Shorter plaintext is covered by the typed-frame check.
    for p in [request, response] {
        if p.len() >= 8 {
            exact.push(p.to_vec());
        }
        windows.extend(plaintext_patterns(p));
    }
    let mut keys = Vec::new();
    if let (Some(c), Some(n)) = (r.secrets.client_keys, r.secrets.notary_keys) {
        keys.extend(key_patterns(c));
        keys.extend(key_patterns((c.0 ^ n.0, c.1 ^ n.1)));
    }
    if let Some(s) = r.secrets.client_pms_share.as_ref().filter(|s| s.len() >= 8) {
        keys.push(s.clone());
    }
    let mut out = Vec::new();
    for e in r.transcript.view(Party::Notary) {
        let m = &e.message;
        let at = format!("{} in {}", m.msg_type, m.phase);
        if m.msg_type.contains("plaintext") {
            out.push(format!("plaintext-typed frame {at}"));
        }
        if exact.contains(&m.payload) {
            out.push(format!("frame equal to plaintext {at}"));
        }
        if windows.iter().any(|w| contains(&m.payload, w)) {
            out.push(format!("plaintext bytes inside {at}"));
        }
        if keys.iter().any(|k| contains(&m.payload, k)) {
            out.push(format!("key material inside {at}"));
        }
    }
    out
}

/// Findings for what the Client received before the reveal phase: the
/// Notary's key shares and (when wide enough) its premaster share.
pub fn client_pre_reveal_findings(r: &SessionResult) -> Vec<String> {
    let mut pats = Vec::new();
    if let Some(n) = r.secrets.notary_keys {
        pats.extend(key_patterns(n));
    }
    if let Some(s) = r.secrets.notary_pms_share.as_ref().filter(|s| s.len() >= 8) {
        pats.push(s.clone());
    }
    let mut out = Vec::new();
    for e in r.transcript.view(Party::Client) {
        let m = &e.message;
        if m.phase.starts_with(REVEAL_PHASE) {
            break;
        }
        if e.direction == Direction::Received && pats.iter().any(|p| contains(&m.payload, p)) {
            out.push(format!("notary secret inside {} in {}", m.msg_type, m.phase));
        }
    }
    out
}
