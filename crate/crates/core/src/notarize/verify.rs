//! Verifier-side validation of attestations.

use serde::Serialize;

use super::merkle::verify_inclusion;
use super::{Attestation, HexVec, Range};
use crate::commit::commit_payload;
use crate::encoding::{leaf_digest, Direction, Encoder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One contiguous piece of the transcript as the verifier sees it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub direction: Direction,
    pub range: Range,
    pub redacted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plaintext: Option<HexVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub accepted: bool,
    pub checks: Vec<CheckOutcome>,
    pub segments: Vec<Segment>,
}

impl VerificationReport {
    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Transcript of one direction with `marker` in place of redacted bytes.
    pub fn render(&self, dir: Direction, marker: u8) -> Vec<u8> {
        let mut out = Vec::new();
        for s in self.segments.iter().filter(|s| s.direction == dir) {
            match &s.plaintext {
                Some(p) if !s.redacted => out.extend_from_slice(&p.0),
                _ => out.extend(std::iter::repeat_n(marker, s.range.len() as usize)),
            }
        }
        out
    }
}

fn outcome(name: impl Into<String>, result: Result<(), String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed: result.is_ok(),
        detail: result.err(),
    }
}

/// Checks, in order: header signature, encoder-seed opening, server
/// identity opening, then every disclosed range against the tree.
/// `purported`, when given, replaces the plaintext of each disclosure.
pub fn verify_attestation(
    att: &Attestation,
    notary_key: &[u8; 32],
    purported: Option<&[Vec<u8>]>,
) -> VerificationReport {
    let h = &att.header;
    let mut checks = vec![
        outcome(
            "signature",
            h.verify_signature(notary_key)
                .then_some(())
                .ok_or_else(|| "header signature invalid for the notary key".to_string()),
        ),
        outcome(
            "encoder_seed_opening",
            (commit_payload(&att.encoder_seed.seed.0, &att.encoder_seed.salt.0).digest == h.encoder_seed_commitment.0)
                .then_some(())
                .ok_or_else(|| "seed opening does not match the header commitment".to_string()),
        ),
        outcome(
            "server_identity",
            (commit_payload(&att.server_identity.blob.0, &att.server_identity.salt.0).digest
                == h.server_identity_commitment.0)
                .then_some(())
                .ok_or_else(|| "server identity does not match the header commitment".to_string()),
        ),
    ];

    let structure = att.validate().map_err(|e| e.to_string());
    let structure_ok = structure.is_ok();
    checks.push(outcome("structure", structure));

    let mut segments = Vec::new();
    if structure_ok {
        let encoder = Encoder::new(att.encoder_seed.seed.0);
        let leaves = h.metadata.leaf_count as usize;
        for (i, d) in att.disclosures.iter().enumerate() {
            let text = purported.and_then(|p| p.get(i)).unwrap_or(&d.plaintext.0);
            let res = if text.len() != d.plaintext.0.len() {
                Err(format!(
                    "purported plaintext has {} bytes, range has {}",
                    text.len(),
                    d.range.len()
                ))
            } else {
                (0..text.len())
                    .find(|&k| {
                        let pos = d.range.start + k as u64;
                        let (dir, off) = att.locate(pos);
                        let labels = encoder.encode_byte(dir, off, text[k]);
                        let leaf = leaf_digest(dir, off, &labels, &d.salts[k].0);
                        let path: Vec<[u8; 32]> = d.proofs[k].iter().map(|p| p.0).collect();
                        !verify_inclusion(&h.merkle_root.0, &leaf, pos as usize, &path, leaves)
                    })
                    .map_or(Ok(()), |k| {
                        Err(format!(
                            "byte {} is not in the commitment tree",
                            d.range.start + k as u64
                        ))
                    })
            };
            checks.push(outcome(format!("disclosure {}", d.range), res));
        }
        segments = split_segments(att, purported);
    }
    VerificationReport {
        accepted: checks.iter().all(|c| c.passed),
        checks,
        segments,
    }
}

fn split_segments(att: &Attestation, purported: Option<&[Vec<u8>]>) -> Vec<Segment> {
    let mut pieces: Vec<(Range, Option<Vec<u8>>)> = att
        .disclosures
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let text = purported.and_then(|p| p.get(i)).unwrap_or(&d.plaintext.0);
            (d.range, Some(text.clone()))
        })
        .chain(att.redactions.iter().map(|r| (*r, None)))
        .collect();
    pieces.sort_by_key(|p| p.0);
    let mut out = Vec::new();
    for (r, text) in pieces {
        // Split at the direction boundary.
        let cut = att.sent_len.clamp(r.start, r.end);
        for sub in [Range::new(r.start, cut), Range::new(cut, r.end)] {
            if sub.is_empty() {
                continue;
            }
            let a = (sub.start - r.start) as usize;
            let b = (sub.end - r.start) as usize;
            out.push(Segment {
                direction: att.locate(sub.start).0,
                range: sub,
                redacted: text.is_none(),
                plaintext: text.as_ref().map(|t| HexVec(t[a..b].to_vec())),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commit::SALT_LEN;
    use crate::notarize::merkle::pad_leaves;
    use crate::notarize::{
        Ed25519Signer, HeaderSigner, Hex, NotarizeError, SeedOpening, ServerIdentity, SessionHeader,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// Builds an attestation directly from the encoder, outside any session.
    fn attest(sent: &[u8], received: &[u8], signer: &Ed25519Signer) -> Attestation {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let seed = [5u8; 32];
        let enc = Encoder::new(seed);
        let mut salts = Vec::new();
        let mut leaves = Vec::new();
        for (dir, bytes) in [(Direction::Sent, sent), (Direction::Received, received)] {
            for (pos, b) in bytes.iter().enumerate() {
                let salt = [pos as u8 ^ dir.tag(); SALT_LEN];
                leaves.push(leaf_digest(
                    dir,
                    pos as u64,
                    &enc.encode_byte(dir, pos as u64, *b),
                    &salt,
                ));
                salts.push(salt);
            }
        }
        let leaves = pad_leaves(leaves, &mut rng);
        let (seed_salt, id_salt) = ([1; SALT_LEN], [2; SALT_LEN]);
        let id = b"server.example".to_vec();
        let header = SessionHeader::build(
            &leaves,
            commit_payload(&id, &id_salt).digest,
            commit_payload(&seed, &seed_salt).digest,
            42,
            "toy",
            signer,
        )
        .unwrap();
        Attestation::draft(
            header,
            SeedOpening {
                seed: Hex(seed),
                salt: Hex(seed_salt),
            },
            ServerIdentity {
                blob: HexVec(id),
                salt: Hex(id_salt),
            },
            sent,
            received,
            &salts,
            &leaves,
        )
        .unwrap()
    }

    fn signer() -> Ed25519Signer {
        Ed25519Signer::from_seed([7; 32])
    }

    #[test]
    fn honest_attestation_accepts() {
        let s = signer();
        let a = attest(b"GET /", b"200 OK", &s);
        let r = verify_attestation(&a, &s.verifying_key(), None);
        assert!(r.accepted, "{:?}", r.failed());
        let names: Vec<_> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names[..4],
            ["signature", "encoder_seed_opening", "server_identity", "structure"]
        );
        assert_eq!(r.render(Direction::Sent, b'*'), b"GET /");
        assert_eq!(r.render(Direction::Received, b'*'), b"200 OK");
    }

    #[test]
    fn flipped_sixth_bit_is_not_notarized() {
        let s = signer();
        let a = attest(&[0b0110_1000], &[], &s);
        assert!(verify_attestation(&a, &s.verifying_key(), None).accepted);
        let r = verify_attestation(&a, &s.verifying_key(), Some(&[vec![0b0110_1010]]));
        assert!(!r.accepted);
        assert_eq!(r.failed(), ["disclosure 0..1"]);
    }

    #[test]
    fn every_single_bit_flip_of_eight_bytes_rejects() {
        let s = signer();
        let msg = *b"notarize";
        let a = attest(&msg, &[], &s);
        for bit in 0..64 {
            let mut m = msg.to_vec();
            m[bit / 8] ^= 0x80 >> (bit % 8);
            assert!(
                !verify_attestation(&a, &s.verifying_key(), Some(&[m])).accepted,
                "bit {bit}"
            );
        }
    }

    #[test]
    fn redacted_bytes_show_as_markers() {
        let s = signer();
        let a = attest(b"0123456789abcdef", &[], &s);
        let red = a.redact(&[Range::new(4, 8)]).unwrap();
        assert_eq!(red.disclosures.len(), 2);
        let r = verify_attestation(&red, &s.verifying_key(), None);
        assert!(r.accepted);
        assert_eq!(r.render(Direction::Sent, b'#'), b"0123####89abcdef");
        assert!(!red.to_json().contains(&hex::encode(b"4567")));
    }

    #[test]
    fn redact_everything_or_nothing() {
        let s = signer();
        let a = attest(b"abc", b"defg", &s);
        let all = a.redact(&[Range::new(0, 7)]).unwrap();
        assert!(all.disclosures.is_empty());
        let r = verify_attestation(&all, &s.verifying_key(), None);
        assert!(r.accepted);
        assert_eq!(r.render(Direction::Received, b'.'), b"....");
        assert!(verify_attestation(&a.redact(&[]).unwrap(), &s.verifying_key(), None).accepted);
    }

    #[test]
    fn redaction_errors() {
        let s = signer();
        let a = attest(b"abcdefgh", &[], &s);
        assert!(matches!(
            a.redact(&[Range::new(6, 9)]),
            Err(NotarizeError::RangeOutOfBounds(..))
        ));
        assert!(matches!(
            a.redact(&[Range::new(3, 3)]),
            Err(NotarizeError::RangeOutOfBounds(..))
        ));
        assert!(matches!(
            a.redact(&[Range::new(0, 4), Range::new(3, 5)]),
            Err(NotarizeError::RangeOverlap(..))
        ));
        let once = a.redact(&[Range::new(2, 4)]).unwrap();
        assert!(matches!(
            once.redact(&[Range::new(3, 6)]),
            Err(NotarizeError::RangeOverlap(..))
        ));
        let twice = once.redact(&[Range::new(4, 6)]).unwrap();
        assert_eq!(twice.redactions, [Range::new(2, 6)]);
        assert!(verify_attestation(&twice, &s.verifying_key(), None).accepted);
    }

    #[test]
    fn wrong_key_and_wrong_openings_are_named() {
        let s = signer();
        let a = attest(b"hi", b"yo", &s);
        let other = Ed25519Signer::from_seed([8; 32]);
        assert_eq!(
            verify_attestation(&a, &other.verifying_key(), None).failed(),
            ["signature"]
        );

        let mut b = a.clone();
        b.server_identity.blob.0[0] ^= 1;
        assert_eq!(
            verify_attestation(&b, &s.verifying_key(), None).failed(),
            ["server_identity"]
        );

        let mut c = a.clone();
        c.encoder_seed.seed.0[0] ^= 1;
        let f = verify_attestation(&c, &s.verifying_key(), None);
        assert_eq!(f.failed()[0], "encoder_seed_opening");
        assert!(!f.accepted);
    }

    #[test]
    fn json_round_trip_and_load_validation() {
        let s = signer();
        let a = attest(b"abc", b"de", &s).redact(&[Range::new(1, 2)]).unwrap();
        let j = a.to_json();
        assert_eq!(Attestation::from_json(&j).unwrap(), a);
        assert!(Attestation::from_json(&j.replace("\"v\": 1", "\"v\": 2")).is_err());
        let mut gap = a.clone();
        gap.redactions.clear();
        assert!(Attestation::from_json(&gap.to_json()).is_err());
        let upper = j.replacen(
            &hex::encode(a.header.merkle_root.0),
            &hex::encode_upper(a.header.merkle_root.0),
            1,
        );
        assert!(Attestation::from_json(&upper).is_err());
    }
}
