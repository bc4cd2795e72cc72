//! The portable attestation document and redaction.
//!
//! Byte positions are global over the transcript `sent || received`. Each
//! position has one leaf in the commitment tree at the same index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::merkle::{Digest32, MerkleTree};
use super::{Hex, HexVec, NotarizeError, SessionHeader};
use crate::commit::SALT_LEN;
use crate::encoding::Direction;

pub const ATTESTATION_VERSION: u32 = 1;

/// Half-open byte range `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: u64,
    pub end: u64,
}

impl Range {
    pub fn new(start: u64, end: u64) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> u64 {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn overlaps(&self, o: &Range) -> bool {
        self.start < o.end && o.start < self.end
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let p = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Range::new(p(a)?, p(b)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedOpening {
    pub seed: Hex<32>,
    pub salt: Hex<SALT_LEN>,
}

/// Opaque server identity blob and the salt of its commitment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerIdentity {
    pub blob: HexVec,
    pub salt: Hex<SALT_LEN>,
}

/// A disclosed range with one salt and one inclusion path per byte.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disclosure {
    pub range: Range,
    pub plaintext: HexVec,
    pub salts: Vec<Hex<SALT_LEN>>,
    pub proofs: Vec<Vec<Hex<32>>>,
}

impl Disclosure {
    fn slice(&self, r: Range) -> Disclosure {
        let a = (r.start - self.range.start) as usize;
        let b = (r.end - self.range.start) as usize;
        Disclosure {
            range: r,
            plaintext: HexVec(self.plaintext.0[a..b].to_vec()),
            salts: self.salts[a..b].to_vec(),
            proofs: self.proofs[a..b].to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attestation {
    pub v: u32,
    pub header: SessionHeader,
    pub encoder_seed: SeedOpening,
    pub server_identity: ServerIdentity,
    pub sent_len: u64,
    pub received_len: u64,
    pub disclosures: Vec<Disclosure>,
    pub redactions: Vec<Range>,
}

impl Attestation {
    /// Full-disclosure attestation. `leaves` is the padded tree the header
    /// was built over; `salts` has one entry per transcript byte.
    #[allow(clippy::too_many_arguments)]
    pub fn draft(
        header: SessionHeader,
        encoder_seed: SeedOpening,
        server_identity: ServerIdentity,
        sent: &[u8],
        received: &[u8],
        salts: &[[u8; SALT_LEN]],
        leaves: &[Digest32],
    ) -> Result<Self, NotarizeError> {
        let total = sent.len() + received.len();
        if salts.len() != total {
            return Err(NotarizeError::Schema("one salt per transcript byte".into()));
        }
        let tree = MerkleTree::new(leaves)?;
        let mut disclosures = Vec::new();
        if total > 0 {
            disclosures.push(Disclosure {
                range: Range::new(0, total as u64),
                plaintext: HexVec([sent, received].concat()),
                salts: salts.iter().map(|s| Hex(*s)).collect(),
                proofs: (0..total)
                    .map(|i| tree.proof(i).into_iter().map(Hex).collect())
                    .collect(),
            });
        }
        let a = Self {
            v: ATTESTATION_VERSION,
            header,
            encoder_seed,
            server_identity,
            sent_len: sent.len() as u64,
            received_len: received.len() as u64,
            disclosures,
            redactions: Vec::new(),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn total_len(&self) -> u64 {
        self.sent_len + self.received_len
    }

    /// Direction and in-direction offset of a global position.
    pub fn locate(&self, pos: u64) -> (Direction, u64) {
        if pos < self.sent_len {
            (Direction::Sent, pos)
        } else {
            (Direction::Received, pos - self.sent_len)
        }
    }

    /// Structural checks applied on load: version, widths, and that
    /// disclosures and redactions partition the transcript.
    pub fn validate(&self) -> Result<(), NotarizeError> {
        let bad = |m: String| Err(NotarizeError::Schema(m));
        if self.v != ATTESTATION_VERSION {
            return bad(format!("unsupported version {}", self.v));
        }
        let leaves = u64::from(self.header.metadata.leaf_count);
        if !leaves.is_power_of_two() {
            return bad(format!("leaf count {leaves} is not a power of two"));
        }
        let total = self
            .sent_len
            .checked_add(self.received_len)
            .ok_or_else(|| NotarizeError::Schema("length overflow".into()))?;
        if total > leaves {
            return bad(format!("{total} transcript bytes exceed {leaves} leaves"));
        }
        let depth = leaves.trailing_zeros() as usize;
        let mut ranges = Vec::new();
        for d in &self.disclosures {
            let n = d.range.len() as usize;
            if d.range.is_empty() || d.plaintext.0.len() != n || d.salts.len() != n || d.proofs.len() != n {
                return bad(format!("disclosure {} has inconsistent widths", d.range));
            }
            if d.proofs.iter().any(|p| p.len() != depth) {
                return bad(format!("disclosure {} has proofs of the wrong depth", d.range));
            }
            ranges.push(d.range);
        }
        for r in &self.redactions {
            if r.is_empty() {
                return bad(format!("empty redaction {r}"));
            }
            ranges.push(*r);
        }
        ranges.sort();
        let mut at = 0;
        for r in ranges {
            if r.start != at {
                return bad(format!("ranges do not partition the transcript at {at}"));
            }
            at = r.end;
        }
        if at != total {
            return bad(format!("ranges end at {at}, transcript has {total} bytes"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("attestation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, NotarizeError> {
        let a: Self = serde_json::from_str(s).map_err(|e| NotarizeError::Schema(e.to_string()))?;
        a.validate()?;
        Ok(a)
    }

    /// Removes plaintext, salts and proofs for `ranges`. Ranges must be
    /// non-empty, in bounds, and disjoint from each other and from earlier
    /// redactions.
    pub fn redact(&self, ranges: &[Range]) -> Result<Self, NotarizeError> {
        let total = self.total_len();
        for r in ranges {
            if r.is_empty() || r.end > total {
                return Err(NotarizeError::RangeOutOfBounds(*r, total));
            }
        }
        let mut all: Vec<Range> = ranges.to_vec();
        all.extend(&self.redactions);
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.overlaps(b) {
                    return Err(NotarizeError::RangeOverlap(*a, *b));
                }
            }
        }
        let mut disclosures = Vec::new();
        for d in &self.disclosures {
            let mut cuts: Vec<&Range> = ranges.iter().filter(|r| r.overlaps(&d.range)).collect();
            cuts.sort();
            let mut at = d.range.start;
            for c in cuts {
                if c.start > at {
                    disclosures.push(d.slice(Range::new(at, c.start)));
                }
                at = at.max(c.end);
            }
            if at < d.range.end {
                disclosures.push(d.slice(Range::new(at, d.range.end)));
            }
        }
        all.sort();
        let mut redactions: Vec<Range> = Vec::new();
        for r in all {
            match redactions.last_mut() {
                Some(last) if last.end == r.start => last.end = r.end,
                _ => redactions.push(r),
            }
        }
        let a = Self {
            disclosures,
            redactions,
            ..self.clone()
        };
        a.validate()?;
        Ok(a)
    }
}
