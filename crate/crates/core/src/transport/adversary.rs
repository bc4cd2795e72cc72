use serde::{Deserialize, Serialize};

use super::message::{Party, PartyMessage};

/// How a matched message is altered in transit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mutation {
    /// XOR `mask` into the payload byte at `offset` (taken modulo the payload
    /// length; an empty payload gains one byte).
    FlipBits {
        offset: usize,
        mask: u8,
    },
    ReplacePayload {
        #[serde(with = "hex::serde")]
        payload: Vec<u8>,
    },
    Drop,
    /// Hold the message back and deliver it after the sender's next message
    /// on the same link (or when the sender blocks or finishes).
    Reorder,
}

impl Mutation {
    pub fn kind(&self) -> &'static str {
        match self {
            Mutation::FlipBits { .. } => "flip_bits",
            Mutation::ReplacePayload { .. } => "replace_payload",
            Mutation::Drop => "drop",
            Mutation::Reorder => "reorder",
        }
    }
}

/// Matches the `index`-th message (0-based) of type `msg_type` sent by
/// `sender`, optionally restricted to one receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryRule {
    pub sender: Party,
    #[serde(default)]
    pub receiver: Option<Party>,
    pub msg_type: String,
    #[serde(default)]
    pub index: usize,
    pub mutation: Mutation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryScript {
    pub rules: Vec<AdversaryRule>,
}

impl AdversaryScript {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(rule: AdversaryRule) -> Self {
        Self { rules: vec![rule] }
    }
}

/// Log entry for one applied mutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedMutation {
    pub rule: usize,
    pub kind: String,
    pub sender: Party,
    pub receiver: Party,
    pub msg_type: String,
    pub phase: String,
    pub seq: u64,
}

pub(crate) enum Action {
    Deliver(PartyMessage),
    Drop,
    Hold(PartyMessage),
}

#[derive(Default)]
pub(crate) struct AdversaryState {
    rules: Vec<AdversaryRule>,
    seen: Vec<usize>,
    applied: Vec<bool>,
    pub(crate) log: Vec<AppliedMutation>,
}

impl AdversaryState {
    pub(crate) fn new(script: &AdversaryScript) -> Self {
        let n = script.rules.len();
        Self {
            rules: script.rules.clone(),
            seen: vec![0; n],
            applied: vec![false; n],
            log: Vec::new(),
        }
    }

    /// Runs one outgoing message through the script. Each rule fires at most once.
    pub(crate) fn intercept(&mut self, mut msg: PartyMessage) -> Action {
        let mut action: Option<Mutation> = None;
        for (i, rule) in self.rules.iter().enumerate() {
            let matches = rule.sender == msg.sender
                && rule.msg_type == msg.msg_type
                && rule.receiver.is_none_or(|r| r == msg.receiver);
            if !matches {
                continue;
            }
            let n = self.seen[i];
            self.seen[i] += 1;
            if n != rule.index || self.applied[i] || action.is_some() {
                continue;
            }
            self.applied[i] = true;
            self.log.push(AppliedMutation {
                rule: i,
                kind: rule.mutation.kind().into(),
                sender: msg.sender,
                receiver: msg.receiver,
                msg_type: msg.msg_type.clone(),
                phase: msg.phase.clone(),
                seq: msg.seq,
            });
            action = Some(rule.mutation.clone());
        }
        match action {
            None => Action::Deliver(msg),
            Some(Mutation::FlipBits { offset, mask }) => {
                if msg.payload.is_empty() {
                    msg.payload.push(mask);
                } else {
                    let at = offset % msg.payload.len();
                    msg.payload[at] ^= mask;
                }
                Action::Deliver(msg)
            }
            Some(Mutation::ReplacePayload { payload }) => {
                msg.payload = payload;
                Action::Deliver(msg)
            }
            Some(Mutation::Drop) => Action::Drop,
            Some(Mutation::Reorder) => Action::Hold(msg),
        }
    }
}
