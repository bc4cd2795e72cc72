use serde::{Deserialize, Serialize};

use crate::codec::{CodecError, Reader, Writer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Client,
    Notary,
    Server,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::Client, Party::Notary, Party::Server];

    pub fn name(self) -> &'static str {
        match self {
            Party::Client => "client",
            Party::Notary => "notary",
            Party::Server => "server",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Party::Client => 0,
            Party::Notary => 1,
            Party::Server => 2,
        }
    }

    fn from_tag(t: u8) -> Result<Self, CodecError> {
        match t {
            0 => Ok(Party::Client),
            1 => Ok(Party::Notary),
            2 => Ok(Party::Server),
            _ => Err(CodecError::Invalid(format!("party tag {t}"))),
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const FRAME_MAGIC: &[u8; 4] = b"DNF1";

/// A framed protocol message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyMessage {
    pub session: u64,
    pub sender: Party,
    pub receiver: Party,
    pub phase: String,
    pub msg_type: String,
    #[serde(with = "hex::serde")]
    pub payload: Vec<u8>,
    /// Strictly increasing per sender within a session.
    pub seq: u64,
}

impl PartyMessage {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.fixed(FRAME_MAGIC)
            .u64(self.session)
            .u8(self.sender.tag())
            .u8(self.receiver.tag())
            .u64(self.seq)
            .str(&self.phase)
            .str(&self.msg_type)
            .bytes(&self.payload);
        w.finish()
    }

    pub fn decode(buf: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(buf);
        if r.fixed(4)? != FRAME_MAGIC {
            return Err(CodecError::Invalid("bad frame magic".into()));
        }
        let session = r.u64()?;
        let sender = Party::from_tag(r.u8()?)?;
        let receiver = Party::from_tag(r.u8()?)?;
        let seq = r.u64()?;
        let phase = r.str()?.to_string();
        let msg_type = r.str()?.to_string();
        let payload = r.bytes()?.to_vec();
        r.finish()?;
        Ok(Self {
            session,
            sender,
            receiver,
            phase,
            msg_type,
            payload,
            seq,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip() {
        let m = PartyMessage {
            session: 9,
            sender: Party::Notary,
            receiver: Party::Client,
            phase: "deap.setup".into(),
            msg_type: "com_rho".into(),
            payload: vec![1, 2, 3],
            seq: 4,
        };
        assert_eq!(PartyMessage::decode(&m.encode()).unwrap(), m);
    }

    #[test]
    fn unknown_party_tag_rejected() {
        let mut buf = PartyMessage {
            session: 0,
            sender: Party::Client,
            receiver: Party::Server,
            phase: String::new(),
            msg_type: String::new(),
            payload: vec![],
            seq: 0,
        }
        .encode();
        buf[12] = 9;
        assert!(PartyMessage::decode(&buf).is_err());
    }
}
