use rand::RngCore;

use crate::commit::{commit_payload, random_salt, Commitment, SALT_LEN};
use crate::error::ProtocolError;
use crate::prg::Prg;
use crate::transport::{FaultKind, Link};

use super::base::{ot_curve, ot_receive_recorded, ot_send, parse_receiver_keys, sender_ciphertexts, ReceiverRecord};

/// The sender's seed `rho` with its salted commitment.
#[derive(Clone, Debug)]
pub struct CommittedOtSeed {
    pub rho: [u8; 32],
    pub salt: [u8; SALT_LEN],
    pub commitment: Commitment,
}

impl CommittedOtSeed {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut rho = [0u8; 32];
        rng.fill_bytes(&mut rho);
        Self::from_parts(rho, random_salt(rng))
    }

    pub fn from_parts(rho: [u8; 32], salt: [u8; SALT_LEN]) -> Self {
        Self {
            commitment: commit_payload(&rho, &salt),
            rho,
            salt,
        }
    }
}

fn batch_rng(rho: &[u8; 32], batch: u64) -> Prg {
    Prg::new(rho, &format!("ot-batch/{batch}"))
}

/// Sender side: every batch draws its randomness from `PRG(rho)` on a fixed
/// per-batch schedule.
pub struct CommittedOtSender {
    seed: CommittedOtSeed,
    next_batch: u64,
}

impl CommittedOtSender {
    pub fn new(seed: CommittedOtSeed) -> Self {
        Self { seed, next_batch: 0 }
    }

    pub fn seed(&self) -> &CommittedOtSeed {
        &self.seed
    }

    pub fn send_batch(&mut self, link: &mut Link<'_>, pairs: &[(Vec<u8>, Vec<u8>)]) -> Result<(), ProtocolError> {
        let batch = self.next_batch;
        self.next_batch += 1;
        if link.fault_active(FaultKind::OtOffSchedule) {
            let stray = Prg::derive_seed(&self.seed.rho, "off-schedule");
            return ot_send(link, pairs, &mut batch_rng(&stray, batch));
        }
        ot_send(link, pairs, &mut batch_rng(&self.seed.rho, batch))
    }
}

/// Receiver side: keeps every batch transcript for replay once `rho` opens.
#[derive(Default)]
pub struct CommittedOtReceiver {
    commitment: Option<Commitment>,
    log: Vec<ReceiverRecord>,
}

impl CommittedOtReceiver {
    pub fn new(commitment: Commitment) -> Self {
        Self {
            commitment: Some(commitment),
            log: Vec::new(),
        }
    }

    pub fn batches(&self) -> usize {
        self.log.len()
    }

    pub fn receive_batch<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        choices: &[bool],
        rng: &mut R,
    ) -> Result<Vec<Vec<u8>>, ProtocolError> {
        let (out, rec) = ot_receive_recorded(link, choices, rng)?;
        self.log.push(rec);
        Ok(out)
    }

    /// Checks the opening of `rho`, then recomputes every batch the sender
    /// should have produced for `expected` message pairs and compares it
    /// byte for byte with what was received.
    pub fn replay(
        &self,
        rho: &[u8; 32],
        salt: &[u8; SALT_LEN],
        expected: &[Vec<(Vec<u8>, Vec<u8>)>],
    ) -> Result<(), ProtocolError> {
        let com = self
            .commitment
            .ok_or_else(|| ProtocolError::Precondition("no seed commitment received".into()))?;
        if !com.opens_to(rho, salt) {
            return Err(ProtocolError::OtReplayMismatch);
        }
        if expected.len() != self.log.len() {
            return Err(ProtocolError::OtReplayMismatch);
        }
        let curve = ot_curve();
        for (i, (rec, pairs)) in self.log.iter().zip(expected).enumerate() {
            let mut rng = batch_rng(rho, i as u64);
            let a = curve.random_scalar(&mut rng);
            let big_a = curve.generator().mul(&a);
            if big_a.encode() != rec.sender_key || rec.receiver_keys.len() != pairs.len() {
                return Err(ProtocolError::OtReplayMismatch);
            }
            if sender_ciphertexts(&a, &big_a, &rec.receiver_keys, pairs) != rec.ciphertexts {
                return Err(ProtocolError::OtReplayMismatch);
            }
        }
        Ok(())
    }
}

// Keeps the parser reachable for fuzzing the receiver-key frame.
#[doc(hidden)]
pub fn parse_receiver_key_frame(buf: &[u8], expected: usize) -> Result<usize, ProtocolError> {
    parse_receiver_keys(&ot_curve(), buf, expected).map(|k| k.len())
}
