//! Oblivious transfer: a Chou-Orlandi style base OT over the toy curve,
//! correlated OT on top of it, and a committed variant whose sender
//! randomness is replayable from an opened seed.

mod base;
mod committed;
mod cot;

pub use base::{ot_curve, ot_receive, ot_send, ReceiverRecord};
pub use committed::{parse_receiver_key_frame, CommittedOtReceiver, CommittedOtSeed, CommittedOtSender};
pub use cot::{cot_receive, cot_send};
