use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::circuits::CircuitError;
use crate::codec::CodecError;
use crate::garble::GarbleError;
use crate::transport::ChannelError;

/// Why a party aborted a dual-execution instance.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortCause {
    #[error("output labels do not match the committed encoding")]
    CommitmentMismatch,
    #[error("received output labels are not authentic")]
    InauthenticLabels,
    #[error("committed OT replay mismatch")]
    OtReplayMismatch,
    #[error("re-garbled circuit differs")]
    RegarbleMismatch,
    #[error("equality check values differ")]
    CheckMismatch,
    #[error("commitment opening does not verify")]
    CommitmentOpenFailure,
    #[error("peer uses a different circuit")]
    CircuitMismatch,
    #[error("opened input labels differ from the derived encoding")]
    InputLabelMismatch,
    #[error("garbled evaluation failed")]
    EvaluationFailure,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Garble(#[from] GarbleError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("OT ciphertext failed authentication")]
    DecryptionFailure,
    #[error("committed OT replay does not match the received transcript")]
    OtReplayMismatch,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("zero input detected in share conversion")]
    ZeroInputDetected,
    #[error("additive shares sum to zero")]
    ZeroSum,
    #[error("client and notary points share an x-coordinate")]
    PointCollision,
    #[error("client and notary points share a y-coordinate")]
    ZeroSlope,
    #[error("notary aborted: {0}")]
    NotaryAbort(AbortCause),
    #[error("client aborted: {0}")]
    ClientAbort(AbortCause),
    #[error("the two handshake runs disagree")]
    EqualityCheckFailed,
    #[error("MAC mismatch")]
    MacMismatch,
    #[error("plaintext consistency proof rejected")]
    ConsistencyRejected,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed message: {0}")]
    Malformed(String),
}
