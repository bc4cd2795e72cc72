//! Desk-scale MPC-TLS notarization.

pub mod algebra;
pub mod circuits;
pub mod codec;
pub mod commit;
pub mod deap;
pub mod encoding;
pub mod error;
pub mod garble;
pub mod handshake;
pub mod harness;
pub mod mac;
pub mod notarize;
pub mod ole;
pub mod ot;
pub mod prg;
pub mod record;
pub mod transport;

pub use error::{AbortCause, ProtocolError};
