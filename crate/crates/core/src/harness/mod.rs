//! Session orchestration: configuration, the mock server, full three-party
//! runs with adversary injection, the abort catalog, and privacy audits.

pub mod audit;
pub mod catalog;
mod config;
mod server;
mod session;
pub mod vectors;

pub use config::{ConfigError, Seeds, SessionConfig, PROFILE};
pub use server::{mock_server, ServerOutcome, MSG_CLIENT_KEY, MSG_CLOSE, MSG_REQUEST, MSG_RESPONSE, MSG_SERVER_HELLO};
pub use session::{inject_adversary, run_session, AbortReport, SessionResult, SessionSecrets};
