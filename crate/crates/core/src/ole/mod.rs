//! Oblivious linear evaluation and the share conversions built on it.

mod convert;
mod core;
mod zero_check;

pub use convert::{a2m_multiplier, a2m_other, m2a_receive, m2a_send, MSG_MASKED, MSG_STATUS};
pub use core::{
    ole_receive, ole_send, role_receive, role_send, vole_batch_receive, vole_batch_send, vole_receive, vole_send,
};
pub use zero_check::{zero_check_prove, zero_check_verify, MSG_SUM};
