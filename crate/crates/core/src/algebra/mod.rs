//! Finite-field and elliptic-curve arithmetic.
//!
//! Everything here is variable-time. The parameter sets are small enough to be
//! enumerated in tests (the toy curve) or standard (P-256, GF(2^128) with the
//! GCM polynomial), but none of this code is hardened against side channels.

mod curve;
mod field;
mod gf2k;
mod prime;
mod x25519;

pub use curve::{ec_scalar_mul, Curve, CurveParams, CurvePoint};
pub use field::Field;
pub use gf2k::{gf2k_mul, Gf2kElement, Gf2kField};
pub use prime::{fe_inv, FieldElement, PrimeField};
pub use x25519::{x25519_base, x25519_derive, X25519_BASEPOINT};

/// Errors raised by field and curve arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("point is not on curve {0}")]
    OffCurvePoint(String),
    #[error("x25519 produced the all-zero output (low-order point)")]
    LowOrderPoint,
    #[error("malformed encoding: {0}")]
    Encoding(String),
}
