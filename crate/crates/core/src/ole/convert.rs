//! Conversions between multiplicative and additive two-party sharings.

use rand::RngCore;

use super::core::{ole_receive, ole_send};
use super::zero_check::{zero_check_prove, zero_check_verify};
use crate::algebra::Field;
use crate::error::ProtocolError;
use crate::transport::{FaultKind, Link};

pub const MSG_MASKED: &str = "a2m.masked";
pub const MSG_STATUS: &str = "a2m.status";

fn receiver_input<F: Field>(link: &Link<'_>, x: &F) -> F {
    if link.fault_active(FaultKind::ZeroOleInput) {
        x.zero_like()
    } else {
        x.clone()
    }
}

/// Multiplicative-to-additive, OLE sender side. Returns `z_s` such that
/// `z_s + z_r = x_s * x_r`.
pub fn m2a_send<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x_own: &F,
    rng: &mut R,
) -> Result<F, ProtocolError> {
    let z = x_own.random_like(rng);
    let (a, b) = (x_own.clone(), z.neg());
    ole_send(link, &[(a.clone(), b.clone())], rng)?;
    zero_check_verify(link, &[a], &[b], rng)?;
    Ok(z)
}

/// Multiplicative-to-additive, OLE receiver side.
pub fn m2a_receive<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x_own: &F,
    rng: &mut R,
) -> Result<F, ProtocolError> {
    let x = receiver_input(link, x_own);
    let y = ole_receive(link, std::slice::from_ref(&x), rng)?.remove(0);
    zero_check_prove(link, &[x], std::slice::from_ref(&y), rng)?;
    Ok(y)
}

/// Additive-to-multiplicative, multiplier side. The multiplier keeps
/// `r^-1` for a fresh nonzero `r` and reveals `(x_M + x_O) r` to the other
/// party under a one-time additive mask it cannot remove.
///
/// Fails with [`ProtocolError::ZeroSum`] when the shared value is zero.
pub fn a2m_multiplier<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x_own: &F,
    rng: &mut R,
) -> Result<F, ProtocolError> {
    let r = x_own.random_nonzero_like(rng);
    let input = receiver_input(link, &r);
    let u = ole_receive(link, std::slice::from_ref(&input), rng)?.remove(0);
    zero_check_prove(link, &[input], std::slice::from_ref(&u), rng)?;
    link.send(MSG_MASKED, u.add(&x_own.mul(&r)).to_bytes())?;
    match link.recv(MSG_STATUS)?.as_slice() {
        [1] => Ok(r.inv()?),
        [0] => Err(ProtocolError::ZeroSum),
        _ => Err(ProtocolError::Malformed("a2m status".into())),
    }
}

/// Additive-to-multiplicative, other side.
pub fn a2m_other<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x_own: &F,
    rng: &mut R,
) -> Result<F, ProtocolError> {
    let gamma = x_own.random_like(rng);
    let (a, b) = (x_own.clone(), gamma.neg());
    ole_send(link, &[(a.clone(), b.clone())], rng)?;
    zero_check_verify(link, &[a], &[b], rng)?;
    let w = x_own.from_bytes_like(&link.recv(MSG_MASKED)?)?;
    let z = w.add(&gamma);
    if z.is_zero() {
        link.send(MSG_STATUS, vec![0])?;
        return Err(ProtocolError::ZeroSum);
    }
    link.send(MSG_STATUS, vec![1])?;
    Ok(z)
}
