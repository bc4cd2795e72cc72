//! Check that an OLE receiver used only nonzero inputs.
//!
//! The verifier V is the sender of `l` base OLEs with inputs `(a_k, b_k)`;
//! the prover P received `y_k = a_k x_k + b_k`. Index 0 is an extra random
//! OLE. V then acts as sender again with `(b_k, d_k)` while P feeds
//! `x_k^-1`, receiving `y'_k = b_k x_k^-1 + d_k`. P announces
//! `s = sum(y_k x_k^-1 - y'_k)`, which equals `sum(a_k - d_k)` exactly when
//! every `x_k` is invertible. A zero input reveals `b_k` to P but leaves
//! `a_k` uniformly hidden, so a cheating P passes with probability `1/|F|`.

use rand::RngCore;

use super::core::{ole_receive, ole_send};
use crate::algebra::Field;
use crate::error::ProtocolError;
use crate::transport::Link;

pub const MSG_SUM: &str = "zc.sum";

/// Verifier side, run by the sender of the base OLEs.
pub fn zero_check_verify<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    a: &[F],
    b: &[F],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(ProtocolError::LengthMismatch("zero-check inputs".into()));
    }
    let t = &a[0];
    let (a0, b0) = (t.random_like(rng), t.random_like(rng));
    let mut inputs = vec![(a0.clone(), b0.clone())];
    let mut sum = a0;
    let bs = std::iter::once(&b0).chain(b);
    for (ak, bk) in std::iter::once(None).chain(a.iter().map(Some)).zip(bs) {
        let d = t.random_like(rng);
        if let Some(ak) = ak {
            sum = sum.add(ak);
        }
        sum = sum.sub(&d);
        inputs.push((bk.clone(), d));
    }
    ole_send(link, &inputs, rng)?;
    let s = t.from_bytes_like(&link.recv(MSG_SUM)?)?;
    if s != sum {
        return Err(ProtocolError::ZeroInputDetected);
    }
    Ok(())
}

/// Prover side, run by the receiver of the base OLEs.
///
/// A zero `x_k` has no inverse; the prover then substitutes zero, which is
/// what a cheating receiver would be left to guess with anyway.
pub fn zero_check_prove<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x: &[F],
    y: &[F],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(ProtocolError::LengthMismatch("zero-check inputs".into()));
    }
    let t = &x[0];
    let x0 = t.random_nonzero_like(rng);
    let mut xs = vec![x0.clone()];
    let all_x: Vec<F> = std::iter::once(x0).chain(x.iter().cloned()).collect();
    let inv: Vec<F> = all_x
        .iter()
        .map(|v| v.inv().unwrap_or_else(|_| v.zero_like()))
        .collect();
    xs.extend(inv.iter().cloned());
    let out = ole_receive(link, &xs, rng)?;
    let y0 = &out[0];
    let mut s = t.zero_like();
    for (k, (yk, ik)) in std::iter::once(y0).chain(y).zip(&inv).enumerate() {
        s = s.add(&yk.mul(ik)).sub(&out[k + 1]);
    }
    link.send(MSG_SUM, s.to_bytes())?;
    Ok(())
}
