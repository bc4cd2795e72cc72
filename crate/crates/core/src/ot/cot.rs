use rand::RngCore;

use crate::error::ProtocolError;
use crate::transport::Link;

use super::base::{ot_receive, ot_send};

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Correlated OT sender: returns one random `r_j` per transfer; the receiver
/// learns `r_j` or `r_j ^ delta`.
pub fn cot_send<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    delta: &[u8],
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<u8>>, ProtocolError> {
    if delta.is_empty() {
        return Err(ProtocolError::Precondition("empty COT offset".into()));
    }
    let rs: Vec<Vec<u8>> = (0..count)
        .map(|_| {
            let mut r = vec![0u8; delta.len()];
            rng.fill_bytes(&mut r);
            r
        })
        .collect();
    let pairs: Vec<_> = rs.iter().map(|r| (r.clone(), xor(r, delta))).collect();
    ot_send(link, &pairs, rng)?;
    Ok(rs)
}

pub fn cot_receive<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    choices: &[bool],
    rng: &mut R,
) -> Result<Vec<Vec<u8>>, ProtocolError> {
    ot_receive(link, choices, rng)
}
