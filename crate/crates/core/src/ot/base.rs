use num_bigint::BigUint;
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::algebra::{Curve, CurvePoint};
use crate::codec::{Reader, Writer};
use crate::error::ProtocolError;
use crate::transport::Link;

pub(crate) const MSG_SENDER_KEY: &str = "ot.sender_key";
pub(crate) const MSG_RECEIVER_KEYS: &str = "ot.receiver_keys";
pub(crate) const MSG_CIPHERTEXTS: &str = "ot.ciphertexts";
const TAG_LEN: usize = 16;

/// Curve used for every base OT.
pub fn ot_curve() -> Curve {
    Curve::toy()
}

fn transfer_key(index: usize, shared: &CurvePoint) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"desk-ot-key");
    h.update((index as u64).to_le_bytes());
    h.update(shared.encode());
    h.finalize().into()
}

fn keystream_xor(key: &[u8; 32], data: &mut [u8]) {
    for (i, chunk) in data.chunks_mut(32).enumerate() {
        let mut h = Sha256::new();
        h.update(key);
        h.update(b"enc");
        h.update((i as u32).to_le_bytes());
        let pad = h.finalize();
        for (d, p) in chunk.iter_mut().zip(pad) {
            *d ^= p;
        }
    }
}

fn tag(key: &[u8; 32], ct: &[u8]) -> [u8; TAG_LEN] {
    let mut h = Sha256::new();
    h.update(key);
    h.update(b"tag");
    h.update(ct);
    h.finalize()[..TAG_LEN].try_into().expect("tag width")
}

/// Encrypt-then-MAC under a SHA-256 keystream.
pub(crate) fn seal(key: &[u8; 32], msg: &[u8]) -> Vec<u8> {
    let mut ct = msg.to_vec();
    keystream_xor(key, &mut ct);
    let t = tag(key, &ct);
    ct.extend_from_slice(&t);
    ct
}

pub(crate) fn open(key: &[u8; 32], sealed: &[u8]) -> Result<Vec<u8>, ProtocolError> {
    if sealed.len() < TAG_LEN {
        return Err(ProtocolError::DecryptionFailure);
    }
    let (ct, t) = sealed.split_at(sealed.len() - TAG_LEN);
    if tag(key, ct)[..] != *t {
        return Err(ProtocolError::DecryptionFailure);
    }
    let mut pt = ct.to_vec();
    keystream_xor(key, &mut pt);
    Ok(pt)
}

fn decode_nonidentity(curve: &Curve, bytes: &[u8]) -> Result<CurvePoint, ProtocolError> {
    let p = curve.decode_point(bytes)?;
    if p.is_identity() {
        return Err(ProtocolError::Malformed("identity point in OT".into()));
    }
    Ok(p)
}

/// Sender-side computation of the ciphertext frame, shared with replay.
pub(crate) fn sender_ciphertexts(
    a: &BigUint,
    big_a: &CurvePoint,
    receiver_keys: &[CurvePoint],
    pairs: &[(Vec<u8>, Vec<u8>)],
) -> Vec<u8> {
    // a(B - A) = aB - aA
    let a_a = big_a.mul(a);
    let mut w = Writer::new();
    w.u32(pairs.len() as u32);
    for (j, (bk, (m0, m1))) in receiver_keys.iter().zip(pairs).enumerate() {
        let shared = bk.mul(a);
        let k0 = transfer_key(j, &shared);
        let k1 = transfer_key(j, &shared.sub(&a_a));
        w.bytes(&seal(&k0, m0)).bytes(&seal(&k1, m1));
    }
    w.finish()
}

pub(crate) fn parse_receiver_keys(
    curve: &Curve,
    buf: &[u8],
    expected: usize,
) -> Result<Vec<CurvePoint>, ProtocolError> {
    let mut r = Reader::new(buf);
    let n = r.u32()? as usize;
    if n != expected {
        return Err(ProtocolError::LengthMismatch(format!(
            "{n} receiver keys for {expected} transfers"
        )));
    }
    let keys = (0..n)
        .map(|_| decode_nonidentity(curve, r.bytes()?))
        .collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    Ok(keys)
}

/// OT sender for a batch of transfers; all randomness comes from `rng`
/// (one scalar per batch).
pub fn ot_send<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    pairs: &[(Vec<u8>, Vec<u8>)],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    if let Some((m0, m1)) = pairs.iter().find(|(m0, m1)| m0.len() != m1.len()) {
        return Err(ProtocolError::LengthMismatch(format!(
            "OT messages of {} and {} bytes",
            m0.len(),
            m1.len()
        )));
    }
    let curve = ot_curve();
    let a = curve.random_scalar(rng);
    let big_a = curve.generator().mul(&a);
    link.send(MSG_SENDER_KEY, big_a.encode())?;
    let keys = parse_receiver_keys(&curve, &link.recv(MSG_RECEIVER_KEYS)?, pairs.len())?;
    link.send(MSG_CIPHERTEXTS, sender_ciphertexts(&a, &big_a, &keys, pairs))?;
    Ok(())
}

/// Everything the receiver saw in one batch, kept for later replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverRecord {
    pub sender_key: Vec<u8>,
    pub receiver_keys: Vec<CurvePoint>,
    pub ciphertexts: Vec<u8>,
}

/// OT receiver: learns `m_{b_j}` for every choice bit.
pub fn ot_receive<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    choices: &[bool],
    rng: &mut R,
) -> Result<Vec<Vec<u8>>, ProtocolError> {
    ot_receive_recorded(link, choices, rng).map(|(m, _)| m)
}

pub(crate) fn ot_receive_recorded<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    choices: &[bool],
    rng: &mut R,
) -> Result<(Vec<Vec<u8>>, ReceiverRecord), ProtocolError> {
    let curve = ot_curve();
    let sender_key = link.recv(MSG_SENDER_KEY)?;
    let big_a = decode_nonidentity(&curve, &sender_key)?;
    let g = curve.generator();
    let mut scalars = Vec::with_capacity(choices.len());
    let mut keys = Vec::with_capacity(choices.len());
    let mut w = Writer::new();
    w.u32(choices.len() as u32);
    for &c in choices {
        // The sender rejects an identity key, which `c = 1` produces when
        // `b = -a`; redraw instead of aborting.
        let (b, key) = loop {
            let b = curve.random_scalar(rng);
            let bg = g.mul(&b);
            let key = if c { big_a.add(&bg) } else { bg };
            if !key.is_identity() {
                break (b, key);
            }
        };
        w.bytes(&key.encode());
        scalars.push(b);
        keys.push(key);
    }
    link.send(MSG_RECEIVER_KEYS, w.finish())?;
    let ciphertexts = link.recv(MSG_CIPHERTEXTS)?;
    let mut r = Reader::new(&ciphertexts);
    let n = r.u32()? as usize;
    if n != choices.len() {
        return Err(ProtocolError::LengthMismatch(format!(
            "{n} ciphertext pairs for {} choices",
            choices.len()
        )));
    }
    let mut out = Vec::with_capacity(n);
    for (j, (&c, b)) in choices.iter().zip(&scalars).enumerate() {
        let c0 = r.bytes()?;
        let c1 = r.bytes()?;
        let k = transfer_key(j, &big_a.mul(b));
        out.push(open(&k, if c { c1 } else { c0 })?);
    }
    r.finish()?;
    Ok((
        out,
        ReceiverRecord {
            sender_key,
            receiver_keys: keys,
            ciphertexts,
        },
    ))
}
