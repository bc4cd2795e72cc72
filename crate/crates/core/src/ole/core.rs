use rand::RngCore;

use crate::algebra::Field;
use crate::codec::Reader;
use crate::error::ProtocolError;
use crate::ot::{ot_receive, ot_send};
use crate::transport::Link;

/// Sender side of a batch of vector OLEs. Instance `i` has multipliers
/// `a[i]` and offsets `b[i]`; the receiver learns `a[i][j] * x_i + b[i][j]`.
///
/// Gilboa decomposition: for bit `t` of `x_i` the OT pair is
/// `(r_t, r_t + a * basis_t)` elementwise, where the `r_t` sum to `b`.
pub fn vole_batch_send<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    instances: &[(Vec<F>, Vec<F>)],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    let mut pairs = Vec::new();
    for (a, b) in instances {
        if a.len() != b.len() || a.is_empty() {
            return Err(ProtocolError::LengthMismatch(format!(
                "VOLE with {} multipliers and {} offsets",
                a.len(),
                b.len()
            )));
        }
        let k = a[0].bit_len();
        let mut running: Vec<F> = b.iter().map(|e| e.zero_like()).collect();
        for t in 0..k {
            let r: Vec<F> = if t + 1 == k {
                b.iter().zip(&running).map(|(bj, s)| bj.sub(s)).collect()
            } else {
                b.iter().map(|e| e.random_like(rng)).collect()
            };
            for (s, rj) in running.iter_mut().zip(&r) {
                *s = s.add(rj);
            }
            let basis = a[0].basis_like(t);
            let m0: Vec<u8> = r.iter().flat_map(|e| e.to_bytes()).collect();
            let m1: Vec<u8> = r
                .iter()
                .zip(a)
                .flat_map(|(rj, aj)| rj.add(&aj.mul(&basis)).to_bytes())
                .collect();
            pairs.push((m0, m1));
        }
    }
    ot_send(link, &pairs, rng)
}

/// Receiver side of [`vole_batch_send`]; `lens[i]` is the vector length of instance `i`.
pub fn vole_batch_receive<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    xs: &[F],
    lens: &[usize],
    rng: &mut R,
) -> Result<Vec<Vec<F>>, ProtocolError> {
    if xs.len() != lens.len() {
        return Err(ProtocolError::LengthMismatch("inputs vs instance lengths".into()));
    }
    let choices: Vec<bool> = xs
        .iter()
        .flat_map(|x| (0..x.bit_len()).map(move |t| x.bit(t)))
        .collect();
    let msgs = ot_receive(link, &choices, rng)?;
    let mut it = msgs.into_iter();
    let mut out = Vec::with_capacity(xs.len());
    for (x, &n) in xs.iter().zip(lens) {
        let width = x.byte_len();
        let mut acc = vec![x.zero_like(); n];
        for _ in 0..x.bit_len() {
            let m = it
                .next()
                .ok_or_else(|| ProtocolError::Malformed("missing OLE transfer".into()))?;
            if m.len() != width * n {
                return Err(ProtocolError::LengthMismatch(format!(
                    "OLE message of {} bytes, expected {}",
                    m.len(),
                    width * n
                )));
            }
            let mut r = Reader::new(&m);
            for s in acc.iter_mut() {
                *s = s.add(&x.from_bytes_like(r.fixed(width)?)?);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Batch of scalar OLEs, sender side: inputs `(a, b)` per instance.
pub fn ole_send<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    inputs: &[(F, F)],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    let inst: Vec<_> = inputs.iter().map(|(a, b)| (vec![a.clone()], vec![b.clone()])).collect();
    vole_batch_send(link, &inst, rng)
}

/// Batch of scalar OLEs, receiver side: returns `a * x + b` per instance.
pub fn ole_receive<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    xs: &[F],
    rng: &mut R,
) -> Result<Vec<F>, ProtocolError> {
    let out = vole_batch_receive(link, xs, &vec![1; xs.len()], rng)?;
    Ok(out.into_iter().map(|mut v| v.remove(0)).collect())
}

pub fn vole_send<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    a: &[F],
    b: &[F],
    rng: &mut R,
) -> Result<(), ProtocolError> {
    vole_batch_send(link, &[(a.to_vec(), b.to_vec())], rng)
}

pub fn vole_receive<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    x: &F,
    n: usize,
    rng: &mut R,
) -> Result<Vec<F>, ProtocolError> {
    Ok(vole_batch_receive(link, std::slice::from_ref(x), &[n], rng)?.remove(0))
}

/// Random OLE, sender side: returns `(r_a, r_b)`.
pub fn role_send<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    template: &F,
    rng: &mut R,
) -> Result<(F, F), ProtocolError> {
    let (a, b) = (template.random_like(rng), template.random_like(rng));
    ole_send(link, &[(a.clone(), b.clone())], rng)?;
    Ok((a, b))
}

/// Random OLE, receiver side: returns `(r_x, y)` with `r_x` nonzero.
pub fn role_receive<F: Field, R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    template: &F,
    rng: &mut R,
) -> Result<(F, F), ProtocolError> {
    let x = template.random_nonzero_like(rng);
    let y = ole_receive(link, std::slice::from_ref(&x), rng)?.remove(0);
    Ok((x, y))
}
