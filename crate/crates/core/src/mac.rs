//! Two-party GHASH and the single-party references it is checked against.
//!
//! The key `H` is additively shared. One a2m turns the shares into
//! multiplicative ones, from which each party raises its share to every odd
//! power locally; an m2a per odd power brings those back to additive form.
//! Even powers need no interaction because squaring is linear in
//! characteristic 2.

use rand::RngCore;

use crate::algebra::{Field, Gf2kElement, Gf2kField};
use crate::circuits::spn;
use crate::codec::{Reader, Writer};
use crate::commit::{commit_payload, random_salt, Commitment, SALT_LEN};
use crate::error::ProtocolError;
use crate::ole::{a2m_multiplier, a2m_other, m2a_receive, m2a_send};
use crate::transport::{Link, Party};

pub const MSG_MAC_SHARE: &str = "mac.share";
pub const MSG_MAC_COM: &str = "mac.commit";
pub const MSG_MAC_OPEN: &str = "mac.open";

/// `X_1 H^n + X_2 H^(n-1) + ... + X_n H` by Horner's rule.
pub fn ghash_ref(blocks: &[Gf2kElement], h: &Gf2kElement) -> Gf2kElement {
    blocks.iter().fold(h.zero_like(), |acc, x| acc.add(x).mul(h))
}

fn gcm_blocks(bytes: &[u8]) -> impl Iterator<Item = Gf2kElement> + '_ {
    bytes.chunks(16).map(|c| {
        let mut b = [0u8; 16];
        b[..c.len()].copy_from_slice(c);
        Gf2kField::Gf128.elem(u128::from_be_bytes(b))
    })
}

/// GCM's GHASH over AAD, ciphertext and the length block.
pub fn gcm_ghash(h: &[u8; 16], aad: &[u8], ciphertext: &[u8]) -> [u8; 16] {
    let f = Gf2kField::Gf128;
    let h = f.elem(u128::from_be_bytes(*h));
    let lens = ((aad.len() as u128 * 8) << 64) | (ciphertext.len() as u128 * 8);
    let blocks: Vec<_> = gcm_blocks(aad)
        .chain(gcm_blocks(ciphertext))
        .chain(std::iter::once(f.elem(lens)))
        .collect();
    ghash_ref(&blocks, &h).bits().to_be_bytes()
}

/// Big-endian 16-bit blocks, the last one zero-padded.
pub fn bytes_to_blocks(bytes: &[u8]) -> Vec<u16> {
    bytes
        .chunks(2)
        .map(|c| u16::from(c[0]) << 8 | u16::from(c.get(1).copied().unwrap_or(0)))
        .collect()
}

pub fn blocks_to_elements(blocks: &[u16]) -> Vec<Gf2kElement> {
    blocks.iter().map(|&b| Gf2kField::Gf16.elem(u128::from(b))).collect()
}

/// GHASH subkey of the toy cipher: `Enc(k, 0)`.
pub fn toy_hash_key(key: u32) -> u16 {
    spn::encrypt_block(key, 0)
}

/// Single-party toy-GCM: CTR mode from counter 1 and tag
/// `GHASH(C; H) ^ Enc(k, J0)` over the ciphertext blocks only.
pub fn toy_gcm_seal(key: u32, nonce: u64, plaintext: &[u8]) -> (Vec<u8>, u16) {
    let mut c = Vec::with_capacity(plaintext.len());
    for (i, chunk) in plaintext.chunks(2).enumerate() {
        let ks = spn::encrypt_block(key, crate::circuits::counter_block(nonce, i as u64 + 1)).to_be_bytes();
        c.extend(chunk.iter().zip(ks).map(|(p, k)| p ^ k));
    }
    let tag = toy_tag(key, nonce, &c);
    (c, tag)
}

pub fn toy_tag(key: u32, nonce: u64, ciphertext: &[u8]) -> u16 {
    let h = Gf2kField::Gf16.elem(u128::from(toy_hash_key(key)));
    let g = ghash_ref(&blocks_to_elements(&bytes_to_blocks(ciphertext)), &h);
    g.bits() as u16 ^ spn::encrypt_block(key, crate::circuits::counter_block(nonce, 0))
}

/// Inverse of [`toy_gcm_seal`]; checks the tag first.
pub fn toy_gcm_open(key: u32, nonce: u64, ciphertext: &[u8], tag: u16) -> Result<Vec<u8>, ProtocolError> {
    if toy_tag(key, nonce, ciphertext) != tag {
        return Err(ProtocolError::MacMismatch);
    }
    Ok(toy_gcm_seal(key, nonce, ciphertext).0)
}

/// Additive shares of `H, H^2, ..., H^n`, indexed from 0.
pub fn compute_share_powers<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    h_share: &Gf2kElement,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Gf2kElement>, ProtocolError> {
    let mut out = vec![*h_share];
    if n <= 1 {
        return Ok(out.into_iter().take(n).collect());
    }
    let notary = link.me() == Party::Notary;
    let m = if notary {
        a2m_multiplier(link, h_share, rng)?
    } else {
        a2m_other(link, h_share, rng)?
    };
    for k in 2..=n {
        let share = if k % 2 == 0 {
            out[k / 2 - 1].square()
        } else {
            let mk = m.pow(k as u64);
            if notary {
                m2a_send(link, &mk, rng)?
            } else {
                m2a_receive(link, &mk, rng)?
            }
        };
        out.push(share);
    }
    Ok(out)
}

/// This party's GHASH share plus its GCTR share.
pub fn local_mac_share(blocks: &[Gf2kElement], powers: &[Gf2kElement], gctr: &Gf2kElement) -> Gf2kElement {
    let n = blocks.len();
    blocks
        .iter()
        .enumerate()
        .fold(*gctr, |acc, (i, x)| acc.add(&x.mul(&powers[n - 1 - i])))
}

fn share_frame(n: usize, v: &Gf2kElement) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(n as u32);
    w.fixed(&v.to_bytes());
    w.finish()
}

fn parse_share(buf: &[u8], n: usize, template: &Gf2kElement) -> Result<Gf2kElement, ProtocolError> {
    let mut r = Reader::new(buf);
    if r.u32()? as usize != n {
        return Err(ProtocolError::LengthMismatch("MAC block count".into()));
    }
    let v = template.from_bytes_like(r.fixed(template.byte_len())?)?;
    r.finish()?;
    Ok(v)
}

fn check_powers(blocks: &[Gf2kElement], powers: &[Gf2kElement]) -> Result<(), ProtocolError> {
    if blocks.is_empty() || powers.len() < blocks.len() {
        return Err(ProtocolError::Precondition(format!(
            "{} blocks with {} power shares",
            blocks.len(),
            powers.len()
        )));
    }
    Ok(())
}

/// Tag for outgoing data. The Notary sends its share; the Client returns the
/// full tag and the Notary returns `None`.
pub fn compute_mac_2pc(
    link: &mut Link<'_>,
    blocks: &[Gf2kElement],
    powers: &[Gf2kElement],
    gctr: &Gf2kElement,
) -> Result<Option<Gf2kElement>, ProtocolError> {
    check_powers(blocks, powers)?;
    let own = local_mac_share(blocks, powers, gctr);
    if link.me() == Party::Notary {
        link.send(MSG_MAC_SHARE, share_frame(blocks.len(), &own))?;
        Ok(None)
    } else {
        let theirs = parse_share(&link.recv(MSG_MAC_SHARE)?, blocks.len(), &own)?;
        Ok(Some(own.add(&theirs)))
    }
}

/// Checks a received tag. The Client commits to its share before seeing the
/// Notary's, so it cannot steer the sum towards `tag`.
pub fn verify_mac_2pc<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    blocks: &[Gf2kElement],
    powers: &[Gf2kElement],
    gctr: &Gf2kElement,
    tag: &Gf2kElement,
    rng: &mut R,
) -> Result<(), ProtocolError> {
    check_powers(blocks, powers)?;
    let own = local_mac_share(blocks, powers, gctr);
    let n = blocks.len();
    let total = if link.me() == Party::Client {
        let salt = random_salt(rng);
        let frame = share_frame(n, &own);
        link.send(MSG_MAC_COM, commit_payload(&frame, &salt).digest.to_vec())?;
        let theirs = parse_share(&link.recv(MSG_MAC_SHARE)?, n, &own)?;
        let mut w = Writer::new();
        w.bytes(&frame);
        w.fixed(&salt);
        link.send(MSG_MAC_OPEN, w.finish())?;
        own.add(&theirs)
    } else {
        let com: [u8; 32] = link
            .recv(MSG_MAC_COM)?
            .try_into()
            .map_err(|_| ProtocolError::Malformed("MAC commitment".into()))?;
        link.send(MSG_MAC_SHARE, share_frame(n, &own))?;
        let open = link.recv(MSG_MAC_OPEN)?;
        let mut r = Reader::new(&open);
        let frame = r.bytes()?.to_vec();
        let salt: [u8; SALT_LEN] = r.array()?;
        r.finish()?;
        if !(Commitment { digest: com }).opens_to(&frame, &salt) {
            return Err(ProtocolError::MacMismatch);
        }
        own.add(&parse_share(&frame, n, &own)?)
    };
    if total != *tag {
        return Err(ProtocolError::MacMismatch);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::run_pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn h16(s: &str) -> [u8; 16] {
        hex::decode(s).unwrap().try_into().unwrap()
    }

    #[test]
    fn ghash_trivial_cases() {
        let f = Gf2kField::Gf16;
        let x = f.elem(0x1234);
        let h = f.elem(0x0abc);
        assert_eq!(ghash_ref(&[x], &h), x.mul(&h));
        assert_eq!(ghash_ref(&[x, x, x], &f.zero()), f.zero());
        assert_eq!(ghash_ref(&[], &h), f.zero());
    }

    // E(K, 0^128) and E(K, J0) for the published AES-GCM test cases come
    // from the `aes` crate, the tags from the published vectors.
    fn aes_block(key: &[u8; 16], block: [u8; 16]) -> [u8; 16] {
        use aes::cipher::{BlockEncrypt, KeyInit};
        let c = aes::Aes128::new(key.into());
        let mut b = block.into();
        c.encrypt_block(&mut b);
        b.into()
    }

    #[test]
    fn gcm_published_vectors() {
        // (key, iv, plaintext, ciphertext, tag)
        let cases = [
            (
                "00000000000000000000000000000000",
                "000000000000000000000000",
                "",
                "",
                "58e2fccefa7e3061367f1d57a4e7455a",
            ),
            (
                "00000000000000000000000000000000",
                "000000000000000000000000",
                "00000000000000000000000000000000",
                "0388dace60b6a392f328c2b971b2fe78",
                "ab6e47d42cec13bdf53a67b21257bddf",
            ),
            (
                "feffe9928665731c6d6a8f9467308308",
                "cafebabefacedbaddecaf888",
                "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a721c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b391aafd255",
                "42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e21d514b25466931c7d8f6a5aac84aa051ba30b396a0aac973d58e091473f5985",
                "4d5c2af327cd64a62cf35abd2ba6fab4",
            ),
        ];
        for (k, iv, _p, c, tag) in cases {
            let key = h16(k);
            let h = aes_block(&key, [0u8; 16]);
            let mut j0 = [0u8; 16];
            j0[..12].copy_from_slice(&hex::decode(iv).unwrap());
            j0[15] = 1;
            let ek = aes_block(&key, j0);
            let g = gcm_ghash(&h, &[], &hex::decode(c).unwrap());
            let t: Vec<u8> = g.iter().zip(ek).map(|(a, b)| a ^ b).collect();
            assert_eq!(hex::encode(t), tag);
        }
        // The hash subkey of the all-zero key, as published.
        assert_eq!(
            hex::encode(aes_block(&[0; 16], [0; 16])),
            "66e94bd4ef8a2c3b884cfa59ca342b2e"
        );
    }

    #[test]
    fn gcm_ghash_matches_independent_implementation() {
        use ghash::universal_hash::{KeyInit, UniversalHash};
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for len in [0usize, 1, 15, 16, 17, 48, 100] {
            let h: [u8; 16] = rng.gen();
            let aad: Vec<u8> = (0..len / 3).map(|_| rng.gen()).collect();
            let ct: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let mut oracle = ghash::GHash::new(&h.into());
            oracle.update_padded(&aad);
            oracle.update_padded(&ct);
            let mut lens = [0u8; 16];
            lens[..8].copy_from_slice(&(aad.len() as u64 * 8).to_be_bytes());
            lens[8..].copy_from_slice(&(ct.len() as u64 * 8).to_be_bytes());
            oracle.update(&[lens.into()]);
            let want: [u8; 16] = oracle.finalize().into();
            assert_eq!(gcm_ghash(&h, &aad, &ct), want);
        }
    }

    #[test]
    fn toy_gcm_round_trip_and_tamper() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for len in 0..20 {
            let key: u32 = rng.gen();
            let p: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let (c, t) = toy_gcm_seal(key, 3, &p);
            assert_eq!(toy_gcm_open(key, 3, &c, t).unwrap(), p);
            if len > 0 {
                let mut bad = c.clone();
                bad[len / 2] ^= 0x40;
                assert_eq!(toy_gcm_open(key, 3, &bad, t), Err(ProtocolError::MacMismatch));
            }
        }
    }

    fn powers_2pc(h_c: Gf2kElement, h_n: Gf2kElement, n: usize, seed: u64) -> (Vec<Gf2kElement>, Vec<Gf2kElement>) {
        let (c, nn) = run_pair(
            move |l| compute_share_powers(l, &h_c, n, &mut ChaCha20Rng::seed_from_u64(seed)),
            move |l| compute_share_powers(l, &h_n, n, &mut ChaCha20Rng::seed_from_u64(seed + 1)),
        );
        (c.unwrap(), nn.unwrap())
    }

    #[test]
    fn share_powers_reconstruct() {
        let f = Gf2kField::Gf16;
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for s in 0..20 {
            let (hc, hn) = (f.random(&mut rng), f.random(&mut rng));
            if hc == hn {
                continue;
            }
            let (pc, pn) = powers_2pc(hc, hn, 5, s);
            let h = hc.add(&hn);
            for k in 1..=5 {
                assert_eq!(pc[k - 1].add(&pn[k - 1]), h.pow(k as u64));
            }
        }
        let (pc, _) = powers_2pc(f.elem(3), f.elem(9), 1, 0);
        assert_eq!(pc, vec![f.elem(3)]);
    }

    #[test]
    fn zero_key_is_rejected() {
        let f = Gf2kField::Gf16;
        let (c, n) = run_pair(
            move |l| compute_share_powers(l, &f.elem(7), 3, &mut ChaCha20Rng::seed_from_u64(1)),
            move |l| compute_share_powers(l, &f.elem(7), 3, &mut ChaCha20Rng::seed_from_u64(2)),
        );
        assert_eq!(c.unwrap_err(), ProtocolError::ZeroSum);
        assert_eq!(n.unwrap_err(), ProtocolError::ZeroSum);
    }

    #[test]
    fn mac_matches_reference_and_verifies() {
        let f = Gf2kField::Gf16;
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for s in 0..30 {
            let n = 1 + (s as usize % 8);
            let (hc, hn) = (f.random(&mut rng), f.random(&mut rng));
            if hc == hn {
                continue;
            }
            let (gc, gn) = (f.random(&mut rng), f.random(&mut rng));
            let blocks: Vec<_> = (0..n).map(|_| f.random(&mut rng)).collect();
            let (pc, pn) = powers_2pc(hc, hn, n, s);
            let (b1, b2, p1, p2) = (blocks.clone(), blocks.clone(), pc.clone(), pn.clone());
            let (c, _) = run_pair(
                move |l| compute_mac_2pc(l, &b1, &p1, &gc),
                move |l| compute_mac_2pc(l, &b2, &p2, &gn),
            );
            let want = ghash_ref(&blocks, &hc.add(&hn)).add(&gc.add(&gn));
            assert_eq!(c.unwrap(), Some(want));

            for (tag, ok) in [(want, true), (want.add(&f.one()), false)] {
                let (b1, b2, p1, p2) = (blocks.clone(), blocks.clone(), pc.clone(), pn.clone());
                let (c, nn) = run_pair(
                    move |l| verify_mac_2pc(l, &b1, &p1, &gc, &tag, &mut ChaCha20Rng::seed_from_u64(1)),
                    move |l| verify_mac_2pc(l, &b2, &p2, &gn, &tag, &mut ChaCha20Rng::seed_from_u64(2)),
                );
                assert_eq!(c.is_ok(), ok);
                assert_eq!(nn.is_ok(), ok);
            }
        }
    }
}
