use num_bigint::BigUint;
use num_traits::Zero;

use super::AlgebraError;

/// u-coordinate 9, little-endian.
pub const X25519_BASEPOINT: [u8; 32] = {
    let mut b = [0u8; 32];
    b[0] = 9;
    b
};

fn prime() -> BigUint {
    (BigUint::from(1u32) << 255u32) - BigUint::from(19u32)
}

/// The X25519 function: clamped scalar times a Montgomery u-coordinate,
/// evaluated with the constant-step ladder (not constant-time here).
pub fn x25519_derive(sk: &[u8; 32], pk: &[u8; 32]) -> Result<[u8; 32], AlgebraError> {
    let p = prime();
    let mut k = *sk;
    k[0] &= 248;
    k[31] &= 127;
    k[31] |= 64;
    let k = BigUint::from_bytes_le(&k);

    let mut u = *pk;
    u[31] &= 127;
    let x1 = BigUint::from_bytes_le(&u) % &p;

    let a24 = BigUint::from(121665u32);
    let sub = |a: &BigUint, b: &BigUint| ((a + &p) - b) % &p;

    let (mut x2, mut z2) = (BigUint::from(1u32), BigUint::zero());
    let (mut x3, mut z3) = (x1.clone(), BigUint::from(1u32));
    let mut swap = false;
    for t in (0..255u64).rev() {
        let bit = k.bit(t);
        if swap ^ bit {
            std::mem::swap(&mut x2, &mut x3);
            std::mem::swap(&mut z2, &mut z3);
        }
        swap = bit;

        let a = (&x2 + &z2) % &p;
        let aa = &a * &a % &p;
        let b = sub(&x2, &z2);
        let bb = &b * &b % &p;
        let e = sub(&aa, &bb);
        let c = (&x3 + &z3) % &p;
        let d = sub(&x3, &z3);
        let da = d * &a % &p;
        let cb = c * &b % &p;
        let s = (&da + &cb) % &p;
        x3 = &s * &s % &p;
        let dif = sub(&da, &cb);
        z3 = &x1 * (&dif * &dif % &p) % &p;
        x2 = &aa * &bb % &p;
        z2 = &e * ((&aa + &a24 * &e) % &p) % &p;
    }
    if swap {
        std::mem::swap(&mut x2, &mut x3);
        std::mem::swap(&mut z2, &mut z3);
    }
    let zinv = z2.modpow(&(&p - BigUint::from(2u32)), &p);
    let out = x2 * zinv % &p;
    let mut bytes = [0u8; 32];
    let le = out.to_bytes_le();
    bytes[..le.len()].copy_from_slice(&le);
    if bytes == [0u8; 32] {
        return Err(AlgebraError::LowOrderPoint);
    }
    Ok(bytes)
}

/// Public key for a secret scalar.
pub fn x25519_base(sk: &[u8; 32]) -> [u8; 32] {
    x25519_derive(sk, &X25519_BASEPOINT).expect("base point has full order")
}
