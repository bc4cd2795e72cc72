//! Software reference for the toy block cipher and the key-derivation stub.
//!
//! The cipher is a 16-bit-block, 32-bit-key substitution-permutation network:
//! four rounds of (XOR round key, 4-bit S-box on each nibble, rotate left by
//! 3), followed by whitening with round key 4. Round key `i` is key bits
//! `[16i mod 32, 16i mod 32 + 16)`.

/// The PRESENT S-box.
pub const SBOX: [u8; 16] = [
    0xc, 0x5, 0x6, 0xb, 0x9, 0x0, 0xa, 0xd, 0x3, 0xe, 0xf, 0x8, 0x4, 0x7, 0x1, 0x2,
];
pub const ROUNDS: usize = 4;
pub const ROTATE: u32 = 3;

pub fn round_key(key: u32, i: usize) -> u16 {
    (key >> (16 * (i % 2))) as u16
}

fn substitute(x: u16) -> u16 {
    (0..4).fold(0u16, |acc, n| {
        let nib = (x >> (4 * n)) & 0xf;
        acc | (u16::from(SBOX[nib as usize]) << (4 * n))
    })
}

pub fn encrypt_block(key: u32, block: u16) -> u16 {
    let mut s = block;
    for r in 0..ROUNDS {
        s ^= round_key(key, r);
        s = substitute(s);
        s = s.rotate_left(ROTATE);
    }
    s ^ round_key(key, ROUNDS)
}

/// XOR of the 32-bit limbs of a big-endian integer.
pub fn fold_to_u32(be: &[u8]) -> u32 {
    be.rchunks(4).fold(0u32, |acc, chunk| {
        let mut limb = [0u8; 4];
        limb[4 - chunk.len()..].copy_from_slice(chunk);
        acc ^ u32::from_be_bytes(limb)
    })
}

/// Session keys from a pre-master secret: `(client_write, server_write)`.
pub fn derive_keys(pms_be: &[u8]) -> (u32, u32) {
    let w = fold_to_u32(pms_be);
    let half = |a: u16, b: u16| (u32::from(encrypt_block(w, a)) << 16) | u32::from(encrypt_block(w, b));
    (half(1, 2), half(3, 4))
}
