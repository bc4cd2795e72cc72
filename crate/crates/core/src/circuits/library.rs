use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::builder::{Bit, Builder};
use super::spn;
use super::{parse_circuit, to_bits, BooleanCircuit};

pub const MULTIPLIER_SOURCE: &str = include_str!("../../circuits/multiplier.circ");

/// A circuit plus the metadata protocols need to use it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitBundle {
    pub name: String,
    pub circuit: BooleanCircuit,
    /// Input groups `[0, client_groups)` belong to the Client, the rest to the Notary.
    pub client_groups: usize,
    /// Named internal wires.
    pub taps: BTreeMap<String, Vec<usize>>,
    pub description: String,
}

impl CircuitBundle {
    fn new(
        name: &str,
        circuit: BooleanCircuit,
        client_groups: usize,
        taps: BTreeMap<String, Vec<usize>>,
        description: &str,
    ) -> Self {
        assert!(client_groups <= circuit.groups().len());
        Self {
            name: name.to_string(),
            circuit,
            client_groups,
            taps,
            description: description.to_string(),
        }
    }
}

pub fn build_multiplier_circuit() -> CircuitBundle {
    let c = parse_circuit(MULTIPLIER_SOURCE).expect("shipped multiplier parses");
    CircuitBundle::new(
        "multiplier2x2",
        c,
        1,
        BTreeMap::new(),
        "a:2 (client) x b:2 (notary) -> product:4",
    )
}

/// ANF coefficients of each S-box output bit, indexed by monomial mask.
fn sbox_anf() -> [[bool; 16]; 4] {
    let mut anf = [[false; 16]; 4];
    for (bit, coeffs) in anf.iter_mut().enumerate() {
        for (x, c) in coeffs.iter_mut().enumerate() {
            *c = spn::SBOX[x] >> bit & 1 == 1;
        }
        // Moebius transform
        for i in 0..4 {
            for m in 0..16 {
                if m & (1 << i) != 0 {
                    coeffs[m] ^= coeffs[m ^ (1 << i)];
                }
            }
        }
    }
    anf
}

fn sbox_gate(b: &mut Builder, anf: &[[bool; 16]; 4], x: &[Bit]) -> Vec<Bit> {
    let mut mono: [Option<Bit>; 16] = [None; 16];
    mono[0] = Some(Bit::Const(true));
    for (i, &xi) in x.iter().enumerate() {
        mono[1 << i] = Some(xi);
    }
    fn get(b: &mut Builder, mono: &mut [Option<Bit>; 16], m: usize) -> Bit {
        if let Some(v) = mono[m] {
            return v;
        }
        let high = 1 << (usize::BITS - 1 - m.leading_zeros());
        let rest = get(b, mono, m ^ high);
        let v = b.and(rest, mono[high].expect("single-variable monomial"));
        mono[m] = Some(v);
        v
    }
    (0..4)
        .map(|bit| {
            let mut acc = Bit::Const(false);
            for (m, &on) in anf[bit].iter().enumerate() {
                if on {
                    let v = get(b, &mut mono, m);
                    acc = b.xor(acc, v);
                }
            }
            acc
        })
        .collect()
}

/// Builder-level toy cipher over 32 key bits and 16 block bits.
pub(crate) fn enc_bits(b: &mut Builder, key: &[Bit], block: &[Bit]) -> Vec<Bit> {
    assert_eq!((key.len(), block.len()), (32, 16));
    let anf = sbox_anf();
    let rk = |i: usize| {
        let off = (16 * i) % 32;
        key[off..off + 16].to_vec()
    };
    let mut s = block.to_vec();
    for r in 0..spn::ROUNDS {
        s = b.xor_vec(&s, &rk(r));
        let mut sub = Vec::with_capacity(16);
        for nib in s.chunks(4) {
            sub.extend(sbox_gate(b, &anf, nib));
        }
        let mut rot = vec![Bit::Const(false); 16];
        for (i, bit) in sub.into_iter().enumerate() {
            rot[(i + spn::ROTATE as usize) % 16] = bit;
        }
        s = rot;
    }
    b.xor_vec(&s, &rk(spn::ROUNDS))
}

pub fn build_toy_cipher_circuit() -> CircuitBundle {
    let mut b = Builder::new();
    let key = b.input("key", 32);
    let block = b.input("block", 16);
    let out = enc_bits(&mut b, &key, &block);
    let (c, taps) = b.finish(&out, &[]);
    CircuitBundle::new("toy_cipher", c, 1, taps, "key:32, block:16 -> Enc(key, block):16")
}

/// Counter block layout for the desk cipher: top bit set, 3-bit nonce,
/// 12-bit counter. Counter 0 is the tag block J0.
pub fn counter_block(nonce: u64, counter: u64) -> u16 {
    0x8000 | (((nonce & 7) as u16) << 12) | ((counter & 0xfff) as u16)
}

/// `Enc(kc ^ kn, ctr) ^ p` with the keystream exposed as tap `ectr`.
pub fn build_record_block_circuit(ctr: u16) -> CircuitBundle {
    let mut b = Builder::new();
    let kc = b.input("kc", 32);
    let p = b.input("p", 16);
    let kn = b.input("kn", 32);
    let k = b.xor_vec(&kc, &kn);
    let ectr = enc_bits(&mut b, &k, &Builder::constant(u128::from(ctr), 16));
    let out = b.xor_vec(&ectr, &p);
    let (c, taps) = b.finish(&out, &[("ectr", ectr)]);
    CircuitBundle::new(
        &format!("record_block_{ctr:04x}"),
        c,
        2,
        taps,
        "kc:32, p:16 (client) | kn:32 (notary) -> Enc(kc^kn, ctr) ^ p",
    )
}

/// `Enc(kc ^ kn, ctr) ^ mc ^ mn`: a keystream block split under two masks.
pub fn build_masked_block_circuit(ctr: u16) -> CircuitBundle {
    let mut b = Builder::new();
    let kc = b.input("kc", 32);
    let mc = b.input("mc", 16);
    let kn = b.input("kn", 32);
    let mn = b.input("mn", 16);
    let k = b.xor_vec(&kc, &kn);
    let e = enc_bits(&mut b, &k, &Builder::constant(u128::from(ctr), 16));
    let t = b.xor_vec(&e, &mc);
    let out = b.xor_vec(&t, &mn);
    let (c, taps) = b.finish(&out, &[]);
    CircuitBundle::new(
        &format!("masked_block_{ctr:04x}"),
        c,
        2,
        taps,
        "kc:32, mc:16 (client) | kn:32, mn:16 (notary) -> Enc(kc^kn, ctr) ^ mc ^ mn",
    )
}

/// Key derivation from additive PMS shares modulo `p`, output under two masks:
/// `(cw || sw) ^ mc ^ mn` where `(cw, sw) = derive_keys((sc + sn) mod p)`.
/// Output bits 0..32 are the client write key, 32..64 the server write key.
pub fn build_key_schedule_circuit(p: &BigUint) -> CircuitBundle {
    let w = p.bits() as usize;
    let p_bits: Vec<bool> = (0..w).map(|i| p.bit(i as u64)).collect();
    let mut b = Builder::new();
    let sc = b.input("sc", w);
    let mc = b.input("mc", 64);
    let sn = b.input("sn", w);
    let mn = b.input("mn", 64);
    let pms = b.mod_add(&sc, &sn, &p_bits);
    let mut fold = vec![Bit::Const(false); 32];
    for chunk in pms.chunks(32) {
        for (i, &bit) in chunk.iter().enumerate() {
            fold[i] = b.xor(fold[i], bit);
        }
    }
    let mut keys = Vec::with_capacity(64);
    for (hi, lo) in [(1u128, 2u128), (3, 4)] {
        let l = enc_bits(&mut b, &fold, &Builder::constant(lo, 16));
        let h = enc_bits(&mut b, &fold, &Builder::constant(hi, 16));
        keys.extend(l);
        keys.extend(h);
    }
    let t = b.xor_vec(&keys, &mc);
    let out = b.xor_vec(&t, &mn);
    let (c, taps) = b.finish(&out, &[]);
    CircuitBundle::new(
        &format!("key_schedule_{w}"),
        c,
        2,
        taps,
        "sc:w, mc:64 (client) | sn:w, mn:64 (notary) -> (cw||sw) ^ mc ^ mn",
    )
}

/// `[a == b]` over `width` bits.
pub fn build_comparator_circuit(width: usize) -> CircuitBundle {
    let mut b = Builder::new();
    let x = b.input("a", width);
    let y = b.input("b", width);
    let eq = b.equal(&x, &y);
    let (c, taps) = b.finish(&[eq], &[]);
    CircuitBundle::new(
        &format!("equal_{width}"),
        c,
        1,
        taps,
        "a:w (client) | b:w (notary) -> [a == b]",
    )
}

/// `p ^ ectr`, XOR gates only.
pub fn build_xor_circuit(width: usize) -> CircuitBundle {
    let mut b = Builder::new();
    let p = b.input("p", width);
    let e = b.input("ectr", width);
    let out = b.xor_vec(&p, &e);
    let (c, taps) = b.finish(&out, &[]);
    CircuitBundle::new(&format!("xor_{width}"), c, 2, taps, "p:w, ectr:w -> p ^ ectr")
}

/// Little-endian bits of a 16-bit constant, for callers assembling inputs.
pub fn block_bits(v: u16) -> Vec<bool> {
    to_bits(u128::from(v), 16)
}
