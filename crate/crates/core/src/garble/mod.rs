//! Classical point-and-permute garbling with free XOR.
//!
//! Every wire carries a 0-label `W0` and a 1-label `W0 ^ delta`; the low bit of
//! `delta` is set so the two labels of a wire have opposite permute bits. AND
//! gates get four rows ordered by the permute bits of their input labels,
//! each `SHA-256(la || lb || tweak || gate)[..20] ^ (out || 0^32)`. XOR gates
//! cost nothing and INV maps `W0` to `W0 ^ delta`.

use std::collections::BTreeMap;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::circuits::{BooleanCircuit, Gate};
use crate::codec::{CodecError, Reader, Writer};
use crate::prg::Prg;

pub const ROW_BYTES: usize = 20;
const TAG_BYTES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GarbleError {
    #[error("expected {expected} labels or bits, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("row tag check failed at gate {gate}")]
    RowTagFailure { gate: usize },
    #[error("garbled circuit does not match the circuit description")]
    CircuitMismatch,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// A 128-bit wire label; bit 0 is the permute bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub u128);

impl Label {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut b = [0u8; 16];
        rng.fill_bytes(&mut b);
        Label(u128::from_le_bytes(b))
    }

    pub fn random_delta<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Label(Self::random(rng).0 | 1)
    }

    pub fn permute_bit(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn to_bytes(self) -> [u8; 16] {
        self.0.to_le_bytes()
    }

    pub fn from_bytes(b: [u8; 16]) -> Self {
        Label(u128::from_le_bytes(b))
    }

    /// `self ^ (bit * delta)`.
    pub fn select(self, bit: bool, delta: Label) -> Label {
        if bit {
            self ^ delta
        } else {
            self
        }
    }
}

impl std::ops::BitXor for Label {
    type Output = Label;
    fn bitxor(self, rhs: Label) -> Label {
        Label(self.0 ^ rhs.0)
    }
}

impl std::fmt::Debug for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Label({})", hex::encode(self.to_bytes()))
    }
}

/// One active label per wire of an input group or of the output.
pub type ActiveLabels = Vec<Label>;

pub fn write_labels(w: &mut Writer, labels: &[Label]) {
    w.u32(labels.len() as u32);
    for l in labels {
        w.fixed(&l.to_bytes());
    }
}

pub fn read_labels(r: &mut Reader<'_>) -> Result<Vec<Label>, CodecError> {
    let n = r.u32()? as usize;
    if n.saturating_mul(16) > r.remaining() {
        return Err(CodecError::Truncated {
            needed: n.saturating_mul(16),
            remaining: r.remaining(),
        });
    }
    (0..n).map(|_| Ok(Label::from_bytes(r.array()?))).collect()
}

/// Label pairs `(label for 0, label for 1)` per input wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingInfo {
    pub pairs: Vec<(Label, Label)>,
}

/// Per output wire, the permute bit of its 0-label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingInfo {
    pub bits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarbledCircuit {
    pub circuit_digest: [u8; 32],
    pub tweak: u128,
    /// Four rows per AND gate, in gate order.
    pub rows: Vec<[u8; ROW_BYTES]>,
}

impl GarbledCircuit {
    /// Length-prefixed row blob, circuit hash, tweak base; little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let blob: Vec<u8> = self.rows.iter().flatten().copied().collect();
        let mut w = Writer::new();
        w.bytes(&blob)
            .fixed(&self.circuit_digest)
            .fixed(&self.tweak.to_le_bytes());
        w.finish()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader::new(buf);
        let blob = r.bytes()?;
        if blob.len() % (4 * ROW_BYTES) != 0 {
            return Err(CodecError::Invalid(format!(
                "row blob of {} bytes is not a whole number of gates",
                blob.len()
            )));
        }
        let circuit_digest = r.array()?;
        let tweak = u128::from_le_bytes(r.array()?);
        r.finish()?;
        Ok(Self {
            circuit_digest,
            tweak,
            rows: blob
                .chunks(ROW_BYTES)
                .map(|c| c.try_into().expect("chunk width"))
                .collect(),
        })
    }
}

/// Everything the garbler knows after garbling.
#[derive(Clone, Debug)]
pub struct Garbling {
    pub garbled: GarbledCircuit,
    pub encoding: EncodingInfo,
    pub decoding: DecodingInfo,
    pub delta: Label,
    /// 0-label of every wire.
    pub zero_labels: Vec<Label>,
}

impl Garbling {
    /// Both labels of output wire `k`.
    pub fn output_pair(&self, c: &BooleanCircuit, k: usize) -> (Label, Label) {
        let z = self.zero_labels[c.output_wires().start + k];
        (z, z ^ self.delta)
    }
}

/// Optional fixed values for a garbling; unset values come from the rng.
#[derive(Clone, Debug, Default)]
pub struct GarbleOptions {
    pub delta: Option<Label>,
    /// Input wire id to its 0-label.
    pub input_labels: BTreeMap<usize, Label>,
    /// Garbles this AND gate (by gate index) as OR. Only used to model a
    /// cheating garbler in tests and the abort catalog.
    #[doc(hidden)]
    pub tamper_gate: Option<usize>,
}

fn row_pad(la: Label, lb: Label, tweak: u128, gate: usize) -> [u8; ROW_BYTES] {
    let mut h = Sha256::new();
    h.update(la.to_bytes());
    h.update(lb.to_bytes());
    h.update(tweak.to_le_bytes());
    h.update((gate as u64).to_le_bytes());
    let d = h.finalize();
    d[..ROW_BYTES].try_into().expect("digest width")
}

/// Gb: garbles `c` with all randomness drawn from `rng`.
pub fn garble<R: RngCore + ?Sized>(c: &BooleanCircuit, rng: &mut R) -> (GarbledCircuit, EncodingInfo, DecodingInfo) {
    let g = garble_with(c, rng, &GarbleOptions::default());
    (g.garbled, g.encoding, g.decoding)
}

/// Garbling with optional preset offset and input labels. The rng is always
/// consumed in the same order (delta, tweak, one label per input wire, one
/// label per AND gate), so presets do not shift the remaining stream.
pub fn garble_with<R: RngCore + ?Sized>(c: &BooleanCircuit, rng: &mut R, opts: &GarbleOptions) -> Garbling {
    let drawn_delta = Label::random_delta(rng);
    let delta = opts.delta.unwrap_or(drawn_delta);
    assert!(delta.permute_bit(), "delta must have its permute bit set");
    let mut tb = [0u8; 16];
    rng.fill_bytes(&mut tb);
    let tweak = u128::from_le_bytes(tb);

    let n_in = c.num_inputs();
    let mut zero = vec![Label(0); c.num_wires()];
    for (w, z) in zero.iter_mut().enumerate().take(n_in) {
        let drawn = Label::random(rng);
        *z = opts.input_labels.get(&w).copied().unwrap_or(drawn);
    }
    let mut rows = Vec::with_capacity(4 * c.and_count());
    for (gi, g) in c.gates().iter().enumerate() {
        match *g {
            Gate::Xor { a, b, out } => zero[out] = zero[a] ^ zero[b],
            Gate::Inv { a, out } => zero[out] = zero[a] ^ delta,
            Gate::And { a, b, out } => {
                let c0 = Label::random(rng);
                zero[out] = c0;
                let mut table = [[0u8; ROW_BYTES]; 4];
                for i in [false, true] {
                    for j in [false, true] {
                        let la = zero[a].select(i, delta);
                        let lb = zero[b].select(j, delta);
                        let v = if opts.tamper_gate == Some(gi) { i | j } else { i & j };
                        let lo = c0.select(v, delta);
                        let mut row = row_pad(la, lb, tweak, gi);
                        for (r, x) in row.iter_mut().zip(lo.to_bytes()) {
                            *r ^= x;
                        }
                        let pos = 2 * usize::from(la.permute_bit()) + usize::from(lb.permute_bit());
                        table[pos] = row;
                    }
                }
                rows.extend(table);
            }
        }
    }
    let encoding = EncodingInfo {
        pairs: zero[..n_in].iter().map(|&z| (z, z ^ delta)).collect(),
    };
    let decoding = DecodingInfo {
        bits: zero[c.output_wires()].iter().map(|l| l.permute_bit()).collect(),
    };
    Garbling {
        garbled: GarbledCircuit {
            circuit_digest: c.digest(),
            tweak,
            rows,
        },
        encoding,
        decoding,
        delta,
        zero_labels: zero,
    }
}

/// En: selects one label per input bit.
pub fn encode(e: &EncodingInfo, x: &[bool]) -> Result<ActiveLabels, GarbleError> {
    if x.len() != e.pairs.len() {
        return Err(GarbleError::WidthMismatch {
            expected: e.pairs.len(),
            got: x.len(),
        });
    }
    Ok(e.pairs
        .iter()
        .zip(x)
        .map(|(&(l0, l1), &b)| if b { l1 } else { l0 })
        .collect())
}

/// Active labels on every wire; used when internal wires are tapped.
pub fn evaluate_all(c: &BooleanCircuit, f: &GarbledCircuit, x: &[Label]) -> Result<Vec<Label>, GarbleError> {
    if f.circuit_digest != c.digest() || f.rows.len() != 4 * c.and_count() {
        return Err(GarbleError::CircuitMismatch);
    }
    if x.len() != c.num_inputs() {
        return Err(GarbleError::WidthMismatch {
            expected: c.num_inputs(),
            got: x.len(),
        });
    }
    let mut w = vec![Label(0); c.num_wires()];
    w[..x.len()].copy_from_slice(x);
    let mut and_idx = 0;
    for (gi, g) in c.gates().iter().enumerate() {
        match *g {
            Gate::Xor { a, b, out } => w[out] = w[a] ^ w[b],
            // Evaluator-side INV is the identity: the garbler swapped the meaning.
            Gate::Inv { a, out } => w[out] = w[a],
            Gate::And { a, b, out } => {
                let pos = 2 * usize::from(w[a].permute_bit()) + usize::from(w[b].permute_bit());
                let mut row = f.rows[4 * and_idx + pos];
                and_idx += 1;
                for (r, x) in row.iter_mut().zip(row_pad(w[a], w[b], f.tweak, gi)) {
                    *r ^= x;
                }
                if row[16..] != [0u8; TAG_BYTES] {
                    return Err(GarbleError::RowTagFailure { gate: gi });
                }
                w[out] = Label::from_bytes(row[..16].try_into().expect("label width"));
            }
        }
    }
    Ok(w)
}

/// Ev: output labels for the given active input labels.
pub fn evaluate(c: &BooleanCircuit, f: &GarbledCircuit, x: &[Label]) -> Result<ActiveLabels, GarbleError> {
    let w = evaluate_all(c, f, x)?;
    Ok(w[c.output_wires()].to_vec())
}

/// De: output bits via the permute-bit table.
pub fn decode(d: &DecodingInfo, y: &[Label]) -> Result<Vec<bool>, GarbleError> {
    if y.len() != d.bits.len() {
        return Err(GarbleError::WidthMismatch {
            expected: d.bits.len(),
            got: y.len(),
        });
    }
    Ok(y.iter().zip(&d.bits).map(|(l, &p)| l.permute_bit() ^ p).collect())
}

/// Re-garbles from the opened seed and options and compares the garbled
/// circuit byte for byte.
pub fn verify_garbling(
    f: &GarbledCircuit,
    c: &BooleanCircuit,
    seed: &[u8; 32],
    domain: &str,
    opts: &GarbleOptions,
) -> bool {
    let g = garble_with(c, &mut Prg::new(seed, domain), opts);
    g.garbled.to_bytes() == f.to_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_multiplier_circuit, build_toy_cipher_circuit, eval_plain, parse_circuit, to_bits};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn and_circuit() -> BooleanCircuit {
        parse_circuit("inputs a:1 b:1\noutputs 1\nAND 0 1 2\n").unwrap()
    }

    fn run(c: &BooleanCircuit, rng: &mut ChaCha20Rng, x: &[Vec<bool>]) -> Vec<bool> {
        let (f, e, d) = garble(c, rng);
        let labels = encode(&e, &x.concat()).unwrap();
        decode(&d, &evaluate(c, &f, &labels).unwrap()).unwrap()
    }

    #[test]
    fn single_and_has_four_rows_and_one_opens() {
        let c = and_circuit();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let g = garble_with(&c, &mut rng, &GarbleOptions::default());
        assert_eq!(g.garbled.rows.len(), 4);
        for (i, j) in [(false, false), (false, true), (true, false), (true, true)] {
            let la = g.encoding.pairs[0].0.select(i, g.delta);
            let lb = g.encoding.pairs[1].0.select(j, g.delta);
            let mut opened = 0;
            for row in &g.garbled.rows {
                let mut r = *row;
                for (x, p) in r.iter_mut().zip(row_pad(la, lb, g.garbled.tweak, 0)) {
                    *x ^= p;
                }
                if r[16..] == [0u8; 4] {
                    opened += 1;
                    let out = Label::from_bytes(r[..16].try_into().unwrap());
                    assert_eq!(out, g.zero_labels[2].select(i & j, g.delta));
                }
            }
            assert_eq!(opened, 1);
        }
    }

    #[test]
    fn same_seed_same_garbling() {
        let c = build_multiplier_circuit().circuit;
        let a = garble(&c, &mut ChaCha20Rng::seed_from_u64(9));
        let b = garble(&c, &mut ChaCha20Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn multiplier_truth_table() {
        let c = build_multiplier_circuit().circuit;
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for a in 0..4u128 {
            for b in 0..4u128 {
                let x = [to_bits(a, 2), to_bits(b, 2)];
                assert_eq!(run(&c, &mut rng, &x), eval_plain(&c, &x).unwrap());
            }
        }
    }

    #[test]
    fn toy_cipher_garbled_matches_plain() {
        let c = build_toy_cipher_circuit().circuit;
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = [
                to_bits(rng.gen::<u32>().into(), 32),
                to_bits(rng.gen::<u16>().into(), 16),
            ];
            assert_eq!(run(&c, &mut rng, &x), eval_plain(&c, &x).unwrap());
        }
    }

    #[test]
    fn corrupted_row_fails_tag() {
        let c = and_circuit();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (mut f, e, _) = garble(&c, &mut rng);
        let x = encode(&e, &[true, true]).unwrap();
        let pos = 2 * usize::from(x[0].permute_bit()) + usize::from(x[1].permute_bit());
        let mut tagged = f.clone();
        tagged.rows[pos][17] ^= 1;
        assert_eq!(evaluate(&c, &tagged, &x), Err(GarbleError::RowTagFailure { gate: 0 }));
        // A row replaced wholesale fails with overwhelming probability.
        f.rows[pos] = [0x5a; ROW_BYTES];
        assert_eq!(evaluate(&c, &f, &x), Err(GarbleError::RowTagFailure { gate: 0 }));
    }

    #[test]
    fn encode_selects_from_internal_table() {
        let c = build_multiplier_circuit().circuit;
        let g = garble_with(&c, &mut ChaCha20Rng::seed_from_u64(5), &GarbleOptions::default());
        let zeros = encode(&g.encoding, &[false; 4]).unwrap();
        assert_eq!(zeros, g.zero_labels[..4].to_vec());
        let one = encode(&g.encoding, &[false, true, false, false]).unwrap();
        assert_eq!(one.iter().zip(&zeros).filter(|(a, b)| a != b).count(), 1);
        assert!(matches!(
            encode(&g.encoding, &[true]),
            Err(GarbleError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn decode_of_zero_labels_is_the_table() {
        let c = build_multiplier_circuit().circuit;
        let g = garble_with(&c, &mut ChaCha20Rng::seed_from_u64(6), &GarbleOptions::default());
        let zeros: Vec<Label> = g.zero_labels[c.output_wires()].to_vec();
        let table: Vec<bool> = zeros.iter().map(|l| l.permute_bit()).collect();
        assert_eq!(table, g.decoding.bits);
        assert_eq!(decode(&g.decoding, &zeros).unwrap(), vec![false; 4]);
    }

    #[test]
    fn free_offset_holds_on_every_wire() {
        let c = build_toy_cipher_circuit().circuit;
        let g = garble_with(&c, &mut ChaCha20Rng::seed_from_u64(7), &GarbleOptions::default());
        assert!(g.delta.permute_bit());
        for &(l0, l1) in &g.encoding.pairs {
            assert_eq!(l0 ^ l1, g.delta);
            assert_ne!(l0.permute_bit(), l1.permute_bit());
        }
    }

    #[test]
    fn off_path_rows_never_open() {
        let c = build_toy_cipher_circuit().circuit;
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (f, e, _) = garble(&c, &mut rng);
        let x: Vec<bool> = (0..48).map(|_| rng.gen()).collect();
        let w = evaluate_all(&c, &f, &encode(&e, &x).unwrap()).unwrap();
        let mut and_idx = 0;
        for (gi, g) in c.gates().iter().enumerate() {
            if let Gate::And { a, b, .. } = *g {
                let on = 2 * usize::from(w[a].permute_bit()) + usize::from(w[b].permute_bit());
                for pos in (0..4).filter(|&p| p != on) {
                    let mut r = f.rows[4 * and_idx + pos];
                    for (x, p) in r.iter_mut().zip(row_pad(w[a], w[b], f.tweak, gi)) {
                        *x ^= p;
                    }
                    assert_ne!(r[16..], [0u8; 4]);
                }
                and_idx += 1;
            }
        }
    }

    #[test]
    fn verify_accepts_honest_and_rejects_flips() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let c = build_toy_cipher_circuit().circuit;
        for trial in 0..100 {
            let seed: [u8; 32] = rng.gen();
            let g = garble_with(&c, &mut Prg::new(&seed, "garble"), &GarbleOptions::default());
            assert!(verify_garbling(
                &g.garbled,
                &c,
                &seed,
                "garble",
                &GarbleOptions::default()
            ));
            if trial % 10 == 0 {
                let mut bad = g.garbled.clone();
                let i = rng.gen_range(0..bad.rows.len());
                bad.rows[i][rng.gen_range(0..ROW_BYTES)] ^= 1 << rng.gen_range(0..8);
                assert!(!verify_garbling(&bad, &c, &seed, "garble", &GarbleOptions::default()));
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let c = build_multiplier_circuit().circuit;
        let (f, _, _) = garble(&c, &mut ChaCha20Rng::seed_from_u64(11));
        let bytes = f.to_bytes();
        assert_eq!(GarbledCircuit::from_bytes(&bytes).unwrap(), f);
        assert!(GarbledCircuit::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn garbled_circuit_for_other_circuit_is_rejected() {
        let c = build_multiplier_circuit().circuit;
        let (f, e, _) = garble(&and_circuit(), &mut ChaCha20Rng::seed_from_u64(12));
        let x = [encode(&e, &[true, true]).unwrap(), encode(&e, &[true, true]).unwrap()].concat();
        assert_eq!(evaluate(&c, &f, &x), Err(GarbleError::CircuitMismatch));
    }
}
