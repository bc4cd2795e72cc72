//! Boolean circuits over {AND, XOR, INV}: representation, a plain evaluator,
//! the text format, a small builder, and the shipped circuit library.

mod builder;
mod format;
mod library;
pub mod spn;

pub use builder::{Bit, Builder};
pub use format::{parse_circuit, serialize_circuit};
pub use library::{
    block_bits, build_comparator_circuit, build_key_schedule_circuit, build_masked_block_circuit,
    build_multiplier_circuit, build_record_block_circuit, build_toy_cipher_circuit, build_xor_circuit, counter_block,
    CircuitBundle, MULTIPLIER_SOURCE,
};

use std::collections::HashSet;
use std::ops::Range;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    And { a: usize, b: usize, out: usize },
    Xor { a: usize, b: usize, out: usize },
    Inv { a: usize, out: usize },
}

impl Gate {
    pub fn out(&self) -> usize {
        match *self {
            Gate::And { out, .. } | Gate::Xor { out, .. } | Gate::Inv { out, .. } => out,
        }
    }

    pub fn inputs(&self) -> Vec<usize> {
        match *self {
            Gate::And { a, b, .. } | Gate::Xor { a, b, .. } => vec![a, b],
            Gate::Inv { a, .. } => vec![a],
        }
    }
}

/// A named input variable; its wires are assigned densely from 0 in group order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputGroup {
    pub name: String,
    pub width: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("gate {gate} reads wire {wire} before it is written")]
    UnwrittenWire { gate: usize, wire: usize },
    #[error("wire {wire} written more than once")]
    DuplicateWrite { wire: usize },
    #[error("gate {gate} writes wire {wire} outside {range:?}")]
    WireOutOfRange {
        gate: usize,
        wire: usize,
        range: Range<usize>,
    },
    #[error("{outputs} outputs declared but the circuit has {wires} wires")]
    TooManyOutputs { outputs: usize, wires: usize },
    #[error("input group {0:?} is empty or duplicated")]
    BadGroup(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid circuit: {0}")]
    Validation(#[from] ValidationError),
    #[error("input widths {got:?} do not match {expected:?}")]
    InputWidthMismatch { expected: Vec<usize>, got: Vec<usize> },
}

/// A validated gate list. Outputs are always the last `num_outputs` wires in
/// ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanCircuit {
    groups: Vec<InputGroup>,
    gates: Vec<Gate>,
    num_outputs: usize,
}

impl BooleanCircuit {
    pub fn new(groups: Vec<InputGroup>, gates: Vec<Gate>, num_outputs: usize) -> Result<Self, ValidationError> {
        let mut names = HashSet::new();
        for g in &groups {
            if g.width == 0 || !names.insert(g.name.as_str()) {
                return Err(ValidationError::BadGroup(g.name.clone()));
            }
        }
        let n_in: usize = groups.iter().map(|g| g.width).sum();
        let total = n_in + gates.len();
        let mut written = vec![false; total];
        written[..n_in].iter_mut().for_each(|w| *w = true);
        for (i, g) in gates.iter().enumerate() {
            for w in g.inputs() {
                if w >= total || !written[w] {
                    return Err(ValidationError::UnwrittenWire { gate: i, wire: w });
                }
            }
            let out = g.out();
            if !(n_in..total).contains(&out) {
                return Err(ValidationError::WireOutOfRange {
                    gate: i,
                    wire: out,
                    range: n_in..total,
                });
            }
            if written[out] {
                return Err(ValidationError::DuplicateWrite { wire: out });
            }
            written[out] = true;
        }
        if num_outputs > total {
            return Err(ValidationError::TooManyOutputs {
                outputs: num_outputs,
                wires: total,
            });
        }
        Ok(Self {
            groups,
            gates,
            num_outputs,
        })
    }

    pub fn groups(&self) -> &[InputGroup] {
        &self.groups
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_inputs(&self) -> usize {
        self.groups.iter().map(|g| g.width).sum()
    }

    pub fn num_wires(&self) -> usize {
        self.num_inputs() + self.gates.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    pub fn output_wires(&self) -> Range<usize> {
        self.num_wires() - self.num_outputs..self.num_wires()
    }

    pub fn group_index(&self, name: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.name == name)
    }

    /// Wire ids of input group `idx`.
    pub fn group_wires(&self, idx: usize) -> Range<usize> {
        let start: usize = self.groups[..idx].iter().map(|g| g.width).sum();
        start..start + self.groups[idx].width
    }

    pub fn widths(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.width).collect()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::And { .. })).count()
    }

    pub fn xor_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Xor { .. })).count()
    }

    pub fn inv_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Inv { .. })).count()
    }

    /// SHA-256 of the canonical text form; identifies the circuit on the wire.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(serialize_circuit(self).as_bytes()).into()
    }

    /// Flattens per-group inputs after checking their widths.
    pub fn flatten_inputs(&self, inputs: &[Vec<bool>]) -> Result<Vec<bool>, CircuitError> {
        let got: Vec<usize> = inputs.iter().map(Vec::len).collect();
        if got != self.widths() {
            return Err(CircuitError::InputWidthMismatch {
                expected: self.widths(),
                got,
            });
        }
        Ok(inputs.concat())
    }

    /// Values of every wire for a flat input assignment.
    pub fn eval_wires(&self, flat: &[bool]) -> Vec<bool> {
        assert_eq!(flat.len(), self.num_inputs());
        let mut w = vec![false; self.num_wires()];
        w[..flat.len()].copy_from_slice(flat);
        for g in &self.gates {
            match *g {
                Gate::And { a, b, out } => w[out] = w[a] & w[b],
                Gate::Xor { a, b, out } => w[out] = w[a] ^ w[b],
                Gate::Inv { a, out } => w[out] = !w[a],
            }
        }
        w
    }
}

/// Evaluates the circuit in the clear; one bit vector per input group.
pub fn eval_plain(c: &BooleanCircuit, inputs: &[Vec<bool>]) -> Result<Vec<bool>, CircuitError> {
    let flat = c.flatten_inputs(inputs)?;
    let w = c.eval_wires(&flat);
    Ok(w[c.output_wires()].to_vec())
}

/// Little-endian bit decomposition of the low `width` bits of `v`.
pub fn to_bits(v: u128, width: usize) -> Vec<bool> {
    (0..width).map(|i| i < 128 && (v >> i) & 1 == 1).collect()
}

pub fn from_bits(bits: &[bool]) -> u128 {
    bits.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i))
}

/// Bits of a big-endian byte string, least significant bit first.
pub fn bytes_to_bits_le(be: &[u8]) -> Vec<bool> {
    be.iter()
        .rev()
        .flat_map(|byte| (0..8).map(move |i| byte >> i & 1 == 1))
        .collect()
}

/// Inverse of [`bytes_to_bits_le`]; `bits.len()` must be a multiple of 8.
pub fn bits_le_to_bytes(bits: &[bool]) -> Vec<u8> {
    let mut out: Vec<u8> = bits
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |a, (i, &b)| a | (u8::from(b) << i)))
        .collect();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_read_before_write() {
        let g = vec![InputGroup {
            name: "a".into(),
            width: 2,
        }];
        let err = BooleanCircuit::new(g, vec![Gate::And { a: 0, b: 3, out: 2 }, Gate::Inv { a: 0, out: 3 }], 1);
        assert_eq!(err, Err(ValidationError::UnwrittenWire { gate: 0, wire: 3 }));
    }

    #[test]
    fn rejects_double_write() {
        let g = vec![InputGroup {
            name: "a".into(),
            width: 2,
        }];
        let err = BooleanCircuit::new(g, vec![Gate::Xor { a: 0, b: 1, out: 2 }, Gate::Inv { a: 0, out: 2 }], 1);
        assert_eq!(err, Err(ValidationError::DuplicateWrite { wire: 2 }));
    }

    #[test]
    fn width_mismatch_reported() {
        let c = build_multiplier_circuit().circuit;
        assert!(matches!(
            eval_plain(&c, &[vec![true], vec![true, true]]),
            Err(CircuitError::InputWidthMismatch { .. })
        ));
    }

    #[test]
    fn byte_bit_conversions_round_trip() {
        let bytes = [0x12, 0xfe, 0x00, 0x80];
        let bits = bytes_to_bits_le(&bytes);
        assert_eq!(from_bits(&bits), 0x12fe0080);
        assert_eq!(bits_le_to_bytes(&bits), bytes);
    }
}
