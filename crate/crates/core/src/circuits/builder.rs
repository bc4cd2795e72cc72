use std::collections::BTreeMap;

use super::{BooleanCircuit, Gate, InputGroup};

/// A builder-side bit: either a known constant or a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Const(bool),
    Wire(usize),
}

/// Incremental circuit construction with constant folding. Inputs must be
/// declared before any gate is emitted.
#[derive(Default)]
pub struct Builder {
    groups: Vec<InputGroup>,
    n_in: usize,
    gates: Vec<Gate>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    fn next_wire(&self) -> usize {
        self.n_in + self.gates.len()
    }

    pub fn input(&mut self, name: &str, width: usize) -> Vec<Bit> {
        assert!(self.gates.is_empty(), "inputs must precede gates");
        let start = self.n_in;
        self.groups.push(InputGroup {
            name: name.to_string(),
            width,
        });
        self.n_in += width;
        (start..start + width).map(Bit::Wire).collect()
    }

    fn emit(&mut self, make: impl FnOnce(usize) -> Gate) -> Bit {
        let out = self.next_wire();
        self.gates.push(make(out));
        Bit::Wire(out)
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), Bit::Const(y)) => Bit::Const(x ^ y),
            (Bit::Const(false), w) | (w, Bit::Const(false)) => w,
            (Bit::Const(true), w) | (w, Bit::Const(true)) => self.inv(w),
            (Bit::Wire(x), Bit::Wire(y)) if x == y => Bit::Const(false),
            (Bit::Wire(x), Bit::Wire(y)) => self.emit(|out| Gate::Xor { a: x, b: y, out }),
        }
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), Bit::Const(y)) => Bit::Const(x & y),
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::Const(false),
            (Bit::Const(true), w) | (w, Bit::Const(true)) => w,
            (Bit::Wire(x), Bit::Wire(y)) if x == y => a,
            (Bit::Wire(x), Bit::Wire(y)) => self.emit(|out| Gate::And { a: x, b: y, out }),
        }
    }

    pub fn inv(&mut self, a: Bit) -> Bit {
        match a {
            Bit::Const(x) => Bit::Const(!x),
            Bit::Wire(x) => self.emit(|out| Gate::Inv { a: x, out }),
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        let x = self.xor(a, b);
        let y = self.and(a, b);
        self.xor(x, y)
    }

    pub fn xor_vec(&mut self, a: &[Bit], b: &[Bit]) -> Vec<Bit> {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    /// `sel ? x1 : x0`, bitwise.
    pub fn mux(&mut self, sel: Bit, x0: &[Bit], x1: &[Bit]) -> Vec<Bit> {
        let d = self.xor_vec(x0, x1);
        x0.iter()
            .zip(d)
            .map(|(&a, d)| {
                let t = self.and(sel, d);
                self.xor(a, t)
            })
            .collect()
    }

    /// AND of all bits (1 for an empty slice).
    pub fn all(&mut self, bits: &[Bit]) -> Bit {
        let mut layer = bits.to_vec();
        if layer.is_empty() {
            return Bit::Const(true);
        }
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            for pair in layer.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.and(pair[0], pair[1])
                } else {
                    pair[0]
                });
            }
            layer = next;
        }
        layer[0]
    }

    /// `[a == b]`.
    pub fn equal(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        let diff = self.xor_vec(a, b);
        let same: Vec<Bit> = diff.into_iter().map(|d| self.inv(d)).collect();
        self.all(&same)
    }

    /// Ripple-carry addition with carry-in; returns (sum, carry-out).
    pub fn add(&mut self, a: &[Bit], b: &[Bit], carry_in: Bit) -> (Vec<Bit>, Bit) {
        assert_eq!(a.len(), b.len());
        let mut c = carry_in;
        let mut sum = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let xy = self.xor(x, y);
            sum.push(self.xor(xy, c));
            // carry = c ^ ((x ^ c) & (y ^ c))
            let xc = self.xor(x, c);
            let yc = self.xor(y, c);
            let t = self.and(xc, yc);
            c = self.xor(c, t);
        }
        (sum, c)
    }

    /// `(a + b) mod p` for `a, b < p`, little-endian bits of width `p`'s bit length.
    pub fn mod_add(&mut self, a: &[Bit], b: &[Bit], p: &[bool]) -> Vec<Bit> {
        let w = a.len();
        assert_eq!(p.len(), w);
        let (mut s, carry) = self.add(a, b, Bit::Const(false));
        s.push(carry);
        // s - p = s + !p + 1 over w+1 bits; carry-out set iff s >= p
        let not_p: Vec<Bit> = p
            .iter()
            .chain(std::iter::once(&false))
            .map(|&x| Bit::Const(!x))
            .collect();
        let (t, ge) = self.add(&s, &not_p, Bit::Const(true));
        self.mux(ge, &s[..w], &t[..w])
    }

    pub fn constant(v: u128, width: usize) -> Vec<Bit> {
        (0..width).map(|i| Bit::Const((v >> i) & 1 == 1)).collect()
    }

    fn any_input(&self) -> usize {
        assert!(self.n_in > 0, "constant outputs need at least one input wire");
        0
    }

    /// Finalizes the circuit. Output bits are materialized as dedicated wires
    /// renumbered to the end; `taps` name internal wires whose final ids are
    /// returned alongside the circuit.
    pub fn finish(
        mut self,
        outputs: &[Bit],
        taps: &[(&str, Vec<Bit>)],
    ) -> (BooleanCircuit, BTreeMap<String, Vec<usize>>) {
        let mut claimed = vec![false; self.n_in + self.gates.len() + 4 * outputs.len()];
        let mut out_wires = Vec::with_capacity(outputs.len());
        for &o in outputs {
            let w = match o {
                Bit::Wire(w) if w >= self.n_in && !claimed[w] => w,
                Bit::Wire(w) => {
                    let t = self.emit(|out| Gate::Inv { a: w, out });
                    match self.inv(t) {
                        Bit::Wire(x) => x,
                        Bit::Const(_) => unreachable!(),
                    }
                }
                Bit::Const(v) => {
                    let x = self.any_input();
                    let z = self.emit(|out| Gate::Xor { a: x, b: x, out });
                    let z = if v {
                        match z {
                            Bit::Wire(zw) => self.emit(|out| Gate::Inv { a: zw, out }),
                            Bit::Const(_) => unreachable!(),
                        }
                    } else {
                        z
                    };
                    match z {
                        Bit::Wire(x) => x,
                        Bit::Const(_) => unreachable!(),
                    }
                }
            };
            claimed[w] = true;
            out_wires.push(w);
        }

        let total = self.n_in + self.gates.len();
        let first_out = total - outputs.len();
        let mut map: Vec<usize> = (0..total).collect();
        let mut next = self.n_in;
        for g in &self.gates {
            if !claimed[g.out()] {
                map[g.out()] = next;
                next += 1;
            }
        }
        for (k, &w) in out_wires.iter().enumerate() {
            map[w] = first_out + k;
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::And { a, b, out } => Gate::And {
                    a: map[a],
                    b: map[b],
                    out: map[out],
                },
                Gate::Xor { a, b, out } => Gate::Xor {
                    a: map[a],
                    b: map[b],
                    out: map[out],
                },
                Gate::Inv { a, out } => Gate::Inv {
                    a: map[a],
                    out: map[out],
                },
            })
            .collect();
        let circuit =
            BooleanCircuit::new(self.groups, gates, outputs.len()).expect("builder output is structurally valid");
        let taps = taps
            .iter()
            .map(|(name, bits)| {
                let ids = bits
                    .iter()
                    .map(|b| match b {
                        Bit::Wire(w) => map[*w],
                        Bit::Const(_) => panic!("tap {name} contains a constant"),
                    })
                    .collect();
                (name.to_string(), ids)
            })
            .collect();
        (circuit, taps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{eval_plain, from_bits, to_bits};

    #[test]
    fn constants_and_copies_become_output_wires() {
        let mut b = Builder::new();
        let x = b.input("x", 2);
        let (c, _) = b.finish(&[Bit::Const(true), x[0], Bit::Const(false), x[0]], &[]);
        for v in 0..4u128 {
            let out = eval_plain(&c, &[to_bits(v, 2)]).unwrap();
            assert_eq!(out, vec![true, v & 1 == 1, false, v & 1 == 1]);
        }
    }

    #[test]
    fn mod_add_matches_integers() {
        let p = 251u128;
        let mut b = Builder::new();
        let x = b.input("x", 8);
        let y = b.input("y", 8);
        let s = b.mod_add(&x, &y, &to_bits(p, 8));
        let (c, _) = b.finish(&s, &[]);
        for (u, v) in [(0, 0), (250, 250), (1, 250), (100, 151), (200, 3), (7, 243)] {
            let out = eval_plain(&c, &[to_bits(u, 8), to_bits(v, 8)]).unwrap();
            assert_eq!(from_bits(&out), (u + v) % p, "{u}+{v}");
        }
    }
}
