use std::fmt;

use rand::RngCore;

use super::{AlgebraError, Field};

/// Binary extension fields used for GHASH.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gf2kField {
    /// GF(2^16) with reduction polynomial x^16 + x^5 + x^3 + x + 1, in the
    /// plain polynomial basis (bit i is the coefficient of x^i).
    Gf16,
    /// GF(2^128) with the GCM polynomial x^128 + x^7 + x^2 + x + 1 in GCM's
    /// reflected bit order: the value is the big-endian reading of a 16-byte
    /// block, and the block's first bit is the coefficient of x^0.
    Gf128,
}

const GF16_POLY: u32 = 0x1_002b;
const GCM_R: u128 = 0xe1 << 120;

impl Gf2kField {
    pub fn bits(self) -> usize {
        match self {
            Gf2kField::Gf16 => 16,
            Gf2kField::Gf128 => 128,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gf2kField::Gf16 => "gf2_16",
            Gf2kField::Gf128 => "gf2_128",
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "gf2_16" => Some(Gf2kField::Gf16),
            "gf2_128" => Some(Gf2kField::Gf128),
            _ => None,
        }
    }

    fn mask(self) -> u128 {
        match self {
            Gf2kField::Gf16 => 0xffff,
            Gf2kField::Gf128 => u128::MAX,
        }
    }

    pub fn elem(self, bits: u128) -> Gf2kElement {
        Gf2kElement {
            bits: bits & self.mask(),
            field: self,
        }
    }

    pub fn zero(self) -> Gf2kElement {
        self.elem(0)
    }

    pub fn one(self) -> Gf2kElement {
        match self {
            Gf2kField::Gf16 => self.elem(1),
            Gf2kField::Gf128 => self.elem(1 << 127),
        }
    }

    pub fn random<R: RngCore + ?Sized>(self, rng: &mut R) -> Gf2kElement {
        let mut b = [0u8; 16];
        rng.fill_bytes(&mut b);
        self.elem(u128::from_le_bytes(b))
    }

    pub fn from_be_bytes(self, bytes: &[u8]) -> Result<Gf2kElement, AlgebraError> {
        let n = self.bits() / 8;
        if bytes.len() != n {
            return Err(AlgebraError::Encoding(format!(
                "expected {n} bytes for {}, got {}",
                self.name(),
                bytes.len()
            )));
        }
        let mut buf = [0u8; 16];
        buf[16 - n..].copy_from_slice(bytes);
        Ok(self.elem(u128::from_be_bytes(buf)))
    }
}

/// An element of GF(2^16) or GF(2^128). Addition is XOR.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2kElement {
    bits: u128,
    field: Gf2kField,
}

impl Gf2kElement {
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn gf_field(&self) -> Gf2kField {
        self.field
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    fn mul_raw(&self, rhs: &Self) -> u128 {
        match self.field {
            Gf2kField::Gf16 => {
                let (a, b) = (self.bits as u32, rhs.bits as u32);
                let mut prod: u32 = 0;
                for i in 0..16 {
                    if (b >> i) & 1 == 1 {
                        prod ^= a << i;
                    }
                }
                for i in (16..32).rev() {
                    if (prod >> i) & 1 == 1 {
                        prod ^= GF16_POLY << (i - 16);
                    }
                }
                prod as u128
            }
            Gf2kField::Gf128 => {
                let (x, mut v) = (self.bits, rhs.bits);
                let mut z = 0u128;
                for i in 0..128 {
                    if (x >> (127 - i)) & 1 == 1 {
                        z ^= v;
                    }
                    v = if v & 1 == 1 { (v >> 1) ^ GCM_R } else { v >> 1 };
                }
                z
            }
        }
    }
}

impl fmt::Debug for Gf2kElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.field.name(), self.to_hex())
    }
}

/// Multiplication in GF(2^k), checking that both operands share a field.
pub fn gf2k_mul(a: &Gf2kElement, b: &Gf2kElement) -> Result<Gf2kElement, AlgebraError> {
    if a.field != b.field {
        return Err(AlgebraError::FieldMismatch(
            a.field.name().into(),
            b.field.name().into(),
        ));
    }
    Ok(a.mul(b))
}

impl Field for Gf2kElement {
    fn field_name(&self) -> String {
        self.field.name().to_string()
    }

    fn zero_like(&self) -> Self {
        self.field.zero()
    }

    fn one_like(&self) -> Self {
        self.field.one()
    }

    fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.field, rhs.field, "field mismatch");
        self.field.elem(self.bits ^ rhs.bits)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }

    fn neg(&self) -> Self {
        *self
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.field, rhs.field, "field mismatch");
        self.field.elem(self.mul_raw(rhs))
    }

    fn inv(&self) -> Result<Self, AlgebraError> {
        if self.bits == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        // a^(2^k - 2) = a^-1; square-and-multiply over the k-1 set bits.
        let k = self.field.bits();
        let mut acc = self.field.one();
        let mut base = *self;
        for i in 0..k {
            if i > 0 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
        }
        Ok(acc)
    }

    fn bit_len(&self) -> usize {
        self.field.bits()
    }

    fn bit(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    fn basis_like(&self, i: usize) -> Self {
        self.field.elem(1u128 << i)
    }

    fn random_like<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self {
        self.field.random(rng)
    }

    fn to_bytes(&self) -> Vec<u8> {
        let n = self.field.bits() / 8;
        self.bits.to_be_bytes()[16 - n..].to_vec()
    }

    fn from_bytes_like(&self, bytes: &[u8]) -> Result<Self, AlgebraError> {
        self.field.from_be_bytes(bytes)
    }

    fn byte_len(&self) -> usize {
        self.field.bits() / 8
    }
}
