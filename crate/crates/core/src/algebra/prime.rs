use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;

use super::{AlgebraError, Field};

struct PrimeFieldInner {
    name: String,
    modulus: BigUint,
    bits: usize,
    byte_len: usize,
}

/// A prime field Z_p, identified by name.
#[derive(Clone)]
pub struct PrimeField(Arc<PrimeFieldInner>);

impl PrimeField {
    /// Builds a field descriptor. The modulus is assumed prime.
    pub fn new(name: impl Into<String>, modulus: BigUint) -> Self {
        let bits = modulus.bits() as usize;
        Self(Arc::new(PrimeFieldInner {
            name: name.into(),
            byte_len: bits.div_ceil(8),
            bits,
            modulus,
        }))
    }

    /// Base field of the toy curve, p = 65521.
    pub fn toy() -> Self {
        static F: OnceLock<PrimeField> = OnceLock::new();
        F.get_or_init(|| PrimeField::new("toy65521", BigUint::from(65521u32)))
            .clone()
    }

    /// Base field of NIST P-256.
    pub fn p256() -> Self {
        static F: OnceLock<PrimeField> = OnceLock::new();
        F.get_or_init(|| {
            PrimeField::new(
                "p256",
                BigUint::parse_bytes(b"ffffffff00000001000000000000000000000000ffffffffffffffffffffffff", 16).unwrap(),
            )
        })
        .clone()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "toy65521" => Some(Self::toy()),
            "p256" => Some(Self::p256()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    pub fn bits(&self) -> usize {
        self.0.bits
    }

    pub fn byte_len(&self) -> usize {
        self.0.byte_len
    }

    /// Reduces `v` into the field.
    pub fn elem(&self, v: impl Into<BigUint>) -> FieldElement {
        FieldElement {
            value: v.into() % self.modulus(),
            field: self.clone(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0u32)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1u32)
    }

    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let mut rng = RngAdapter(rng);
        FieldElement {
            value: rng.gen_biguint_below(self.modulus()),
            field: self.clone(),
        }
    }

    pub fn from_hex(&self, s: &str) -> Result<FieldElement, AlgebraError> {
        let bytes = hex::decode(s).map_err(|e| AlgebraError::Encoding(e.to_string()))?;
        self.from_be_bytes(&bytes)
    }

    /// Parses a fixed-width big-endian encoding, rejecting non-canonical values.
    pub fn from_be_bytes(&self, bytes: &[u8]) -> Result<FieldElement, AlgebraError> {
        if bytes.len() != self.byte_len() {
            return Err(AlgebraError::Encoding(format!(
                "expected {} bytes for {}, got {}",
                self.byte_len(),
                self.name(),
                bytes.len()
            )));
        }
        let value = BigUint::from_bytes_be(bytes);
        if &value >= self.modulus() {
            return Err(AlgebraError::Encoding(format!(
                "value not reduced modulo {}",
                self.name()
            )));
        }
        Ok(FieldElement {
            value,
            field: self.clone(),
        })
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.name == other.0.name && self.0.modulus == other.0.modulus)
    }
}

impl Eq for PrimeField {}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeField({})", self.0.name)
    }
}

// `RandBigInt` is implemented for sized `Rng`s only.
struct RngAdapter<'a, R: ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// An element of a prime field, always reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    value: BigUint,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    fn same_field(&self, rhs: &Self) {
        assert!(
            self.field == rhs.field,
            "field mismatch: {} vs {}",
            self.field.name(),
            rhs.field.name()
        );
    }

    fn with(&self, value: BigUint) -> Self {
        FieldElement {
            value,
            field: self.field.clone(),
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.field != rhs.field {
            return Err(AlgebraError::FieldMismatch(
                self.field.name().into(),
                rhs.field.name().into(),
            ));
        }
        Ok(self.mul(rhs))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.field.name(), self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Multiplicative inverse in Z_p.
pub fn fe_inv(x: &FieldElement) -> Result<FieldElement, AlgebraError> {
    x.inv()
}

/// Extended Euclid over the integers; returns `a^-1 mod m` for gcd(a, m) = 1.
pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    use num_integer::Integer;

    let (a, m) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return None;
    }
    let x = egcd.x.mod_floor(&m);
    x.to_biguint()
}

impl Field for FieldElement {
    fn field_name(&self) -> String {
        self.field.name().to_string()
    }

    fn zero_like(&self) -> Self {
        self.with(BigUint::zero())
    }

    fn one_like(&self) -> Self {
        self.with(BigUint::one())
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        let mut v = &self.value + &rhs.value;
        if &v >= self.field.modulus() {
            v -= self.field.modulus();
        }
        self.with(v)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        if self.value >= rhs.value {
            self.with(&self.value - &rhs.value)
        } else {
            self.with(self.field.modulus() - (&rhs.value - &self.value))
        }
    }

    fn neg(&self) -> Self {
        if self.value.is_zero() {
            self.clone()
        } else {
            self.with(self.field.modulus() - &self.value)
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        self.with((&self.value * &rhs.value) % self.field.modulus())
    }

    fn inv(&self) -> Result<Self, AlgebraError> {
        if self.value.is_zero() {
            return Err(AlgebraError::ZeroInverse);
        }
        mod_inverse(&self.value, self.field.modulus())
            .map(|v| self.with(v))
            .ok_or(AlgebraError::ZeroInverse)
    }

    fn bit_len(&self) -> usize {
        self.field.bits()
    }

    fn bit(&self, i: usize) -> bool {
        self.value.bit(i as u64)
    }

    fn basis_like(&self, i: usize) -> Self {
        self.with((BigUint::one() << i) % self.field.modulus())
    }

    fn random_like<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self {
        self.field.random(rng)
    }

    fn to_bytes(&self) -> Vec<u8> {
        let raw = self.value.to_bytes_be();
        let mut out = vec![0u8; self.field.byte_len()];
        let off = out.len() - raw.len().min(out.len());
        // zero encodes as [0]
        if !self.value.is_zero() {
            out[off..].copy_from_slice(&raw);
        }
        out
    }

    fn from_bytes_like(&self, bytes: &[u8]) -> Result<Self, AlgebraError> {
        self.field.from_be_bytes(bytes)
    }

    fn byte_len(&self) -> usize {
        self.field.byte_len()
    }
}
