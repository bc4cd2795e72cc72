use std::fmt::Debug;

use rand::RngCore;

use super::AlgebraError;

/// Common interface over the prime fields and the binary extension fields.
///
/// Elements carry their field descriptor, so constructors that need a field
/// take an existing element (`*_like`) as the template. Arithmetic between
/// elements of different fields is a programming error and panics; the
/// checked free functions ([`super::gf2k_mul`], [`super::fe_inv`]) report it
/// as [`AlgebraError::FieldMismatch`] instead.
pub trait Field: Clone + PartialEq + Eq + Debug + Send + Sync + 'static {
    fn field_name(&self) -> String;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Result<Self, AlgebraError>;

    /// Number of bits needed to represent any element.
    fn bit_len(&self) -> usize;
    /// Bit `i` of the canonical representation.
    fn bit(&self, i: usize) -> bool;
    /// The `i`-th basis element, so that every element equals the sum of the
    /// basis elements selected by its bits.
    fn basis_like(&self, i: usize) -> Self;

    fn random_like<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self;

    fn random_nonzero_like<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self {
        loop {
            let v = self.random_like(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }

    /// Fixed-width big-endian encoding.
    fn to_bytes(&self) -> Vec<u8>;
    #[allow(clippy::wrong_self_convention)]
    fn from_bytes_like(&self, bytes: &[u8]) -> Result<Self, AlgebraError>;
    fn byte_len(&self) -> usize;

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }
}
