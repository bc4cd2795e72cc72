use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;

use super::prime::mod_inverse;
use super::{AlgebraError, FieldElement, PrimeField};

/// Short Weierstrass parameters y^2 = x^3 + ax + b over Z_p with a
/// prime-order generator.
#[derive(Debug)]
pub struct CurveParams {
    pub name: String,
    pub field: PrimeField,
    pub a: BigUint,
    pub b: BigUint,
    pub gx: BigUint,
    pub gy: BigUint,
    pub order: BigUint,
}

/// Shared handle to a named curve.
#[derive(Clone)]
pub struct Curve(Arc<CurveParams>);

fn hexnum(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 16).expect("valid hex constant")
}

impl Curve {
    pub fn new(params: CurveParams) -> Self {
        Self(Arc::new(params))
    }

    /// The enumerable toy curve: p = 65521, a = -3, b = 3, G = (1, 1),
    /// prime group order 65563.
    pub fn toy() -> Self {
        static C: OnceLock<Curve> = OnceLock::new();
        C.get_or_init(|| {
            Curve::new(CurveParams {
                name: "toy65521".into(),
                field: PrimeField::toy(),
                a: BigUint::from(65518u32),
                b: BigUint::from(3u32),
                gx: BigUint::one(),
                gy: BigUint::one(),
                order: BigUint::from(65563u32),
            })
        })
        .clone()
    }

    /// NIST P-256.
    pub fn p256() -> Self {
        static C: OnceLock<Curve> = OnceLock::new();
        C.get_or_init(|| {
            let field = PrimeField::p256();
            let a = field.modulus() - BigUint::from(3u32);
            Curve::new(CurveParams {
                name: "p256".into(),
                field,
                a,
                b: hexnum("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
                gx: hexnum("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
                gy: hexnum("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
                order: hexnum("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"),
            })
        })
        .clone()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "toy65521" | "toy" => Some(Self::toy()),
            "p256" => Some(Self::p256()),
            _ => None,
        }
    }

    pub fn params(&self) -> &CurveParams {
        &self.0
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn field(&self) -> &PrimeField {
        &self.0.field
    }

    pub fn order(&self) -> &BigUint {
        &self.0.order
    }

    pub fn generator(&self) -> CurvePoint {
        CurvePoint {
            curve: self.clone(),
            coords: Some((self.0.gx.clone(), self.0.gy.clone())),
        }
    }

    pub fn identity(&self) -> CurvePoint {
        CurvePoint {
            curve: self.clone(),
            coords: None,
        }
    }

    /// Uniform scalar in [1, n).
    pub fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        let mut adapter = Adapter(rng);
        adapter.gen_biguint_range(&BigUint::one(), self.order())
    }

    /// Builds an affine point, checking the curve equation.
    pub fn point(&self, x: BigUint, y: BigUint) -> Result<CurvePoint, AlgebraError> {
        let p = CurvePoint {
            curve: self.clone(),
            coords: Some((x, y)),
        };
        if p.is_on_curve() {
            Ok(p)
        } else {
            Err(AlgebraError::OffCurvePoint(self.name().into()))
        }
    }

    /// Byte width of one encoded coordinate.
    pub fn coord_len(&self) -> usize {
        self.field().byte_len()
    }

    /// Decodes `00` (identity) or `04 || x || y`, validating the point.
    pub fn decode_point(&self, bytes: &[u8]) -> Result<CurvePoint, AlgebraError> {
        match bytes.first() {
            Some(0) if bytes.len() == 1 => Ok(self.identity()),
            Some(4) if bytes.len() == 1 + 2 * self.coord_len() => {
                let n = self.coord_len();
                let x = BigUint::from_bytes_be(&bytes[1..1 + n]);
                let y = BigUint::from_bytes_be(&bytes[1 + n..]);
                if &x >= self.field().modulus() || &y >= self.field().modulus() {
                    return Err(AlgebraError::Encoding("coordinate not reduced".into()));
                }
                self.point(x, y)
            }
            _ => Err(AlgebraError::Encoding("bad point encoding".into())),
        }
    }

    fn small_modulus(&self) -> Option<u64> {
        let p = self.field().modulus();
        if p.bits() <= 31 {
            p.to_u64_digits().first().copied()
        } else {
            None
        }
    }
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for Curve {}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curve({})", self.0.name)
    }
}

struct Adapter<'a, R: ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for Adapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, d: &mut [u8]) {
        self.0.fill_bytes(d)
    }
    fn try_fill_bytes(&mut self, d: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(d)
    }
}

/// An affine point or the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct CurvePoint {
    curve: Curve,
    coords: Option<(BigUint, BigUint)>,
}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coords {
            None => write!(f, "{}:O", self.curve.name()),
            Some((x, y)) => write!(f, "{}:({x}, {y})", self.curve.name()),
        }
    }
}

impl CurvePoint {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn is_identity(&self) -> bool {
        self.coords.is_none()
    }

    pub fn x(&self) -> Option<FieldElement> {
        self.coords.as_ref().map(|(x, _)| self.curve.field().elem(x.clone()))
    }

    pub fn y(&self) -> Option<FieldElement> {
        self.coords.as_ref().map(|(_, y)| self.curve.field().elem(y.clone()))
    }

    pub fn is_on_curve(&self) -> bool {
        let Some((x, y)) = &self.coords else {
            return true;
        };
        let c = self.curve.params();
        let p = c.field.modulus();
        if x >= p || y >= p {
            return false;
        }
        let lhs = (y * y) % p;
        let rhs = (x * x % p * x + &c.a * x + &c.b) % p;
        lhs == rhs
    }

    pub fn encode(&self) -> Vec<u8> {
        match &self.coords {
            None => vec![0],
            Some((x, y)) => {
                let n = self.curve.coord_len();
                let mut out = vec![0u8; 1 + 2 * n];
                out[0] = 4;
                let xb = x.to_bytes_be();
                let yb = y.to_bytes_be();
                if !x.is_zero() {
                    out[1 + n - xb.len()..1 + n].copy_from_slice(&xb);
                }
                if !y.is_zero() {
                    out[1 + 2 * n - yb.len()..].copy_from_slice(&yb);
                }
                out
            }
        }
    }

    pub fn neg(&self) -> CurvePoint {
        match &self.coords {
            None => self.clone(),
            Some((x, y)) => {
                let p = self.curve.field().modulus();
                let ny = if y.is_zero() { BigUint::zero() } else { p - y };
                CurvePoint {
                    curve: self.curve.clone(),
                    coords: Some((x.clone(), ny)),
                }
            }
        }
    }

    /// Group addition; handles doubling and inverse points.
    pub fn add(&self, rhs: &CurvePoint) -> CurvePoint {
        assert_eq!(self.curve, rhs.curve, "curve mismatch");
        let (Some((x1, y1)), Some((x2, y2))) = (&self.coords, &rhs.coords) else {
            return if self.is_identity() { rhs.clone() } else { self.clone() };
        };
        if let Some(p) = self.curve.small_modulus() {
            let to_u64 = |v: &BigUint| v.to_u64_digits().first().copied().unwrap_or(0);
            let a = to_u64(&self.curve.params().a);
            let sum = small_add(p, a, Some((to_u64(x1), to_u64(y1))), Some((to_u64(x2), to_u64(y2))));
            return CurvePoint {
                curve: self.curve.clone(),
                coords: sum.map(|(x, y)| (BigUint::from(x), BigUint::from(y))),
            };
        }
        let c = self.curve.params();
        let p = c.field.modulus();
        let sub = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { p - (b - a) % p };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == BigUint::zero() {
                return self.curve.identity();
            }
            let num = (BigUint::from(3u32) * x1 * x1 + &c.a) % p;
            let den = (BigUint::from(2u32) * y1) % p;
            num * mod_inverse(&den, p).expect("nonzero denominator") % p
        } else {
            let num = sub(y2, y1);
            let den = sub(x2, x1);
            num * mod_inverse(&den, p).expect("nonzero denominator") % p
        };
        let x3 = sub(&sub(&(&lambda * &lambda % p), x1), x2);
        let y3 = sub(&(&lambda * sub(x1, &x3) % p), y1);
        CurvePoint {
            curve: self.curve.clone(),
            coords: Some((x3, y3)),
        }
    }

    pub fn sub(&self, rhs: &CurvePoint) -> CurvePoint {
        self.add(&rhs.neg())
    }

    pub fn double(&self) -> CurvePoint {
        self.add(self)
    }

    /// Double-and-add scalar multiplication; `k` is reduced modulo the
    /// group order first.
    pub fn mul(&self, k: &BigUint) -> CurvePoint {
        let k = k % self.curve.order();
        if let Some(p) = self.curve.small_modulus() {
            return self.mul_small(p, &k);
        }
        let mut acc = self.curve.identity();
        for i in (0..k.bits()).rev() {
            acc = acc.double();
            if k.bit(i) {
                acc = acc.add(self);
            }
        }
        acc
    }

    fn mul_small(&self, p: u64, k: &BigUint) -> CurvePoint {
        let Some((x, y)) = &self.coords else {
            return self.clone();
        };
        let a = self.curve.params().a.to_u64_digits().first().copied().unwrap_or(0);
        let to_u64 = |v: &BigUint| v.to_u64_digits().first().copied().unwrap_or(0);
        let base = (to_u64(x), to_u64(y));
        // Jacobian double-and-add: one inversion per multiplication.
        let mut acc: Option<(u64, u64, u64)> = None;
        for i in (0..k.bits()).rev() {
            acc = acc.and_then(|q| jacobian_double(p, a, q));
            if k.bit(i) {
                acc = match acc {
                    None => Some((base.0, base.1, 1)),
                    Some(q) => jacobian_add_affine(p, a, q, base),
                };
            }
        }
        let coords = acc.map(|(x, y, z)| {
            let zi = small_inv(z, p);
            let zi2 = zi * zi % p;
            (BigUint::from(x * zi2 % p), BigUint::from(y * (zi2 * zi % p) % p))
        });
        CurvePoint {
            curve: self.curve.clone(),
            coords,
        }
    }
}

fn jacobian_double(p: u64, a: u64, (x, y, z): (u64, u64, u64)) -> Option<(u64, u64, u64)> {
    if y == 0 {
        return None;
    }
    let yy = y * y % p;
    let zz = z * z % p;
    let s = 4 * (x * yy % p) % p;
    let m = (3 * (x * x % p) + a * (zz * zz % p)) % p;
    let x3 = (m * m + 2 * p - 2 * s) % p;
    let y3 = (m * ((s + p - x3) % p) % p + p - 8 * (yy * yy % p) % p) % p;
    Some((x3, y3, 2 * (y * z % p) % p))
}

fn jacobian_add_affine(p: u64, a: u64, (x1, y1, z1): (u64, u64, u64), (x2, y2): (u64, u64)) -> Option<(u64, u64, u64)> {
    let z1z1 = z1 * z1 % p;
    let u2 = x2 * z1z1 % p;
    let s2 = y2 * (z1 * z1z1 % p) % p;
    let h = (u2 + p - x1) % p;
    let r = (s2 + p - y1) % p;
    if h == 0 {
        return if r == 0 {
            jacobian_double(p, a, (x1, y1, z1))
        } else {
            None
        };
    }
    let hh = h * h % p;
    let hhh = h * hh % p;
    let v = x1 * hh % p;
    let x3 = (r * r % p + 3 * p - hhh - 2 * v) % p;
    let y3 = (r * ((v + p - x3) % p) % p + p - y1 * hhh % p) % p;
    Some((x3, y3, z1 * h % p))
}

fn small_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i64) as u64
}

fn small_add(p: u64, a: u64, lhs: Option<(u64, u64)>, rhs: Option<(u64, u64)>) -> Option<(u64, u64)> {
    let (Some((x1, y1)), Some((x2, y2))) = (lhs, rhs) else {
        return lhs.or(rhs);
    };
    let lambda = if x1 == x2 {
        if (y1 + y2) % p == 0 {
            return None;
        }
        let num = (3 * x1 % p * x1 + a) % p;
        num * small_inv(2 * y1 % p, p) % p
    } else {
        let num = (y2 + p - y1) % p;
        num * small_inv((x2 + p - x1) % p, p) % p
    };
    let x3 = (lambda * lambda % p + 2 * p - x1 - x2) % p;
    let y3 = (lambda * ((x1 + p - x3) % p) % p + p - y1) % p;
    Some((x3, y3))
}

/// `k · P`, validating that `P` lies on its curve.
pub fn ec_scalar_mul(k: &BigUint, point: &CurvePoint) -> Result<CurvePoint, AlgebraError> {
    if !point.is_on_curve() {
        return Err(AlgebraError::OffCurvePoint(point.curve.name().into()));
    }
    Ok(point.mul(k))
}
