//! Exact scalars over a prime field GF(p) or the rationals.
//!
//! A [`Scalar`] always carries its field. Binary operations between scalars
//! of different fields are errors in the checked API (`try_*`) and panics in
//! the operator impls, which are meant for code that has already checked
//! field agreement at a matrix or subspace boundary.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

/// The ground field: GF(p) for a prime `p <= 2^31`, or ℚ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    // 0 encodes the rationals.
    modulus: u32,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { modulus: 0 };

    /// GF(p). The modulus is checked for primality by trial division.
    pub fn prime(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { modulus: p as u32 })
    }

    pub fn rationals() -> Self {
        Self::RATIONALS
    }

    pub fn is_finite(&self) -> bool {
        self.modulus != 0
    }

    pub fn modulus(&self) -> Option<u32> {
        self.is_finite().then_some(self.modulus)
    }

    /// Number of elements, `None` for ℚ.
    pub fn order(&self) -> Option<u64> {
        self.modulus().map(u64::from)
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(*self)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(*self)
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar::from_i64(*self, v)
    }

    /// All elements in residue order. Only meaningful for finite fields.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> + '_ {
        let p = self.modulus;
        (0..p).map(move |v| Scalar(Repr::Fp { p, v }))
    }

    /// `FieldMismatch` unless the two fields are equal.
    pub fn check(&self, other: &FieldSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(*self, *other))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus() {
            Some(p) => write!(f, "gf:{p}"),
            None => f.write_str("q"),
        }
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" {
            return Ok(Self::RATIONALS);
        }
        let p = t
            .strip_prefix("gf:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse { what: "field", input: s.to_string() })?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Fp { p: u32, v: u32 },
    Q(BigRational),
}

/// An exact field element tagged with its field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn zero(field: FieldSpec) -> Self {
        match field.modulus() {
            Some(p) => Scalar(Repr::Fp { p, v: 0 }),
            None => Scalar(Repr::Q(BigRational::zero())),
        }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: FieldSpec, v: i64) -> Self {
        match field.modulus() {
            Some(p) => Scalar(Repr::Fp { p, v: v.rem_euclid(p as i64) as u32 }),
            None => Scalar(Repr::Q(BigRational::from_integer(v.into()))),
        }
    }

    /// A rational number `num/den`, reduced.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(Repr::Q(BigRational::new(num.into(), den))))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar(Repr::Q(r))
    }

    /// Maps a rational into `field`; fails if the denominator vanishes mod p.
    pub fn reduce_rational(field: FieldSpec, r: &BigRational) -> Result<Self> {
        match field.modulus() {
            None => Ok(Scalar(Repr::Q(r.clone()))),
            Some(p) => {
                let m = BigInt::from(p);
                let num = (r.numer() % &m + &m) % &m;
                let den = (r.denom() % &m + &m) % &m;
                let num = Scalar(Repr::Fp { p, v: num.to_u32().unwrap() });
                let den = Scalar(Repr::Fp { p, v: den.to_u32().unwrap() });
                num.try_div(&den)
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        match &self.0 {
            Repr::Fp { p, .. } => FieldSpec { modulus: *p },
            Repr::Q(_) => FieldSpec::RATIONALS,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Fp { v, .. } => *v == 0,
            Repr::Q(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Fp { v, .. } => *v == 1,
            Repr::Q(r) => r.is_one(),
        }
    }

    /// Residue in `[0, p)` for prime-field scalars.
    pub fn residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Fp { v, .. } => Some(*v),
            Repr::Q(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Q(r) => Some(r),
            Repr::Fp { .. } => None,
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (&self.0, &rhs.0) {
            (Repr::Fp { p, v: a }, Repr::Fp { p: q, v: b }) if p == q => {
                let s = (*a as u64 + *b as u64) % *p as u64;
                Ok(Scalar(Repr::Fp { p: *p, v: s as u32 }))
            }
            (Repr::Q(a), Repr::Q(b)) => Ok(Scalar(Repr::Q(a + b))),
            _ => Err(Error::FieldMismatch(self.field(), rhs.field())),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.field().check(&rhs.field())?;
        self.try_add(&rhs.neg())
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (&self.0, &rhs.0) {
            (Repr::Fp { p, v: a }, Repr::Fp { p: q, v: b }) if p == q => {
                let s = (*a as u64 * *b as u64) % *p as u64;
                Ok(Scalar(Repr::Fp { p: *p, v: s as u32 }))
            }
            (Repr::Q(a), Repr::Q(b)) => Ok(Scalar(Repr::Q(a * b))),
            _ => Err(Error::FieldMismatch(self.field(), rhs.field())),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.field().check(&rhs.field())?;
        self.try_mul(&rhs.inv()?)
    }

    pub fn neg(&self) -> Scalar {
        match &self.0 {
            Repr::Fp { p, v } => Scalar(Repr::Fp { p: *p, v: if *v == 0 { 0 } else { p - v } }),
            Repr::Q(r) => Scalar(Repr::Q(-r)),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.0 {
            Repr::Fp { p, v } => Ok(Scalar(Repr::Fp { p: *p, v: inv_mod(*v, *p) })),
            Repr::Q(r) => Ok(Scalar(Repr::Q(r.recip()))),
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Uniform element of GF(p), or an integer in `[-bound, bound]` over ℚ.
    pub fn random<R: Rng + ?Sized>(field: FieldSpec, rng: &mut R, bound: i64) -> Scalar {
        match field.modulus() {
            Some(p) => Scalar(Repr::Fp { p, v: rng.gen_range(0..p) }),
            None => Scalar::from_i64(field, rng.gen_range(-bound..=bound)),
        }
    }

    /// Parses the text format: a decimal integer for GF(p), `a/b` or `a` for ℚ.
    pub fn parse(field: FieldSpec, s: &str) -> Result<Scalar> {
        let err = || Error::Parse { what: "scalar", input: s.to_string() };
        let t = s.trim();
        match field.modulus() {
            Some(_) => {
                let v: BigInt = t.parse().map_err(|_| err())?;
                Scalar::reduce_rational(field, &BigRational::from_integer(v))
            }
            None => {
                let r = match t.split_once('/') {
                    Some((a, b)) => {
                        let a: BigInt = a.trim().parse().map_err(|_| err())?;
                        let b: BigInt = b.trim().parse().map_err(|_| err())?;
                        if b.is_zero() {
                            return Err(err());
                        }
                        BigRational::new(a, b)
                    }
                    None => BigRational::from_integer(t.parse().map_err(|_| err())?),
                };
                Ok(Scalar(Repr::Q(r)))
            }
        }
    }

    /// Sign of a rational scalar; `None` over prime fields.
    pub fn signum(&self) -> Option<i32> {
        self.as_rational().map(|r| {
            if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }
        })
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // extended Euclid on signed 64-bit
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i64) as u32
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Fp { v, .. } => write!(f, "{v}"),
            Repr::Q(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Q(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}
