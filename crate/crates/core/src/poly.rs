//! Univariate polynomials over a [`FieldSpec`] and irreducibility testing.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

/// Largest prime modulus for which irreducibility is decided by enumeration.
pub const MAX_ENUM_MODULUS: u32 = 13;
/// Largest degree for which irreducibility is decided by enumeration.
pub const MAX_ENUM_DEGREE: usize = 8;

/// Dense univariate polynomial, coefficients lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "factor")]
pub enum Irreducibility {
    Irreducible,
    /// Certified by a monic factor of degree between 1 and deg − 1.
    Reducible(Polynomial),
    Unknown,
}

impl Polynomial {
    pub fn new(field: FieldSpec, coeffs: Vec<Scalar>) -> Result<Self> {
        for c in &coeffs {
            field.check(&c.field())?;
        }
        let mut p = Polynomial { field, coeffs };
        p.trim();
        Ok(p)
    }

    /// From integer coefficients, lowest degree first.
    pub fn from_ints(field: FieldSpec, coeffs: &[i64]) -> Self {
        let mut p = Polynomial { field, coeffs: coeffs.iter().map(|&c| field.int(c)).collect() };
        p.trim();
        p
    }

    pub fn zero(field: FieldSpec) -> Self {
        Polynomial { field, coeffs: Vec::new() }
    }

    pub fn monomial(field: FieldSpec, c: Scalar, deg: usize) -> Self {
        let mut coeffs = vec![field.zero(); deg + 1];
        coeffs[deg] = c;
        let mut p = Polynomial { field, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn monic(&self) -> Result<Polynomial> {
        let lead = self.lead().ok_or(Error::DivisionByZero)?.inv()?;
        Ok(self.scale(&lead))
    }

    pub fn scale(&self, s: &Scalar) -> Polynomial {
        let mut p = Polynomial { field: self.field, coeffs: self.coeffs.iter().map(|c| c * s).collect() };
        p.trim();
        p
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        let mut p = Polynomial { field: self.field, coeffs };
        p.trim();
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&self.field.int(-1)))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        let mut p = Polynomial { field: self.field, coeffs };
        p.trim();
        p
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = d.lead().unwrap().inv()?;
        let mut r = self.clone();
        let mut q = vec![self.field.zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.lead().unwrap() * &lead_inv;
            let shift = rd - dd;
            q[shift] = c.clone();
            for (k, dc) in d.coeffs.iter().enumerate() {
                r.coeffs[k + shift] = &r.coeffs[k + shift] - &(&c * dc);
            }
            r.trim();
        }
        let mut q = Polynomial { field: self.field, coeffs: q };
        q.trim();
        Ok((q, r))
    }

    /// Parses sums of terms such as `x^3 - 2`, `3x^2+x+1`, `-1/2*x`.
    pub fn parse(field: FieldSpec, s: &str) -> Result<Polynomial> {
        let err = || Error::Parse { what: "polynomial", input: s.to_string() };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut acc = Polynomial::zero(field);
        for term in terms {
            let (sign, body) = match term.as_bytes()[0] {
                b'+' => (1, &term[1..]),
                b'-' => (-1, &term[1..]),
                _ => (1, term),
            };
            let (coef, deg) = match body.find('x') {
                None => (Scalar::parse(field, body)?, 0),
                Some(pos) => {
                    let c = body[..pos].trim_end_matches('*');
                    let c = if c.is_empty() { field.one() } else { Scalar::parse(field, c)? };
                    let rest = &body[pos + 1..];
                    let deg = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').and_then(|d| d.parse::<usize>().ok()).ok_or_else(err)?
                    };
                    (c, deg)
                }
            };
            let coef = if sign < 0 { -coef } else { coef };
            acc = acc.add(&Polynomial::monomial(field, coef, deg));
        }
        Ok(acc)
    }

    /// Decides irreducibility, with a witness factor on reducible inputs.
    ///
    /// Over GF(p) every monic candidate factor up to half the degree is tried,
    /// so the degree and modulus are bounded. Over ℚ, degree ≤ 3 is decided by
    /// the rational root theorem; higher degrees are certified irreducible by
    /// reduction modulo a small prime when possible and are otherwise
    /// `Unknown` unless a rational root exhibits a linear factor.
    pub fn irreducibility(&self) -> Result<Irreducibility> {
        let deg = self.degree().filter(|&d| d >= 1).ok_or(Error::DegreeZero)?;
        match self.field.modulus() {
            Some(p) => {
                if p > MAX_ENUM_MODULUS || deg > MAX_ENUM_DEGREE {
                    return Err(Error::BoundExceeded(format!(
                        "degree {deg} over GF({p}) exceeds degree {MAX_ENUM_DEGREE} / modulus {MAX_ENUM_MODULUS}"
                    )));
                }
                Ok(self.irreducibility_by_enumeration())
            }
            None => self.irreducibility_over_q(),
        }
    }

    fn irreducibility_by_enumeration(&self) -> Irreducibility {
        let deg = self.degree().unwrap();
        let p = self.field.modulus().unwrap() as u64;
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for code in 0..count {
                let mut coeffs: Vec<Scalar> = Vec::with_capacity(d + 1);
                let mut c = code;
                for _ in 0..d {
                    coeffs.push(self.field.int((c % p) as i64));
                    c /= p;
                }
                coeffs.push(self.field.one());
                let cand = Polynomial { field: self.field, coeffs };
                let (_, r) = self.div_rem(&cand).unwrap();
                if r.is_zero() {
                    return Irreducibility::Reducible(cand);
                }
            }
        }
        Irreducibility::Irreducible
    }

    fn irreducibility_over_q(&self) -> Result<Irreducibility> {
        let deg = self.degree().unwrap();
        if deg == 1 {
            return Ok(Irreducibility::Irreducible);
        }
        let ints = self.primitive_integer_coeffs();
        if let Some(root) = rational_root(&ints) {
            let factor = Polynomial {
                field: self.field,
                coeffs: vec![Scalar::from_rational(-root), self.field.one()],
            };
            return Ok(Irreducibility::Reducible(factor));
        }
        if deg <= 3 {
            return Ok(Irreducibility::Irreducible);
        }
        for q in [2u64, 3, 5, 7, 11, 13] {
            let qb = BigInt::from(q);
            if (ints.last().unwrap() % &qb).is_zero() {
                continue;
            }
            let fq = FieldSpec::prime(q).unwrap();
            let reduced = Polynomial::new(
                fq,
                ints.iter()
                    .map(|c| Scalar::reduce_rational(fq, &BigRational::from_integer(c.clone())).unwrap())
                    .collect(),
            )?;
            if reduced.degree() == Some(deg)
                && matches!(reduced.irreducibility(), Ok(Irreducibility::Irreducible))
            {
                return Ok(Irreducibility::Irreducible);
            }
        }
        Ok(Irreducibility::Unknown)
    }

    /// Integer multiple of a rational polynomial with content 1.
    fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        let rats: Vec<&BigRational> = self.coeffs.iter().map(|c| c.as_rational().unwrap()).collect();
        let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = rats.iter().map(|r| (*r * &lcm).to_integer()).collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &content).collect()
    }
}

/// Smallest-height rational root of an integer polynomial, if any.
fn rational_root(ints: &[BigInt]) -> Option<BigRational> {
    if ints[0].is_zero() {
        return Some(BigRational::zero());
    }
    let lead = ints.last().unwrap();
    let nums = divisors(&ints[0].abs())?;
    let dens = divisors(&lead.abs())?;
    for d in &dens {
        for n in &nums {
            for cand in [BigRational::new(n.clone(), d.clone()), BigRational::new(-n.clone(), d.clone())] {
                let v = ints
                    .iter()
                    .rev()
                    .fold(BigRational::zero(), |acc, c| acc * &cand + BigRational::from_integer(c.clone()));
                if v.is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    // trial division; coefficients beyond this range are outside the desk-scale scope
    let n = n.to_u64().filter(|&v| v <= 1 << 40)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = match c.signum() {
                Some(-1) => (true, -c),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coef = k == 0 || !mag.is_one();
            if show_coef {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            field: FieldSpec,
            poly: String,
            coeffs: Vec<String>,
        }
        Doc { field: self.field, poly: self.to_string(), coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            field: FieldSpec,
            poly: String,
        }
        let doc = Doc::deserialize(d)?;
        Polynomial::parse(doc.field, &doc.poly).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn cube_root_of_two_irreducible() {
        let p = Polynomial::from_ints(FieldSpec::RATIONALS, &[-2, 0, 0, 1]);
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Irreducible);
    }

    #[test]
    fn x2_plus_1_over_gf2_splits() {
        let p = Polynomial::from_ints(gf(2), &[1, 0, 1]);
        let expected = Polynomial::from_ints(gf(2), &[1, 1]);
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Reducible(expected));
    }

    #[test]
    fn x2_x_1_over_gf2_irreducible() {
        let p = Polynomial::from_ints(gf(2), &[1, 1, 1]);
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Irreducible);
    }

    #[test]
    fn bounds_and_degree_zero() {
        let c = Polynomial::from_ints(gf(3), &[2]);
        assert_eq!(c.irreducibility(), Err(Error::DegreeZero));
        let big = Polynomial::from_ints(gf(17), &[1, 0, 1]);
        assert!(matches!(big.irreducibility(), Err(Error::BoundExceeded(_))));
        let deg9 = Polynomial::monomial(gf(2), gf(2).one(), 9).add(&Polynomial::from_ints(gf(2), &[1]));
        assert!(matches!(deg9.irreducibility(), Err(Error::BoundExceeded(_))));
    }

    #[test]
    fn rational_higher_degree() {
        let q = FieldSpec::RATIONALS;
        // x^4 + 1 is irreducible over Q but reducible mod every prime
        let p = Polynomial::from_ints(q, &[1, 0, 0, 0, 1]);
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Unknown);
        // x^4 + x + 1 is irreducible mod 2
        let p = Polynomial::from_ints(q, &[1, 1, 0, 0, 1]);
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Irreducible);
        // (2x - 1)(x^3 + 5) has the rational root 1/2
        let p = Polynomial::from_ints(q, &[-1, 2]).mul(&Polynomial::from_ints(q, &[5, 0, 0, 1]));
        let Irreducibility::Reducible(f) = p.irreducibility().unwrap() else { panic!() };
        assert!(p.div_rem(&f).unwrap().1.is_zero());
    }

    #[test]
    fn rational_quadratic_with_fraction_coeffs() {
        let q = FieldSpec::RATIONALS;
        let p = Polynomial::parse(q, "1/4*x^2 - 1").unwrap();
        let Irreducibility::Reducible(f) = p.irreducibility().unwrap() else { panic!() };
        assert_eq!(f.degree(), Some(1));
        assert!(p.div_rem(&f).unwrap().1.is_zero());
        let p = Polynomial::parse(q, "x^2 - 2").unwrap();
        assert_eq!(p.irreducibility().unwrap(), Irreducibility::Irreducible);
    }

    #[test]
    fn parse_and_display() {
        let q = FieldSpec::RATIONALS;
        let p = Polynomial::parse(q, "x^3 - 2").unwrap();
        assert_eq!(p, Polynomial::from_ints(q, &[-2, 0, 0, 1]));
        assert_eq!(p.to_string(), "x^3 - 2");
        let p = Polynomial::parse(q, "-x^2 + 3x - 1/2").unwrap();
        assert_eq!(p.to_string(), "-x^2 + 3x - 1/2");
        assert!(Polynomial::parse(q, "x^").is_err());
        let p = Polynomial::parse(gf(2), "x^2+x+1").unwrap();
        assert_eq!(p, Polynomial::from_ints(gf(2), &[1, 1, 1]));
    }

    #[test]
    fn division() {
        let q = FieldSpec::RATIONALS;
        let a = Polynomial::from_ints(q, &[-1, 0, 1]);
        let b = Polynomial::from_ints(q, &[1, 1]);
        let (quo, r) = a.div_rem(&b).unwrap();
        assert_eq!(quo, Polynomial::from_ints(q, &[-1, 1]));
        assert!(r.is_zero());
    }
}
