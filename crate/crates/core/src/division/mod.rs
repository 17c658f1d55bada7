//! Finite-dimensional algebras given by structure constants, and the bridge
//! to full non-singular subspaces: `x⋆y = (Σ xᵢBᵢ)·y`.

pub mod certificate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{dim_mismatch, Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::{docs_to_matrix, EntryDoc, Matrix};
use crate::packed::{self, Odometer};
use crate::poly::{Irreducibility, Polynomial};
use crate::subspace::{FullNonsingularVerdict, MatrixSubspace, Refutation};

pub(crate) use certificate::CertificateDoc;
pub use certificate::NonSingularityCertificate;

/// An `n`-dimensional algebra with `(x⋆y)ₖ = Σᵢⱼ c[i][j][k] xᵢ yⱼ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionAlgebraSpec {
    field: FieldSpec,
    n: usize,
    c: Vec<Vec<Vec<Scalar>>>,
    certificate: Option<NonSingularityCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisionVerdict {
    Division(NonSingularityCertificate),
    /// `witness ⋆ annihilated = 0` with both nonzero.
    NotDivision { witness: Vec<Scalar>, annihilated: Vec<Scalar> },
    Unknown { samples_tested: u64 },
}

/// Named algebras with a known certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `K[x]/(poly)` in the basis `1, x, …, x^{n−1}`.
    Companion(Polynomial),
    /// `K[J]` with `J² = −I`.
    GaussianPair,
    HamiltonQuaternions,
    Octonions,
}

impl Preset {
    pub fn names() -> &'static [&'static str] {
        &["companion", "gaussian_pair", "hamilton_quaternions", "octonions"]
    }

    /// `companion` needs `poly`, e.g. `"x^3 - 2"`.
    pub fn parse(name: &str, field: FieldSpec, poly: Option<&str>) -> Result<Preset> {
        match name.replace('-', "_").as_str() {
            "companion" => {
                let text = poly.ok_or_else(|| Error::Precondition("companion preset needs a polynomial".into()))?;
                Ok(Preset::Companion(Polynomial::parse(field, text)?))
            }
            "gaussian_pair" => Ok(Preset::GaussianPair),
            "hamilton_quaternions" | "quaternions" => Ok(Preset::HamiltonQuaternions),
            "octonions" => Ok(Preset::Octonions),
            _ => Err(Error::UnknownPreset(name.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Companion(p) => write!(f, "companion({p})"),
            Preset::GaussianPair => f.write_str("gaussian_pair"),
            Preset::HamiltonQuaternions => f.write_str("hamilton_quaternions"),
            Preset::Octonions => f.write_str("octonions"),
        }
    }
}

impl DivisionAlgebraSpec {
    pub fn new(field: FieldSpec, n: usize, c: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        if c.len() != n || c.iter().any(|m| m.len() != n || m.iter().any(|v| v.len() != n)) {
            return Err(dim_mismatch(format!("structure constants must be {n}x{n}x{n}")));
        }
        for s in c.iter().flatten().flatten() {
            field.check(&s.field())?;
        }
        Ok(DivisionAlgebraSpec { field, n, c, certificate: None })
    }

    /// The algebra whose left multiplication by `eᵢ` is `mats[i]`.
    pub fn from_left_mults(field: FieldSpec, mats: &[Matrix]) -> Result<Self> {
        let n = mats.len();
        for m in mats {
            if m.shape() != (n, n) {
                return Err(dim_mismatch(format!("left multiplication of shape {:?} for n = {n}", m.shape())));
            }
            field.check(&m.field())?;
        }
        let c = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| mats[i].get(k, j).clone()).collect()).collect())
            .collect();
        Ok(DivisionAlgebraSpec { field, n, c, certificate: None })
    }

    /// The algebra read off a basis of `v`: `c[i][j][k] = (Bᵢ·eⱼ)ₖ`.
    pub fn from_subspace(v: &MatrixSubspace) -> Result<Self> {
        if v.dim() != v.n() {
            return Err(dim_mismatch(format!("subspace dimension {} != {}", v.dim(), v.n())));
        }
        let mut alg = DivisionAlgebraSpec::from_left_mults(v.field(), v.basis())?;
        alg.certificate = v.certificate().cloned();
        Ok(alg)
    }

    pub fn preset(preset: &Preset, field: FieldSpec, budget: &Budget) -> Result<Self> {
        match preset {
            Preset::Companion(poly) => companion_algebra(poly),
            Preset::GaussianPair => gaussian_pair(field, budget),
            Preset::HamiltonQuaternions => {
                if field.is_finite() {
                    return Err(Error::UnsupportedField(format!(
                        "quaternions split over the finite field {field}"
                    )));
                }
                certified_by_derivation(from_imaginary_triples(field, 3, &[[1, 2, 3]]), budget, true)
            }
            Preset::Octonions => {
                if field.is_finite() {
                    return Err(Error::UnsupportedField(format!("octonions are only provided over q, not {field}")));
                }
                certified_by_derivation(from_imaginary_triples(field, 7, &octonion_triples()?), budget, false)
            }
        }
    }

    pub fn with_certificate(mut self, cert: NonSingularityCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn certificate(&self) -> Option<&NonSingularityCertificate> {
        self.certificate.as_ref()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constants(&self) -> &[Vec<Vec<Scalar>>] {
        &self.c
    }

    fn check_vector(&self, a: &[Scalar]) -> Result<()> {
        if a.len() != self.n {
            return Err(dim_mismatch(format!("vector of length {} in an algebra of dimension {}", a.len(), self.n)));
        }
        a.iter().try_for_each(|s| self.field.check(&s.field()))
    }

    /// The matrix of `y ↦ a⋆y`.
    pub fn left_mult(&self, a: &[Scalar]) -> Result<Matrix> {
        self.check_vector(a)?;
        let n = self.n;
        Ok(Matrix::from_fn(self.field, n, n, |k, j| {
            let mut acc = self.field.zero();
            for (i, ai) in a.iter().enumerate() {
                if !ai.is_zero() {
                    acc = &acc + &(ai * &self.c[i][j][k]);
                }
            }
            acc
        }))
    }

    /// The matrix of `x ↦ x⋆b`.
    pub fn right_mult(&self, b: &[Scalar]) -> Result<Matrix> {
        self.check_vector(b)?;
        let n = self.n;
        Ok(Matrix::from_fn(self.field, n, n, |k, i| {
            let mut acc = self.field.zero();
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    acc = &acc + &(bj * &self.c[i][j][k]);
                }
            }
            acc
        }))
    }

    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
        let m = self.left_mult(x)?;
        self.check_vector(y)?;
        Ok(m.mul(&Matrix::column(self.field, y.to_vec())?)?.to_vector())
    }

    fn unit_vector(&self, i: usize) -> Vec<Scalar> {
        (0..self.n).map(|k| if k == i { self.field.one() } else { self.field.zero() }).collect()
    }

    /// `left_mult(eᵢ)` for every basis vector.
    pub fn left_mults(&self) -> Vec<Matrix> {
        (0..self.n).map(|i| self.left_mult(&self.unit_vector(i)).unwrap()).collect()
    }

    /// `span{left_mult(eᵢ)}` carrying the algebra's certificate.
    pub fn to_subspace(&self) -> Result<MatrixSubspace> {
        let mats = self.left_mults();
        let v = MatrixSubspace::from_basis(self.field, self.n, &mats)?;
        if v.dim() != self.n {
            return Err(Error::DependentBasis);
        }
        Ok(match &self.certificate {
            Some(c) => v.with_certificate(c.clone()),
            None => v,
        })
    }

    /// Decides (finite fields) or certifies / refutes (ℚ) that every nonzero
    /// left multiplication is invertible.
    pub fn is_division(&self, budget: &Budget) -> Result<DivisionVerdict> {
        if self.n == 0 {
            return Err(dim_mismatch("zero-dimensional algebra"));
        }
        let mats = self.left_mults();
        let nn = self.n * self.n;
        let stacked = Matrix::from_fn(self.field, nn, self.n, |r, i| mats[i].vec().entries()[r].clone());
        if let Some(a) = stacked.kernel_basis().first() {
            // left_mult(a) = 0 kills everything
            return Ok(DivisionVerdict::NotDivision { witness: a.to_vector(), annihilated: self.unit_vector(0) });
        }
        let v = self.to_subspace()?;
        Ok(match v.is_full_nonsingular(budget)? {
            FullNonsingularVerdict::Verified(cert) => DivisionVerdict::Division(cert),
            FullNonsingularVerdict::Refuted(Refutation::Singular(m)) => {
                let witness = v.stored_coordinates(&m).ok_or_else(|| Error::Anomaly("witness outside span".into()))?;
                let y = m.kernel_basis().into_iter().next().ok_or_else(|| Error::Anomaly("witness is invertible".into()))?;
                DivisionVerdict::NotDivision { witness, annihilated: y.to_vector() }
            }
            FullNonsingularVerdict::Refuted(Refutation::WrongDimension { .. }) => return Err(Error::DependentBasis),
            FullNonsingularVerdict::Unknown { samples_tested } => DivisionVerdict::Unknown { samples_tested },
        })
    }

    /// Over a finite field: whether every nonzero element has an invertible
    /// right multiplication.
    pub fn right_mults_invertible(&self, budget: &Budget) -> Result<bool> {
        let p = self.field.modulus().ok_or_else(|| Error::UnsupportedField("exhaustive check needs a finite field".into()))?;
        budget.check(packed::pow_sat(p as u64, self.n))?;
        let mut odo = Odometer::new(self.n, p);
        odo.advance();
        while odo.advance().is_some() {
            let b: Vec<Scalar> = odo.digits().iter().map(|&d| self.field.int(d as i64)).collect();
            if !self.right_mult(&b)?.is_invertible() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn companion_algebra(poly: &Polynomial) -> Result<DivisionAlgebraSpec> {
    let field = poly.field();
    match poly.irreducibility()? {
        Irreducibility::Irreducible => {}
        Irreducibility::Reducible(_) => return Err(Error::NotIrreducible),
        Irreducibility::Unknown => return Err(Error::IrreducibilityUnknown),
    }
    let a = Matrix::companion(poly)?;
    let n = a.rows();
    let mats: Vec<Matrix> = (0..n).map(|i| a.pow(i as u32)).collect::<Result<_>>()?;
    let cert = NonSingularityCertificate::IrreduciblePolynomial {
        poly: poly.monic()?,
        base: Matrix::identity(field, n),
        generator: a,
    };
    Ok(DivisionAlgebraSpec::from_left_mults(field, &mats)?.with_certificate(cert))
}

fn gaussian_pair(field: FieldSpec, budget: &Budget) -> Result<DivisionAlgebraSpec> {
    let minus_one = field.int(-1);
    if field.is_finite() && field.elements().any(|x| &x * &x == minus_one) {
        return Err(Error::MinusOneIsSquare(field));
    }
    let j = Matrix::from_ints(field, &[&[0, -1], &[1, 0]]);
    let alg = DivisionAlgebraSpec::from_left_mults(field, &[Matrix::identity(field, 2), j])?;
    certified_by_derivation(Ok(alg), budget, true)
}

/// Attaches the certificate found by the full non-singularity check. With
/// `required`, failing to certify is an error; otherwise the algebra ships
/// with `NonSingularityCertificate::None`.
fn certified_by_derivation(
    alg: Result<DivisionAlgebraSpec>,
    budget: &Budget,
    required: bool,
) -> Result<DivisionAlgebraSpec> {
    let alg = alg?;
    let v = alg.to_subspace()?;
    let cert = if v.field().is_finite() {
        match v.is_full_nonsingular(budget)? {
            FullNonsingularVerdict::Verified(c) => Some(c),
            _ => None,
        }
    } else {
        match certificate::derive(&v, budget)? {
            certificate::Derivation::Certified(c) => Some(c),
            certificate::Derivation::Refuted(_) => return Err(Error::Anomaly("preset algebra has a zero divisor".into())),
            certificate::Derivation::Inconclusive => None,
        }
    };
    match cert {
        Some(c) => Ok(alg.with_certificate(c)),
        None if required => Err(Error::Undecided("could not certify preset algebra".into())),
        None => Ok(alg.with_certificate(NonSingularityCertificate::None)),
    }
}

#[derive(Deserialize)]
struct TripleTable {
    triples: Vec<[usize; 3]>,
}

fn octonion_triples() -> Result<Vec<[usize; 3]>> {
    let table: TripleTable = serde_json::from_str(include_str!("../../fixtures/octonions.json"))
        .map_err(|e| Error::Document(e.to_string()))?;
    Ok(table.triples)
}

/// Unital algebra on `1, i₁, …, i_m` with `i_a² = −1` and, for each triple
/// `(a, b, c)`, `i_a i_b = i_c = −i_b i_a` cyclically.
fn from_imaginary_triples(field: FieldSpec, m: usize, triples: &[[usize; 3]]) -> Result<DivisionAlgebraSpec> {
    let n = m + 1;
    // product of basis vectors a, b as (sign, index)
    let mut table = vec![vec![None::<(i64, usize)>; n]; n];
    for a in 0..n {
        table[0][a] = Some((1, a));
        table[a][0] = Some((1, a));
        if a > 0 {
            table[a][a] = Some((-1, 0));
        }
    }
    for t in triples {
        if t.iter().any(|&x| x == 0 || x > m) {
            return Err(Error::Document(format!("triple {t:?} outside 1..={m}")));
        }
        for r in 0..3 {
            let (a, b, c) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
            table[a][b] = Some((1, c));
            table[b][a] = Some((-1, c));
        }
    }
    let mut c = vec![vec![vec![field.zero(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            let (s, k) = table[a][b].ok_or_else(|| Error::Document(format!("no product for units {a}, {b}")))?;
            c[a][b][k] = field.int(s);
        }
    }
    DivisionAlgebraSpec::new(field, n, c)
}

#[derive(Serialize, Deserialize)]
struct AlgebraDoc {
    field: FieldSpec,
    n: usize,
    c: Vec<Vec<Vec<EntryDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDoc>,
}

impl Serialize for DivisionAlgebraSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = self
            .c
            .iter()
            .map(|m| m.iter().map(|v| v.iter().map(|x| EntryDoc::Text(x.to_string())).collect()).collect())
            .collect();
        AlgebraDoc { field: self.field, n: self.n, c, certificate: self.certificate.as_ref().map(CertificateDoc::from) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisionAlgebraSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = AlgebraDoc::deserialize(d)?;
        let c = doc
            .c
            .iter()
            .map(|m| docs_to_matrix(doc.field, m).map(|mat| (0..mat.rows()).map(|j| mat.row(j)).collect()))
            .collect::<Result<Vec<Vec<Vec<Scalar>>>>>()
            .map_err(D::Error::custom)?;
        let mut alg = DivisionAlgebraSpec::new(doc.field, doc.n, c).map_err(D::Error::custom)?;
        if let Some(cert) = doc.certificate {
            alg.certificate = Some(cert.into_certificate(doc.field).map_err(D::Error::custom)?);
        }
        Ok(alg)
    }
}
