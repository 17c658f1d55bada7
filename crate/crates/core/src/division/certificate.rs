//! Proof objects for "every nonzero member of V is invertible".

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::{Matrix, NestedMatrixDoc};
use crate::mpoly::{generic_det, MPoly};
use crate::packed;
use crate::poly::{Irreducibility, Polynomial};
use crate::subspace::MatrixSubspace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonSingularityCertificate {
    /// All `count` nonzero members were checked one by one.
    FiniteFieldExhaustive { count: u64 },
    /// `V = base · K[generator]` where `poly`, the minimal polynomial of
    /// `generator`, is irreducible of degree `n`; `K[generator]` is then a
    /// field.
    IrreduciblePolynomial { poly: Polynomial, base: Matrix, generator: Matrix },
    /// `det(Σ tᵢ basisᵢ) = scale · (tᵗ·gram·t)^exponent` with `gram`
    /// positive definite, so the determinant has no nonzero rational root.
    PositiveDefiniteForm { basis: Vec<Matrix>, gram: Matrix, scale: Scalar, exponent: u32 },
    None,
}

/// Outcome of trying to build a certificate from the structure of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Certified(NonSingularityCertificate),
    /// A nonzero singular member found along the way.
    Refuted(Matrix),
    Inconclusive,
}

impl NonSingularityCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            NonSingularityCertificate::FiniteFieldExhaustive { .. } => "finite_field_exhaustive",
            NonSingularityCertificate::IrreduciblePolynomial { .. } => "irreducible_polynomial",
            NonSingularityCertificate::PositiveDefiniteForm { .. } => "positive_definite_form",
            NonSingularityCertificate::None => "none",
        }
    }

    /// Re-checks the certificate against `v` from scratch.
    pub fn verify(&self, v: &MatrixSubspace, budget: &Budget) -> Result<bool> {
        let n = v.n();
        if v.dim() != n {
            return Ok(false);
        }
        match self {
            NonSingularityCertificate::None => Ok(false),
            NonSingularityCertificate::FiniteFieldExhaustive { count } => {
                let Some(q) = v.field().order() else { return Ok(false) };
                let total = packed::pow_sat(q, n);
                if *count as u128 != total - 1 || !budget.allows(total) {
                    return Ok(false);
                }
                let fresh = MatrixSubspace::from_basis(v.field(), n, v.basis())?;
                Ok(matches!(
                    fresh.is_full_nonsingular(budget)?,
                    crate::subspace::FullNonsingularVerdict::Verified(NonSingularityCertificate::FiniteFieldExhaustive { .. })
                ))
            }
            NonSingularityCertificate::IrreduciblePolynomial { poly, base, generator } => {
                if poly.field() != v.field() || poly.degree() != Some(n) || !base.is_invertible() {
                    return Ok(false);
                }
                if generator.minimal_polynomial()? != poly.monic()? {
                    return Ok(false);
                }
                if !matches!(poly.irreducibility(), Ok(Irreducibility::Irreducible)) {
                    return Ok(false);
                }
                Ok(krylov_span(base, generator, n)? == *v)
            }
            NonSingularityCertificate::PositiveDefiniteForm { basis, gram, scale, exponent } => {
                if v.field().is_finite() || basis.len() != n || 2 * *exponent as usize != n || scale.is_zero() {
                    return Ok(false);
                }
                if MatrixSubspace::from_basis(v.field(), n, basis)? != *v || !is_positive_definite(gram) {
                    return Ok(false);
                }
                let det = generic_det(basis, budget.monomial_cap)?;
                Ok(det == quadratic_form(gram).pow(*exponent).scale(scale))
            }
        }
    }
}

/// `span{base·Cᵏ : k < n}`.
fn krylov_span(base: &Matrix, c: &Matrix, n: usize) -> Result<MatrixSubspace> {
    let mut mats = Vec::with_capacity(n);
    let mut acc = base.clone();
    for _ in 0..n {
        mats.push(acc.clone());
        acc = acc.mul(c)?;
    }
    MatrixSubspace::from_basis(base.field(), base.rows(), &mats)
}

/// `Σ gᵢⱼ tᵢ tⱼ`.
pub fn quadratic_form(gram: &Matrix) -> MPoly {
    let k = gram.rows();
    let field = gram.field();
    let mut q = MPoly::zero(field, k);
    for i in 0..k {
        for j in 0..k {
            let g = gram.get(i, j);
            if !g.is_zero() {
                let term = MPoly::var(field, k, i).mul(&MPoly::var(field, k, j)).scale(g);
                q = q.add(&term);
            }
        }
    }
    q
}

/// Sylvester's criterion on a symmetric rational matrix.
pub fn is_positive_definite(g: &Matrix) -> bool {
    if g.field().is_finite() || !g.is_square() || *g != g.transpose() {
        return false;
    }
    (1..=g.rows()).all(|k| {
        let minor = Matrix::from_fn(g.field(), k, k, |i, j| g.get(i, j).clone());
        matches!(minor.det().ok().and_then(|d| d.signum()), Some(1))
    })
}

/// Tries the structural routes in turn: `V = B·K[C]` with an irreducible
/// minimal polynomial, then (over ℚ, even `n`) a determinant that is a power
/// of a positive definite quadratic form.
pub fn derive(v: &MatrixSubspace, budget: &Budget) -> Result<Derivation> {
    let n = v.n();
    if v.dim() != n || n == 0 {
        return Ok(Derivation::Inconclusive);
    }
    match derive_companion(v)? {
        Derivation::Inconclusive => {}
        done => return Ok(done),
    }
    if !v.field().is_finite() && n % 2 == 0 {
        for basis in [v.basis().to_vec(), v.canonical_basis()] {
            if let Some(cert) = derive_positive_definite(&basis, budget)? {
                return Ok(Derivation::Certified(cert));
            }
        }
    }
    Ok(Derivation::Inconclusive)
}

fn derive_companion(v: &MatrixSubspace) -> Result<Derivation> {
    let n = v.n();
    let mut candidates = v.basis().to_vec();
    candidates.extend(v.canonical_basis());
    for base in candidates.iter().filter(|b| b.is_invertible()) {
        let base_inv = base.inverse()?;
        for other in &candidates {
            let c = base_inv.mul(other)?;
            let poly = c.minimal_polynomial()?;
            if poly.degree() != Some(n) || krylov_span(base, &c, n)? != *v {
                continue;
            }
            match poly.irreducibility() {
                Ok(Irreducibility::Irreducible) => {
                    return Ok(Derivation::Certified(NonSingularityCertificate::IrreduciblePolynomial {
                        poly,
                        base: base.clone(),
                        generator: c,
                    }))
                }
                Ok(Irreducibility::Reducible(g)) => return Ok(Derivation::Refuted(base.mul(&c.poly_eval(&g)?)?)),
                Ok(Irreducibility::Unknown) | Err(Error::BoundExceeded(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Derivation::Inconclusive)
}

fn rational_root(r: &BigRational, k: u32) -> Option<BigRational> {
    if !r.is_positive() {
        return None;
    }
    let root = |x: &BigInt| -> Option<BigInt> {
        let y = x.nth_root(k);
        (num_traits::pow(y.clone(), k as usize) == *x).then_some(y)
    };
    Some(BigRational::new(root(r.numer())?, root(r.denom())?))
}

/// Reads a candidate `c·Q(t)^k` off the values of the determinant at `eᵢ`
/// and `eᵢ + eⱼ`, then checks it coefficient by coefficient.
fn derive_positive_definite(basis: &[Matrix], budget: &Budget) -> Result<Option<NonSingularityCertificate>> {
    let field = FieldSpec::RATIONALS;
    let n = basis.len();
    let k = (n / 2) as u32;
    let det = match generic_det(basis, budget.monomial_cap) {
        Ok(d) => d,
        Err(Error::BudgetExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let point = |idx: &[usize]| -> Vec<Scalar> {
        (0..n).map(|i| if idx.contains(&i) { field.one() } else { field.zero() }).collect()
    };
    let scale = det.eval(&point(&[0]));
    if scale.is_zero() {
        return Ok(None);
    }
    let ratio = |idx: &[usize]| -> Option<BigRational> {
        let d = det.eval(&point(idx));
        rational_root(d.try_div(&scale).ok()?.as_rational()?, k)
    };
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        match ratio(&[i]) {
            Some(q) => diag.push(q),
            None => return Ok(None),
        }
    }
    let mut g = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        g[i][i] = diag[i].clone();
        for j in i + 1..n {
            let Some(s) = ratio(&[i, j]) else { return Ok(None) };
            let off = (s - &diag[i] - &diag[j]) / BigInt::from(2);
            g[i][j] = off.clone();
            g[j][i] = off;
        }
    }
    let gram = Matrix::from_fn(field, n, n, |i, j| Scalar::from_rational(g[i][j].clone()));
    if !is_positive_definite(&gram) || det != quadratic_form(&gram).pow(k).scale(&scale) {
        return Ok(None);
    }
    Ok(Some(NonSingularityCertificate::PositiveDefiniteForm { basis: basis.to_vec(), gram, scale, exponent: k }))
}

/// JSON form of a certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(crate) enum CertificateDoc {
    FiniteFieldExhaustive {
        count: u64,
    },
    IrreduciblePolynomial {
        poly: Polynomial,
        base: NestedMatrixDoc,
        generator: NestedMatrixDoc,
    },
    PositiveDefiniteForm {
        basis: Vec<NestedMatrixDoc>,
        gram: NestedMatrixDoc,
        scale: String,
        exponent: u32,
        /// Expanded determinant, informational only.
        #[serde(default, skip_deserializing)]
        determinant: String,
    },
    None,
}

impl From<&NonSingularityCertificate> for CertificateDoc {
    fn from(c: &NonSingularityCertificate) -> Self {
        match c {
            NonSingularityCertificate::FiniteFieldExhaustive { count } => CertificateDoc::FiniteFieldExhaustive { count: *count },
            NonSingularityCertificate::IrreduciblePolynomial { poly, base, generator } => {
                CertificateDoc::IrreduciblePolynomial {
                    poly: poly.clone(),
                    base: NestedMatrixDoc::from_matrix(base),
                    generator: NestedMatrixDoc::from_matrix(generator),
                }
            }
            NonSingularityCertificate::PositiveDefiniteForm { basis, gram, scale, exponent } => {
                let determinant = format!("{} * ({})^{}", scale, quadratic_form(gram), exponent);
                CertificateDoc::PositiveDefiniteForm {
                    basis: basis.iter().map(NestedMatrixDoc::from_matrix).collect(),
                    gram: NestedMatrixDoc::from_matrix(gram),
                    scale: scale.to_string(),
                    exponent: *exponent,
                    determinant,
                }
            }
            NonSingularityCertificate::None => CertificateDoc::None,
        }
    }
}

impl CertificateDoc {
    pub(crate) fn into_certificate(self, field: FieldSpec) -> Result<NonSingularityCertificate> {
        Ok(match self {
            CertificateDoc::FiniteFieldExhaustive { count } => NonSingularityCertificate::FiniteFieldExhaustive { count },
            CertificateDoc::IrreduciblePolynomial { poly, base, generator } => {
                poly.field().check(&field)?;
                NonSingularityCertificate::IrreduciblePolynomial {
                    poly,
                    base: base.to_matrix(field)?,
                    generator: generator.to_matrix(field)?,
                }
            }
            CertificateDoc::PositiveDefiniteForm { basis, gram, scale, exponent, .. } => {
                NonSingularityCertificate::PositiveDefiniteForm {
                basis: basis.iter().map(|m| m.to_matrix(field)).collect::<Result<_>>()?,
                gram: gram.to_matrix(field)?,
                scale: Scalar::parse(field, &scale)?,
                exponent,
            }
            }
            CertificateDoc::None => NonSingularityCertificate::None,
        })
    }
}

impl Serialize for NonSingularityCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateDoc::from(self).serialize(s)
    }
}
