//! Linear subspaces of `M_n(K)`: canonical forms, the maximal singular
//! subspaces `L_D` / `L^H`, singularity tests and the kernel-type /
//! image-type classifier.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::division::certificate::{self, Derivation, NonSingularityCertificate};
use crate::error::{dim_mismatch, Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::intdet;
use crate::matrix::{Matrix, NestedMatrixDoc};
use crate::mpoly::{generic_det, MPoly};
use crate::packed::{self, Odometer};

/// A subspace of `M_n(K)`.
///
/// The basis supplied at construction is kept (minus dependent members) so
/// that coordinates and certificates can refer to it; equality and
/// membership go through the reduced echelon form of the vectorized basis.
#[derive(Clone)]
pub struct MatrixSubspace {
    field: FieldSpec,
    n: usize,
    basis: Vec<Matrix>,
    canonical: Matrix,
    pivots: Vec<usize>,
    certificate: Option<NonSingularityCertificate>,
}

impl PartialEq for MatrixSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.canonical == other.canonical
    }
}

impl Eq for MatrixSubspace {}

impl fmt::Debug for MatrixSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSubspace")
            .field("field", &self.field)
            .field("n", &self.n)
            .field("basis", &self.basis)
            .finish()
    }
}

/// The two shapes of a maximal singular subspace. Vectors are normalized so
/// their first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaximalSingularType {
    /// `L_D` for `D = span(X)`: every member kills `X`.
    KernelType(Matrix),
    /// `L^H` for `H = {v : Yᵗv = 0}`: every member has its image in `H`.
    ImageType(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularityVerdict {
    Singular,
    ContainsInvertible(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation {
    WrongDimension { dim: usize, n: usize },
    /// A nonzero singular member.
    Singular(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullNonsingularVerdict {
    Verified(NonSingularityCertificate),
    Refuted(Refutation),
    Unknown { samples_tested: u64 },
}

impl FullNonsingularVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, FullNonsingularVerdict::Verified(_))
    }
}

/// Scales a nonzero vector so its first nonzero entry is 1.
pub fn normalize(v: &Matrix) -> Result<Matrix> {
    let (_, lead) = v.first_nonzero().ok_or(Error::ZeroVector)?;
    v.scale(&lead.inv()?)
}

fn vec_row(m: &Matrix) -> Vec<Scalar> {
    m.vec().to_vector()
}

impl MatrixSubspace {
    /// Span of `mats`; dependent members are dropped from the stored basis.
    pub fn from_basis(field: FieldSpec, n: usize, mats: &[Matrix]) -> Result<Self> {
        for m in mats {
            if m.shape() != (n, n) {
                return Err(dim_mismatch(format!("basis matrix {:?} in M_{n}", m.shape())));
            }
            field.check(&m.field())?;
        }
        let mut basis: Vec<Matrix> = Vec::new();
        let mut current = MatrixSubspace::zero(field, n);
        for m in mats {
            if !current.contains(m) {
                basis.push(m.clone());
                current = MatrixSubspace::canonicalize(field, n, basis.clone());
            }
        }
        Ok(current)
    }

    fn canonicalize(field: FieldSpec, n: usize, basis: Vec<Matrix>) -> Self {
        let rows: Vec<Vec<Scalar>> = basis.iter().map(vec_row).collect();
        let (canonical, pivots) = if rows.is_empty() {
            (Matrix::zeros(field, 0, n * n), Vec::new())
        } else {
            let (r, piv) = Matrix::from_rows(field, rows).unwrap().rref();
            let keep = piv.len();
            let trimmed = Matrix::from_fn(field, keep, n * n, |i, j| r.get(i, j).clone());
            (trimmed, piv)
        };
        MatrixSubspace { field, n, basis, canonical, pivots, certificate: None }
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        MatrixSubspace::canonicalize(field, n, Vec::new())
    }

    pub fn full(field: FieldSpec, n: usize) -> Self {
        let units: Vec<Matrix> = (0..n * n).map(|k| Matrix::unit(field, n, k % n, k / n)).collect();
        MatrixSubspace::canonicalize(field, n, units)
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

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// The basis as supplied (independent members only).
    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    /// The reduced echelon basis, unvectorized.
    pub fn canonical_basis(&self) -> Vec<Matrix> {
        (0..self.dim())
            .map(|i| Matrix::unvec(&Matrix::column(self.field, self.canonical.row(i)).unwrap(), self.n).unwrap())
            .collect()
    }

    /// Vectorized canonical basis as rows of a `dim x n²` matrix.
    pub fn canonical_rows(&self) -> &Matrix {
        &self.canonical
    }

    fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (r, &pc) in self.pivots.iter().enumerate() {
            if v[pc].is_zero() {
                continue;
            }
            let f = v[pc].clone();
            for (j, x) in v.iter_mut().enumerate() {
                let c = self.canonical.get(r, j);
                if !c.is_zero() {
                    *x = &*x - &(&f * c);
                }
            }
        }
        v
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.shape() == (self.n, self.n)
            && m.field() == self.field
            && self.reduce(vec_row(m)).iter().all(Scalar::is_zero)
    }

    /// Coordinates in the canonical basis.
    pub fn coordinates(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        if !self.contains(m) {
            return None;
        }
        let v = vec_row(m);
        Some(self.pivots.iter().map(|&pc| v[pc].clone()).collect())
    }

    /// Coordinates in the stored basis.
    pub fn stored_coordinates(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        if !self.contains(m) {
            return None;
        }
        let nn = self.n * self.n;
        let a = Matrix::from_fn(self.field, nn, self.basis.len(), |i, j| self.basis[j].vec().entries()[i].clone());
        a.solve(&m.vec()).ok().map(|x| x.to_vector())
    }

    /// `Σ cᵢ Bᵢ` over the stored basis.
    pub fn combine(&self, coeffs: &[Scalar]) -> Matrix {
        combine(self.field, self.n, &self.basis, coeffs)
    }

    pub fn sum(&self, other: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.check_compatible(other)?;
        let mut mats = self.basis.clone();
        mats.extend(other.basis.iter().cloned());
        MatrixSubspace::from_basis(self.field, self.n, &mats)
    }

    pub fn intersect(&self, other: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.check_compatible(other)?;
        let (a, b) = (self.basis.len(), other.basis.len());
        if a == 0 || b == 0 {
            return Ok(MatrixSubspace::zero(self.field, self.n));
        }
        let nn = self.n * self.n;
        // Σ xᵢ Aᵢ − Σ yⱼ Bⱼ = 0
        let sys = Matrix::from_fn(self.field, nn, a + b, |i, j| {
            if j < a {
                self.basis[j].vec().entries()[i].clone()
            } else {
                -&other.basis[j - a].vec().entries()[i]
            }
        });
        let mats: Vec<Matrix> = sys
            .kernel_basis()
            .iter()
            .map(|k| self.combine(&k.entries()[..a]))
            .collect();
        MatrixSubspace::from_basis(self.field, self.n, &mats)
    }

    fn check_compatible(&self, other: &MatrixSubspace) -> Result<()> {
        self.field.check(&other.field)?;
        if self.n != other.n {
            return Err(dim_mismatch(format!("subspaces of M_{} and M_{}", self.n, other.n)));
        }
        Ok(())
    }

    /// `L_D = {M : MX = 0}` for `D = span(X)`.
    pub fn make_ld(x: &Matrix) -> Result<MatrixSubspace> {
        let (n, field) = check_vector(x)?;
        // vec(MX) = (Xᵗ ⊗ I) vec(M)
        let op = Matrix::kron(&x.transpose(), &Matrix::identity(field, n))?;
        MatrixSubspace::from_vec_kernel(field, n, &op)
    }

    /// `L^H = {M : YᵗM = 0}` for `H = {v : Yᵗv = 0}`.
    pub fn make_lh(y: &Matrix) -> Result<MatrixSubspace> {
        let (n, field) = check_vector(y)?;
        // vec(YᵗM) = (I ⊗ Yᵗ) vec(M)
        let op = Matrix::kron(&Matrix::identity(field, n), &y.transpose())?;
        MatrixSubspace::from_vec_kernel(field, n, &op)
    }

    /// Subspace of matrices whose `vec` lies in the kernel of `op`.
    pub fn from_vec_kernel(field: FieldSpec, n: usize, op: &Matrix) -> Result<MatrixSubspace> {
        let mats: Vec<Matrix> = op.kernel_basis().iter().map(|k| Matrix::unvec(k, n)).collect::<Result<_>>()?;
        MatrixSubspace::from_basis(field, n, &mats)
    }

    /// Tells kernel-type from image-type for a subspace of dimension `n² − n`.
    ///
    /// Computes the common kernel of the basis and the common left kernel
    /// (normal vectors of the sum of images). A maximal singular subspace has
    /// exactly one of them one-dimensional; anything else means the subspace
    /// was not maximal singular to begin with.
    pub fn classify_maximal_singular(&self) -> Result<MaximalSingularType> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Precondition("maximal singular subspaces need n >= 2".into()));
        }
        if self.dim() != n * n - n {
            return Err(Error::NotMaximalSingular(format!("dimension {} != {}", self.dim(), n * n - n)));
        }
        let basis = self.canonical_basis();
        let stacked = Matrix::from_fn(self.field, n * basis.len(), n, |r, c| basis[r / n].get(r % n, c).clone());
        let stacked_t = Matrix::from_fn(self.field, n * basis.len(), n, |r, c| basis[r / n].get(c, r % n).clone());
        let kernel = stacked.kernel_basis();
        let normals = stacked_t.kernel_basis();
        match (kernel.len() == 1, normals.len() == 1) {
            (true, false) => Ok(MaximalSingularType::KernelType(normalize(&kernel[0])?)),
            (false, true) => Ok(MaximalSingularType::ImageType(normalize(&normals[0])?)),
            (k, i) => Err(Error::NotMaximalSingular(format!(
                "common kernel dim {}, common normal dim {} (kernel-type {k}, image-type {i})",
                kernel.len(),
                normals.len()
            ))),
        }
    }

    /// Decides whether the subspace avoids `GL_n`.
    ///
    /// Finite fields: all `q^dim − 1` nonzero members are scanned. ℚ: the
    /// subspace is singular iff `det(Σ tᵢBᵢ)` vanishes identically, which is
    /// decided on the grid `{0..n}^dim` when that grid is small and by
    /// symbolic expansion otherwise. The witness is any invertible member
    /// found on the way.
    pub fn is_singular(&self, budget: &Budget) -> Result<SingularityVerdict> {
        if self.dim() == 0 {
            return Ok(SingularityVerdict::Singular);
        }
        match self.field.modulus() {
            Some(p) => {
                budget.check(packed::pow_sat(p as u64, self.dim()))?;
                Ok(match self.scan_finite(p, true) {
                    Some(m) => SingularityVerdict::ContainsInvertible(m),
                    None => SingularityVerdict::Singular,
                })
            }
            None => {
                let ints = IntegerBasis::new(self);
                // det(Σ tᵢBᵢ) has degree ≤ n in each tᵢ, so it vanishes
                // identically iff it vanishes on the grid {0..n}^dim
                if packed::pow_sat(self.n as u64 + 1, self.dim()) <= GRID_LIMIT {
                    let mut odo = Odometer::new(self.dim(), self.n as u32 + 1);
                    odo.advance();
                    while odo.advance().is_some() {
                        let pt: Vec<i64> = odo.digits().iter().map(|&d| d as i64).collect();
                        if let Some(m) = ints.invertible_member(&pt) {
                            return Ok(SingularityVerdict::ContainsInvertible(m));
                        }
                    }
                    return Ok(SingularityVerdict::Singular);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
                let mut probe = |tries: usize| {
                    (0..tries).find_map(|_| {
                        let pt: Vec<i64> = (0..self.dim()).map(|_| rng.gen_range(-PROBE_RANGE..=PROBE_RANGE)).collect();
                        ints.invertible_member(&pt)
                    })
                };
                if let Some(m) = probe(GRID_PROBE) {
                    return Ok(SingularityVerdict::ContainsInvertible(m));
                }
                let det = generic_det(&self.basis, budget.monomial_cap)?;
                if det.is_zero() {
                    return Ok(SingularityVerdict::Singular);
                }
                // a nonzero form of degree n vanishes at a random point of
                // [-R, R]^dim with probability at most n / (2R + 1)
                if let Some(m) = probe(budget.samples.max(GRID_PROBE as u64) as usize) {
                    return Ok(SingularityVerdict::ContainsInvertible(m));
                }
                let point = nonvanishing_grid_point(&det, self.n)
                    .ok_or_else(|| Error::Anomaly("nonzero determinant form vanishes on its grid".into()))?;
                Ok(SingularityVerdict::ContainsInvertible(self.combine(&point)))
            }
        }
    }

    /// First nonzero member (odometer order over the stored basis) that is
    /// invertible (`want_invertible`) or singular (otherwise).
    fn scan_finite(&self, p: u32, want_invertible: bool) -> Option<Matrix> {
        let n = self.n;
        let res: Vec<Vec<u32>> = self.basis.iter().map(|b| b.vec().residues()).collect();
        let mut odo = Odometer::new(res.len(), p);
        let mut buf = vec![0u32; n * n];
        let mut scratch = Vec::new();
        odo.advance();
        while odo.advance().is_some() {
            buf.iter_mut().for_each(|x| *x = 0);
            for (c, b) in odo.digits().iter().zip(&res) {
                if *c == 0 {
                    continue;
                }
                for (x, y) in buf.iter_mut().zip(b) {
                    *x = ((*x as u64 + *c as u64 * *y as u64) % p as u64) as u32;
                }
            }
            if packed::is_invertible_vec(&buf, n, p, &mut scratch) == want_invertible {
                let v = Matrix::from_residues(self.field, n * n, 1, &buf);
                return Some(Matrix::unvec(&v, n).unwrap());
            }
        }
        None
    }

    /// Decides (finite fields) or certifies / refutes (ℚ) that every nonzero
    /// member is invertible and `dim = n`.
    ///
    /// Over ℚ, `Verified` requires a certificate: an attached one is
    /// re-verified, otherwise one is derived from the subspace structure.
    /// Without a certificate the routine hunts for a singular member on a
    /// small grid and at random points, and answers `Unknown` if none turns up.
    pub fn is_full_nonsingular(&self, budget: &Budget) -> Result<FullNonsingularVerdict> {
        let n = self.n;
        let dim = self.dim();
        if dim != n {
            if dim > n {
                if let Some(w) = self.singular_member_by_dimension() {
                    return Ok(FullNonsingularVerdict::Refuted(Refutation::Singular(w)));
                }
            }
            return Ok(FullNonsingularVerdict::Refuted(Refutation::WrongDimension { dim, n }));
        }
        if let Some(p) = self.field.modulus() {
            if budget.allows(packed::pow_sat(p as u64, dim)) {
                return Ok(match self.scan_finite(p, false) {
                    Some(w) => FullNonsingularVerdict::Refuted(Refutation::Singular(w)),
                    None => FullNonsingularVerdict::Verified(NonSingularityCertificate::FiniteFieldExhaustive {
                        count: packed::pow_sat(p as u64, dim) as u64 - 1,
                    }),
                });
            }
        }
        if let Some(cert) = &self.certificate {
            if cert.verify(self, budget)? {
                return Ok(FullNonsingularVerdict::Verified(cert.clone()));
            }
        }
        match certificate::derive(self, budget)? {
            Derivation::Certified(cert) => return Ok(FullNonsingularVerdict::Verified(cert)),
            Derivation::Refuted(w) => return Ok(FullNonsingularVerdict::Refuted(Refutation::Singular(w))),
            Derivation::Inconclusive => {}
        }
        if self.field.is_finite() {
            budget.check(packed::pow_sat(self.field.order().unwrap(), dim))?;
        }
        self.search_singular_member(budget)
    }

    /// For `dim > n`, members killing `e₁` form a nonzero subspace.
    fn singular_member_by_dimension(&self) -> Option<Matrix> {
        let e1 = Matrix::basis_vector(self.field, self.n, 0);
        let ld = MatrixSubspace::make_ld(&e1).ok()?;
        self.intersect(&ld).ok()?.basis.first().cloned()
    }

    fn search_singular_member(&self, budget: &Budget) -> Result<FullNonsingularVerdict> {
        let dim = self.dim();
        let det = generic_det(&self.basis, budget.monomial_cap).ok();
        if let Some(d) = &det {
            if d.is_zero() {
                return Ok(FullNonsingularVerdict::Refuted(Refutation::Singular(self.basis[0].clone())));
            }
        }
        let is_singular_at = |pt: &[Scalar]| -> bool {
            match &det {
                Some(d) => d.eval(pt).is_zero(),
                None => self.combine(pt).det().map(|v| v.is_zero()).unwrap_or(false),
            }
        };
        let mut tested = 0u64;
        // small-height grid first: coordinates 0, 1, -1, 2, -2, ...
        let g = self.n as i64;
        let values: Vec<i64> = std::iter::once(0).chain((1..=g).flat_map(|h| [h, -h])).collect();
        let mut odo = Odometer::new(dim, values.len() as u32);
        odo.advance();
        while tested < budget.samples && odo.advance().is_some() {
            let pt: Vec<Scalar> = odo.digits().iter().map(|&d| self.field.int(values[d as usize])).collect();
            tested += 1;
            if is_singular_at(&pt) {
                return Ok(FullNonsingularVerdict::Refuted(Refutation::Singular(self.combine(&pt))));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        for _ in 0..budget.samples {
            let pt: Vec<Scalar> = (0..dim).map(|_| Scalar::random(self.field, &mut rng, 100)).collect();
            if pt.iter().all(Scalar::is_zero) {
                continue;
            }
            tested += 1;
            if is_singular_at(&pt) {
                return Ok(FullNonsingularVerdict::Refuted(Refutation::Singular(self.combine(&pt))));
            }
        }
        Ok(FullNonsingularVerdict::Unknown { samples_tested: tested })
    }

    /// The generic determinant `det(Σ tᵢBᵢ)` over the stored basis.
    pub fn determinant_form(&self, budget: &Budget) -> Result<MPoly> {
        if self.basis.is_empty() {
            return Err(dim_mismatch("zero subspace has no determinant form"));
        }
        generic_det(&self.basis, budget.monomial_cap)
    }
}

pub(crate) fn combine(field: FieldSpec, n: usize, basis: &[Matrix], coeffs: &[Scalar]) -> Matrix {
    let mut acc = Matrix::zeros(field, n, n);
    for (c, b) in coeffs.iter().zip(basis) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(c).unwrap()).unwrap();
        }
    }
    acc
}

fn check_vector(x: &Matrix) -> Result<(usize, FieldSpec)> {
    if x.cols() != 1 || x.rows() == 0 {
        return Err(dim_mismatch(format!("expected a column vector, got {:?}", x.shape())));
    }
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok((x.rows(), x.field()))
}

/// A point of `{0..n}^k` where `poly` does not vanish. Each variable appears
/// with degree at most `n`, so such a point exists for nonzero `poly`.
/// The stored basis of a rational subspace, each member scaled to an
/// integer matrix, as column-major buffers.
struct IntegerBasis {
    n: usize,
    big: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i64>>>,
}

impl IntegerBasis {
    fn new(v: &MatrixSubspace) -> Self {
        let big: Vec<Vec<BigInt>> = v
            .basis
            .iter()
            .map(|b| {
                let vb = b.vec();
                let rats: Vec<&BigRational> = vb.entries().iter().map(|s| s.as_rational().expect("rational entry")).collect();
                let lcm = rats.iter().fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
                rats.iter().map(|r| (*r * &lcm).to_integer()).collect()
            })
            .collect();
        let small = big.iter().map(|c| c.iter().map(|x| i64::try_from(x).ok()).collect()).collect();
        IntegerBasis { n: v.n, big, small }
    }

    /// `Σ tᵢCᵢ` when it is invertible.
    fn invertible_member(&self, t: &[i64]) -> Option<Matrix> {
        let n = self.n;
        if let Some(small) = &self.small {
            let mut m = vec![0i128; n * n];
            for (&d, c) in t.iter().zip(small) {
                for (x, y) in m.iter_mut().zip(c) {
                    *x += *y as i128 * d as i128;
                }
            }
            if intdet::det_i128(m, n) == Some(0) {
                return None;
            }
        }
        let mut m = vec![BigInt::default(); n * n];
        for (&d, c) in t.iter().zip(&self.big) {
            if d != 0 {
                for (x, y) in m.iter_mut().zip(c) {
                    *x += y * d;
                }
            }
        }
        if !intdet::is_nonzero(&m, n) {
            return None;
        }
        Some(Matrix::from_fn(FieldSpec::RATIONALS, n, n, |i, j| {
            Scalar::from_rational(BigRational::from_integer(m[j * n + i].clone()))
        }))
    }
}

/// Largest grid on which singularity over ℚ is decided point by point.
const GRID_LIMIT: u128 = 1 << 16;
/// Random points tried before expanding a determinant form.
const GRID_PROBE: usize = 64;
const PROBE_RANGE: i64 = 100;

fn nonvanishing_grid_point(poly: &MPoly, n: usize) -> Option<Vec<Scalar>> {
    let field = poly.field();
    let mut odo = Odometer::new(poly.nvars(), n as u32 + 1);
    while odo.advance().is_some() {
        let pt: Vec<Scalar> = odo.digits().iter().map(|&d| field.int(d as i64)).collect();
        if !poly.eval(&pt).is_zero() {
            return Some(pt);
        }
    }
    None
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SubspaceDoc {
    pub field: FieldSpec,
    pub n: usize,
    pub basis: Vec<NestedMatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<certificate::CertificateDoc>,
}

impl Serialize for MatrixSubspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceDoc {
            field: self.field,
            n: self.n,
            basis: self.basis.iter().map(NestedMatrixDoc::from_matrix).collect(),
            certificate: self.certificate.as_ref().map(certificate::CertificateDoc::from),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixSubspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SubspaceDoc::deserialize(d)?;
        let basis = doc.basis.iter().map(|m| m.to_matrix(doc.field)).collect::<Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        let mut v = MatrixSubspace::from_basis(doc.field, doc.n, &basis).map_err(serde::de::Error::custom)?;
        if let Some(c) = doc.certificate {
            v.certificate = Some(c.into_certificate(doc.field).map_err(serde::de::Error::custom)?);
        }
        Ok(v)
    }
}
