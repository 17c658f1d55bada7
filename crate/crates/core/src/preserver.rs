//! Linear endomorphisms of `M_n(K)`: Frobenius and pinch maps, the
//! GL-preservation test and the structural classifier.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{dim_mismatch, Error, Result};
use crate::field::FieldSpec;
use crate::intdet;
use crate::matrix::{docs_to_matrix, rows_to_docs, EntryDoc, Matrix, NestedMatrixDoc};
use crate::packed::{self, Odometer};
use crate::subspace::{FullNonsingularVerdict, MatrixSubspace, MaximalSingularType, Refutation, SingularityVerdict};

/// Entry bound for random test matrices over ℚ.
const RATIONAL_SAMPLE_BOUND: i64 = 10;

/// A linear map on `M_n(K)` as the `n² x n²` matrix acting on `vec(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatEndo {
    field: FieldSpec,
    n: usize,
    op: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreservationVerdict {
    /// Every one of the `count` invertible matrices maps to an invertible one.
    ExhaustivePass(u64),
    /// This many random invertible matrices passed; not a proof.
    SampledPass(u64),
    /// An invertible matrix with singular image.
    Refuted(Matrix),
}

impl PreservationVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, PreservationVerdict::Refuted(_))
    }
}

/// The data of a pinch map `M ↦ α(MX)` (or `α(MᵗX)`) with
/// `α(x) = Σₖ (Ax)ₖ Bₖ` over the canonical basis of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinchData {
    pub x: Matrix,
    pub a: Matrix,
    pub v: MatrixSubspace,
    pub vstatus: FullNonsingularVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreserverClassification {
    FrobeniusDirect { p: Matrix, q: Matrix },
    FrobeniusTwisted { p: Matrix, q: Matrix },
    PinchDirect(PinchData),
    PinchTwisted(PinchData),
    /// An invertible matrix whose image is singular.
    NotPreserver { witness: Matrix },
    /// A pinch decomposition that reproduces the map exactly, but whose
    /// subspace could not be certified non-singular.
    Unverified { twisted: bool, pinch: PinchData },
}

impl PreserverClassification {
    pub fn tag(&self) -> &'static str {
        match self {
            PreserverClassification::FrobeniusDirect { .. } => "FrobeniusDirect",
            PreserverClassification::FrobeniusTwisted { .. } => "FrobeniusTwisted",
            PreserverClassification::PinchDirect(_) => "PinchDirect",
            PreserverClassification::PinchTwisted(_) => "PinchTwisted",
            PreserverClassification::NotPreserver { .. } => "NotPreserver",
            PreserverClassification::Unverified { .. } => "Unverified",
        }
    }

    /// Rebuilds the map described by the classification.
    pub fn reconstruct(&self) -> Result<Option<MatEndo>> {
        Ok(Some(match self {
            PreserverClassification::FrobeniusDirect { p, q } => MatEndo::build_u(p, q)?,
            PreserverClassification::FrobeniusTwisted { p, q } => MatEndo::build_v(p, q)?,
            PreserverClassification::PinchDirect(d) => MatEndo::build_pinch(&d.v, &d.a, &d.x, false)?,
            PreserverClassification::PinchTwisted(d) => MatEndo::build_pinch(&d.v, &d.a, &d.x, true)?,
            PreserverClassification::Unverified { twisted, pinch: d } => MatEndo::build_pinch(&d.v, &d.a, &d.x, *twisted)?,
            PreserverClassification::NotPreserver { .. } => return Ok(None),
        }))
    }
}

/// A classification together with the preservation evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub classification: PreserverClassification,
    pub preservation: PreservationVerdict,
}

impl MatEndo {
    pub fn new(field: FieldSpec, n: usize, op: Matrix) -> Result<Self> {
        field.check(&op.field())?;
        if op.shape() != (n * n, n * n) {
            return Err(dim_mismatch(format!("operator {:?} for M_{n}", op.shape())));
        }
        Ok(MatEndo { field, n, op })
    }

    /// The map with `f(E_k) = images[k]` in `vec` basis order.
    pub fn from_images(field: FieldSpec, n: usize, images: &[Matrix]) -> Result<Self> {
        if images.len() != n * n || images.iter().any(|m| m.shape() != (n, n)) {
            return Err(dim_mismatch(format!("need {} images of shape {n}x{n}", n * n)));
        }
        for m in images {
            field.check(&m.field())?;
        }
        let vecs: Vec<Matrix> = images.iter().map(Matrix::vec).collect();
        let op = Matrix::from_fn(field, n * n, n * n, |i, k| vecs[k].get(i, 0).clone());
        Ok(MatEndo { field, n, op })
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        MatEndo { field, n, op: Matrix::identity(field, n * n) }
    }

    pub fn transpose_map(field: FieldSpec, n: usize) -> Self {
        MatEndo { field, n, op: Matrix::commutation(field, n) }
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        MatEndo { field, n, op: Matrix::zeros(field, n * n, n * n) }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn op(&self) -> &Matrix {
        &self.op
    }

    pub fn apply(&self, m: &Matrix) -> Result<Matrix> {
        if m.shape() != (self.n, self.n) {
            return Err(dim_mismatch(format!("apply to {:?} in M_{}", m.shape(), self.n)));
        }
        Matrix::unvec(&self.op.mul(&m.vec())?, self.n)
    }

    /// `f(E_k)` for the `k`-th `vec` basis matrix.
    pub fn image_of_unit(&self, k: usize) -> Matrix {
        Matrix::unvec(&self.op.col(k), self.n).unwrap()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MatEndo) -> Result<MatEndo> {
        if self.n != other.n {
            return Err(dim_mismatch("composing maps on different matrix sizes"));
        }
        Ok(MatEndo { field: self.field, n: self.n, op: self.op.mul(&other.op)? })
    }

    pub fn rank(&self) -> usize {
        self.op.rank()
    }

    pub fn kernel(&self) -> Result<MatrixSubspace> {
        MatrixSubspace::from_vec_kernel(self.field, self.n, &self.op)
    }

    pub fn image(&self) -> Result<MatrixSubspace> {
        let mats: Vec<Matrix> = self.op.image_basis().iter().map(|c| Matrix::unvec(c, self.n)).collect::<Result<_>>()?;
        MatrixSubspace::from_basis(self.field, self.n, &mats)
    }

    /// `f⁻¹(S) = {M : f(M) ∈ S}`.
    pub fn preimage(&self, s: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.field.check(&s.field())?;
        let nn = self.n * self.n;
        let sb: Vec<Matrix> = s.canonical_basis().iter().map(Matrix::vec).collect();
        let k = sb.len();
        // op·v − Σ cⱼ sⱼ = 0
        let sys = Matrix::from_fn(self.field, nn, nn + k, |i, j| {
            if j < nn {
                self.op.get(i, j).clone()
            } else {
                -sb[j - nn].get(i, 0)
            }
        });
        let mats: Vec<Matrix> = sys
            .kernel_basis()
            .iter()
            .map(|v| Matrix::unvec(&Matrix::column(self.field, v.entries()[..nn].to_vec())?, self.n))
            .collect::<Result<_>>()?;
        MatrixSubspace::from_basis(self.field, self.n, &mats)
    }

    /// `M ↦ PMQ`.
    pub fn build_u(p: &Matrix, q: &Matrix) -> Result<MatEndo> {
        let n = check_pair(p, q)?;
        Ok(MatEndo { field: p.field(), n, op: Matrix::kron(&q.transpose(), p)? })
    }

    /// `M ↦ PMᵗQ`.
    pub fn build_v(p: &Matrix, q: &Matrix) -> Result<MatEndo> {
        let n = check_pair(p, q)?;
        let u = Matrix::kron(&q.transpose(), p)?;
        Ok(MatEndo { field: p.field(), n, op: u.mul(&Matrix::commutation(p.field(), n))? })
    }

    /// `M ↦ α(MX)` (or `α(MᵗX)` when `twisted`) with `α(x) = Σₖ (Ax)ₖ Bₖ`
    /// over the canonical basis `B` of `v`.
    pub fn build_pinch(v: &MatrixSubspace, a: &Matrix, x: &Matrix, twisted: bool) -> Result<MatEndo> {
        let n = v.n();
        let field = v.field();
        field.check(&a.field())?;
        field.check(&x.field())?;
        if v.dim() != n {
            return Err(dim_mismatch(format!("pinch subspace has dimension {} != {n}", v.dim())));
        }
        if a.shape() != (n, n) || x.shape() != (n, 1) {
            return Err(dim_mismatch(format!("pinch data A {:?}, X {:?} for n = {n}", a.shape(), x.shape())));
        }
        if !a.is_invertible() {
            return Err(Error::SingularInput);
        }
        if x.is_zero() {
            return Err(Error::ZeroVector);
        }
        let nn = n * n;
        let rows = v.canonical_rows();
        let bmat = Matrix::from_fn(field, nn, n, |i, k| rows.get(k, i).clone());
        // vec(M)·X as a linear map: (Xᵗ ⊗ I)
        let mut col_map = Matrix::kron(&x.transpose(), &Matrix::identity(field, n))?;
        if twisted {
            col_map = col_map.mul(&Matrix::commutation(field, n))?;
        }
        Ok(MatEndo { field, n, op: bmat.mul(a)?.mul(&col_map)? })
    }

    /// Whether `f(GL_n) ⊆ GL_n`.
    ///
    /// Finite fields: exhaustive over `GL_n(F_q)` when its order fits the
    /// budget (identity first, then ascending `vec` codes), random invertible
    /// samples otherwise. ℚ: random integer matrices, identity first.
    pub fn preserves_gl(&self, budget: &Budget) -> Result<PreservationVerdict> {
        match self.field.modulus() {
            Some(p) => self.preserves_gl_finite(p, budget),
            None => self.preserves_gl_rational(budget),
        }
    }

    fn preserves_gl_finite(&self, p: u32, budget: &Budget) -> Result<PreservationVerdict> {
        let n = self.n;
        let nn = n * n;
        let op = self.op.residues();
        let mut out = vec![0u32; nn];
        let mut scratch = Vec::new();
        let id = packed::identity_vec(n);
        let fails = |v: &[u32], out: &mut [u32], scratch: &mut Vec<u32>| {
            packed::apply(&op, v, out, p);
            !packed::is_invertible_vec(out, n, p, scratch)
        };
        let witness = |v: &[u32]| Matrix::unvec(&Matrix::from_residues(self.field, nn, 1, v), n).unwrap();
        if fails(&id, &mut out, &mut scratch) {
            return Ok(PreservationVerdict::Refuted(witness(&id)));
        }
        let order = packed::gl_order(p as u64, n);
        if budget.allows(order) {
            let mut odo = Odometer::new(nn, p);
            let mut count = 0u64;
            while odo.advance().is_some() {
                let v = odo.digits();
                if !packed::is_invertible_vec(v, n, p, &mut scratch) {
                    continue;
                }
                count += 1;
                if fails(v, &mut out, &mut scratch) {
                    return Ok(PreservationVerdict::Refuted(witness(v)));
                }
            }
            return Ok(PreservationVerdict::ExhaustivePass(count));
        }
        if budget.samples == 0 {
            return Err(Error::BudgetExceeded { needed: order, budget: budget.limit });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut v = vec![0u32; nn];
        for _ in 0..budget.samples {
            loop {
                v.iter_mut().for_each(|x| *x = rand::Rng::gen_range(&mut rng, 0..p));
                if packed::is_invertible_vec(&v, n, p, &mut scratch) {
                    break;
                }
            }
            if fails(&v, &mut out, &mut scratch) {
                return Ok(PreservationVerdict::Refuted(witness(&v)));
            }
        }
        Ok(PreservationVerdict::SampledPass(budget.samples))
    }

    fn preserves_gl_rational(&self, budget: &Budget) -> Result<PreservationVerdict> {
        let n = self.n;
        let checker = IntegerChecker::new(&self.op, n);
        let id = Matrix::identity(self.field, n);
        if !self.apply(&id)?.is_invertible() {
            return Ok(PreservationVerdict::Refuted(id));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        for _ in 0..budget.samples {
            let m: Vec<i64> = loop {
                let m: Vec<i64> = (0..n * n).map(|_| rand::Rng::gen_range(&mut rng, -RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND)).collect();
                if checker.is_invertible(&m) {
                    break m;
                }
            };
            if !checker.is_invertible(&checker.apply(&m)) {
                let field = self.field;
                return Ok(PreservationVerdict::Refuted(Matrix::unvec(
                    &Matrix::column(field, m.iter().map(|&x| field.int(x)).collect())?,
                    n,
                )?));
            }
        }
        Ok(PreservationVerdict::SampledPass(budget.samples))
    }

    /// Structural classification; see [`MatEndo::classify_report`].
    pub fn classify(&self, budget: &Budget) -> Result<PreserverClassification> {
        Ok(self.classify_report(budget)?.classification)
    }

    /// Tests preservation, then recovers `(P, Q)` for bijective maps or the
    /// pinch data `(X, A, V)` for singular ones, and checks that the
    /// recovered data rebuilds the map exactly.
    pub fn classify_report(&self, budget: &Budget) -> Result<ClassificationReport> {
        let preservation = self.preserves_gl(budget)?;
        let classification = self.classify_with(&preservation, budget)?;
        Ok(ClassificationReport { classification, preservation })
    }

    /// Classification given an already computed preservation verdict.
    pub fn classify_with(&self, preservation: &PreservationVerdict, budget: &Budget) -> Result<PreserverClassification> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Precondition("classification needs n >= 2".into()));
        }
        if let PreservationVerdict::Refuted(w) = preservation {
            return Ok(PreserverClassification::NotPreserver { witness: w.clone() });
        }
        let certified = matches!(preservation, PreservationVerdict::ExhaustivePass(_));
        let rank = self.rank();
        let outcome = if rank == n * n { self.classify_bijective()? } else { self.classify_singular(budget)? };
        match outcome {
            Some(c @ PreserverClassification::NotPreserver { .. }) => {
                if certified {
                    return Err(Error::Anomaly("exhaustively certified preserver has a witness".into()));
                }
                Ok(c)
            }
            Some(c) => {
                let rebuilt = c.reconstruct()?.expect("preserver classification");
                if rebuilt.op != self.op {
                    return Err(Error::Anomaly(format!("{} reconstruction differs from the input map", c.tag())));
                }
                if certified && matches!(c, PreserverClassification::Unverified { .. }) {
                    return Err(Error::Anomaly("exhaustively certified preserver with an uncertified subspace".into()));
                }
                Ok(c)
            }
            None => match self.find_witness(budget)? {
                Some(w) => {
                    if certified {
                        return Err(Error::Anomaly("exhaustively certified preserver has a witness".into()));
                    }
                    Ok(PreserverClassification::NotPreserver { witness: w })
                }
                None if certified => Err(Error::Anomaly(format!("certified preserver of rank {rank} fits no class"))),
                None => Err(Error::Undecided(format!("map of rank {rank} fits no class and no witness was found"))),
            },
        }
    }

    fn classify_bijective(&self) -> Result<Option<PreserverClassification>> {
        let n = self.n;
        let e1 = Matrix::basis_vector(self.field, n, 0);
        let w = self.preimage(&MatrixSubspace::make_ld(&e1)?)?;
        let twisted = match w.classify_maximal_singular() {
            Ok(MaximalSingularType::KernelType(_)) => false,
            Ok(MaximalSingularType::ImageType(_)) => true,
            Err(Error::NotMaximalSingular(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let direct = if twisted { self.compose(&MatEndo::transpose_map(self.field, n))? } else { self.clone() };
        let Some((p, q)) = direct.recover_pq() else { return Ok(None) };
        Ok(Some(if twisted {
            PreserverClassification::FrobeniusTwisted { p, q }
        } else {
            PreserverClassification::FrobeniusDirect { p, q }
        }))
    }

    /// For `f = u_{P,Q}`: `f(E_ij) = pᵢ qⱼᵗ` with `pᵢ` the columns of `P` and
    /// `qⱼᵗ` the rows of `Q`.
    fn recover_pq(&self) -> Option<(Matrix, Matrix)> {
        let n = self.n;
        let field = self.field;
        let img = |i: usize, j: usize| self.image_of_unit(j * n + i);
        let f11 = img(0, 0);
        let c = (0..n).find(|&j| !f11.col(j).is_zero())?;
        let p1 = f11.col(c);
        let (r, lead) = p1.first_nonzero()?;
        let lead_inv = lead.inv().ok()?;
        let mut p = Matrix::zeros(field, n, n);
        let mut q = Matrix::zeros(field, n, n);
        for i in 0..n {
            let fi1 = img(i, 0);
            for k in 0..n {
                p.set(k, i, fi1.get(k, c).clone());
            }
        }
        for j in 0..n {
            let f1j = img(0, j);
            for k in 0..n {
                q.set(j, k, f1j.get(r, k) * &lead_inv);
            }
        }
        if !p.is_invertible() || !q.is_invertible() {
            return None;
        }
        let (p, q) = normalize_pair(&p, &q).ok()?;
        for i in 0..n {
            for j in 0..n {
                let qj = Matrix::from_fn(field, 1, n, |_, k| q.get(j, k).clone());
                let expected = p.col(i).mul(&qj).ok()?;
                if img(i, j) != expected {
                    return None;
                }
            }
        }
        Some((p, q))
    }

    fn classify_singular(&self, budget: &Budget) -> Result<Option<PreserverClassification>> {
        let n = self.n;
        let field = self.field;
        let kernel = self.kernel()?;
        if kernel.dim() != n * n - n {
            return Ok(None);
        }
        let (twisted, x) = match kernel.classify_maximal_singular() {
            Ok(MaximalSingularType::KernelType(x)) => (false, x),
            Ok(MaximalSingularType::ImageType(x)) => (true, x),
            Err(Error::NotMaximalSingular(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let (j, _) = x.first_nonzero().expect("normalized vector");
        let y = Matrix::basis_vector(field, n, j);
        let alpha = |v: &Matrix| -> Result<Matrix> {
            let m = if twisted { y.mul(&v.transpose())? } else { v.mul(&y.transpose())? };
            self.apply(&m)
        };
        let images: Vec<Matrix> = (0..n).map(|k| alpha(&Matrix::basis_vector(field, n, k))).collect::<Result<_>>()?;
        let v = MatrixSubspace::from_basis(field, n, &images)?;
        if v.dim() != n {
            return Ok(None);
        }
        let mut a = Matrix::zeros(field, n, n);
        for (k, img) in images.iter().enumerate() {
            let coords = v.coordinates(img).expect("image lies in its span");
            for (l, c) in coords.into_iter().enumerate() {
                a.set(l, k, c);
            }
        }
        let vstatus = v.is_full_nonsingular(budget)?;
        if let FullNonsingularVerdict::Refuted(Refutation::Singular(s)) = &vstatus {
            // s = α(x') for some x' ≠ 0; any invertible M with MX = x' is a witness
            let coords = v.coordinates(s).expect("witness lies in V");
            let target = a.solve(&Matrix::column(field, coords)?)?;
            let m = invertible_sending(&x, &target)?;
            let m = if twisted { m.transpose() } else { m };
            return Ok(Some(PreserverClassification::NotPreserver { witness: m }));
        }
        let pinch = PinchData { x, a, v, vstatus: vstatus.clone() };
        Ok(Some(match vstatus {
            FullNonsingularVerdict::Verified(_) if twisted => PreserverClassification::PinchTwisted(pinch),
            FullNonsingularVerdict::Verified(_) => PreserverClassification::PinchDirect(pinch),
            _ => PreserverClassification::Unverified { twisted, pinch },
        }))
    }

    /// Looks for an invertible `M` with `f(M)` singular through preimages of
    /// maximal singular subspaces: a preimage of dimension above `n² − n`
    /// cannot be singular.
    pub fn find_witness(&self, budget: &Budget) -> Result<Option<Matrix>> {
        let n = self.n;
        let mut targets = Vec::new();
        for i in 0..n {
            let e = Matrix::basis_vector(self.field, n, i);
            targets.push(MatrixSubspace::make_ld(&e)?);
            targets.push(MatrixSubspace::make_lh(&e)?);
        }
        for t in &targets {
            let pre = self.preimage(t)?;
            if pre.dim() <= n * n - n {
                continue;
            }
            match pre.is_singular(budget) {
                Ok(SingularityVerdict::ContainsInvertible(m)) => return Ok(Some(m)),
                Ok(SingularityVerdict::Singular) => {
                    return Err(Error::Anomaly("singular subspace above the maximal dimension".into()))
                }
                Err(Error::BudgetExceeded { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    /// Whether `M ↦ f(M)·X` is onto `Kⁿ`.
    pub fn onto_column_audit(&self, x: &Matrix) -> Result<bool> {
        if x.shape() != (self.n, 1) {
            return Err(dim_mismatch(format!("column audit vector {:?}", x.shape())));
        }
        if x.is_zero() {
            return Err(Error::ZeroVector);
        }
        let n = self.n;
        let cols: Vec<Matrix> = (0..n * n).map(|k| self.image_of_unit(k).mul(x)).collect::<Result<_>>()?;
        let m = Matrix::from_fn(self.field, n, n * n, |i, k| cols[k].get(i, 0).clone());
        Ok(m.rank() == n)
    }
}

/// Normalizes `(P, Q)` so the first nonzero entry of `P` is 1.
pub fn normalize_pair(p: &Matrix, q: &Matrix) -> Result<(Matrix, Matrix)> {
    let (_, lead) = p.first_nonzero().ok_or(Error::SingularInput)?;
    let lead = lead.clone();
    Ok((p.scale(&lead.inv()?)?, q.scale(&lead)?))
}

fn check_pair(p: &Matrix, q: &Matrix) -> Result<usize> {
    p.field().check(&q.field())?;
    if !p.is_square() || p.shape() != q.shape() {
        return Err(dim_mismatch(format!("P {:?}, Q {:?}", p.shape(), q.shape())));
    }
    if !p.is_invertible() || !q.is_invertible() {
        return Err(Error::SingularInput);
    }
    Ok(p.rows())
}

/// Completes the nonzero column `v` to an invertible matrix whose first
/// column is `v`.
fn completion(v: &Matrix) -> Result<Matrix> {
    let n = v.rows();
    let field = v.field();
    let mut cols = vec![v.clone()];
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let e = Matrix::basis_vector(field, n, i);
        let trial = Matrix::from_fn(field, n, cols.len() + 1, |r, c| {
            if c < cols.len() {
                cols[c].get(r, 0).clone()
            } else {
                e.get(r, 0).clone()
            }
        });
        if trial.rank() == cols.len() + 1 {
            cols.push(e);
        }
    }
    Ok(Matrix::from_fn(field, n, n, |r, c| cols[c].get(r, 0).clone()))
}

/// An invertible `M` with `M·x = y` for nonzero `x`, `y`.
fn invertible_sending(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroVector);
    }
    completion(y)?.mul(&completion(x)?.inverse()?)
}

/// Integer arithmetic for sampling over ℚ: the operator is rescaled to
/// integer entries (which does not change which images are singular), and
/// determinants run through fraction-free elimination in `i128`, falling back
/// to big integers on overflow.
struct IntegerChecker {
    n: usize,
    op: Vec<BigInt>,
}

impl IntegerChecker {
    fn new(op: &Matrix, n: usize) -> Self {
        let rats: Vec<_> = op.entries().iter().map(|s| s.as_rational().expect("rational operator").clone()).collect();
        let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let op: Vec<BigInt> = rats.iter().map(|r| (r * &lcm).to_integer()).collect();
        IntegerChecker { n, op }
    }

    fn apply(&self, v: &[i64]) -> Vec<BigInt> {
        let nn = self.n * self.n;
        (0..nn)
            .map(|r| {
                let mut acc = BigInt::default();
                for (k, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc += &self.op[r * nn + k] * x;
                    }
                }
                acc
            })
            .collect()
    }

    fn is_invertible<T: Clone + Into<BigInt>>(&self, v: &[T]) -> bool {
        let big: Vec<BigInt> = v.iter().cloned().map(Into::into).collect();
        intdet::is_nonzero(&big, self.n)
    }
}

/// Whether `GL_n` spans `M_n`, plus the explicit generators
/// `E_ij = (I + E_ij) − I` and
/// `E_ii = I − (I + E_ij + E_ji − E_ii) + E_ij + E_ji` with invertible middle term.
pub fn span_gl_audit(field: FieldSpec, n: usize, budget: &Budget) -> Result<bool> {
    let id = Matrix::identity(field, n);
    let unit = |i, j| Matrix::unit(field, n, i, j);
    let mut generators = vec![id.clone()];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let g = id.add(&unit(i, j))?;
            if !g.is_invertible() || g.sub(&id)? != unit(i, j) {
                return Ok(false);
            }
            generators.push(g);
        }
    }
    if n >= 2 {
        for i in 0..n {
            let j = if i == 0 { 1 } else { 0 };
            let middle = id.add(&unit(i, j))?.add(&unit(j, i))?.sub(&unit(i, i))?;
            if !middle.is_invertible() {
                return Ok(false);
            }
            let rebuilt = id.sub(&middle)?.add(&unit(i, j))?.add(&unit(j, i))?;
            if rebuilt != unit(i, i) {
                return Ok(false);
            }
            generators.push(middle);
        }
    } else if !id.is_invertible() {
        return Ok(false);
    }
    let nn = n * n;
    let stack = |mats: &[Matrix]| Matrix::from_fn(field, mats.len(), nn, |r, c| mats[r].vec().get(c, 0).clone());
    if stack(&generators).rank() != nn {
        return Ok(false);
    }
    if let Some(p) = field.modulus() {
        budget.check(packed::pow_sat(p as u64, nn))?;
        let gl: Vec<Vec<u32>> = packed::gl_vecs(p, n);
        let buf: Vec<u32> = gl.concat();
        let m = Matrix::from_residues(field, gl.len(), nn, &buf);
        return Ok(m.rank() == nn);
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct EndoDoc {
    field: FieldSpec,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    op: Option<Vec<Vec<EntryDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    images: Option<Vec<NestedMatrixDoc>>,
}

impl Serialize for MatEndo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let op = rows_to_docs(&self.op).into_iter().map(|r| r.into_iter().map(EntryDoc::Text).collect()).collect();
        EndoDoc { field: self.field, n: self.n, vec: Some("col-major".into()), op: Some(op), images: None }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatEndo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = EndoDoc::deserialize(d)?;
        if let Some(v) = &doc.vec {
            if v != "col-major" {
                return Err(D::Error::custom(format!("unsupported vectorization {v:?}")));
            }
        }
        match (doc.op, doc.images) {
            (Some(op), None) => {
                let m = docs_to_matrix(doc.field, &op).map_err(D::Error::custom)?;
                MatEndo::new(doc.field, doc.n, m).map_err(D::Error::custom)
            }
            (None, Some(images)) => {
                let images = images.iter().map(|m| m.to_matrix(doc.field)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
                MatEndo::from_images(doc.field, doc.n, &images).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom("endomorphism needs exactly one of \"op\" or \"images\"")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::division::{DivisionAlgebraSpec, Preset};
    use crate::field::Scalar;
    use crate::poly::Polynomial;

    const Q: FieldSpec = FieldSpec::RATIONALS;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn gaussian_plane() -> MatrixSubspace {
        let j = Matrix::from_ints(Q, &[&[0, -1], &[1, 0]]);
        MatrixSubspace::from_basis(Q, 2, &[Matrix::identity(Q, 2), j]).unwrap()
    }

    #[test]
    fn frobenius_builders() {
        let f = gf(5);
        assert_eq!(MatEndo::build_u(&Matrix::identity(f, 2), &Matrix::identity(f, 2)).unwrap(), MatEndo::identity(f, 2));
        let t = MatEndo::build_v(&Matrix::identity(f, 2), &Matrix::identity(f, 2)).unwrap();
        assert_eq!(t, MatEndo::transpose_map(f, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = Matrix::random_invertible(f, 3, &mut rng, 0);
            let q = Matrix::random_invertible(f, 3, &mut rng, 0);
            let m = Matrix::random(f, 3, 3, &mut rng, 0);
            let u = MatEndo::build_u(&p, &q).unwrap();
            assert_eq!(u.apply(&m).unwrap(), p.mul(&m).unwrap().mul(&q).unwrap());
            let v = MatEndo::build_v(&p, &q).unwrap();
            assert_eq!(v.apply(&m).unwrap(), p.mul(&m.transpose()).unwrap().mul(&q).unwrap());
        }
        let singular = Matrix::zeros(f, 2, 2);
        assert_eq!(MatEndo::build_u(&singular, &Matrix::identity(f, 2)).unwrap_err(), Error::SingularInput);
    }

    #[test]
    fn gaussian_pinch_matches_closed_form() {
        let e1 = Matrix::basis_vector(Q, 2, 0);
        let f = MatEndo::build_pinch(&gaussian_plane(), &Matrix::identity(Q, 2), &e1, false).unwrap();
        // (a c; b d) ↦ (a −b; b a)
        let m = Matrix::from_ints(Q, &[&[3, 7], &[5, 11]]);
        assert_eq!(f.apply(&m).unwrap(), Matrix::from_ints(Q, &[&[3, -5], &[5, 3]]));
        assert_eq!(f.rank(), 2);
        assert_eq!(f.kernel().unwrap(), MatrixSubspace::make_ld(&e1).unwrap());
        let twisted = MatEndo::build_pinch(&gaussian_plane(), &Matrix::identity(Q, 2), &e1, true).unwrap();
        assert_eq!(twisted.kernel().unwrap(), MatrixSubspace::make_lh(&e1).unwrap());
    }

    #[test]
    fn cube_root_pinch_reads_first_column() {
        let a = Matrix::companion(&Polynomial::from_ints(Q, &[-2, 0, 0, 1])).unwrap();
        let basis = [Matrix::identity(Q, 3), a.clone(), a.pow(2).unwrap()];
        let v = MatrixSubspace::from_basis(Q, 3, &basis).unwrap();
        let e1 = Matrix::basis_vector(Q, 3, 0);
        // canonical basis of span{I, A, A²} may differ from {I, A, A²}; use coordinates
        let coords: Vec<Vec<Scalar>> = basis.iter().map(|b| v.coordinates(b).unwrap()).collect();
        let amat = Matrix::from_fn(Q, 3, 3, |l, k| coords[k][l].clone());
        let f = MatEndo::build_pinch(&v, &amat, &e1, false).unwrap();
        let m = Matrix::from_ints(Q, &[&[2, 9, 9], &[-1, 9, 9], &[4, 9, 9]]);
        let expected = basis[0].scale(&Q.int(2)).unwrap().add(&basis[1].scale(&Q.int(-1)).unwrap()).unwrap().add(&basis[2].scale(&Q.int(4)).unwrap()).unwrap();
        assert_eq!(f.apply(&m).unwrap(), expected);
        let c = f.classify(&Budget::default()).unwrap();
        let PreserverClassification::PinchDirect(d) = c else { panic!("{c:?}") };
        assert_eq!(d.x, e1);
        assert_eq!(d.v, v);
    }

    #[test]
    fn preservation_examples() {
        let f2 = gf(2);
        let b = Budget::default();
        assert_eq!(MatEndo::identity(f2, 2).preserves_gl(&b).unwrap(), PreservationVerdict::ExhaustivePass(6));
        assert_eq!(MatEndo::zero(f2, 2).preserves_gl(&b).unwrap(), PreservationVerdict::Refuted(Matrix::identity(f2, 2)));
        let mut op = Matrix::identity(f2, 4);
        op.set(1, 1, f2.zero());
        let kill = MatEndo::new(f2, 2, op).unwrap();
        assert_eq!(
            kill.preserves_gl(&b).unwrap(),
            PreservationVerdict::Refuted(Matrix::from_ints(f2, &[&[0, 1], &[1, 0]]))
        );
        let big = MatEndo::identity(gf(5), 3);
        assert_eq!(big.preserves_gl(&b.with_limit(1000)).unwrap(), PreservationVerdict::SampledPass(1000));
        assert!(matches!(big.preserves_gl(&b.with_limit(1000).with_samples(0)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn classify_transpose_and_identity() {
        for f in [gf(2), gf(3), Q] {
            let b = Budget::default();
            assert_eq!(
                MatEndo::transpose_map(f, 2).classify(&b).unwrap(),
                PreserverClassification::FrobeniusTwisted { p: Matrix::identity(f, 2), q: Matrix::identity(f, 2) }
            );
            assert_eq!(
                MatEndo::identity(f, 3).classify(&b).unwrap(),
                PreserverClassification::FrobeniusDirect { p: Matrix::identity(f, 3), q: Matrix::identity(f, 3) }
            );
        }
    }

    #[test]
    fn classify_frobenius_roundtrip() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Budget::default().with_limit(100_000).with_samples(200);
        for twisted in [false, true] {
            let p = Matrix::random_invertible(f, 3, &mut rng, 0);
            let q = Matrix::random_invertible(f, 3, &mut rng, 0);
            let map = if twisted { MatEndo::build_v(&p, &q) } else { MatEndo::build_u(&p, &q) }.unwrap();
            let c = map.classify(&b).unwrap();
            let (pn, qn) = normalize_pair(&p, &q).unwrap();
            let expected = if twisted {
                PreserverClassification::FrobeniusTwisted { p: pn, q: qn }
            } else {
                PreserverClassification::FrobeniusDirect { p: pn, q: qn }
            };
            assert_eq!(c, expected);
        }
    }

    #[test]
    fn classify_gaussian_pinch() {
        let e1 = Matrix::basis_vector(Q, 2, 0);
        let f = MatEndo::build_pinch(&gaussian_plane(), &Matrix::identity(Q, 2), &e1, false).unwrap();
        let report = f.classify_report(&Budget::default()).unwrap();
        assert!(matches!(report.preservation, PreservationVerdict::SampledPass(_)));
        let PreserverClassification::PinchDirect(d) = report.classification else { panic!() };
        assert_eq!(d.v, gaussian_plane());
        assert!(d.vstatus.is_verified());
    }

    #[test]
    fn not_preservers_get_witnesses() {
        let f = gf(3);
        let b = Budget::default();
        let c = MatEndo::zero(f, 2).classify(&b).unwrap();
        assert_eq!(c, PreserverClassification::NotPreserver { witness: Matrix::identity(f, 2) });
        // a pinch through a subspace with a singular member fails on some invertible matrix
        let v = MatrixSubspace::from_basis(Q, 2, &[Matrix::identity(Q, 2), Matrix::unit(Q, 2, 0, 1)]).unwrap();
        let pinch = MatEndo::build_pinch(&v, &Matrix::identity(Q, 2), &Matrix::basis_vector(Q, 2, 0), false).unwrap();
        let PreserverClassification::NotPreserver { witness } = pinch.classify(&b.with_samples(0)).unwrap() else {
            panic!()
        };
        assert!(witness.is_invertible());
        assert!(!pinch.apply(&witness).unwrap().is_invertible());
    }

    #[test]
    fn onto_and_span_audits() {
        let f = gf(3);
        assert!(MatEndo::identity(f, 2).onto_column_audit(&Matrix::basis_vector(f, 2, 0)).unwrap());
        let alg = DivisionAlgebraSpec::preset(&Preset::Companion(Polynomial::from_ints(f, &[1, 0, 1])), f, &Budget::default()).unwrap();
        let v = alg.to_subspace().unwrap();
        let pinch = MatEndo::build_pinch(&v, &Matrix::identity(f, 2), &Matrix::basis_vector(f, 2, 0), false).unwrap();
        assert!(pinch.onto_column_audit(&Matrix::basis_vector(f, 2, 0)).unwrap());
        let b = Budget::default();
        assert!(span_gl_audit(gf(2), 2, &b).unwrap());
        assert!(span_gl_audit(gf(3), 3, &b).unwrap());
        assert!(span_gl_audit(Q, 1, &b).unwrap());
        assert!(span_gl_audit(Q, 4, &b).unwrap());
    }

    #[test]
    fn endo_json_forms() {
        let f = gf(2);
        let t = MatEndo::transpose_map(f, 2);
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("col-major"));
        assert_eq!(serde_json::from_str::<MatEndo>(&s).unwrap(), t);
        let images: Vec<Matrix> = (0..4).map(|k| t.image_of_unit(k)).collect();
        let doc = serde_json::json!({"field": "gf:2", "n": 2, "images": images});
        assert_eq!(serde_json::from_value::<MatEndo>(doc).unwrap(), t);
    }
}
