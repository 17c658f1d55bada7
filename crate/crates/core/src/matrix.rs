//! Dense exact matrices.
//!
//! Elimination runs on machine residues over GF(p). Over ℚ, determinants and
//! ranks use fraction-free (Bareiss) elimination on an integer rescaling of
//! the rows; reduced echelon forms use rational Gaussian elimination since
//! their entries are fractions anyway.
//!
//! Vectorization is column-major throughout: `vec(M)` stacks the columns of
//! `M`, so basis index `k` of `M_n` is `E_{i,j}` with `i = k % n`, `j = k / n`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dim_mismatch, Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::Polynomial;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_mismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        for s in &data {
            field.check(&s.field())?;
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn from_fn(field: FieldSpec, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, data }
    }

    /// Row-major integer literal, mapped into `field`.
    pub fn from_ints(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
        Matrix::from_fn(field, r, c, |i, j| field.int(rows[i][j]))
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_mismatch("ragged rows"));
        }
        Matrix::new(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn column(field: FieldSpec, entries: Vec<Scalar>) -> Result<Self> {
        let n = entries.len();
        Matrix::new(field, n, 1, entries)
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Matrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    /// The matrix unit `E_{i,j}` of `M_n`.
    pub fn unit(field: FieldSpec, n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        m.data[i * n + j] = field.one();
        m
    }

    /// Standard basis column vector `e_i` of length `n`.
    pub fn basis_vector(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut m = Matrix::zeros(field, n, 1);
        m.data[i] = field.one();
        m
    }

    pub fn random<R: Rng + ?Sized>(field: FieldSpec, rows: usize, cols: usize, rng: &mut R, bound: i64) -> Self {
        Matrix::from_fn(field, rows, cols, |_, _| Scalar::random(field, rng, bound))
    }

    /// Rejection-samples an invertible square matrix.
    pub fn random_invertible<R: Rng + ?Sized>(field: FieldSpec, n: usize, rng: &mut R, bound: i64) -> Self {
        loop {
            let m = Matrix::random(field, n, n, rng, bound);
            if m.is_invertible() {
                return m;
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field);
        self.data[i * self.cols + j] = v;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Column `j` as an `rows x 1` matrix.
    pub fn col(&self, j: usize) -> Matrix {
        Matrix::from_fn(self.field, self.rows, 1, |i, _| self.get(i, j).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    fn check_same(&self, other: &Matrix) -> Result<()> {
        self.field.check(&other.field)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        if self.shape() != other.shape() {
            return Err(dim_mismatch(format!("add {:?} + {:?}", self.shape(), other.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.map(|s| -s)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Matrix> {
        self.field.check(&s.field())?;
        Ok(self.map(|x| x * s))
    }

    fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { data: self.data.iter().map(f).collect(), ..*self }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        if self.cols != other.rows {
            return Err(dim_mismatch(format!("multiply {:?} by {:?}", self.shape(), other.shape())));
        }
        if let Some(p) = self.field.modulus() {
            let a = self.residues();
            let b = other.residues();
            let p64 = p as u64;
            let mut out = vec![0u32; self.rows * other.cols];
            for i in 0..self.rows {
                for k in 0..self.cols {
                    let aik = a[i * self.cols + k] as u64;
                    if aik == 0 {
                        continue;
                    }
                    for j in 0..other.cols {
                        let o = &mut out[i * other.cols + j];
                        *o = ((*o as u64 + aik * b[k * other.cols + j] as u64) % p64) as u32;
                    }
                }
            }
            return Ok(Matrix::from_residues(self.field, self.rows, other.cols, &out));
        }
        Ok(Matrix::from_fn(self.field, self.rows, other.cols, |i, j| {
            let mut acc = self.field.zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc = &acc + &(a * other.get(k, j));
                }
            }
            acc
        }))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn pow(&self, e: u32) -> Result<Matrix> {
        self.require_square()?;
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Residues of a GF(p) matrix, row-major.
    pub(crate) fn residues(&self) -> Vec<u32> {
        self.data.iter().map(|s| s.residue().expect("prime-field matrix")).collect()
    }

    pub(crate) fn from_residues(field: FieldSpec, rows: usize, cols: usize, r: &[u32]) -> Matrix {
        Matrix { field, rows, cols, data: r.iter().map(|&v| field.int(v as i64)).collect() }
    }

    /// Determinant; Gaussian elimination mod p, Bareiss over ℚ.
    pub fn det(&self) -> Result<Scalar> {
        self.require_square()?;
        if let Some(p) = self.field.modulus() {
            let mut a = self.residues();
            return Ok(self.field.int(modp::det(&mut a, self.rows, p) as i64));
        }
        let (mut rows, scale) = self.integer_rows();
        let (rank, det) = bareiss(&mut rows, self.cols);
        if rank < self.rows {
            return Ok(self.field.zero());
        }
        Ok(Scalar::from_rational(BigRational::new(det, scale)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn rank(&self) -> usize {
        if let Some(p) = self.field.modulus() {
            let mut a = self.residues();
            return modp::rref(&mut a, self.rows, self.cols, p).len();
        }
        let (mut rows, _) = self.integer_rows();
        bareiss(&mut rows, self.cols).0
    }

    /// Each row scaled by the lcm of its denominators, plus the product of
    /// those scale factors.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..self.rows)
            .map(|i| {
                let row: Vec<&BigRational> =
                    (0..self.cols).map(|j| self.get(i, j).as_rational().unwrap()).collect();
                let l = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
                scale *= &l;
                row.iter().map(|r| (*r * &l).to_integer()).collect()
            })
            .collect();
        (rows, scale)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        if let Some(p) = self.field.modulus() {
            let mut a = self.residues();
            let piv = modp::rref(&mut a, self.rows, self.cols, p);
            return (Matrix::from_residues(self.field, self.rows, self.cols, &a), piv);
        }
        let mut m = self.clone();
        let piv = m.rref_generic();
        (m, piv)
    }

    fn rref_generic(&mut self) -> Vec<usize> {
        let (rows, cols) = self.shape();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else { continue };
            self.swap_rows(pr, r);
            let inv = self.get(r, c).inv().unwrap();
            for j in c..cols {
                let v = self.get(r, j) * &inv;
                self.data[r * cols + j] = v;
            }
            for i in 0..rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..cols {
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.data[i * cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.require_square()?;
        let n = self.rows;
        let aug = Matrix::from_fn(self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        Ok(Matrix::from_fn(self.field, n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Basis of the null space, one column vector per free variable, read off
    /// the RREF with the free variable set to 1.
    pub fn kernel_basis(&self) -> Vec<Matrix> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = Matrix::zeros(self.field, self.cols, 1);
                v.data[fc] = self.field.one();
                for (row, &pc) in piv.iter().enumerate() {
                    v.data[pc] = -r.get(row, fc);
                }
                v
            })
            .collect()
    }

    /// Basis of the column space: the nonzero rows of `rref(Mᵗ)`, as columns.
    pub fn image_basis(&self) -> Vec<Matrix> {
        let (r, piv) = self.transpose().rref();
        (0..piv.len()).map(|i| Matrix::column(self.field, r.row(i)).unwrap()).collect()
    }

    /// A particular solution `X` of `self · X = b`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.check_same(b)?;
        if b.rows != self.rows {
            return Err(dim_mismatch(format!("solve {:?} against {:?}", self.shape(), b.shape())));
        }
        let n = self.cols;
        let aug = Matrix::from_fn(self.field, self.rows, n + b.cols, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                b.get(i, j - n).clone()
            }
        });
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= n) {
            return Err(Error::NoSolution);
        }
        let mut x = Matrix::zeros(self.field, n, b.cols);
        for (row, &pc) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x.data[pc * b.cols + j] = r.get(row, n + j).clone();
            }
        }
        Ok(x)
    }

    /// Column-major vectorization as an `n·m x 1` column.
    pub fn vec(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { field: self.field, rows: self.data.len(), cols: 1, data }
    }

    /// Inverse of [`Matrix::vec`] for square `n x n` shapes.
    pub fn unvec(v: &Matrix, n: usize) -> Result<Matrix> {
        if v.cols != 1 || v.rows != n * n {
            return Err(dim_mismatch(format!("unvec of {:?} into {n}x{n}", v.shape())));
        }
        Ok(Matrix::from_fn(v.field, n, n, |i, j| v.data[j * n + i].clone()))
    }

    pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
        a.check_same(b)?;
        Ok(Matrix::from_fn(a.field, a.rows * b.rows, a.cols * b.cols, |i, j| {
            a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
        }))
    }

    /// The permutation `K_n` with `K_n · vec(M) = vec(Mᵗ)`.
    pub fn commutation(field: FieldSpec, n: usize) -> Matrix {
        let mut k = Matrix::zeros(field, n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                // vec(M)[j*n+i] = m_ij lands at vec(Mᵗ)[i*n+j]
                k.data[(i * n + j) * n * n + j * n + i] = field.one();
            }
        }
        k
    }

    /// Companion matrix with subdiagonal ones and the negated normalized
    /// coefficients in the last column, so `x³ − 2` gives last column `(2,0,0)ᵗ`.
    pub fn companion(p: &Polynomial) -> Result<Matrix> {
        let n = p.degree().filter(|&d| d >= 1).ok_or(Error::DegreeZero)?;
        let monic = p.monic()?;
        let field = p.field();
        Ok(Matrix::from_fn(field, n, n, |i, j| {
            if j == n - 1 {
                -monic.coeff(i)
            } else if i == j + 1 {
                field.one()
            } else {
                field.zero()
            }
        }))
    }

    /// Evaluates `p(self)` by Horner's scheme.
    pub fn poly_eval(&self, p: &Polynomial) -> Result<Matrix> {
        self.require_square()?;
        self.field.check(&p.field())?;
        let n = self.rows;
        let mut acc = Matrix::zeros(self.field, n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&Matrix::identity(self.field, n).scale(c)?)?;
        }
        Ok(acc)
    }

    /// Minimal polynomial via the first linear dependency among `I, A, A², …`.
    pub fn minimal_polynomial(&self) -> Result<Polynomial> {
        self.require_square()?;
        let n = self.rows;
        let mut powers = vec![Matrix::identity(self.field, n)];
        loop {
            let k = powers.len();
            let cur = powers[k - 1].mul(self)?;
            let stacked = Matrix::from_fn(self.field, n * n, k, |i, j| powers[j].vec().data[i].clone());
            if let Ok(c) = stacked.solve(&cur.vec()) {
                let mut coeffs: Vec<Scalar> = c.data.iter().map(|x| -x).collect();
                coeffs.push(self.field.one());
                return Polynomial::new(self.field, coeffs);
            }
            powers.push(cur);
        }
    }

    /// Entries as a vector, for `k x 1` or `1 x k` shapes.
    pub fn to_vector(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, &Scalar)> {
        self.data.iter().enumerate().find(|(_, s)| !s.is_zero())
    }
}

/// Fraction-free echelon form in place. Returns the rank and, for a square
/// full-rank input, the determinant.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, BigInt) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if pr != r {
            a.swap(pr, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    let det = if r == rows && rows == cols { prev * sign } else { BigInt::zero() };
    (r, det)
}

/// Elimination on row-major residue buffers.
pub(crate) mod modp {
    #[inline]
    fn inv(a: u32, p: u32) -> u32 {
        let mut acc = 1u64;
        let mut base = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    /// In-place RREF; returns pivot columns.
    pub fn rref(a: &mut [u32], rows: usize, cols: usize, p: u32) -> Vec<usize> {
        let p64 = p as u64;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| a[i * cols + c] != 0) else { continue };
            if pr != r {
                for j in 0..cols {
                    a.swap(pr * cols + j, r * cols + j);
                }
            }
            let iv = if p == 2 { 1 } else { inv(a[r * cols + c], p) as u64 };
            for j in c..cols {
                a[r * cols + j] = (a[r * cols + j] as u64 * iv % p64) as u32;
            }
            for i in 0..rows {
                let f = a[i * cols + c];
                if i == r || f == 0 {
                    continue;
                }
                let nf = p64 - f as u64;
                for j in c..cols {
                    a[i * cols + j] = ((a[i * cols + j] as u64 + nf * a[r * cols + j] as u64) % p64) as u32;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Determinant of an `n x n` buffer (destroyed).
    pub fn det(a: &mut [u32], n: usize, p: u32) -> u32 {
        let p64 = p as u64;
        let mut det = 1u64;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| a[i * n + c] != 0) else { return 0 };
            if pr != c {
                for j in 0..n {
                    a.swap(pr * n + j, c * n + j);
                }
                det = (p64 - det) % p64;
            }
            let piv = a[c * n + c] as u64;
            det = det * piv % p64;
            let iv = inv(piv as u32, p) as u64;
            for i in c + 1..n {
                let f = a[i * n + c] as u64 * iv % p64;
                if f == 0 {
                    continue;
                }
                let nf = p64 - f;
                for j in c..n {
                    a[i * n + j] = ((a[i * n + j] as u64 + nf * a[c * n + j] as u64) % p64) as u32;
                }
            }
        }
        det as u32
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

/// A matrix entry as it may appear in JSON: a number or a scalar string.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub(crate) enum EntryDoc {
    Int(i64),
    Text(String),
}

impl EntryDoc {
    pub(crate) fn to_scalar(&self, field: FieldSpec) -> Result<Scalar> {
        match self {
            EntryDoc::Int(v) => Ok(Scalar::reduce_rational(field, &BigRational::from_integer((*v).into()))?),
            EntryDoc::Text(s) => Scalar::parse(field, s),
        }
    }
}

pub(crate) fn rows_to_docs(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| m.row(i).iter().map(|s| s.to_string()).collect()).collect()
}

pub(crate) fn docs_to_matrix(field: FieldSpec, rows: &[Vec<EntryDoc>]) -> Result<Matrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|e| e.to_scalar(field)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(field, rows)
}

/// A matrix nested in a larger document: bare rows, or rows tagged with a
/// field that must agree with the document's.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub(crate) enum NestedMatrixDoc {
    Rows(Vec<Vec<EntryDoc>>),
    Tagged { field: FieldSpec, rows: Vec<Vec<EntryDoc>> },
}

impl NestedMatrixDoc {
    pub(crate) fn from_matrix(m: &Matrix) -> Self {
        NestedMatrixDoc::Rows(rows_to_docs(m).into_iter().map(|r| r.into_iter().map(EntryDoc::Text).collect()).collect())
    }

    pub(crate) fn to_matrix(&self, field: FieldSpec) -> Result<Matrix> {
        match self {
            NestedMatrixDoc::Rows(rows) => docs_to_matrix(field, rows),
            NestedMatrixDoc::Tagged { field: f, rows } => {
                f.check(&field)?;
                docs_to_matrix(field, rows)
            }
        }
    }
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    field: &'a FieldSpec,
    rows: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct MatrixIn {
    field: FieldSpec,
    rows: Vec<Vec<EntryDoc>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixOut { field: &self.field, rows: rows_to_docs(self) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixIn::deserialize(d)?;
        docs_to_matrix(doc.field, &doc.rows).map_err(serde::de::Error::custom)
    }
}
