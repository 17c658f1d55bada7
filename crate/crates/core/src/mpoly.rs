//! Sparse multivariate polynomials and the generic determinant
//! `det(t₁B₁ + … + t_k B_k)` of a matrix pencil.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{dim_mismatch, Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;

/// Default cap on the number of monomials a generic determinant may have.
pub const DEFAULT_MONOMIAL_CAP: u64 = 1_000_000;

pub type Exponents = Vec<u16>;

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Exponents, Scalar>,
}

impl MPoly {
    pub fn zero(field: FieldSpec, nvars: usize) -> Self {
        MPoly { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar, nvars: usize) -> Self {
        let mut p = MPoly::zero(c.field(), nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(field: FieldSpec, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(field, nvars);
        p.terms.insert(e, field.one());
        p
    }

    /// Linear form `Σ cᵢ tᵢ`.
    pub fn linear(field: FieldSpec, coeffs: &[Scalar]) -> Self {
        let nvars = coeffs.len();
        let mut p = MPoly::zero(field, nvars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u16]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&d| d as usize).sum()).max()
    }

    fn add_term(&mut self, e: Exponents, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.scale(&self.field.int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> MPoly {
        let mut out = MPoly::zero(self.field, self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.field, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::constant(self.field.one(), self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &d) in point.iter().zip(e) {
                if d > 0 {
                    t = &t * &x.pow(d as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| if d == 1 { format!("t{}", i + 1) } else { format!("t{}^{d}", i + 1) })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `C(a, b)`, saturating.
pub fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc.saturating_mul((a - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Upper bound on the monomials of a degree-`n` form in `k` variables.
pub fn monomial_bound(n: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    binomial((n + k - 1) as u64, n as u64)
}

/// Expands `det(Σ tᵢ Bᵢ)` symbolically.
///
/// Minors are built row by row over column subsets (Laplace expansion along
/// the newest row), so the cost is governed by `2ⁿ` subsets rather than `n!`
/// permutations.
pub fn generic_det(basis: &[Matrix], monomial_cap: u64) -> Result<MPoly> {
    let first = basis.first().ok_or_else(|| dim_mismatch("empty pencil"))?;
    let field = first.field();
    let n = first.rows();
    if basis.iter().any(|b| b.shape() != (n, n) || b.field() != field) {
        return Err(dim_mismatch("pencil matrices must share shape and field"));
    }
    if n > 20 {
        return Err(dim_mismatch(format!("pencil side {n} too large for subset expansion")));
    }
    let k = basis.len();
    let bound = monomial_bound(n, k);
    if bound > monomial_cap as u128 {
        return Err(Error::BudgetExceeded { needed: bound, budget: monomial_cap });
    }
    let entry = |i: usize, j: usize| -> MPoly {
        let coeffs: Vec<Scalar> = basis.iter().map(|b| b.get(i, j).clone()).collect();
        MPoly::linear(field, &coeffs)
    };
    let mut minors: BTreeMap<u32, MPoly> = BTreeMap::new();
    minors.insert(0, MPoly::constant(field.one(), k));
    for row in 0..n {
        let mut next: BTreeMap<u32, MPoly> = BTreeMap::new();
        let entries: Vec<MPoly> = (0..n).map(|j| entry(row, j)).collect();
        for (&mask, minor) in &minors {
            if minor.is_zero() {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 || entries[j].is_zero() {
                    continue;
                }
                let wider = mask | (1 << j);
                // columns of `wider` greater than j decide the cofactor sign
                let above = (wider >> (j + 1)).count_ones();
                let mut term = entries[j].mul(minor);
                if above % 2 == 1 {
                    term = term.scale(&field.int(-1));
                }
                let slot = next.entry(wider).or_insert_with(|| MPoly::zero(field, k));
                *slot = slot.add(&term);
            }
        }
        minors = next;
    }
    Ok(minors.remove(&((1u32 << n) - 1)).unwrap_or_else(|| MPoly::zero(field, k)))
}
