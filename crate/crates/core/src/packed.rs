//! Residue-level helpers for exhaustive scans over small prime fields.
//!
//! Square matrices are handled as column-major `vec` buffers of residues. A
//! buffer can also be read as a row-major matrix, which is the transpose and
//! has the same determinant, so invertibility tests work on `vec` directly.
//! A matrix *code* is the base-p integer whose little-endian digits are the
//! entries of `vec(M)`.

use crate::matrix::modp;

/// Little-endian base-p counter over fixed-length digit vectors.
#[derive(Clone, Debug)]
pub struct Odometer {
    digits: Vec<u32>,
    p: u32,
    fresh: bool,
}

impl Odometer {
    pub fn new(len: usize, p: u32) -> Self {
        Odometer { digits: vec![0; len], p, fresh: true }
    }

    pub fn starting_at(p: u32, len: usize, code: u64) -> Self {
        Odometer { digits: decode(code, p, len), p, fresh: true }
    }

    /// Advances to the next vector; the first call yields the start state.
    /// Returns the index of the highest digit that changed, or `None` when
    /// the counter wraps around.
    pub fn advance(&mut self) -> Option<usize> {
        if self.fresh {
            self.fresh = false;
            return Some(self.digits.len().saturating_sub(1));
        }
        for (k, d) in self.digits.iter_mut().enumerate() {
            *d += 1;
            if *d < self.p {
                return Some(k);
            }
            *d = 0;
        }
        None
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }
}

pub fn decode(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

pub fn encode(digits: &[u32], p: u32) -> u64 {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
}

/// `|GL_n(F_q)| = ∏_{i<n} (qⁿ − qⁱ)`; saturates instead of overflowing.
pub fn gl_order(q: u64, n: usize) -> u128 {
    let qn = (q as u128).saturating_pow(n as u32);
    (0..n).fold(1u128, |acc, i| acc.saturating_mul(qn - (q as u128).pow(i as u32)))
}

/// `q^e`, saturating.
pub fn pow_sat(q: u64, e: usize) -> u128 {
    (q as u128).saturating_pow(e as u32)
}

pub fn is_invertible_vec(v: &[u32], n: usize, p: u32, scratch: &mut Vec<u32>) -> bool {
    scratch.clear();
    scratch.extend_from_slice(v);
    modp::det(scratch, n, p) != 0
}

/// `out = op · v` for a row-major `rows x v.len()` residue matrix.
pub fn apply(op: &[u32], v: &[u32], out: &mut [u32], p: u32) {
    let cols = v.len();
    let p64 = p as u64;
    for (r, o) in out.iter_mut().enumerate() {
        let row = &op[r * cols..(r + 1) * cols];
        let mut acc = 0u64;
        for (a, b) in row.iter().zip(v) {
            acc += *a as u64 * *b as u64;
        }
        *o = (acc % p64) as u32;
    }
}

/// Column-major `vec` of the identity.
pub fn identity_vec(n: usize) -> Vec<u32> {
    let mut v = vec![0; n * n];
    for i in 0..n {
        v[i * n + i] = 1;
    }
    v
}

/// Every invertible `n x n` matrix over GF(p) as a `vec` buffer, in
/// ascending code order.
pub fn gl_vecs(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut odo = Odometer::new(n * n, p);
    let mut scratch = Vec::new();
    let mut out = Vec::new();
    while odo.advance().is_some() {
        if is_invertible_vec(odo.digits(), n, p, &mut scratch) {
            out.push(odo.digits().to_vec());
        }
    }
    out
}
