#![allow(dead_code)]

use glpres::{FieldSpec, Matrix, Scalar};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const Q: FieldSpec = FieldSpec::RATIONALS;

pub fn gf(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entry-wise reduction of an integer matrix into GF(p).
pub fn reduce(m: &Matrix, field: FieldSpec) -> Matrix {
    Matrix::from_fn(field, m.rows(), m.cols(), |i, j| {
        let r: &BigRational = m.get(i, j).as_rational().unwrap();
        Scalar::reduce_rational(field, r).unwrap()
    })
}

/// Leibniz expansion, independent of the elimination code.
pub fn leibniz_det(m: &Matrix) -> Scalar {
    let n = m.rows();
    let field = m.field();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = field.zero();
    permute(&mut perm, 0, &mut |p| {
        let mut sign = 1i64;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        let mut term = field.int(sign);
        for (i, &j) in p.iter().enumerate() {
            term = &term * m.get(i, j);
        }
        total = &total + &term;
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// All nonzero column vectors of length `n` over GF(p).
pub fn nonzero_vectors(field: FieldSpec, n: usize) -> Vec<Matrix> {
    let p = field.modulus().unwrap() as u64;
    (1..p.pow(n as u32))
        .map(|mut code| {
            Matrix::column(
                field,
                (0..n)
                    .map(|_| {
                        let d = code % p;
                        code /= p;
                        field.int(d as i64)
                    })
                    .collect(),
            )
            .unwrap()
        })
        .collect()
}

/// All `n x n` matrices over GF(p).
pub fn all_matrices(field: FieldSpec, n: usize) -> Vec<Matrix> {
    let p = field.modulus().unwrap() as u64;
    (0..p.pow((n * n) as u32))
        .map(|mut code| {
            Matrix::from_fn(field, n, n, |_, _| {
                let d = code % p;
                code /= p;
                field.int(d as i64)
            })
        })
        .collect()
}

/// Normalizes a vector so its first nonzero entry is 1.
pub fn normalized(x: &Matrix) -> Matrix {
    let (_, lead) = x.first_nonzero().unwrap();
    x.scale(&lead.inv().unwrap()).unwrap()
}
