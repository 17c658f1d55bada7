//! Fraction-free determinants of integer matrices.

use num_bigint::BigInt;

/// Whether a column-major integer matrix is invertible over ℚ.
pub(crate) fn is_nonzero(entries: &[BigInt], n: usize) -> bool {
    let small: Option<Vec<i128>> = entries.iter().map(|x| i128::try_from(x).ok()).collect();
    if let Some(d) = small.and_then(|v| det_i128(v, n)) {
        return d != 0;
    }
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| entries[j * n + i].clone()).collect()).collect();
    det_big(rows) != BigInt::default()
}

/// Bareiss determinant of a column-major buffer; `None` on overflow.
pub(crate) fn det_i128(mut a: Vec<i128>, n: usize) -> Option<i128> {
    let at = |i: usize, j: usize| j * n + i;
    let mut prev: i128 = 1;
    let mut sign = 1i128;
    for k in 0..n {
        if a[at(k, k)] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[at(i, k)] != 0) else { return Some(0) };
            for j in 0..n {
                a.swap(at(k, j), at(swap, j));
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[at(i, j)].checked_mul(a[at(k, k)])?.checked_sub(a[at(i, k)].checked_mul(a[at(k, j)])?)?;
                a[at(i, j)] = v / prev;
            }
        }
        prev = a[at(k, k)];
    }
    Some(sign * prev)
}

pub(crate) fn det_big(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let zero = BigInt::default();
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for k in 0..n {
        if a[k][k] == zero {
            match (k + 1..n).find(|&i| a[i][k] != zero) {
                Some(s) => {
                    a.swap(k, s);
                    sign = -sign;
                }
                None => return zero,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_big_paths() {
        assert_eq!(det_i128(vec![1, 3, 2, 4], 2), Some(-2));
        assert_eq!(det_i128(vec![0, 1, 1, 0], 2), Some(-1));
        assert_eq!(det_i128(vec![i128::MAX, 2, 2, i128::MAX], 2), None);
        let rows = vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(4), BigInt::from(2)]];
        assert_eq!(det_big(rows), BigInt::default());
        let huge = BigInt::from(i128::MAX) * BigInt::from(4);
        assert!(is_nonzero(&[huge.clone(), BigInt::from(0), BigInt::from(0), huge.clone()], 2));
        assert!(!is_nonzero(&[huge.clone(), huge.clone(), huge.clone(), huge], 2));
    }
}
