//! Exact dense linear algebra over ℚ.
//!
//! Ranks and determinants use fraction-free (Bareiss) elimination on
//! integer matrices obtained by clearing row denominators; linear solves
//! use Gauss–Jordan over ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::Q;

fn integer_rows(m: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Runs Bareiss elimination in place; returns the rank and the sign of the
/// row permutation.
fn bareiss(a: &mut [Vec<BigInt>]) -> (usize, i32) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut sign = 1;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, sign)
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut a = integer_rows(m);
    bareiss(&mut a).0
}

/// Determinant of a square matrix.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return Q::one();
    }
    let scale = m.iter().fold(Q::one(), |acc, row| {
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        acc * Q::from_integer(l)
    });
    let mut a = integer_rows(m);
    let (r, sign) = bareiss(&mut a);
    if r < n {
        return Q::zero();
    }
    let det = Q::from_integer(a[n - 1][n - 1].clone()) / scale;
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Reduced row echelon form in place; returns the pivot columns among the
/// first `cols` columns.
fn rref(m: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let width = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, r);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..width {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `A x = b`; returns one solution (free variables set to zero) or
/// `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, cols);
    if m[pivots.len()..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Basis of the null space of an `rows × cols` matrix, one vector per free
/// column.
pub fn kernel(a: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e: Vec<Q> = (0..n).map(|i| if i == k { Q::one() } else { Q::zero() }).collect();
        cols.push(solve(m, &e)?);
    }
    if determinant(m).is_zero() {
        return None;
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}
