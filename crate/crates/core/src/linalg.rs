//! Dense Gaussian elimination over any field given by an [`Arith`] instance.

use crate::field::{FieldContext, FieldElement};

pub trait Arith {
    type E: Copy + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: Self::E) -> bool;
    fn add(&self, a: Self::E, b: Self::E) -> Self::E;
    fn sub(&self, a: Self::E, b: Self::E) -> Self::E;
    fn mul(&self, a: Self::E, b: Self::E) -> Self::E;
    /// Inverse of a nonzero element.
    fn inv(&self, a: Self::E) -> Self::E;
}

/// The prime field F_p with elements in `0..p`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField(pub u32);

impl Arith for PrimeField {
    type E = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn is_zero(&self, a: u32) -> bool {
        a == 0
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.0
    }

    fn inv(&self, a: u32) -> u32 {
        let p = self.0;
        let mut result = 1u32;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    }
}

impl Arith for FieldContext {
    type E = FieldElement;

    fn zero(&self) -> FieldElement {
        FieldContext::zero(self)
    }

    fn one(&self) -> FieldElement {
        FieldContext::one(self)
    }

    fn is_zero(&self, a: FieldElement) -> bool {
        a.is_zero()
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldContext::add(self, a, b)
    }

    fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldContext::sub(self, a, b)
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldContext::mul(self, a, b)
    }

    fn inv(&self, a: FieldElement) -> FieldElement {
        FieldContext::inv(self, a).expect("nonzero pivot")
    }
}

pub type Matrix<E> = Vec<Vec<E>>;

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns.
pub fn row_reduce<A: Arith>(k: &A, m: &mut Matrix<A::E>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !k.is_zero(m[i][c])) else {
            continue;
        };
        m.swap(r, pr);
        let inv = k.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = k.mul(*x, inv);
        }
        for i in 0..rows {
            if i == r || k.is_zero(m[i][c]) {
                continue;
            }
            let f = m[i][c];
            for j in c..cols {
                let v = k.mul(f, m[r][j]);
                m[i][j] = k.sub(m[i][j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<A: Arith>(k: &A, m: &Matrix<A::E>) -> usize {
    let mut work = m.clone();
    row_reduce(k, &mut work).len()
}

/// Basis of the right kernel {x : m x = 0}; `cols` is needed when `m` has
/// no rows.
pub fn kernel<A: Arith>(k: &A, m: &Matrix<A::E>, cols: usize) -> Vec<Vec<A::E>> {
    let mut work = m.clone();
    let pivots = row_reduce(k, &mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![k.zero(); cols];
            v[fc] = k.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = k.sub(k.zero(), work[row][fc]);
            }
            v
        })
        .collect()
}

pub fn determinant<A: Arith>(k: &A, m: &Matrix<A::E>) -> A::E {
    let n = m.len();
    let mut w = m.clone();
    let mut det = k.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !k.is_zero(w[i][c])) else {
            return k.zero();
        };
        if pr != c {
            w.swap(pr, c);
            det = k.sub(k.zero(), det);
        }
        det = k.mul(det, w[c][c]);
        let inv = k.inv(w[c][c]);
        for i in c + 1..n {
            if k.is_zero(w[i][c]) {
                continue;
            }
            let f = k.mul(w[i][c], inv);
            for j in c..n {
                let v = k.mul(f, w[c][j]);
                w[i][j] = k.sub(w[i][j], v);
            }
        }
    }
    det
}

pub fn inverse<A: Arith>(k: &A, m: &Matrix<A::E>) -> Option<Matrix<A::E>> {
    let n = m.len();
    let mut aug: Matrix<A::E> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(k, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Some solution of m x = rhs, if one exists.
pub fn solve<A: Arith>(k: &A, m: &Matrix<A::E>, rhs: &[A::E]) -> Option<Vec<A::E>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut aug: Matrix<A::E> = m
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let pivots = row_reduce(k, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![k.zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols];
    }
    Some(x)
}

pub fn mat_mul<A: Arith>(k: &A, a: &Matrix<A::E>, b: &Matrix<A::E>) -> Matrix<A::E> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(k.zero(), |acc, l| k.add(acc, k.mul(row[l], b[l][j])))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<A: Arith>(k: &A, a: &Matrix<A::E>, v: &[A::E]) -> Vec<A::E> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(k.zero(), |acc, (&x, &y)| k.add(acc, k.mul(x, y))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rank_and_kernel() {
        let k = PrimeField(3);
        let m = vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 1]];
        // second row = 2 * first row mod 3
        assert_eq!(rank(&k, &m), 2);
        let ker = kernel(&k, &m, 3);
        assert_eq!(ker.len(), 1);
        assert_eq!(mat_vec(&k, &m, &ker[0]), vec![0, 0, 0]);
        assert_eq!(determinant(&k, &m), 0);
        assert!(inverse(&k, &m).is_none());
    }

    #[test]
    fn inverse_and_solve() {
        let k = PrimeField(5);
        let m = vec![vec![1, 2, 3], vec![0, 1, 4], vec![5 % 5, 6 % 5, 0]];
        let inv = inverse(&k, &m).unwrap();
        let id = mat_mul(&k, &m, &inv);
        assert_eq!(id, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let x = solve(&k, &m, &[1, 2, 3]).unwrap();
        assert_eq!(mat_vec(&k, &m, &x), vec![1, 2, 3]);
        // determinant by cofactor expansion: 1*(0-4) - 2*(0-4) + 3*(0-1) = -4+8-3 = 1
        assert_eq!(determinant(&k, &m), 1);
    }

    #[test]
    fn inconsistent_system() {
        let k = PrimeField(3);
        let m = vec![vec![1, 1], vec![2, 2]];
        assert!(solve(&k, &m, &[1, 1]).is_none());
        assert!(solve(&k, &m, &[1, 2]).is_some());
    }
}
