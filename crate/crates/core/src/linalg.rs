//! Dense LU factorisation with partial pivoting for the small local systems
//! (24×24 Newton matrix, 2×2 global problems).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Factorises in place; fails on a zero (or non-finite) pivot.
    pub fn lu(mut self) -> Result<Lu<T>> {
        let n = self.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.data.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
        let tiny = scale * T::epsilon() * T::lit(1e-3);
        for c in 0..n {
            let mut p = c;
            let mut best = self[(c, c)].abs();
            for r in (c + 1)..n {
                let v = self[(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > tiny) || !best.is_finite() {
                return Err(Error::SingularMatrix { pivot: c });
            }
            if p != c {
                perm.swap(p, c);
                for k in 0..n {
                    self.data.swap(p * n + k, c * n + k);
                }
            }
            let piv = self[(c, c)];
            for r in (c + 1)..n {
                let f = self[(r, c)] / piv;
                self[(r, c)] = f;
                if f != T::zero() {
                    for k in (c + 1)..n {
                        let v = self[(c, k)];
                        self[(r, k)] = self[(r, k)] - f * v;
                    }
                }
            }
        }
        Ok(Lu { a: self, perm })
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Packed LU factors with row permutation.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    a: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.a.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = (0..i).fold(T::zero(), |acc, k| acc + self.a[(i, k)] * x[k]);
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let s = ((i + 1)..n).fold(T::zero(), |acc, k| acc + self.a[(i, k)] * x[k]);
            x[i] = (x[i] - s) / self.a[(i, i)];
        }
        x
    }
}
