//! Minimal dense row-major matrix used by the assembly and spectral code.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type CMatrix<T> = Matrix<Complex<T>>;

impl<E: Copy> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Leading principal `n × n` block.
    pub fn leading(&self, n: usize) -> Self {
        Self::from_fn(n.min(self.rows), n.min(self.cols), |i, j| self[(i, j)])
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E> Matrix<E> {
    pub fn zeros<T: Real>(rows: usize, cols: usize) -> Self
    where
        E: Scalar<T>,
    {
        Self { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity<T: Real>(n: usize) -> Self
    where
        E: Scalar<T>,
    {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = E::one();
        }
        m
    }

    pub fn diagonal<T: Real>(values: &[E]) -> Self
    where
        E: Scalar<T>,
    {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint<T: Real>(&self) -> Self
    where
        E: Scalar<T>,
    {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.data[i * self.cols + j].conj());
            }
        }
        Self { rows: self.cols, cols: self.rows, data: out }
    }

    pub fn matmul<T: Real>(&self, rhs: &Self) -> Result<Self>
    where
        E: Scalar<T>,
    {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let (m, p) = (self.rows, rhs.cols);
        let mut out = vec![E::zero(); m * p];
        if p > 0 {
            out.par_chunks_mut(p).enumerate().for_each(|(i, row)| {
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == E::zero() {
                        continue;
                    }
                    for (o, &b) in row.iter_mut().zip(rhs.row(k)) {
                        *o += a * b;
                    }
                }
            });
        }
        Ok(Self { rows: m, cols: p, data: out })
    }

    /// `self* · rhs`.
    pub fn adjoint_mul<T: Real>(&self, rhs: &Self) -> Result<Self>
    where
        E: Scalar<T>,
    {
        self.adjoint().matmul(rhs)
    }

    fn zip_with<T: Real>(&self, rhs: &Self, f: impl Fn(E, E) -> E) -> Result<Self>
    where
        E: Scalar<T>,
    {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.data.len(), found: rhs.data.len() });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add<T: Real>(&self, rhs: &Self) -> Result<Self>
    where
        E: Scalar<T>,
    {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub<T: Real>(&self, rhs: &Self) -> Result<Self>
    where
        E: Scalar<T>,
    {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scaled<T: Real>(&self, s: E) -> Self
    where
        E: Scalar<T>,
    {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    /// `max |a_ij|`.
    pub fn max_abs<T: Real>(&self) -> T
    where
        E: Scalar<T>,
    {
        self.data.iter().map(|a| a.modulus()).fold(T::zero(), T::max)
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn frobenius<T: Real>(&self) -> T
    where
        E: Scalar<T>,
    {
        self.data.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermitian_defect<T: Real>(&self) -> T
    where
        E: Scalar<T>,
    {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).modulus());
            }
        }
        worst
    }

    /// Largest `|i - j|` over nonzero entries.
    pub fn bandwidth<T: Real>(&self) -> usize
    where
        E: Scalar<T>,
    {
        let mut w = 0;
        for i in 0..self.rows {
            for (j, &a) in self.row(i).iter().enumerate() {
                if a != E::zero() {
                    w = w.max(i.abs_diff(j));
                }
            }
        }
        w
    }

    /// Block-diagonal matrix `diag(blocks)`.
    pub fn block_diagonal<T: Real>(blocks: &[Self]) -> Self
    where
        E: Scalar<T>,
    {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self)
    where
        E: Copy,
    {
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self
    where
        E: Copy,
    {
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }
}

impl<T: Real> CMatrix<T> {
    /// Real part, when every imaginary part is exactly zero.
    pub fn to_real(&self) -> Option<Matrix<T>> {
        if self.data.iter().any(|z| z.im != T::zero()) {
            return None;
        }
        Some(self.map(|z| z.re))
    }
}

impl<T: Real> Matrix<T> {
    pub fn to_complex(&self) -> CMatrix<T> {
        self.map(|x| Complex::new(x, T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_adjoint() {
        let a = Matrix::from_fn(2, 3, |i, j| Complex::new((i + j) as f64, i as f64 - j as f64));
        let b = a.adjoint();
        assert_eq!(b.rows(), 3);
        assert_eq!(b[(2, 1)], Complex::new(3.0, 1.0));
        let g = a.matmul(&b).unwrap();
        assert!(g.hermitian_defect() < 1e-15);
        assert!(a.matmul(&a).is_err());
        let id = Matrix::<f64>::identity(3);
        let r = Matrix::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        assert_eq!(id.matmul(&r).unwrap(), r);
    }

    #[test]
    fn block_helpers() {
        let a = Matrix::<f64>::identity(2);
        let b = Matrix::<f64>::diagonal(&[2.0, 3.0, 4.0]);
        let d = Matrix::block_diagonal(&[a.clone(), b.clone()]);
        assert_eq!(d.rows(), 5);
        assert_eq!(d[(4, 4)], 4.0);
        assert_eq!(d.block(2, 2, 3, 3), b);
        assert_eq!(d.bandwidth(), 0);
        assert_eq!(d.leading(2), a);
    }
}
