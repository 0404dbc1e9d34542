// Copyright 2026 The ionmirror Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Small dense complex matrices.
//!
//! Gate matrices in this crate are at most 8x8, so a flat row-major buffer
//! with naive products is all that is needed.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a square.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows<const N: usize>(rows: [[Complex<T>; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// Builds a diagonal matrix.
    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * m.dim + i] = e;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`; `self` owns the more significant index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.data[r1 * a + c1];
                if x.is_zero() {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        out.data[(r1 * b + r2) * n + c1 * b + c2] = x * other.data[r2 * b + c2];
                    }
                }
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> T {
        let n = self.dim;
        (0..n)
            .map(|c| (0..n).map(|r| self.data[r * n + c].norm()).sum::<T>())
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_deviation(&self) -> T {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).max_abs()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    /// Matrix exponential by scaling and squaring around a fixed-order Taylor core.
    ///
    /// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, so the
    /// truncation error of the order-18 series is far below 1e-12 relative.
    pub fn expm(&self) -> Self {
        const TAYLOR_ORDER: usize = 18;
        let half = T::lit(0.5);
        let norm = self.one_norm();
        let mut squarings = 0u32;
        let mut scale = T::one();
        while norm * scale > half {
            scale = scale * half;
            squarings += 1;
        }
        let a = self.scale_real(scale);

        // Horner form: I + A(I + A/2(I + A/3(...)))
        let eye = Self::identity(self.dim);
        let mut acc = eye.clone();
        for k in (1..=TAYLOR_ORDER).rev() {
            let inv_k = T::one() / T::lit(k as f64);
            acc = &eye + &(&a * &acc).scale_real(inv_k);
        }
        for _ in 0..squarings {
            acc = &acc * &acc;
        }
        acc
    }

    /// Converts the entries to another scalar type.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let x = self.data[r * n + k];
                if x.is_zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + x * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}
