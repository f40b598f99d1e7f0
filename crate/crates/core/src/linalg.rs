// Copyright 2026 The qisxml Authors
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

use crate::scalar::Scalar;
use num_complex::Complex;
use std::ops::{Index, IndexMut, Mul};

/// Square complex matrix stored row-major, addressed 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from nested rows. Panics if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend(row);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * k).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// True iff every entry of `M†M − I` has modulus at most `tol`.
    pub fn is_unitary(&self, tol: T) -> bool {
        let prod = &self.adjoint() * self;
        prod.max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    /// True iff every column holds exactly one entry equal to `1` and zeros
    /// elsewhere, compared exactly.
    pub fn is_permutation(&self) -> bool {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let mut row_seen = vec![false; self.dim];
        for c in 0..self.dim {
            let mut ones = 0;
            for r in 0..self.dim {
                let v = self[(r, c)];
                if v == one {
                    ones += 1;
                    if row_seen[r] {
                        return false;
                    }
                    row_seen[r] = true;
                } else if v != zero {
                    return false;
                }
            }
            if ones != 1 {
                return false;
            }
        }
        true
    }

    /// For a permutation matrix, the image row of every column.
    pub fn permutation_image(&self) -> Option<Vec<usize>> {
        if !self.is_permutation() {
            return None;
        }
        let one = Complex::new(T::one(), T::zero());
        Some(
            (0..self.dim)
                .map(|c| (0..self.dim).find(|&r| self[(r, c)] == one).unwrap())
                .collect(),
        )
    }

    /// Rescales so that the first entry (row-major) whose modulus exceeds
    /// `eps` becomes real and positive.
    pub fn phase_normalized(&self, eps: T) -> Self {
        match self.data.iter().find(|z| z.norm() > eps) {
            Some(z) => self.scale(Complex::new(z.norm(), T::zero()) / *z),
            None => self.clone(),
        }
    }

    /// Equality up to a global phase factor, within `tol` entrywise.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: T) -> bool {
        let eps = T::from_f64(1e-9);
        self.dim == other.dim
            && self
                .phase_normalized(eps)
                .max_abs_diff(&other.phase_normalized(eps))
                <= tol
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<T: Scalar> Mul for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_is_unitary_and_zero_is_not() {
        assert!(DenseMatrix::<f64>::identity(4).is_unitary(1e-12));
        assert!(!DenseMatrix::<f64>::zeros(2).is_unitary(1e-9));
    }

    #[test]
    fn hadamard_product_by_hand() {
        let h = 1.0 / 2f64.sqrt();
        let m = DenseMatrix::from_rows(vec![vec![c(h, 0.), c(h, 0.)], vec![c(h, 0.), c(-h, 0.)]]);
        let sq = &m * &m;
        assert!(sq.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        assert!(m.is_unitary(1e-9));
        assert!(!m.is_permutation());
    }

    #[test]
    fn permutation_detection() {
        let x = DenseMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        assert!(x.is_permutation());
        assert_eq!(x.permutation_image(), Some(vec![1, 0]));
        let minus = x.scale(c(-1., 0.));
        assert!(!minus.is_permutation());
    }

    #[test]
    fn global_phase_is_ignored() {
        let x = DenseMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let phased = x.scale(Complex::from_polar(1.0, 0.7));
        assert!(x.approx_eq_up_to_phase(&phased, 1e-12));
        assert!(!x.approx_eq_up_to_phase(&DenseMatrix::identity(2), 1e-6));
    }
}
