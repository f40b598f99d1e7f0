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

//! Floating point abstraction shared by the numeric parts of the crate.
//!
//! Documents always carry `f64` values; matrices, state vectors and the
//! expression evaluator are generic over [`Scalar`] so that callers can run
//! them in single precision when memory matters more than accuracy.

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use std::fmt::{Debug, Display};

/// Real field used for amplitudes and matrix entries (`f32` or `f64`).
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Converts a double precision complex number into the target precision.
#[inline]
pub fn cast<T: Scalar>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}
