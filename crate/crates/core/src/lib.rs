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

//! Toolkit for the QIS-XML quantum gate, circuit and program interchange
//! format.
//!
//! Documents are parsed by [`xmlio`] into [`model`] values, cross-library
//! references are resolved by [`resolver`], checked by [`validate`],
//! lowered into a [`rewrite::Netlist`] and then simulated ([`sim`]),
//! drawn ([`svgrender`]) or compiled for external simulators ([`codegen`]).
//! [`stdgates`] ships the standard gate library and [`genadder`] builds
//! ripple-carry adder circuits.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix it to
//! double precision, which is what every tolerance in the test suite
//! assumes.

#![allow(clippy::result_large_err)]
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod codegen;
pub mod expr;
pub mod genadder;
pub mod linalg;
pub mod model;
pub mod resolver;
pub mod rewrite;
pub mod scalar;
pub mod sim;
pub mod stdgates;
pub mod svgrender;
pub mod validate;
pub mod xmlio;

pub use scalar::Scalar;

/// Double-precision dense matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
/// Single-precision dense matrix.
pub type Matrix32 = linalg::DenseMatrix<f32>;
/// Double-precision state vector.
pub type State = sim::StateVector<f64>;
/// Single-precision state vector.
pub type State32 = sim::StateVector<f32>;
/// Double-precision complex amplitude.
pub type Amplitude = num_complex::Complex<f64>;
