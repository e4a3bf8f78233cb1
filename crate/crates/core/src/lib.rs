// Copyright 2026 The multisuccessor Authors
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

//! Multisuccessor models of modular arithmetic on finite Hilbert spaces.
//!
//! A model of `n` bits consists of one successor operator `V_a` per
//! parameter (informally "add `2^(j−1)`"), two projections `P_{a,α}`,
//! `P_{a,γ}` per parameter that read the binary digit, and one flip `U_a`
//! per parameter. Addition, doubling and multiplication are built as
//! products of controlled versions of these operators. The same builders
//! run on the standard product-state model and on a model whose number
//! states are entangled, and every verification suite reports identically
//! on both.
//!
//! Core types are generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix `f64`, which all verification
//! tolerances are stated for.

pub mod arithmetic;
pub mod axioms;
pub mod cli;
pub mod hilbert;
pub mod profiler;
pub mod representations;
mod scalar;
pub mod successor;

pub use scalar::Real;

pub type Amplitude = num_complex::Complex<f64>;
pub type StateVector = hilbert::State<f64>;
pub type LinearOperator = hilbert::Operator<f64>;
pub type SuccessorModel = successor::Model<f64>;
pub type VerifiedSuccessorModel = successor::VerifiedModel<f64>;
pub type NumberEncoding = representations::Encoding<f64>;
pub type ArithmeticOperator = arithmetic::ArithmeticOperator<f64>;

/// Single-precision variants.
pub type StateVectorF32 = hilbert::State<f32>;
pub type LinearOperatorF32 = hilbert::Operator<f32>;
pub type SuccessorModelF32 = successor::Model<f32>;
