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

//! Real scalar types the linear algebra is generic over.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};

/// A floating point field usable as the real part of amplitudes.
///
/// The comparison tolerances scale with the precision: the defaults for
/// `f64` are the ones all verification suites are specified at, `f32`
/// gets looser values so the same code paths can run single precision.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Max-norm tolerance for operator and state comparisons.
    fn default_tol() -> Self;
    /// Tolerance for deciding that a state is fixed by a projection.
    fn classify_tol() -> Self;
    /// Amplitudes at or below this magnitude are dropped from sparse vectors.
    fn prune_tol() -> Self {
        Self::epsilon()
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every Real")
    }
}

impl Real for f64 {
    fn default_tol() -> f64 {
        1e-10
    }
    fn classify_tol() -> f64 {
        1e-8
    }
}

impl Real for f32 {
    fn default_tol() -> f32 {
        1e-5
    }
    fn classify_tol() -> f32 {
        1e-4
    }
}
