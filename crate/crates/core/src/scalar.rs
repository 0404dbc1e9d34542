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

//! Scalar abstraction for the simulator core.
//!
//! State vectors, gate matrices and circuits are generic over a real
//! floating-point type; amplitudes are `Complex<T>`. `f64` is the working
//! precision of the experiment driver, `f32` is supported for the core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar usable by the statevector core.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Unitarity tolerance for factory-built gates (`max |U^dagger U - I|`).
    fn gate_tolerance() -> Self;

    /// Tolerance for caller-supplied unitaries and for state normalization.
    fn state_tolerance() -> Self;

    /// Smallest outcome probability a measurement may collapse onto.
    fn collapse_floor() -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn gate_tolerance() -> Self {
        1e-10
    }
    fn state_tolerance() -> Self {
        1e-9
    }
    fn collapse_floor() -> Self {
        1e-15
    }
}

impl Real for f32 {
    fn gate_tolerance() -> Self {
        1e-5
    }
    fn state_tolerance() -> Self {
        1e-4
    }
    fn collapse_floor() -> Self {
        1e-7
    }
}
