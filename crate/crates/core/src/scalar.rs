// Copyright 2026 The seqfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The exact scalar abstraction every valuation and utility is expressed in.
//!
//! All mechanisms and checkers are generic over [`Scalar`]. The trait is only
//! implemented (through the blanket impl) for totally ordered exact number
//! types such as [`num::BigRational`] and [`num::Rational64`]; floating point
//! types are excluded because they are not `Ord`.

use num::{FromPrimitive, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// Exact, totally ordered field element.
pub trait Scalar: Clone + Ord + Signed + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lifts a count into the scalar type.
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable in scalar type")
    }

    fn ratio_of(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("numerator representable") / Self::from_i64(den).expect("denominator representable")
    }

    /// `Some(k)` when the value is exactly the non-negative integer `k`.
    fn to_usize_exact(&self) -> Option<usize> {
        let k = self.to_usize()?;
        (Self::from_count(k) == *self).then_some(k)
    }
}

impl<T> Scalar for T where
    T: Clone + Ord + Signed + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Product of a slice of scalars; the empty product is one.
pub fn product<V: Scalar>(values: &[V]) -> V {
    values.iter().fold(V::one(), |acc, v| acc * v.clone())
}
