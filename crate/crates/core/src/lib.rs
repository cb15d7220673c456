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

//! Fair sequential committee elections with exact rational arithmetic.
//!
//! An [`Instance`] is a sequence of rounds; in each round every agent values
//! every candidate, one candidate is elected, and agents accumulate utility
//! additively. The crate provides fairness checkers, offline and online
//! mechanisms, Borda-specific tools, adaptive adversaries and axiom tests.
//!
//! All code is generic over [`Scalar`]; [`Ratio`] (arbitrary precision) is
//! the default and [`SmallRatio`] is a faster fixed-width alternative.

pub mod adversaries;
pub mod axioms;
pub mod borda;
pub mod enumerate;
pub mod error;
pub mod fairness;
pub mod io;
pub mod mechanism;
pub mod model;
pub mod offline;
pub mod online;
pub mod random;
pub mod repro;
pub mod scalar;

pub use enumerate::{SearchConfig, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use model::{Extended, Instance, Outcome, RoundMatrix, UtilityVector};
pub use scalar::Scalar;

/// Arbitrary-precision rational, the default scalar.
pub type Ratio = num::BigRational;
/// 64-bit rational; overflows panic, so use it only for small valuations.
pub type SmallRatio = num::Rational64;
pub type ExtendedRatio = Extended<Ratio>;
pub type SmallInstance = Instance<SmallRatio>;
