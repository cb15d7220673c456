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

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by instance construction, mechanisms and checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid outcome: {0}")]
    InvalidOutcome(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("enumeration budget exceeded: m^T = {required} outcomes, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("round overflow: round {round} requested but the horizon is {horizon}")]
    RoundOverflow { round: usize, horizon: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown identifier: {0}")]
    UnknownId(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
