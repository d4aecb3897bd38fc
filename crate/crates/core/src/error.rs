// Copyright 2026 The toystab Authors
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

use thiserror::Error;

/// Errors raised across the library.
///
/// The variants are grouped so a front end can map them onto exit codes:
/// malformed input, a well-formed request that violates a domain rule, or an
/// internal consistency failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("length mismatch: expected {expected} systems, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid stabilizer group: {0}")]
    InvalidGroup(String),
    #[error("enumeration over {n} systems exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Domain,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) => ErrorClass::Parse,
            Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
