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

//! Exact simulation of the stabilizer toy theory.
//!
//! Epistemic states are [`StabilizerGroup`]s of signed toy elements; the
//! [`oracle`] module enumerates ontic distributions to cross-check every
//! stabilizer-level computation exactly.

pub mod algebra;
pub mod branch;
pub mod bvc;
pub mod codes;
pub mod crypto;
pub mod dynamics;
pub mod error;
pub mod mbtc;
pub mod oracle;
pub mod permutation;
pub mod random;
pub mod rational;

pub use algebra::{Membership, StabilizerGroup, ToyElement, ToySymbol};
pub use error::{Error, ErrorClass, Result};
pub use oracle::{OnticDistribution, OnticState, Oracle};
pub use permutation::{permutation_stabilizer_of, Factor, LocalPerm, ToyPermutation};
pub use rational::{Dyadic, Ratio};
