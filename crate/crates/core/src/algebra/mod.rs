// Copyright 2026 The toystab Authors
// SPDX-License-Identifier: Apache-2.0

//! Signed toy elements, stabilizer groups and their GF(2) machinery.

mod element;
mod group;
mod symplectic;

pub use element::{compatible, multiply, ToyElement, ToySymbol};
pub use group::{validate_group, Membership, StabilizerGroup, Violation};
pub use symplectic::{symplectic_basis, SymplecticBasis};

pub(crate) use group::{all_columns, column, echelon, site_columns};
