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

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::element::ToyElement;
use crate::error::{Error, Result};

/// Symbol-bit column `c` of an element: even columns are x bits, odd are z bits.
pub(crate) fn column(e: &ToyElement, c: usize) -> bool {
    if c.is_multiple_of(2) {
        e.x_bit(c / 2)
    } else {
        e.z_bit(c / 2)
    }
}

/// Site-major column order over all `n` sites.
pub(crate) fn all_columns(n: usize) -> Vec<usize> {
    (0..2 * n).collect()
}

/// Columns of the listed sites, in site order.
pub(crate) fn site_columns(sites: &[usize]) -> Vec<usize> {
    sites.iter().flat_map(|&s| [2 * s, 2 * s + 1]).collect()
}

/// Row of a Gauss-Jordan elimination, remembering which inputs it combines.
#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub elem: ToyElement,
    pub combo: Vec<bool>,
}

/// Result of eliminating a list of elements over a chosen column order.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    /// Reduced rows with their pivot column, in pivot order.
    pub rows: Vec<(usize, Row)>,
    /// Rows that became symbol-free; their sign tells `+I` from `-I`.
    pub null: Vec<Row>,
}

/// Reduced row echelon form of `elems` over `cols` (in that priority).
/// Rows whose symbols vanish on `cols` but not elsewhere are kept at the end
/// of `rows` with pivot `usize::MAX`.
pub(crate) fn echelon(elems: &[ToyElement], cols: &[usize]) -> Echelon {
    let m = elems.len();
    let mut rows: Vec<Row> = elems
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut combo = vec![false; m];
            combo[i] = true;
            Row { elem: e.clone(), combo }
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for &c in cols {
        let Some(p) = (top..rows.len()).find(|&r| column(&rows[r].elem, c)) else {
            continue;
        };
        rows.swap(top, p);
        let pivot = rows[top].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != top && column(&row.elem, c) {
                row.elem.mul_assign(&pivot.elem);
                for (a, b) in row.combo.iter_mut().zip(&pivot.combo) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        top += 1;
    }
    let mut out = Vec::new();
    let mut null = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        if i < pivots.len() {
            out.push((pivots[i], row));
        } else if row.elem.is_identity_symbols() {
            null.push(row);
        } else {
            out.push((usize::MAX, row));
        }
    }
    Echelon { rows: out, null }
}

/// Why a generator list fails to describe a toy stabilizer group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    LengthMismatch { index: usize, expected: usize, found: usize },
    TooManyGenerators { count: usize, n: usize },
    /// The listed generators multiply to `+I`.
    Dependent { witness: Vec<usize> },
    /// The listed generators multiply to `-I`.
    ContainsMinusIdentity { witness: Vec<usize> },
    Incompatible { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { index, expected, found } => {
                write!(f, "generator {index} has {found} systems, expected {expected}")
            }
            Violation::TooManyGenerators { count, n } => {
                write!(f, "{count} generators on {n} systems")
            }
            Violation::Dependent { witness } => {
                write!(f, "generators {witness:?} are dependent (product is +I)")
            }
            Violation::ContainsMinusIdentity { witness } => {
                write!(f, "generators {witness:?} multiply to -I")
            }
            Violation::Incompatible { first, second } => {
                write!(f, "generators {first} and {second} are incompatible")
            }
        }
    }
}

fn witness(combo: &[bool]) -> Vec<usize> {
    combo.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
}

/// Check independence, `-I` exclusion and pairwise compatibility.
pub fn validate_group(n: usize, gens: &[ToyElement]) -> std::result::Result<(), Violation> {
    for (i, g) in gens.iter().enumerate() {
        if g.len() != n {
            return Err(Violation::LengthMismatch { index: i, expected: n, found: g.len() });
        }
    }
    let ech = echelon(gens, &all_columns(n));
    if let Some(row) = ech.null.iter().find(|r| r.elem.is_negative()) {
        return Err(Violation::ContainsMinusIdentity { witness: witness(&row.combo) });
    }
    if let Some(row) = ech.null.first() {
        return Err(Violation::Dependent { witness: witness(&row.combo) });
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if gens[i].symplectic(&gens[j]) {
                return Err(Violation::Incompatible { first: i, second: j });
            }
        }
    }
    if gens.len() > n {
        return Err(Violation::TooManyGenerators { count: gens.len(), n });
    }
    Ok(())
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    InGroup,
    NegationInGroup,
    Absent,
}

/// A validated toy stabilizer group, stored in canonical echelon form.
///
/// Two groups are equal exactly when they generate the same set of elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<ToyElement>,
}

impl StabilizerGroup {
    pub fn new(n: usize, gens: Vec<ToyElement>) -> Result<StabilizerGroup> {
        validate_group(n, &gens).map_err(|v| Error::InvalidGroup(v.to_string()))?;
        Ok(StabilizerGroup::canonical(n, &gens))
    }

    /// Canonicalize generators already known to be valid.
    pub(crate) fn canonical(n: usize, gens: &[ToyElement]) -> StabilizerGroup {
        let ech = echelon(gens, &all_columns(n));
        debug_assert!(ech.null.is_empty());
        StabilizerGroup { n, gens: ech.rows.into_iter().map(|(_, r)| r.elem).collect() }
    }

    /// Build from generators, checking validity only in debug builds.
    pub(crate) fn from_valid(n: usize, gens: &[ToyElement]) -> StabilizerGroup {
        debug_assert_eq!(validate_group(n, gens), Ok(()), "{gens:?}");
        StabilizerGroup::canonical(n, gens)
    }

    pub fn maximally_mixed(n: usize) -> StabilizerGroup {
        StabilizerGroup { n, gens: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ToyElement] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn is_pure(&self) -> bool {
        self.gens.len() == self.n
    }

    pub fn member(&self, g: &ToyElement) -> Result<Membership> {
        if g.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, found: g.len() });
        }
        let r = self.reduce(g);
        Ok(if !r.is_identity_symbols() {
            Membership::Absent
        } else if r.is_negative() {
            Membership::NegationInGroup
        } else {
            Membership::InGroup
        })
    }

    /// Residue of `g` after clearing every pivot column of the canonical rows.
    pub(crate) fn reduce(&self, g: &ToyElement) -> ToyElement {
        let mut r = g.clone();
        for row in &self.gens {
            let c = (0..2 * self.n).find(|&c| column(row, c)).expect("nonzero row");
            if column(&r, c) {
                r.mul_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, g: &ToyElement) -> bool {
        matches!(self.member(g), Ok(Membership::InGroup))
    }

    /// `self ⊗ other` with `other` on the higher sites.
    pub fn tensor(&self, other: &StabilizerGroup) -> StabilizerGroup {
        let mut gens: Vec<ToyElement> =
            self.gens.iter().map(|g| g.tensor(&ToyElement::identity(other.n))).collect();
        gens.extend(other.gens.iter().map(|g| ToyElement::identity(self.n).tensor(g)));
        StabilizerGroup::from_valid(self.n + other.n, &gens)
    }

    /// The same group on an `n`-system register, site `i` moved to `sites[i]`.
    pub fn embed(&self, n: usize, sites: &[usize]) -> StabilizerGroup {
        let gens: Vec<ToyElement> = self.gens.iter().map(|g| g.embed(n, sites)).collect();
        StabilizerGroup::from_valid(n, &gens)
    }

    /// Every element of the group (2^rank of them).
    pub fn elements(&self) -> Vec<ToyElement> {
        let mut out = vec![ToyElement::identity(self.n)];
        for g in &self.gens {
            let extra: Vec<ToyElement> = out.iter().map(|e| e.mul_unchecked(g)).collect();
            out.extend(extra);
        }
        out
    }

    /// Parse one element per non-empty line; `n` is taken from the first line.
    pub fn parse_with_n(text: &str, n: Option<usize>) -> Result<StabilizerGroup> {
        let mut gens = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            gens.push(line.parse::<ToyElement>()?);
        }
        let n = match (n, gens.first()) {
            (Some(n), _) => n,
            (None, Some(g)) => g.len(),
            (None, None) => return Err(Error::Parse("empty group needs an explicit size".into())),
        };
        StabilizerGroup::new(n, gens)
    }
}

impl FromStr for StabilizerGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<StabilizerGroup> {
        StabilizerGroup::parse_with_n(s, None)
    }
}

impl fmt::Display for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self)
    }
}

impl Serialize for StabilizerGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StabilizerGroup", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("generators", &self.gens)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn els(v: &[&str]) -> Vec<ToyElement> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn validation_cases() {
        assert_eq!(validate_group(1, &els(&["+Z"])), Ok(()));
        assert!(matches!(
            validate_group(1, &els(&["+X", "-X"])),
            Err(Violation::ContainsMinusIdentity { .. })
        ));
        assert_eq!(
            validate_group(2, &els(&["+XX", "+ZZ", "+YY"])),
            Err(Violation::Dependent { witness: vec![0, 1, 2] })
        );
        assert_eq!(
            validate_group(1, &els(&["+X", "+Z"])),
            Err(Violation::Incompatible { first: 0, second: 1 })
        );
    }

    #[test]
    fn membership() {
        let s = StabilizerGroup::new(2, els(&["XX", "ZZ"])).unwrap();
        assert_eq!(s.member(&"+YY".parse().unwrap()).unwrap(), Membership::InGroup);
        assert_eq!(s.member(&"-YY".parse().unwrap()).unwrap(), Membership::NegationInGroup);
        let z = StabilizerGroup::new(1, els(&["Z"])).unwrap();
        assert_eq!(z.member(&"X".parse().unwrap()).unwrap(), Membership::Absent);
    }

    #[test]
    fn canonical_equality() {
        let a = StabilizerGroup::new(2, els(&["XX", "ZZ"])).unwrap();
        let b = StabilizerGroup::new(2, els(&["YY", "ZZ"])).unwrap();
        assert_eq!(a, b);
        let c = StabilizerGroup::new(2, els(&["-YY", "ZZ"])).unwrap();
        assert_ne!(a, c);
    }
}
