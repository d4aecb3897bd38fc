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

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Single-system symbol, encoded by its `(x, z)` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ToySymbol {
    I,
    X,
    Z,
    Y,
}

impl ToySymbol {
    pub const ALL: [ToySymbol; 4] = [ToySymbol::I, ToySymbol::X, ToySymbol::Z, ToySymbol::Y];
    pub const NONTRIVIAL: [ToySymbol; 3] = [ToySymbol::X, ToySymbol::Y, ToySymbol::Z];

    pub fn from_bits(x: bool, z: bool) -> ToySymbol {
        match (x, z) {
            (false, false) => ToySymbol::I,
            (true, false) => ToySymbol::X,
            (false, true) => ToySymbol::Z,
            (true, true) => ToySymbol::Y,
        }
    }

    pub fn x(self) -> bool {
        matches!(self, ToySymbol::X | ToySymbol::Y)
    }

    pub fn z(self) -> bool {
        matches!(self, ToySymbol::Z | ToySymbol::Y)
    }

    /// Two-bit code `x + 2z`.
    pub fn code(self) -> u8 {
        self.x() as u8 | (self.z() as u8) << 1
    }

    pub fn from_code(c: u8) -> ToySymbol {
        ToySymbol::from_bits(c & 1 != 0, c & 2 != 0)
    }

    pub fn product(self, other: ToySymbol) -> ToySymbol {
        ToySymbol::from_code(self.code() ^ other.code())
    }

    /// Whether the two symbols fail to commute under the Pauli map.
    pub fn anticommutes(self, other: ToySymbol) -> bool {
        (self.x() & other.z()) ^ (self.z() & other.x())
    }

    /// Eigenvalue sign on the single-system ontic state `(a, b)`: true means -1.
    pub fn flips_at(self, a: bool, b: bool) -> bool {
        (self.x() & a) ^ (self.z() & b)
    }

    /// The 4x4 diagonal over ontic states 1..4.
    pub fn diagonal(self) -> [i8; 4] {
        let mut d = [0; 4];
        for (k, e) in d.iter_mut().enumerate() {
            *e = if self.flips_at(k & 1 != 0, k & 2 != 0) { -1 } else { 1 };
        }
        d
    }

    pub fn as_char(self) -> char {
        match self {
            ToySymbol::I => 'I',
            ToySymbol::X => 'X',
            ToySymbol::Y => 'Y',
            ToySymbol::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<ToySymbol> {
        match c {
            'I' => Some(ToySymbol::I),
            'X' => Some(ToySymbol::X),
            'Y' => Some(ToySymbol::Y),
            'Z' => Some(ToySymbol::Z),
            _ => None,
        }
    }
}

const WORD: usize = 64;

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A signed tensor of toy symbols over `n` systems, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ToyElement {
    n: usize,
    negative: bool,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl ToyElement {
    pub fn identity(n: usize) -> ToyElement {
        ToyElement { n, negative: false, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn from_symbols(negative: bool, symbols: &[ToySymbol]) -> ToyElement {
        let mut e = ToyElement::identity(symbols.len());
        e.negative = negative;
        for (i, s) in symbols.iter().enumerate() {
            e.set(i, *s);
        }
        e
    }

    /// `symbol` on site `site` (0-based), identity elsewhere.
    pub fn single(n: usize, site: usize, symbol: ToySymbol) -> ToyElement {
        let mut e = ToyElement::identity(n);
        e.set(site, symbol);
        e
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negated(&self) -> ToyElement {
        let mut e = self.clone();
        e.negative = !e.negative;
        e
    }

    pub fn with_sign(&self, negative: bool) -> ToyElement {
        let mut e = self.clone();
        e.negative = negative;
        e
    }

    pub fn get(&self, site: usize) -> ToySymbol {
        let (w, b) = (site / WORD, site % WORD);
        ToySymbol::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set(&mut self, site: usize, symbol: ToySymbol) {
        assert!(site < self.n, "site {site} out of range for {} systems", self.n);
        let (w, b) = (site / WORD, site % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | (symbol.x() as u64) << b;
        self.z[w] = (self.z[w] & !(1 << b)) | (symbol.z() as u64) << b;
    }

    pub fn x_bit(&self, site: usize) -> bool {
        self.x[site / WORD] >> (site % WORD) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        self.z[site / WORD] >> (site % WORD) & 1 == 1
    }

    pub fn symbols(&self) -> Vec<ToySymbol> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    fn check_len(&self, other: &ToyElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Toy product: signs multiply, symbols XOR. Never introduces phases.
    pub fn multiply(&self, other: &ToyElement) -> Result<ToyElement> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &ToyElement) -> ToyElement {
        let mut e = self.clone();
        e.mul_assign(other);
        e
    }

    pub(crate) fn mul_assign(&mut self, other: &ToyElement) {
        debug_assert_eq!(self.n, other.n);
        self.negative ^= other.negative;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Symplectic product; `true` means incompatible.
    pub fn symplectic(&self, other: &ToyElement) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        acc == 1
    }

    pub fn compatible(&self, other: &ToyElement) -> Result<bool> {
        self.check_len(other)?;
        Ok(!self.symplectic(other))
    }

    pub fn is_identity_symbols(&self) -> bool {
        self.x.iter().chain(&self.z).all(|w| *w == 0)
    }

    pub fn same_symbols(&self, other: &ToyElement) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i) != ToySymbol::I).collect()
    }

    /// Sub-element on the listed sites, in the listed order. Sign is kept.
    pub fn restrict(&self, sites: &[usize]) -> ToyElement {
        let mut e = ToyElement::identity(sites.len());
        e.negative = self.negative;
        for (k, &s) in sites.iter().enumerate() {
            e.set(k, self.get(s));
        }
        e
    }

    /// Place this element on `sites` of an `n`-system register.
    pub fn embed(&self, n: usize, sites: &[usize]) -> ToyElement {
        assert_eq!(sites.len(), self.n);
        let mut e = ToyElement::identity(n);
        e.negative = self.negative;
        for (k, &s) in sites.iter().enumerate() {
            e.set(s, self.get(k));
        }
        e
    }

    /// `self ⊗ other`, with `other` on the higher sites.
    pub fn tensor(&self, other: &ToyElement) -> ToyElement {
        let n = self.n + other.n;
        let mut e = ToyElement::identity(n);
        e.negative = self.negative ^ other.negative;
        for i in 0..self.n {
            e.set(i, self.get(i));
        }
        for i in 0..other.n {
            e.set(self.n + i, other.get(i));
        }
        e
    }

    /// Sign of the eigenvalue at the ontic state with packed bits `a`, `b`
    /// (bit `i` belongs to site `i`); `true` means -1. Requires `n <= 64`.
    pub fn flips_at(&self, a: u64, b: u64) -> bool {
        debug_assert!(self.n <= WORD);
        let p = (self.x.first().copied().unwrap_or(0) & a) ^ (self.z.first().copied().unwrap_or(0) & b);
        (p.count_ones() & 1 == 1) ^ self.negative
    }
}

impl fmt::Display for ToyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for i in 0..self.n {
            write!(f, "{}", self.get(i).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ToyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ToyElement {
    type Err = Error;

    /// Parses `[+|-]` followed by at least one of `IXYZ`.
    fn from_str(s: &str) -> Result<ToyElement> {
        let t = s.trim();
        let (negative, body) = match t.chars().next() {
            Some('-') => (true, &t[1..]),
            Some('+') => (false, &t[1..]),
            _ => (false, t),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty element {s:?}")));
        }
        let mut symbols = Vec::with_capacity(body.len());
        for c in body.chars() {
            match ToySymbol::from_char(c) {
                Some(sym) => symbols.push(sym),
                None => return Err(Error::Parse(format!("bad symbol {c:?} in {s:?}"))),
            }
        }
        Ok(ToyElement::from_symbols(negative, &symbols))
    }
}

impl Serialize for ToyElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ToyElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Free-function form of [`ToyElement::multiply`].
pub fn multiply(a: &ToyElement, b: &ToyElement) -> Result<ToyElement> {
    a.multiply(b)
}

/// Free-function form of [`ToyElement::compatible`].
pub fn compatible(a: &ToyElement, b: &ToyElement) -> Result<bool> {
    a.compatible(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> ToyElement {
        s.parse().unwrap()
    }

    #[test]
    fn products() {
        assert_eq!(multiply(&el("+X"), &el("+Z")).unwrap(), el("+Y"));
        assert_eq!(multiply(&el("-XZ"), &el("+ZZ")).unwrap(), el("-YI"));
        assert!(multiply(&el("X"), &el("XX")).is_err());
    }

    #[test]
    fn compatibility() {
        assert!(!compatible(&el("X"), &el("Z")).unwrap());
        assert!(compatible(&el("XX"), &el("ZZ")).unwrap());
        assert!(compatible(&el("XZI"), &el("ZXZ")).unwrap());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["+XZIY", "-I", "+ZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZZX"] {
            assert_eq!(el(s).to_string(), s);
        }
        assert_eq!(el("XY").to_string(), "+XY");
        assert!("".parse::<ToyElement>().is_err());
        assert!("-".parse::<ToyElement>().is_err());
        assert!("XQ".parse::<ToyElement>().is_err());
    }

    #[test]
    fn diagonals() {
        assert_eq!(ToySymbol::X.diagonal(), [1, -1, 1, -1]);
        assert_eq!(ToySymbol::Y.diagonal(), [1, -1, -1, 1]);
        assert_eq!(ToySymbol::Z.diagonal(), [1, 1, -1, -1]);
        assert_eq!(ToySymbol::I.diagonal(), [1, 1, 1, 1]);
    }
}
