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

//! Reversible ontic permutations built from local factors.
//!
//! A permutation acts on distributions by moving the mass at `o` to `pi(o)`,
//! so the output entry `i` is the input entry `pi^-1(i)`. Elements conjugate
//! the same way: `g'(o) = g(pi^-1(o))`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{StabilizerGroup, ToyElement, ToySymbol};
use crate::error::{Error, Result};

/// One of the 24 bijections of the single-system labels `1..4`.
///
/// Numbering is the lexicographic order of the image tuples, so id 0 is the
/// identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalPerm(u8);

fn all_images() -> &'static [[u8; 4]; 24] {
    static IMAGES: OnceLock<[[u8; 4]; 24]> = OnceLock::new();
    IMAGES.get_or_init(|| {
        let mut out = [[0u8; 4]; 24];
        let mut k = 0;
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        let v = [a, b, c, d];
                        let mut seen = [false; 4];
                        v.iter().for_each(|&x| seen[x as usize] = true);
                        if seen.iter().all(|s| *s) {
                            out[k] = v;
                            k += 1;
                        }
                    }
                }
            }
        }
        out
    })
}

const NAMED: [(&str, [u8; 4]); 7] = [
    ("I", [0, 1, 2, 3]),
    // b <- b xor 1: (13)(24)
    ("X", [2, 3, 0, 1]),
    // a <- a xor 1: (12)(34)
    ("Z", [1, 0, 3, 2]),
    // both bits: (14)(23)
    ("Y", [3, 2, 1, 0]),
    // (1)(32)(4): swaps the a and b bits
    ("H", [0, 2, 1, 3]),
    // (1423)
    ("P", [3, 2, 0, 1]),
    // inverse of (1423)
    ("Pinv", [2, 3, 1, 0]),
];

impl LocalPerm {
    pub const IDENTITY: LocalPerm = LocalPerm(0);

    pub fn from_id(id: u8) -> Option<LocalPerm> {
        (id < 24).then_some(LocalPerm(id))
    }

    pub fn from_images(images: [u8; 4]) -> Option<LocalPerm> {
        all_images().iter().position(|v| *v == images).map(|k| LocalPerm(k as u8))
    }

    pub fn all() -> impl Iterator<Item = LocalPerm> {
        (0..24).map(LocalPerm)
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Image of each 0-based local index `a + 2b`.
    pub fn images(self) -> [u8; 4] {
        all_images()[self.0 as usize]
    }

    pub fn apply(self, local: u8) -> u8 {
        self.images()[local as usize]
    }

    pub fn inverse(self) -> LocalPerm {
        let mut inv = [0u8; 4];
        for (i, &j) in self.images().iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        LocalPerm::from_images(inv).expect("bijection")
    }

    /// `self` then `next`.
    pub fn then(self, next: LocalPerm) -> LocalPerm {
        let v = self.images();
        LocalPerm::from_images([0, 1, 2, 3].map(|i| next.apply(v[i]))).expect("bijection")
    }

    pub fn by_name(name: &str) -> Option<LocalPerm> {
        if let Some((_, v)) = NAMED.iter().find(|(n, _)| *n == name) {
            return LocalPerm::from_images(*v);
        }
        name.parse::<u8>().ok().and_then(LocalPerm::from_id)
    }

    pub fn name(self) -> String {
        match NAMED.iter().find(|(_, v)| *v == self.images()) {
            Some((n, _)) => n.to_string(),
            None => self.0.to_string(),
        }
    }

    pub fn pauli(symbol: ToySymbol) -> LocalPerm {
        LocalPerm::by_name(&symbol.as_char().to_string()).expect("named")
    }

    pub fn hadamard() -> LocalPerm {
        LocalPerm::by_name("H").expect("named")
    }

    pub fn phase() -> LocalPerm {
        LocalPerm::by_name("P").expect("named")
    }

    /// Cycle notation on labels `1..4`, e.g. `(1)(23)(4)`.
    pub fn cycles(self) -> String {
        let v = self.images();
        let mut seen = [false; 4];
        let mut out = String::new();
        for start in 0..4 {
            if seen[start] {
                continue;
            }
            out.push('(');
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                out.push(char::from(b'1' + i as u8));
                i = v[i] as usize;
            }
            out.push(')');
        }
        out
    }

    /// Conjugation of `sym`: the `(negative, symbol)` it is sent to.
    pub fn conjugate_symbol(self, sym: ToySymbol) -> (bool, ToySymbol) {
        local_tables()[self.0 as usize][sym.code() as usize]
    }
}

/// Find the signed element on `k` sites whose diagonal is `diag`.
fn identify(k: usize, diag: &[i8]) -> Option<(bool, u32)> {
    for code in 0..1u32 << (2 * k) {
        let syms: Vec<ToySymbol> = (0..k).map(|i| ToySymbol::from_code((code >> (2 * i)) as u8 & 3)).collect();
        let e = ToyElement::from_symbols(false, &syms);
        let own: Vec<i8> = (0..diag.len())
            .map(|o| {
                let (a, b) = crate::oracle::split(o, k);
                if e.flips_at(a, b) { -1 } else { 1 }
            })
            .collect();
        if own == diag {
            return Some((false, code));
        }
        if own.iter().zip(diag).all(|(x, y)| *x == -*y) {
            return Some((true, code));
        }
    }
    None
}

/// Derive a conjugation table on `k` sites from a forward ontic map.
fn derive_table(k: usize, forward: impl Fn(usize) -> usize) -> Vec<(bool, u32)> {
    let size = 1 << (2 * k);
    (0..1u32 << (2 * k))
        .map(|code| {
            let syms: Vec<ToySymbol> = (0..k).map(|i| ToySymbol::from_code((code >> (2 * i)) as u8 & 3)).collect();
            let e = ToyElement::from_symbols(false, &syms);
            let mut diag = vec![0i8; size];
            for o in 0..size {
                let (a, b) = crate::oracle::split(o, k);
                diag[forward(o)] = if e.flips_at(a, b) { -1 } else { 1 };
            }
            identify(k, &diag).expect("factor maps elements to elements")
        })
        .collect()
}

fn local_tables() -> &'static Vec<[(bool, ToySymbol); 4]> {
    static TABLES: OnceLock<Vec<[(bool, ToySymbol); 4]>> = OnceLock::new();
    TABLES.get_or_init(|| {
        LocalPerm::all()
            .map(|p| {
                let t = derive_table(1, |o| p.apply(o as u8) as usize);
                [0, 1, 2, 3].map(|c| (t[c].0, ToySymbol::from_code(t[c].1 as u8)))
            })
            .collect()
    })
}

/// Forward ontic map of a controlled Pauli on local digits (control, target).
fn controlled_forward(pauli: ToySymbol, o: usize) -> usize {
    let (px, pz) = (pauli.x(), pauli.z());
    let (ac, bc, at, bt) = (o & 1 != 0, o & 2 != 0, o & 4 != 0, o & 8 != 0);
    let at2 = at ^ (pz & bc);
    let bt2 = bt ^ (px & bc);
    let ac2 = ac ^ (px & at) ^ (pz & bt);
    ac2 as usize | (bc as usize) << 1 | (at2 as usize) << 2 | (bt2 as usize) << 3
}

fn controlled_tables() -> &'static [Vec<(bool, u32)>; 3] {
    static TABLES: OnceLock<[Vec<(bool, u32)>; 3]> = OnceLock::new();
    TABLES.get_or_init(|| ToySymbol::NONTRIVIAL.map(|p| derive_table(2, |o| controlled_forward(p, o))))
}

fn pauli_slot(p: ToySymbol) -> usize {
    ToySymbol::NONTRIVIAL.iter().position(|q| *q == p).expect("nontrivial pauli")
}

/// A local generator of the permutation group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Local { site: usize, perm: LocalPerm },
    /// Applies the `pauli`-like permutation to `target` when the control's
    /// `b` bit is set (with the matching back-action on the control).
    Controlled { control: usize, target: usize, pauli: ToySymbol },
}

impl Factor {
    pub fn local(site: usize, perm: LocalPerm) -> Factor {
        Factor::Local { site, perm }
    }

    pub fn cz(a: usize, b: usize) -> Factor {
        Factor::Controlled { control: a, target: b, pauli: ToySymbol::Z }
    }

    pub fn cx(control: usize, target: usize) -> Factor {
        Factor::Controlled { control, target, pauli: ToySymbol::X }
    }

    pub fn sites(&self) -> Vec<usize> {
        match *self {
            Factor::Local { site, .. } => vec![site],
            Factor::Controlled { control, target, .. } => vec![control, target],
        }
    }

    pub fn inverse(&self) -> Factor {
        match *self {
            Factor::Local { site, perm } => Factor::Local { site, perm: perm.inverse() },
            c => c,
        }
    }

    fn forward(&self, o: usize) -> usize {
        match *self {
            Factor::Local { site, perm } => {
                let d = (o >> (2 * site)) & 3;
                (o & !(3 << (2 * site))) | (perm.apply(d as u8) as usize) << (2 * site)
            }
            Factor::Controlled { control, target, pauli } => {
                let local = (o >> (2 * control) & 3) | (o >> (2 * target) & 3) << 2;
                let out = controlled_forward(pauli, local);
                let cleared = o & !(3 << (2 * control)) & !(3 << (2 * target));
                cleared | (out & 3) << (2 * control) | (out >> 2) << (2 * target)
            }
        }
    }

    fn conjugate_in_place(&self, g: &mut ToyElement) {
        match *self {
            Factor::Local { site, perm } => {
                let (neg, sym) = perm.conjugate_symbol(g.get(site));
                g.set(site, sym);
                if neg {
                    g.set_negative(!g.is_negative());
                }
            }
            Factor::Controlled { control, target, pauli } => {
                let code = g.get(control).code() as usize | (g.get(target).code() as usize) << 2;
                let (neg, out) = controlled_tables()[pauli_slot(pauli)][code];
                g.set(control, ToySymbol::from_code(out as u8 & 3));
                g.set(target, ToySymbol::from_code((out >> 2) as u8 & 3));
                if neg {
                    g.set_negative(!g.is_negative());
                }
            }
        }
    }
}

/// A composition of local factors, leftmost applied first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToyPermutation {
    n: usize,
    factors: Vec<Factor>,
}

impl ToyPermutation {
    pub fn identity(n: usize) -> ToyPermutation {
        ToyPermutation { n, factors: Vec::new() }
    }

    pub fn new(n: usize, factors: Vec<Factor>) -> Result<ToyPermutation> {
        for f in &factors {
            let sites = f.sites();
            if sites.iter().any(|&s| s >= n) {
                return Err(Error::Precondition(format!("factor {f:?} outside {n} systems")));
            }
            if sites.len() == 2 && sites[0] == sites[1] {
                return Err(Error::Precondition(format!("controlled factor {f:?} needs two sites")));
            }
        }
        Ok(ToyPermutation { n, factors })
    }

    pub fn from_factor(n: usize, f: Factor) -> ToyPermutation {
        ToyPermutation::new(n, vec![f]).expect("factor in range")
    }

    pub fn local(n: usize, site: usize, perm: LocalPerm) -> ToyPermutation {
        ToyPermutation::from_factor(n, Factor::local(site, perm))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn push(&mut self, f: Factor) {
        assert!(f.sites().iter().all(|&s| s < self.n));
        self.factors.push(f);
    }

    /// `self` then `next`.
    pub fn then(&self, next: &ToyPermutation) -> ToyPermutation {
        assert_eq!(self.n, next.n);
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&next.factors);
        ToyPermutation { n: self.n, factors }
    }

    pub fn inverse(&self) -> ToyPermutation {
        ToyPermutation { n: self.n, factors: self.factors.iter().rev().map(Factor::inverse).collect() }
    }

    /// Sites touched by some factor.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.factors.iter().flat_map(Factor::sites).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Forward image of one ontic index.
    pub fn map_state(&self, o: usize) -> usize {
        self.factors.iter().fold(o, |o, f| f.forward(o))
    }

    /// Forward images of every ontic index (desk scale only).
    pub fn ontic_table(&self) -> Vec<usize> {
        (0..1usize << (2 * self.n)).map(|o| self.map_state(o)).collect()
    }

    pub fn conjugate_element(&self, g: &ToyElement) -> ToyElement {
        let mut e = g.clone();
        for f in &self.factors {
            f.conjugate_in_place(&mut e);
        }
        e
    }

    /// `pi S pi^T`, generator by generator.
    pub fn conjugate(&self, s: &StabilizerGroup) -> Result<StabilizerGroup> {
        if s.n() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, found: s.n() });
        }
        let gens: Vec<ToyElement> = s.generators().iter().map(|g| self.conjugate_element(g)).collect();
        StabilizerGroup::new(self.n, gens).map_err(|e| Error::Internal(format!("conjugation left the group: {e}")))
    }

    /// Same permutation on a larger register, with site `i` sent to `sites[i]`.
    pub fn embed(&self, n: usize, sites: &[usize]) -> ToyPermutation {
        let factors = self
            .factors
            .iter()
            .map(|f| match *f {
                Factor::Local { site, perm } => Factor::Local { site: sites[site], perm },
                Factor::Controlled { control, target, pauli } => {
                    Factor::Controlled { control: sites[control], target: sites[target], pauli }
                }
            })
            .collect();
        ToyPermutation { n, factors }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.factors.iter().map(FactorJson::from_factor).map(|f| serde_json::to_value(f).expect("json")).collect())
    }

    /// Parse a JSON factor list with 1-based sites.
    pub fn from_json(n: usize, text: &str) -> Result<ToyPermutation> {
        let raw: Vec<FactorJson> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let factors = raw.into_iter().map(|f| f.to_factor()).collect::<Result<Vec<_>>>()?;
        ToyPermutation::new(n, factors)
    }
}

impl fmt::Display for ToyPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "id");
        }
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            match fac {
                Factor::Local { site, perm } => write!(f, "{}@{}", perm.name(), site + 1)?,
                Factor::Controlled { control, target, pauli } => {
                    write!(f, "C{}({},{})", pauli.as_char(), control + 1, target + 1)?
                }
            }
        }
        Ok(())
    }
}

/// Wire form of one factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FactorJson {
    Local { site: usize, perm: PermName },
    Cz { cz: [usize; 2] },
    Cx { cx: [usize; 2] },
    Cy { cy: [usize; 2] },
}

/// A local permutation given by name or numeric id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermName {
    Id(u8),
    Name(String),
}

impl FactorJson {
    fn from_factor(f: &Factor) -> FactorJson {
        match *f {
            Factor::Local { site, perm } => {
                let name = perm.name();
                let perm = match name.parse::<u8>() {
                    Ok(id) => PermName::Id(id),
                    Err(_) => PermName::Name(name),
                };
                FactorJson::Local { site: site + 1, perm }
            }
            Factor::Controlled { control, target, pauli } => {
                let pair = [control + 1, target + 1];
                match pauli {
                    ToySymbol::X => FactorJson::Cx { cx: pair },
                    ToySymbol::Y => FactorJson::Cy { cy: pair },
                    _ => FactorJson::Cz { cz: pair },
                }
            }
        }
    }

    fn to_factor(&self) -> Result<Factor> {
        let zero_based = |s: usize| s.checked_sub(1).ok_or_else(|| Error::Parse("sites are 1-based".into()));
        let ctl = |p: &[usize; 2], pauli| -> Result<Factor> {
            Ok(Factor::Controlled { control: zero_based(p[0])?, target: zero_based(p[1])?, pauli })
        };
        match self {
            FactorJson::Local { site, perm } => {
                let perm = match perm {
                    PermName::Id(id) => LocalPerm::from_id(*id),
                    PermName::Name(n) => LocalPerm::by_name(n),
                }
                .ok_or_else(|| Error::Parse(format!("unknown local permutation {perm:?}")))?;
                Ok(Factor::Local { site: zero_based(*site)?, perm })
            }
            FactorJson::Cz { cz } => ctl(cz, ToySymbol::Z),
            FactorJson::Cx { cx } => ctl(cx, ToySymbol::X),
            FactorJson::Cy { cy } => ctl(cy, ToySymbol::Y),
        }
    }
}

/// The tensor of Pauli-like permutations matching the symbols of `g`.
///
/// Conjugating any state that contains `g` by it leaves the state fixed.
pub fn permutation_stabilizer_of(g: &ToyElement) -> ToyPermutation {
    let factors = (0..g.len())
        .filter(|&i| g.get(i) != ToySymbol::I)
        .map(|i| Factor::local(i, LocalPerm::pauli(g.get(i))))
        .collect();
    ToyPermutation { n: g.len(), factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> ToyElement {
        s.parse().unwrap()
    }

    #[test]
    fn named_cycles() {
        assert_eq!(LocalPerm::IDENTITY.name(), "I");
        assert_eq!(LocalPerm::hadamard().cycles(), "(1)(23)(4)");
        assert_eq!(LocalPerm::phase().cycles(), "(1423)");
        assert_eq!(LocalPerm::pauli(ToySymbol::X).cycles(), "(13)(24)");
        assert_eq!(LocalPerm::pauli(ToySymbol::Z).cycles(), "(12)(34)");
        assert_eq!(LocalPerm::pauli(ToySymbol::Y).cycles(), "(14)(23)");
        assert_eq!(LocalPerm::phase().then(LocalPerm::by_name("Pinv").unwrap()), LocalPerm::IDENTITY);
    }

    #[test]
    fn pauli_sign_flips() {
        let x = ToyPermutation::local(1, 0, LocalPerm::pauli(ToySymbol::X));
        assert_eq!(x.conjugate_element(&el("+Z")), el("-Z"));
        assert_eq!(x.conjugate_element(&el("+X")), el("+X"));
        let z = ToyPermutation::local(1, 0, LocalPerm::pauli(ToySymbol::Z));
        assert_eq!(z.conjugate_element(&el("+X")), el("-X"));
    }

    #[test]
    fn controlled_z_table() {
        let cz = ToyPermutation::from_factor(2, Factor::cz(0, 1));
        assert_eq!(cz.conjugate_element(&el("XI")), el("XZ"));
        assert_eq!(cz.conjugate_element(&el("IX")), el("ZX"));
        assert_eq!(cz.conjugate_element(&el("ZI")), el("ZI"));
        assert_eq!(cz.conjugate_element(&el("IZ")), el("IZ"));
    }

    #[test]
    fn controlled_x_table() {
        let cx = ToyPermutation::from_factor(2, Factor::cx(0, 1));
        assert_eq!(cx.conjugate_element(&el("XI")), el("XX"));
        assert_eq!(cx.conjugate_element(&el("IZ")), el("ZZ"));
        assert_eq!(cx.conjugate_element(&el("ZI")), el("ZI"));
        assert_eq!(cx.conjugate_element(&el("IX")), el("IX"));
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"[{"site":1,"perm":"H"},{"cz":[1,2]},{"site":2,"perm":7},{"cx":[2,1]}]"#;
        let p = ToyPermutation::from_json(2, text).unwrap();
        assert_eq!(p.factors().len(), 4);
        let again = ToyPermutation::from_json(2, &p.to_json().to_string()).unwrap();
        assert_eq!(p, again);
        assert!(ToyPermutation::from_json(2, r#"[{"site":0,"perm":"H"}]"#).is_err());
        assert!(ToyPermutation::from_json(2, r#"[{"site":3,"perm":"H"}]"#).is_err());
        assert!(ToyPermutation::from_json(2, r#"[{"site":1,"perm":"Q"}]"#).is_err());
        assert!(ToyPermutation::from_json(2, r#"[{"cz":[1,1]}]"#).is_err());
    }
}
