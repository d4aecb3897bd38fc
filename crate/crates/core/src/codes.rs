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

//! Toy stabilizer codes: encoding, errors, syndrome decoding, erasure
//! recovery, logical-support rewriting and ramp secret sharing.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Membership, StabilizerGroup, ToyElement, ToySymbol};
use crate::dynamics::{complement, element_with_part, outcomes, partial_trace, Measurement};
use crate::error::{Error, Result};
use crate::permutation::permutation_stabilizer_of;

/// An `[n, k, d]` toy code with a syndrome lookup table.
#[derive(Clone, Debug)]
pub struct ToyCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    generators: Vec<ToyElement>,
    logicals: Vec<(ToyElement, ToyElement)>,
    group: StabilizerGroup,
    table: BTreeMap<Vec<bool>, ToyElement>,
}

fn els(v: &[&str]) -> Vec<ToyElement> {
    v.iter().map(|s| s.parse().expect("literal element")).collect()
}

/// All `+`-signed symbol strings on `n` systems of weight `1..=max`.
fn paulis_up_to(n: usize, max: usize) -> Vec<ToyElement> {
    let mut out = Vec::new();
    let mut cur = vec![ToySymbol::I; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<ToySymbol>, out: &mut Vec<ToyElement>) {
        if i == cur.len() {
            if cur.iter().any(|s| *s != ToySymbol::I) {
                out.push(ToyElement::from_symbols(false, cur));
            }
            return;
        }
        rec(i + 1, left, cur, out);
        if left > 0 {
            for s in ToySymbol::NONTRIVIAL {
                cur[i] = s;
                rec(i + 1, left - 1, cur, out);
            }
            cur[i] = ToySymbol::I;
        }
    }
    rec(0, max, &mut cur, &mut out);
    out.sort_by_key(|e| e.weight());
    out
}

impl ToyCode {
    /// Build and verify a code; the distance is found by enumeration.
    pub fn new(name: &str, generators: Vec<ToyElement>, logicals: Vec<(ToyElement, ToyElement)>) -> Result<ToyCode> {
        let n = generators.first().or(logicals.first().map(|p| &p.0)).map(|g| g.len()).unwrap_or(0);
        let group = StabilizerGroup::new(n, generators.clone())?;
        let k = n - generators.len();
        if logicals.len() != k {
            return Err(Error::InvalidGroup(format!("{k} logical systems need {k} logical pairs")));
        }
        for (i, (lx, lz)) in logicals.iter().enumerate() {
            if generators.iter().any(|g| lx.symplectic(g) || lz.symplectic(g)) {
                return Err(Error::InvalidGroup(format!("logical pair {i} is not in the normalizer")));
            }
            if !lx.symplectic(lz) {
                return Err(Error::InvalidGroup(format!("logical pair {i} is compatible")));
            }
            for (j, (mx, mz)) in logicals.iter().enumerate().skip(i + 1) {
                if lx.symplectic(mx) || lx.symplectic(mz) || lz.symplectic(mx) || lz.symplectic(mz) {
                    return Err(Error::InvalidGroup(format!("logical pairs {i} and {j} interact")));
                }
            }
        }
        let d = code_distance(&group, n);
        let mut code = ToyCode { name: name.into(), n, k, d, generators, logicals, group, table: BTreeMap::new() };
        for e in paulis_up_to(n, (d.saturating_sub(1)) / 2) {
            code.table.entry(code.syndrome_of(&e)).or_insert(e);
        }
        code.table.insert(vec![false; n - k], ToyElement::identity(n));
        Ok(code)
    }

    /// Generators `XZZXI` and its cyclic shifts; logicals `XXXXX`, `ZZZZZ`.
    pub fn five() -> ToyCode {
        let gens = els(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
        let logicals = vec![("XXXXX".parse().expect("lit"), "ZZZZZ".parse().expect("lit"))];
        ToyCode::new("five", gens, logicals).expect("shipped code is valid")
    }

    /// Four systems, two logical systems, distance two: detects one error and
    /// corrects one erasure.
    pub fn four() -> ToyCode {
        let gens = els(&["XXXX", "ZZZZ"]);
        let l = els(&["XXII", "ZIZI", "XIXI", "ZZII"]);
        ToyCode::new("four", gens, vec![(l[0].clone(), l[1].clone()), (l[2].clone(), l[3].clone())])
            .expect("shipped code is valid")
    }

    pub fn by_name(name: &str) -> Result<ToyCode> {
        match name {
            "five" => Ok(ToyCode::five()),
            "four" => Ok(ToyCode::four()),
            other => Err(Error::Parse(format!("unknown code {other:?} (expected five or four)"))),
        }
    }

    pub fn generators(&self) -> &[ToyElement] {
        &self.generators
    }

    pub fn logicals(&self) -> &[(ToyElement, ToyElement)] {
        &self.logicals
    }

    pub fn code_group(&self) -> &StabilizerGroup {
        &self.group
    }

    /// Number of distinct syndromes with a stored recovery.
    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// Which generators an error of Pauli type `e` flips.
    pub fn syndrome_of(&self, e: &ToyElement) -> Vec<bool> {
        self.generators.iter().map(|g| g.symplectic(e)).collect()
    }

    /// Ramp parameters `(l, l')`: any `l` shares reconstruct, `l'` or fewer learn nothing.
    pub fn ramp(&self) -> (usize, usize) {
        let l = self.n - self.d + 1;
        (l, self.n - l)
    }

    /// Image of a logical element (on `k` systems) in the code.
    pub fn logical_image(&self, h: &ToyElement) -> ToyElement {
        let mut out = ToyElement::identity(self.n).with_sign(h.is_negative());
        for (j, (lx, lz)) in self.logicals.iter().enumerate() {
            let s = h.get(j);
            if s.x() {
                out.mul_assign(lx);
            }
            if s.z() {
                out.mul_assign(lz);
            }
        }
        out
    }

    /// `<g_1..g_{n-k}, h_L...>` for the generators `h` of `s`.
    pub fn encode(&self, s: &StabilizerGroup) -> Result<StabilizerGroup> {
        if s.n() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, found: s.n() });
        }
        let mut gens = self.generators.clone();
        gens.extend(s.generators().iter().map(|h| self.logical_image(h)));
        StabilizerGroup::new(self.n, gens)
    }

    /// Logical state read off by membership of every logical element.
    pub fn decode(&self, encoded: &StabilizerGroup) -> Result<StabilizerGroup> {
        let mut gens = Vec::new();
        for code in 1u32..1 << (2 * self.k) {
            let syms: Vec<ToySymbol> = (0..self.k).map(|i| ToySymbol::from_code((code >> (2 * i)) as u8 & 3)).collect();
            let h = ToyElement::from_symbols(false, &syms);
            match encoded.member(&self.logical_image(&h))? {
                Membership::InGroup => gens.push(h),
                Membership::NegationInGroup => gens.push(h.negated()),
                Membership::Absent => {}
            }
        }
        let basis = crate::algebra::echelon(&gens, &crate::algebra::all_columns(self.k));
        let gens: Vec<ToyElement> = basis.rows.into_iter().map(|(_, r)| r.elem).collect();
        StabilizerGroup::new(self.k, gens)
    }

    /// Logical generators of `encoded`, each multiplied by code generators
    /// until it is the identity on every site of `sites`.
    pub fn rewrite_logical_support(&self, encoded: &StabilizerGroup, sites: &[usize]) -> Result<Vec<ToyElement>> {
        let logical = self.decode(encoded)?;
        logical
            .generators()
            .iter()
            .map(|h| {
                let hl = self.logical_image(h);
                let part = hl.restrict(sites).with_sign(false);
                let fix = element_with_part(&self.group, sites, &part).ok_or_else(|| {
                    Error::NoSolution(format!("cannot clear {hl} on {sites:?} with code generators"))
                })?;
                let star = fix.mul_unchecked(&hl);
                debug_assert!(sites.iter().all(|&s| star.get(s) == ToySymbol::I));
                Ok(star)
            })
            .collect()
    }

    /// Measure every code generator of a Pauli-corrupted codeword and undo
    /// the error via the lookup table.
    pub fn correct(&self, corrupted: &StabilizerGroup) -> Result<(Vec<bool>, StabilizerGroup)> {
        let mut syndrome = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            match corrupted.member(g)? {
                Membership::InGroup => syndrome.push(false),
                Membership::NegationInGroup => syndrome.push(true),
                Membership::Absent => {
                    return Err(Error::Precondition(format!("syndrome of {g} is not deterministic; use erasure decoding")))
                }
            }
        }
        let e = self
            .table
            .get(&syndrome)
            .ok_or_else(|| Error::NoSolution(format!("unknown syndrome {}", bits(&syndrome))))?;
        let recovered = permutation_stabilizer_of(e).conjugate(corrupted)?;
        Ok((syndrome, recovered))
    }

    /// Every branch of erasure recovery: measure the code generators, then
    /// undo the sign flips with a Pauli permutation supported on `lost`.
    pub fn correct_erasure_all(&self, corrupted: &StabilizerGroup, lost: &[usize]) -> Result<Vec<(Vec<bool>, StabilizerGroup)>> {
        let mut branches = vec![corrupted.clone()];
        for g in &self.generators {
            let m = Measurement::observable(g);
            let mut next = Vec::new();
            for s in &branches {
                next.extend(outcomes(s, &m)?.into_iter().map(|o| o.state));
            }
            branches = next;
        }
        let fixes = paulis_up_to(lost.len(), lost.len());
        branches
            .into_iter()
            .map(|s| {
                let syndrome: Vec<bool> =
                    self.generators.iter().map(|g| s.member(g).map(|m| m == Membership::NegationInGroup)).collect::<Result<_>>()?;
                let e = std::iter::once(ToyElement::identity(lost.len()))
                    .chain(fixes.iter().cloned())
                    .map(|e| e.embed(self.n, lost))
                    .find(|e| self.syndrome_of(e) == syndrome)
                    .ok_or_else(|| Error::NoSolution(format!("no fix on {lost:?} for syndrome {}", bits(&syndrome))))?;
                Ok((syndrome, permutation_stabilizer_of(&e).conjugate(&s)?))
            })
            .collect()
    }

    /// One sampled branch of erasure recovery.
    pub fn correct_erasure<R: Rng + ?Sized>(&self, corrupted: &StabilizerGroup, lost: &[usize], rng: &mut R) -> Result<(Vec<bool>, StabilizerGroup)> {
        let mut all = self.correct_erasure_all(corrupted, lost)?;
        let i = rng.gen_range(0..all.len());
        Ok(all.swap_remove(i))
    }

    /// Deal the shares of `secret`: the encoded state, one system per player.
    pub fn share_secret(&self, secret: &StabilizerGroup) -> Result<StabilizerGroup> {
        self.encode(secret)
    }

    /// Recover the secret from the shares of `players` (0-based) by treating
    /// the other shares as erased.
    pub fn reconstruct(&self, shares: &StabilizerGroup, players: &[usize]) -> Result<StabilizerGroup> {
        let (l, _) = self.ramp();
        if players.len() < l {
            return Err(Error::Precondition(format!("{} players cannot reconstruct; {l} are needed", players.len())));
        }
        let lost = complement(self.n, players);
        let erased = apply_error(shares, &CodeError::Erasure(lost.clone()))?;
        let mut secret = None;
        for (_, recovered) in self.correct_erasure_all(&erased, &lost)? {
            let s = self.decode(&recovered)?;
            if secret.get_or_insert_with(|| s.clone()) != &s {
                return Err(Error::Internal("erasure branches disagree on the secret".into()));
            }
        }
        secret.ok_or_else(|| Error::Internal("no recovery branch".into()))
    }

    /// Whether the marginal on `players` is the same for every listed secret.
    pub fn marginal_is_secret_independent(&self, players: &[usize], secrets: &[StabilizerGroup]) -> Result<bool> {
        let mut first = None;
        for s in secrets {
            let m = partial_trace(&self.encode(s)?, players)?;
            if first.get_or_insert_with(|| m.clone()) != &m {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Smallest weight of a normalizer element outside the code group.
fn code_distance(group: &StabilizerGroup, n: usize) -> usize {
    for e in paulis_up_to(n, n) {
        let normal = group.generators().iter().all(|g| !g.symplectic(&e));
        if normal && group.member(&e).expect("sizes match") == Membership::Absent {
            return e.weight();
        }
    }
    n + 1
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// Errors that map stabilizer states to stabilizer states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeError {
    /// Pauli-type permutation with the symbols of the element.
    Pauli(ToyElement),
    /// Loss of the listed systems, reinitialized to the maximally mixed state.
    Erasure(Vec<usize>),
}

impl CodeError {
    /// `X@3`, `Z@1,Y@4` (Pauli errors) or `erase@2,4`, with 1-based sites.
    pub fn parse(n: usize, text: &str) -> Result<CodeError> {
        let site = |s: &str| -> Result<usize> {
            let v: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad site {s:?}")))?;
            if v == 0 || v > n {
                return Err(Error::Parse(format!("site {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        if let Some(rest) = text.trim().strip_prefix("erase@") {
            let mut v = rest.split(',').map(site).collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            v.dedup();
            return Ok(CodeError::Erasure(v));
        }
        let mut e = ToyElement::identity(n);
        for tok in text.split(',') {
            let (sym, at) = tok.split_once('@').ok_or_else(|| Error::Parse(format!("expected SYMBOL@SITE, got {tok:?}")))?;
            let mut chars = sym.trim().chars();
            let s = match (chars.next().and_then(ToySymbol::from_char), chars.next()) {
                (Some(s), None) => s,
                _ => return Err(Error::Parse(format!("bad symbol {sym:?}"))),
            };
            let i = site(at)?;
            e.set(i, e.get(i).product(s));
        }
        Ok(CodeError::Pauli(e))
    }
}

/// Apply an error to an encoded state.
pub fn apply_error(encoded: &StabilizerGroup, error: &CodeError) -> Result<StabilizerGroup> {
    match error {
        CodeError::Pauli(e) => {
            if e.len() != encoded.n() {
                return Err(Error::LengthMismatch { expected: encoded.n(), found: e.len() });
            }
            permutation_stabilizer_of(e).conjugate(encoded)
        }
        CodeError::Erasure(lost) => {
            let keep = complement(encoded.n(), lost);
            if keep.is_empty() {
                return Ok(StabilizerGroup::maximally_mixed(encoded.n()));
            }
            Ok(partial_trace(encoded, &keep)?.embed(encoded.n(), &keep))
        }
    }
}

/// The six pure single-system states.
pub fn single_system_states() -> Vec<StabilizerGroup> {
    ["+X", "-X", "+Y", "-Y", "+Z", "-Z"].iter().map(|s| s.parse().expect("literal")).collect()
}

/// Summary of one `ec demo` run.
#[derive(Clone, Debug, Serialize)]
pub struct EcDemo {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub encoded: StabilizerGroup,
    pub corrupted: StabilizerGroup,
    pub syndrome: String,
    pub recovered: StabilizerGroup,
    pub success: bool,
}

/// Encode `secret`, apply `error`, recover and compare.
pub fn ec_demo(code: &ToyCode, secret: &StabilizerGroup, error: &CodeError) -> Result<EcDemo> {
    let encoded = code.encode(secret)?;
    let corrupted = apply_error(&encoded, error)?;
    let (syndrome, recovered) = match error {
        CodeError::Pauli(_) => code.correct(&corrupted)?,
        CodeError::Erasure(lost) => {
            let all = code.correct_erasure_all(&corrupted, lost)?;
            if all.iter().any(|(_, r)| *r != all[0].1) {
                return Err(Error::Internal("erasure branches disagree".into()));
            }
            all.into_iter().next().ok_or_else(|| Error::Internal("no recovery branch".into()))?
        }
    };
    Ok(EcDemo {
        code: code.name.clone(),
        n: code.n,
        k: code.k,
        d: code.d,
        success: recovered == encoded,
        encoded,
        corrupted,
        syndrome: bits(&syndrome),
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    #[test]
    fn shipped_parameters() {
        let five = ToyCode::five();
        assert_eq!((five.n, five.k, five.d), (5, 1, 3));
        assert_eq!(five.ramp(), (3, 2));
        assert_eq!(five.table_len(), 16);
        let four = ToyCode::four();
        assert_eq!((four.n, four.k, four.d), (4, 2, 2));
        assert_eq!(four.ramp(), (3, 1));
    }

    #[test]
    fn encode_decode() {
        let code = ToyCode::five();
        for s in single_system_states() {
            let e = code.encode(&s).unwrap();
            assert!(e.is_pure());
            assert_eq!(code.decode(&e).unwrap(), s);
        }
    }

    #[test]
    fn single_flip_on_site_three() {
        let code = ToyCode::five();
        let enc = code.encode(&g("Z")).unwrap();
        let err = CodeError::parse(5, "X@3").unwrap();
        let bad = apply_error(&enc, &err).unwrap();
        assert_ne!(bad, enc);
        let stars = code.rewrite_logical_support(&enc, &[2]).unwrap();
        assert!(stars.iter().all(|h| bad.contains(h)));
        let (syn, rec) = code.correct(&bad).unwrap();
        assert!(syn.iter().any(|b| *b));
        assert_eq!(rec, enc);
    }

    #[test]
    fn weight_two_is_flagged_or_miscorrected_visibly() {
        let code = ToyCode::five();
        let miscorrected = paulis_up_to(5, 2).iter().filter(|e| e.weight() == 2).any(|e| {
            single_system_states().iter().any(|s| {
                let enc = code.encode(s).unwrap();
                let bad = apply_error(&enc, &CodeError::Pauli(e.clone())).unwrap();
                code.correct(&bad).unwrap().1 != enc
            })
        });
        assert!(miscorrected);
        let four = ToyCode::four();
        let enc = four.encode(&g("ZI,IZ")).unwrap();
        let bad = apply_error(&enc, &CodeError::parse(4, "X@1").unwrap()).unwrap();
        assert!(matches!(four.correct(&bad), Err(Error::NoSolution(_))));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(CodeError::parse(5, "erase@4,2").unwrap(), CodeError::Erasure(vec![1, 3]));
        assert!(CodeError::parse(5, "X@6").is_err());
        assert!(CodeError::parse(5, "Q@1").is_err());
        assert!(CodeError::parse(5, "X3").is_err());
    }

    #[test]
    fn erasure_and_sharing() {
        let code = ToyCode::five();
        let enc = code.encode(&g("-Y")).unwrap();
        let bad = apply_error(&enc, &CodeError::Erasure(vec![1, 3])).unwrap();
        for (_, rec) in code.correct_erasure_all(&bad, &[1, 3]).unwrap() {
            assert_eq!(rec, enc);
        }
        assert_eq!(code.reconstruct(&enc, &[0, 2, 4]).unwrap(), g("-Y"));
        assert!(code.reconstruct(&enc, &[0, 2]).is_err());
        assert!(code.marginal_is_secret_independent(&[0, 2], &single_system_states()).unwrap());
    }
}
