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

use crate::algebra::{symplectic_basis, StabilizerGroup, ToyElement, ToySymbol};
use crate::error::{Error, Result};
use crate::permutation::{Factor, LocalPerm, ToyPermutation};

use super::trace::{complement, element_with_part, partial_trace};

/// A pure state on `2n` systems whose trace onto the first `n` is `s`.
///
/// Logical pairs of `s` are tied to reference systems with `XX`/`ZZ`-type
/// generators; leftover reference systems are set to `+Z`.
pub fn purify(s: &StabilizerGroup) -> StabilizerGroup {
    let n = s.n();
    let id = ToyElement::identity(n);
    let mut gens: Vec<ToyElement> = s.generators().iter().map(|g| g.tensor(&id)).collect();
    let basis = symplectic_basis(n, s.generators());
    for (j, (lx, lz)) in basis.logicals.iter().enumerate() {
        gens.push(lx.tensor(&ToyElement::single(n, j, ToySymbol::X)));
        gens.push(lz.tensor(&ToyElement::single(n, j, ToySymbol::Z)));
    }
    for j in basis.logicals.len()..s.rank() + basis.logicals.len() {
        gens.push(id.tensor(&ToyElement::single(n, j, ToySymbol::Z)));
    }
    StabilizerGroup::from_valid(2 * n, &gens)
}

/// Smallest-id local permutation whose conjugation sends `from` to `±to`,
/// optionally also `also.0` to `±also.1`.
fn local_mapping(from: ToySymbol, to: ToySymbol, also: Option<(ToySymbol, ToySymbol)>) -> LocalPerm {
    LocalPerm::all()
        .find(|p| {
            p.conjugate_symbol(from).1 == to && also.is_none_or(|(f, t)| p.conjugate_symbol(f).1 == t)
        })
        .expect("the 24 permutations realize every symbol relabelling")
}

/// Elimination state: a register of `k` systems, the tracked elements and
/// the factors applied so far.
struct Synth {
    vecs: Vec<ToyElement>,
    circuit: Vec<Factor>,
}

impl Synth {
    fn apply(&mut self, f: Factor) {
        let p = ToyPermutation::new(self.vecs[0].len(), vec![f]).expect("sites in range");
        for v in self.vecs.iter_mut() {
            *v = p.conjugate_element(v);
        }
        self.circuit.push(f);
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            self.apply(Factor::cx(a, b));
            self.apply(Factor::cx(b, a));
            self.apply(Factor::cx(a, b));
        }
    }

    /// Send element `idx` (supported on sites `>= at`) to `±sym` on `at`,
    /// where `sym` is X or Z.
    fn collect(&mut self, idx: usize, at: usize, sym: ToySymbol) {
        let support: Vec<usize> = self.vecs[idx].support();
        debug_assert!(!support.is_empty() && support[0] >= at);
        for &q in &support {
            let here = self.vecs[idx].get(q);
            if here != sym {
                self.apply(Factor::local(q, local_mapping(here, sym, None)));
            }
        }
        let pivot = support[0];
        for &q in &support[1..] {
            // X_p X_q -> X_p under CX(p, q); Z_p Z_q -> Z_p under CX(q, p).
            if sym == ToySymbol::X {
                self.apply(Factor::cx(pivot, q));
            } else {
                self.apply(Factor::cx(q, pivot));
            }
        }
        self.swap(pivot, at);
    }
}

/// Reference-local circuit taking a pure `s` to a form that depends only on
/// its reduced state away from `reference`.
fn canonical_form(s: &StabilizerGroup, reference: &[usize]) -> Result<(ToyPermutation, StabilizerGroup)> {
    let n = s.n();
    let rest = complement(n, reference);
    let k = reference.len();
    if k == 0 {
        return Ok((ToyPermutation::identity(n), s.clone()));
    }
    let mut vecs = Vec::new();
    let mut pairs = 0;
    if !rest.is_empty() {
        let reduced = partial_trace(s, &rest)?;
        let basis = symplectic_basis(rest.len(), reduced.generators());
        pairs = basis.logicals.len();
        for (lx, lz) in &basis.logicals {
            for l in [lx, lz] {
                let e = element_with_part(s, &rest, l)
                    .ok_or_else(|| Error::NoSolution(format!("no element of {s} restricts to {l}")))?;
                vecs.push(e.restrict(reference));
            }
        }
    }
    vecs.extend(partial_trace(s, reference)?.generators().iter().cloned());
    if vecs.len() != k + pairs {
        return Err(Error::NoSolution("state is not a purification of its reduced state".into()));
    }
    let mut st = Synth { vecs, circuit: Vec::new() };
    for j in 0..pairs {
        st.collect(2 * j, j, ToySymbol::X);
        let y = 2 * j + 1;
        for q in st.vecs[y].support() {
            if q == j {
                continue;
            }
            let here = st.vecs[y].get(q);
            if here != ToySymbol::Z {
                st.apply(Factor::local(q, local_mapping(here, ToySymbol::Z, None)));
            }
            st.apply(Factor::cx(q, j));
        }
        if st.vecs[y].get(j) == ToySymbol::Y {
            let fix = local_mapping(ToySymbol::X, ToySymbol::X, Some((ToySymbol::Y, ToySymbol::Z)));
            st.apply(Factor::local(j, fix));
        }
    }
    for i in 0..k - pairs {
        let idx = 2 * pairs + i;
        for prev in 0..i {
            let site = pairs + prev;
            if st.vecs[idx].get(site) != ToySymbol::I {
                let p = st.vecs[2 * pairs + prev].clone();
                st.vecs[idx].mul_assign(&p);
            }
        }
        st.collect(idx, pairs + i, ToySymbol::Z);
    }
    for j in 0..pairs {
        if st.vecs[2 * j].is_negative() {
            st.apply(Factor::local(j, LocalPerm::pauli(ToySymbol::Z)));
        }
        if st.vecs[2 * j + 1].is_negative() {
            st.apply(Factor::local(j, LocalPerm::pauli(ToySymbol::X)));
        }
    }
    for i in 0..k - pairs {
        if st.vecs[2 * pairs + i].is_negative() {
            st.apply(Factor::local(pairs + i, LocalPerm::pauli(ToySymbol::X)));
        }
    }
    let circuit = ToyPermutation::new(k, st.circuit)?.embed(n, reference);
    let canon = circuit.conjugate(s)?;
    Ok((circuit, canon))
}

/// Products of local permutations on at most two reference systems.
fn local_search(s1: &StabilizerGroup, s2: &StabilizerGroup, reference: &[usize]) -> Option<ToyPermutation> {
    if reference.len() > 2 {
        return None;
    }
    let total = 24usize.pow(reference.len() as u32);
    (0..total).find_map(|mut code| {
        let mut pi = ToyPermutation::identity(s1.n());
        for &site in reference {
            pi.push(Factor::local(site, LocalPerm::from_id((code % 24) as u8).expect("id < 24")));
            code /= 24;
        }
        (pi.conjugate(s2).ok()? == *s1).then_some(pi)
    })
}

/// A permutation acting only on `reference` with `conjugate(pi, s2) == s1`.
pub fn relate_purifications(
    s1: &StabilizerGroup,
    s2: &StabilizerGroup,
    reference: &[usize],
) -> Result<ToyPermutation> {
    if s1.n() != s2.n() {
        return Err(Error::LengthMismatch { expected: s1.n(), found: s2.n() });
    }
    if !s1.is_pure() || !s2.is_pure() {
        return Err(Error::Precondition("both states must be pure".into()));
    }
    if reference.iter().any(|&r| r >= s1.n()) {
        return Err(Error::Precondition(format!("reference {reference:?} out of range")));
    }
    let rest = complement(s1.n(), reference);
    if !rest.is_empty() && partial_trace(s1, &rest)? != partial_trace(s2, &rest)? {
        return Err(Error::Precondition("reduced states away from the reference differ".into()));
    }
    let (c1, k1) = canonical_form(s1, reference)?;
    let (c2, k2) = canonical_form(s2, reference)?;
    if k1 != k2 {
        return local_search(s1, s2, reference)
            .ok_or_else(|| Error::NoSolution(format!("no reference-local map from {s2} to {s1}")));
    }
    let pi = c2.then(&c1.inverse());
    if pi.conjugate(s2)? != *s1 {
        return Err(Error::Internal("composed circuit does not relate the purifications".into()));
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    #[test]
    fn purification_examples() {
        assert_eq!(purify(&StabilizerGroup::maximally_mixed(1)), g("XX,ZZ"));
        assert_eq!(purify(&g("+Z")), g("ZI,IZ"));
        let p = purify(&g("ZZ"));
        assert!(p.is_pure());
        assert_eq!(partial_trace(&p, &[0, 1]).unwrap(), g("ZZ"));
    }

    #[test]
    fn sign_fixes_on_the_reference() {
        let pi = relate_purifications(&g("XX,ZZ"), &g("-XX,ZZ"), &[1]).unwrap();
        assert_eq!(pi.conjugate(&g("-XX,ZZ")).unwrap(), g("XX,ZZ"));
        assert_eq!(pi.support(), vec![1]);
        let pi = relate_purifications(&g("XX,ZZ"), &g("XX,-ZZ"), &[1]).unwrap();
        assert_eq!(pi.conjugate(&g("XX,-ZZ")).unwrap(), g("XX,ZZ"));
        let same = relate_purifications(&g("XX,ZZ"), &g("XX,ZZ"), &[1]).unwrap();
        assert_eq!(same.conjugate(&g("XX,ZZ")).unwrap(), g("XX,ZZ"));
    }

    #[test]
    fn mismatched_marginals_are_rejected() {
        assert!(matches!(
            relate_purifications(&g("ZI,IZ"), &g("-ZI,IZ"), &[1]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn local_search_handles_single_sites() {
        let pi = local_search(&g("XX,ZZ"), &g("-XX,ZZ"), &[1]).unwrap();
        assert_eq!(pi.conjugate(&g("-XX,ZZ")).unwrap(), g("XX,ZZ"));
    }
}
