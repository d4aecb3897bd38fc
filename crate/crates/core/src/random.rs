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

//! Seeded generators for elements, groups, permutations and graphs, plus
//! exhaustive group enumeration at small sizes.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Membership, StabilizerGroup, ToyElement, ToySymbol};
use crate::mbtc::OpenGraph;
use crate::permutation::{Factor, LocalPerm, ToyPermutation};

/// Uniform symbols and sign; may be the identity.
pub fn random_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ToyElement {
    let syms: Vec<ToySymbol> = (0..n).map(|_| ToySymbol::ALL[rng.gen_range(0..4)]).collect();
    ToyElement::from_symbols(rng.gen(), &syms)
}

/// Uniform among elements with at least one non-identity symbol.
pub fn random_nontrivial_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ToyElement {
    loop {
        let e = random_element(n, rng);
        if !e.is_identity_symbols() {
            return e;
        }
    }
}

/// Product of `len` random local or controlled-Pauli factors.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> ToyPermutation {
    let factors = (0..len)
        .map(|_| {
            if n < 2 || rng.gen_bool(0.5) {
                Factor::local(rng.gen_range(0..n), LocalPerm::from_id(rng.gen_range(0..24)).expect("id in range"))
            } else {
                let control = rng.gen_range(0..n);
                let target = (control + rng.gen_range(1..n)) % n;
                let pauli = *ToySymbol::NONTRIVIAL.choose(rng).expect("nonempty");
                Factor::Controlled { control, target, pauli }
            }
        })
        .collect();
    ToyPermutation::new(n, factors).expect("sites in range")
}

/// Random group of the given rank: signed `Z` generators moved by a random permutation.
pub fn random_group<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> StabilizerGroup {
    assert!(rank <= n, "rank {rank} exceeds {n} systems");
    let gens = (0..rank).map(|i| ToyElement::single(n, i, ToySymbol::Z).with_sign(rng.gen())).collect();
    let base = StabilizerGroup::new(n, gens).expect("independent Z generators");
    random_permutation(n, 4 * n + 2, rng).conjugate(&base).expect("permutations keep validity")
}

/// Random group of uniformly chosen rank.
pub fn random_any_group<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StabilizerGroup {
    let rank = rng.gen_range(0..=n);
    random_group(n, rank, rng)
}

/// Every valid group on `n` systems. Grows quickly; meant for `n <= 3`.
pub fn enumerate_groups(n: usize) -> Vec<StabilizerGroup> {
    assert!(n <= 3, "enumeration is limited to three systems");
    let signed: Vec<ToyElement> = (1usize..1 << (2 * n))
        .flat_map(|code| {
            let syms: Vec<ToySymbol> = (0..n).map(|i| ToySymbol::from_code((code >> (2 * i)) as u8 & 3)).collect();
            [false, true].map(|neg| ToyElement::from_symbols(neg, &syms))
        })
        .collect();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut all = vec![StabilizerGroup::maximally_mixed(n)];
    seen.insert(format!("{:?}", all[0]));
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for e in &signed {
                if s.member(e).expect("sizes match") != Membership::Absent || s.generators().iter().any(|g| g.symplectic(e)) {
                    continue;
                }
                let mut gens = s.generators().to_vec();
                gens.push(e.clone());
                let grown = StabilizerGroup::new(n, gens).expect("compatible independent extension");
                if seen.insert(format!("{grown:?}")) {
                    next.push(grown);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Closed graph on labels `1..=n`, each edge present with probability 1/2.
pub fn random_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OpenGraph {
    let nodes: Vec<u32> = (1..=n as u32).collect();
    let edges: Vec<(u32, u32)> =
        (1..=n as u32).flat_map(|a| (a + 1..=n as u32).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
    OpenGraph::new(&nodes, &edges, &[], &[]).expect("simple graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_counts() {
        // Single system: maximally mixed plus six pure states.
        assert_eq!(enumerate_groups(1).len(), 7);
        let two = enumerate_groups(2);
        assert_eq!(two.iter().filter(|s| s.is_pure()).count(), 60);
        assert_eq!(two.iter().filter(|s| s.rank() == 1).count(), 30);
    }

    #[test]
    fn random_groups_have_requested_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..5 {
            for l in 0..=n {
                assert_eq!(random_group(n, l, &mut rng).rank(), l);
            }
        }
    }
}
