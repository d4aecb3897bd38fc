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

use rand::Rng;
use serde::Serialize;

use crate::algebra::{StabilizerGroup, ToyElement};
use crate::error::{Error, Result};
use crate::oracle::sample_index;
use crate::permutation::ToyPermutation;
use crate::rational::Dyadic;

use super::measure::{outcomes, Measurement};
use super::trace::partial_trace;

/// A labelled collection of states with exact weights.
///
/// Mixtures of toy states are in general not toy states themselves, so the
/// members are kept apart rather than merged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateEnsemble {
    pub members: Vec<EnsembleMember>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnsembleMember {
    pub label: String,
    pub probability: Dyadic,
    pub state: StabilizerGroup,
}

impl StateEnsemble {
    pub fn total(&self) -> Dyadic {
        self.members.iter().map(|m| m.probability).sum()
    }

    /// Draw one member with its exact weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &EnsembleMember {
        let w: Vec<Dyadic> = self.members.iter().map(|m| m.probability).collect();
        &self.members[sample_index(&w, rng)]
    }
}

/// Irreversible map: append `ancilla` after the `n` principal systems,
/// apply `pi` to the joint register, measure the ancilla with `m` (defined on
/// the ancilla alone) and trace the ancilla out of every branch.
pub fn generalized_map(
    s: &StabilizerGroup,
    ancilla: &StabilizerGroup,
    pi: &ToyPermutation,
    m: &Measurement,
) -> Result<StateEnsemble> {
    let (n, a) = (s.n(), ancilla.n());
    if pi.n() != n + a {
        return Err(Error::LengthMismatch { expected: n + a, found: pi.n() });
    }
    if m.n() != a {
        return Err(Error::LengthMismatch { expected: a, found: m.n() });
    }
    let joint = pi.conjugate(&s.tensor(ancilla))?;
    let pad = ToyElement::identity(n);
    let branches = m
        .branches()
        .iter()
        .map(|(l, t)| {
            let gens: Vec<ToyElement> = t.generators().iter().map(|g| pad.tensor(g)).collect();
            (l.clone(), StabilizerGroup::from_valid(n + a, &gens))
        })
        .collect();
    let lifted = Measurement::new(n + a, branches)?;
    let keep: Vec<usize> = (0..n).collect();
    let members = outcomes(&joint, &lifted)?
        .into_iter()
        .map(|o| Ok(EnsembleMember { label: o.label, probability: o.probability, state: partial_trace(&o.state, &keep)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(StateEnsemble { members })
}

/// The same map when the ancilla outcome is discarded unread.
pub fn averaged_channel(s: &StabilizerGroup, ancilla: &StabilizerGroup, pi: &ToyPermutation) -> Result<StabilizerGroup> {
    let joint = pi.conjugate(&s.tensor(ancilla))?;
    partial_trace(&joint, &(0..s.n()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::Factor;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    #[test]
    fn trivial_map() {
        let e = generalized_map(&g("X"), &g("Z"), &ToyPermutation::identity(2), &Measurement::observable(&"Z".parse().unwrap())).unwrap();
        assert_eq!(e.members.len(), 1);
        assert_eq!(e.members[0].state, g("X"));
        assert_eq!(e.members[0].probability, Dyadic::ONE);
    }

    #[test]
    fn controlled_z_then_ancilla_readout() {
        let pi = ToyPermutation::from_factor(2, Factor::cz(0, 1));
        let e = generalized_map(&g("X"), &g("X"), &pi, &Measurement::observable(&"Z".parse().unwrap())).unwrap();
        let states: Vec<_> = e.members.iter().map(|m| (m.probability, m.state.clone())).collect();
        assert_eq!(states, vec![(Dyadic::new(1, 1), g("X")), (Dyadic::new(1, 1), g("-X"))]);
    }

    #[test]
    fn dephasing() {
        let pi = ToyPermutation::from_factor(2, Factor::cx(0, 1));
        let e = generalized_map(&g("X"), &g("Z"), &pi, &Measurement::observable(&"Z".parse().unwrap())).unwrap();
        let states: Vec<_> = e.members.iter().map(|m| m.state.clone()).collect();
        assert_eq!(states, vec![g("Z"), g("-Z")]);
        assert_eq!(e.total(), Dyadic::ONE);
        assert_eq!(averaged_channel(&g("X"), &g("Z"), &pi).unwrap(), StabilizerGroup::maximally_mixed(1));
    }
}
