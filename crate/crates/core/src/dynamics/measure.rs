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

use crate::algebra::{all_columns, echelon, Membership, StabilizerGroup, ToyElement};
use crate::error::{Error, Result};
use crate::oracle::{sample_index, Oracle};
use crate::rational::Dyadic;

/// A measurement given by labelled branch groups whose projectors sum to `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    n: usize,
    branches: Vec<(String, StabilizerGroup)>,
}

/// One branch of a measurement applied to a state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub label: String,
    pub probability: Dyadic,
    pub state: StabilizerGroup,
}

/// Whether the joint constraints of `a` and `b` are unsatisfiable, and the
/// symbol rank of their union.
fn union_rank(a: &[ToyElement], b: &[ToyElement], n: usize) -> (bool, usize) {
    let all: Vec<ToyElement> = a.iter().chain(b).cloned().collect();
    let ech = echelon(&all, &all_columns(n));
    (ech.null.iter().any(|r| r.elem.is_negative()), ech.rows.len())
}

/// `Tr(P_T rho_S)` computed from generators alone.
pub fn branch_probability(state: &StabilizerGroup, branch: &StabilizerGroup) -> Result<Dyadic> {
    if state.n() != branch.n() {
        return Err(Error::LengthMismatch { expected: state.n(), found: branch.n() });
    }
    let (empty, rank) = union_rank(state.generators(), branch.generators(), state.n());
    if empty {
        return Ok(Dyadic::ZERO);
    }
    Ok(Dyadic::pow2_inv((rank - state.rank()) as u32))
}

impl Measurement {
    /// Checks the partition of unity at the stabilizer level: branch
    /// supports are pairwise disjoint and their sizes add up to `4^n`.
    pub fn new(n: usize, branches: Vec<(String, StabilizerGroup)>) -> Result<Measurement> {
        if branches.is_empty() {
            return Err(Error::InvalidMeasurement("no branches".into()));
        }
        if let Some((l, _)) = branches.iter().find(|(_, t)| t.n() != n) {
            return Err(Error::InvalidMeasurement(format!("branch {l} has the wrong size")));
        }
        for i in 0..branches.len() {
            for j in i + 1..branches.len() {
                let (empty, _) = union_rank(branches[i].1.generators(), branches[j].1.generators(), n);
                if !empty {
                    return Err(Error::InvalidMeasurement(format!(
                        "branches {} and {} overlap",
                        branches[i].0, branches[j].0
                    )));
                }
            }
        }
        let mass: Dyadic = branches.iter().map(|(_, t)| Dyadic::pow2_inv(t.rank() as u32)).sum();
        if mass != Dyadic::ONE {
            return Err(Error::InvalidMeasurement(format!("branch projectors cover {mass} of the ontic space")));
        }
        Ok(Measurement { n, branches })
    }

    /// Two-outcome measurement of `g`, labelled `+1` and `-1`.
    pub fn observable(g: &ToyElement) -> Measurement {
        let n = g.len();
        assert!(!g.is_identity_symbols(), "cannot measure the identity");
        let plus = StabilizerGroup::from_valid(n, &[g.with_sign(false)]);
        let minus = StabilizerGroup::from_valid(n, &[g.with_sign(true)]);
        Measurement { n, branches: vec![("+1".into(), plus), ("-1".into(), minus)] }
    }

    /// Parse blocks of group lines separated by lines of the form `[label]`.
    pub fn parse(n: usize, text: &str) -> Result<Measurement> {
        let mut branches = Vec::new();
        let mut label: Option<String> = None;
        let mut body = String::new();
        let flush = |label: &mut Option<String>, body: &mut String, out: &mut Vec<(String, StabilizerGroup)>| -> Result<()> {
            if let Some(l) = label.take() {
                out.push((l, StabilizerGroup::parse_with_n(body, Some(n))?));
            } else if !body.trim().is_empty() {
                return Err(Error::Parse("group lines before the first [label]".into()));
            }
            body.clear();
            Ok(())
        };
        for line in text.lines() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("unterminated label {t:?}")))?;
                flush(&mut label, &mut body, &mut branches)?;
                label = Some(name.trim().to_string());
            } else {
                body.push_str(t);
                body.push('\n');
            }
        }
        flush(&mut label, &mut body, &mut branches)?;
        Measurement::new(n, branches)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[(String, StabilizerGroup)] {
        &self.branches
    }

    /// Partition check by brute-force enumeration.
    pub fn oracle_check(&self, oracle: &Oracle) -> Result<bool> {
        let groups: Vec<&StabilizerGroup> = self.branches.iter().map(|(_, t)| t).collect();
        oracle.is_partition(self.n, &groups)
    }
}

/// Condition `state` on the single observable `g` having value `+1`
/// (sign carried by `g`). Returns `None` when that value is impossible.
pub fn update_on_observable(state: &StabilizerGroup, g: &ToyElement) -> Option<StabilizerGroup> {
    match state.member(g).expect("sizes checked") {
        Membership::InGroup => return Some(state.clone()),
        Membership::NegationInGroup => return None,
        Membership::Absent => {}
    }
    let mut gens: Vec<ToyElement> = state.generators().to_vec();
    if let Some(first) = gens.iter().position(|h| h.symplectic(g)) {
        let pivot = gens.remove(first);
        for h in gens.iter_mut() {
            if h.symplectic(g) {
                h.mul_assign(&pivot);
            }
        }
    }
    gens.push(g.clone());
    Some(StabilizerGroup::from_valid(state.n(), &gens))
}

/// Post-measurement state for a branch, one branch generator at a time.
pub fn update_on_branch(state: &StabilizerGroup, branch: &StabilizerGroup) -> Option<StabilizerGroup> {
    branch.generators().iter().try_fold(state.clone(), |s, g| update_on_observable(&s, g))
}

/// Every branch with nonzero probability, in measurement order.
pub fn outcomes(state: &StabilizerGroup, m: &Measurement) -> Result<Vec<Outcome>> {
    if state.n() != m.n {
        return Err(Error::LengthMismatch { expected: m.n, found: state.n() });
    }
    let mut out = Vec::new();
    for (label, branch) in &m.branches {
        let p = branch_probability(state, branch)?;
        if p.is_zero() {
            continue;
        }
        let post = update_on_branch(state, branch)
            .ok_or_else(|| Error::Internal(format!("branch {label} has mass {p} but no post-state")))?;
        out.push(Outcome { label: label.clone(), probability: p, state: post });
    }
    let total: Dyadic = out.iter().map(|o| o.probability).sum();
    if total != Dyadic::ONE {
        return Err(Error::Internal(format!("branch probabilities sum to {total}")));
    }
    Ok(out)
}

/// Sample one branch with its exact probability.
pub fn measure<R: Rng + ?Sized>(state: &StabilizerGroup, m: &Measurement, rng: &mut R) -> Result<Outcome> {
    let mut all = outcomes(state, m)?;
    let weights: Vec<Dyadic> = all.iter().map(|o| o.probability).collect();
    Ok(all.swap_remove(sample_index(&weights, rng)))
}

/// Sample the value of a single observable; returns `(negative, post-state)`.
pub fn measure_observable<R: Rng + ?Sized>(
    state: &StabilizerGroup,
    g: &ToyElement,
    rng: &mut R,
) -> Result<(bool, StabilizerGroup)> {
    let o = measure(state, &Measurement::observable(g), rng)?;
    let negative = (o.label == "-1") ^ g.is_negative();
    Ok((negative, o.state))
}
