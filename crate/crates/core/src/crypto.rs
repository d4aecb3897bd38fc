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

//! Trace distance, distance-saturating purifications and the bit-commitment
//! cheating constructions.

use serde::Serialize;

use crate::algebra::{symplectic_basis, StabilizerGroup, ToyElement, ToySymbol};
use crate::dynamics::{branch_probability, complement, partial_trace, relate_purifications};
use crate::error::{Error, Result};
use crate::oracle::{OnticDistribution, Oracle};
use crate::permutation::ToyPermutation;
use crate::rational::Dyadic;

/// `(1/2) sum |rho_i - sigma_i|`.
pub fn trace_distance(rho: &OnticDistribution, sigma: &OnticDistribution) -> Result<Dyadic> {
    if rho.n() != sigma.n() {
        return Err(Error::LengthMismatch { expected: rho.n(), found: sigma.n() });
    }
    let sum: Dyadic = rho.probabilities().iter().zip(sigma.probabilities()).map(|(a, b)| (*a - *b).abs()).sum();
    Ok(sum.half())
}

/// Two pure states on `2n` systems: rows (sites `0..n`) carry the reduced
/// state, columns (sites `n..2n`) the purifying partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturatingPair {
    /// Maximally correlated purification of the maximally mixed state.
    pub psi: StabilizerGroup,
    /// Purification of `sigma` that contains every diagonal entry of its rows.
    pub phi: StabilizerGroup,
}

fn pairwise(h: &ToyElement) -> ToyElement {
    h.with_sign(false).tensor(&h.with_sign(false))
}

/// Purifications `psi` of the maximally mixed state and `phi` of `sigma` with
/// `D(psi, phi) = D(uniform, sigma)`.
///
/// `phi` is generated by `sigma (x) I` and `h (x) h` for `h` commuting with
/// `sigma`, so its support holds exactly one `1/4^n` entry on each diagonal
/// cell `(i, i)` with `sigma_i != 0` plus the rest of that row's mass.
pub fn saturating_purifications(sigma: &StabilizerGroup) -> SaturatingPair {
    let n = sigma.n();
    let id = ToyElement::identity(n);
    let psi_gens: Vec<ToyElement> = (0..n)
        .flat_map(|i| [ToySymbol::X, ToySymbol::Z].map(|s| pairwise(&ToyElement::single(n, i, s))))
        .collect();
    let basis = symplectic_basis(n, sigma.generators());
    let mut phi_gens: Vec<ToyElement> = sigma.generators().iter().map(|g| g.tensor(&id)).collect();
    phi_gens.extend(sigma.generators().iter().map(pairwise));
    for (lx, lz) in &basis.logicals {
        phi_gens.push(pairwise(lx));
        phi_gens.push(pairwise(lz));
    }
    SaturatingPair {
        psi: StabilizerGroup::from_valid(2 * n, &psi_gens),
        phi: StabilizerGroup::from_valid(2 * n, &phi_gens),
    }
}

/// Row-by-row fill: `1/4^n` on the diagonal of every row with `sigma_i != 0`,
/// then the rest of the row mass in `1/4^n` quanta left to right.
///
/// The result always saturates the distance bound but is not always the
/// distribution of a toy state; [`saturating_purifications`] is.
pub fn greedy_fill(sigma: &OnticDistribution) -> Result<OnticDistribution> {
    let n = sigma.n();
    let size = 1usize << (2 * n);
    let quantum = Dyadic::pow2_inv(2 * n as u32);
    let mut probs = vec![Dyadic::ZERO; size * size];
    for i in 0..size {
        let mut left = sigma.get(i);
        if left.is_zero() {
            continue;
        }
        if left < quantum {
            return Err(Error::Precondition(format!("row {i} holds less than one quantum")));
        }
        probs[i + size * i] = quantum;
        left = left - quantum;
        for j in (0..size).filter(|&j| j != i) {
            if left.is_zero() {
                break;
            }
            let take = if left < quantum { left } else { quantum };
            probs[i + size * j] = take;
            left = left - take;
        }
    }
    OnticDistribution::from_probabilities(2 * n, probs)
}

/// A two-stage commitment over sites `a` (committer) and `b` (receiver).
#[derive(Clone, Debug)]
pub struct Commitment {
    pub s0: StabilizerGroup,
    pub s1: StabilizerGroup,
    pub a_sites: Vec<usize>,
    pub b_sites: Vec<usize>,
    /// `a`-local permutation with `conjugate(flip, s1) == s0`.
    pub flip: ToyPermutation,
}

impl Commitment {
    /// Requires pure encodings with equal receiver marginals.
    pub fn new(s0: StabilizerGroup, s1: StabilizerGroup, a_sites: Vec<usize>) -> Result<Commitment> {
        let b_sites = complement(s0.n(), &a_sites);
        if b_sites.is_empty() {
            return Err(Error::Precondition("the receiver holds no systems".into()));
        }
        if partial_trace(&s0, &b_sites)? != partial_trace(&s1, &b_sites)? {
            return Err(Error::Precondition("commitment is not concealing".into()));
        }
        let flip = relate_purifications(&s0, &s1, &a_sites)?;
        Ok(Commitment { s0, s1, a_sites, b_sites, flip })
    }
}

/// Logical flips on `a` and the receiver-side independence audit.
#[derive(Clone, Debug, Serialize)]
pub struct NoDeletionReport {
    /// `a`-local map taking the `s1` encoding to the `s0` one.
    #[serde(serialize_with = "display")]
    pub to_zero: ToyPermutation,
    /// `a`-local map taking the `s0` encoding to the `s1` one.
    #[serde(serialize_with = "display")]
    pub to_one: ToyPermutation,
    pub observables_checked: usize,
    pub receiver_independent: bool,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Every nonidentity `+`-signed element on `sites` of an `n`-system register.
fn local_observables(n: usize, sites: &[usize]) -> impl Iterator<Item = ToyElement> + '_ {
    (1usize..1 << (2 * sites.len())).map(move |code| {
        let syms: Vec<ToySymbol> = (0..sites.len()).map(|i| ToySymbol::from_code((code >> (2 * i)) as u8 & 3)).collect();
        ToyElement::from_symbols(false, &syms).embed(n, sites)
    })
}

/// The two encodings share the receiver marginal, so the logical value can
/// only be moved by the committer, and no receiver observable reveals it.
pub fn no_deletion_witness(
    s0: &StabilizerGroup,
    s1: &StabilizerGroup,
    a_sites: &[usize],
    oracle: &Oracle,
) -> Result<NoDeletionReport> {
    let c = Commitment::new(s0.clone(), s1.clone(), a_sites.to_vec())?;
    let (d0, d1) = (oracle.distribution_of(s0)?, oracle.distribution_of(s1)?);
    let mut checked = 0;
    let mut independent = true;
    for g in local_observables(s0.n(), &c.b_sites) {
        let t = StabilizerGroup::from_valid(s0.n(), &[g]);
        independent &= oracle.projector_probability(&t, &d0)? == oracle.projector_probability(&t, &d1)?;
        checked += 1;
    }
    Ok(NoDeletionReport { to_one: c.flip.inverse(), to_zero: c.flip, observables_checked: checked, receiver_independent: independent })
}

/// Outcome of a cheating attempt against a commitment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheatReport {
    /// Probability that the receiver's check for bit 0 accepts.
    pub acceptance_probability: Dyadic,
    /// Probability that the receiver's check for bit 1 accepts.
    pub bit_one_probability: Dyadic,
    /// Whether the cheat only touched committer systems.
    pub committer_local: bool,
    /// Whether the receiver marginal survived the cheat unchanged.
    pub concealing_maintained: bool,
}

/// Commit to 1, apply `cheat` during storage, then reveal as 0.
pub fn bc_cheat_with(c: &Commitment, cheat: &ToyPermutation) -> Result<CheatReport> {
    let stored = cheat.conjugate(&c.s1)?;
    Ok(CheatReport {
        acceptance_probability: branch_probability(&stored, &c.s0)?,
        bit_one_probability: branch_probability(&stored, &c.s1)?,
        committer_local: cheat.support().iter().all(|s| c.a_sites.contains(s)),
        concealing_maintained: partial_trace(&stored, &c.b_sites)? == partial_trace(&c.s1, &c.b_sites)?,
    })
}

/// The committer-local logical flip as a cheat.
pub fn bc_cheat_perfect(c: &Commitment) -> Result<CheatReport> {
    bc_cheat_with(c, &c.flip)
}

/// Report of the approximate cheating construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImperfectReport {
    /// `D(rho0_B, rho1_B)`.
    pub epsilon: Dyadic,
    /// `D(sigma1_AB, rho1_AB)` for the constructed cheat state.
    pub cheat_distance: Dyadic,
    /// Receiver's acceptance probability when checking for bit 1.
    pub acceptance_probability: Dyadic,
    /// `cheat_distance < sqrt(2 epsilon)`, decided exactly.
    pub beats_sqrt_two_epsilon: bool,
}

/// Commit to 0 and steer toward the bit-1 encoding with committer-local maps
/// `U` (into `psi`) and `V` (into `phi`): `sigma1 = V^-1 U rho0 U^-1 V`.
///
/// Needs equal-size halves and a maximally mixed receiver marginal for `s0`.
pub fn bc_cheat_imperfect(
    s0: &StabilizerGroup,
    s1: &StabilizerGroup,
    a_sites: &[usize],
    oracle: &Oracle,
) -> Result<(ImperfectReport, StabilizerGroup)> {
    let n = s0.n();
    let b_sites = complement(n, a_sites);
    if a_sites.len() != b_sites.len() {
        return Err(Error::Precondition("committer and receiver need the same number of systems".into()));
    }
    if !s0.is_pure() || !s1.is_pure() || s1.n() != n {
        return Err(Error::Precondition("encodings must be pure states of equal size".into()));
    }
    let m = b_sites.len();
    let rho0_b = partial_trace(s0, &b_sites)?;
    if rho0_b != StabilizerGroup::maximally_mixed(m) {
        return Err(Error::Precondition("the bit-0 receiver marginal must be maximally mixed".into()));
    }
    let rho1_b = partial_trace(s1, &b_sites)?;
    let pair = saturating_purifications(&rho1_b);
    let layout: Vec<usize> = b_sites.iter().chain(a_sites).copied().collect();
    let psi = pair.psi.embed(n, &layout);
    let phi = pair.phi.embed(n, &layout);
    let u = relate_purifications(&psi, s0, a_sites)?;
    let v = relate_purifications(&phi, s1, a_sites)?;
    let sigma1 = u.then(&v.inverse()).conjugate(s0)?;
    let epsilon = trace_distance(&oracle.distribution_of(&rho0_b)?, &oracle.distribution_of(&rho1_b)?)?;
    let cheat_distance = trace_distance(&oracle.distribution_of(&sigma1)?, &oracle.distribution_of(s1)?)?;
    let report = ImperfectReport {
        epsilon,
        cheat_distance,
        acceptance_probability: branch_probability(&sigma1, s1)?,
        beats_sqrt_two_epsilon: cheat_distance * cheat_distance < epsilon + epsilon,
    };
    Ok((report, sigma1))
}
