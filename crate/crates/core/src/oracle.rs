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

//! Brute-force ground truth over the `4^n` ontic states.
//!
//! Ontic state `o` packs one base-4 digit per system, least significant
//! first; digit `a + 2b` is the single-system label `1 + a + 2b`. All values
//! are exact dyadic rationals.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{StabilizerGroup, ToyElement};
use crate::error::{Error, Result};
use crate::rational::Dyadic;

/// Largest system count enumerated unless overridden.
pub const DEFAULT_CAP: usize = 6;

/// One ontic configuration of `n` systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OnticState {
    pub n: usize,
    pub index: usize,
}

impl OnticState {
    pub fn a(&self, site: usize) -> bool {
        self.index >> (2 * site) & 1 == 1
    }

    pub fn b(&self, site: usize) -> bool {
        self.index >> (2 * site + 1) & 1 == 1
    }

    /// Single-system labels in `1..=4`, site 1 first.
    pub fn labels(&self) -> Vec<u8> {
        (0..self.n).map(|i| 1 + (self.index >> (2 * i) & 3) as u8).collect()
    }

    pub fn from_labels(labels: &[u8]) -> OnticState {
        let index = labels.iter().enumerate().map(|(i, l)| ((*l as usize - 1) & 3) << (2 * i)).sum();
        OnticState { n: labels.len(), index }
    }

    /// Packed `(a, b)` bits with bit `i` for site `i`.
    pub fn bits(&self) -> (u64, u64) {
        split(self.index, self.n)
    }
}

/// Split an ontic index into packed `a` and `b` bit masks.
pub fn split(o: usize, n: usize) -> (u64, u64) {
    let (mut a, mut b) = (0u64, 0u64);
    for i in 0..n {
        a |= ((o >> (2 * i)) as u64 & 1) << i;
        b |= ((o >> (2 * i + 1)) as u64 & 1) << i;
    }
    (a, b)
}

/// Inverse of [`split`].
pub fn join(a: u64, b: u64, n: usize) -> usize {
    (0..n).map(|i| (((a >> i) & 1) as usize) << (2 * i) | (((b >> i) & 1) as usize) << (2 * i + 1)).sum()
}

/// Exact probability vector over `4^n` ontic states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnticDistribution {
    n: usize,
    probs: Vec<Dyadic>,
}

/// JSON form with a shared power-of-two denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionDump {
    pub n: usize,
    pub denominator_log2: u32,
    pub numerators: Vec<i128>,
}

impl OnticDistribution {
    pub fn from_probabilities(n: usize, probs: Vec<Dyadic>) -> Result<OnticDistribution> {
        if probs.len() != 1 << (2 * n) {
            return Err(Error::LengthMismatch { expected: 1 << (2 * n), found: probs.len() });
        }
        if probs.iter().any(|p| *p < Dyadic::ZERO) || probs.iter().copied().sum::<Dyadic>() != Dyadic::ONE {
            return Err(Error::Precondition("probabilities must be non-negative and sum to 1".into()));
        }
        Ok(OnticDistribution { n, probs })
    }

    pub fn uniform(n: usize) -> OnticDistribution {
        OnticDistribution { n, probs: vec![Dyadic::pow2_inv(2 * n as u32); 1 << (2 * n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[Dyadic] {
        &self.probs
    }

    pub fn get(&self, o: usize) -> Dyadic {
        self.probs[o]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&o| !self.probs[o].is_zero()).collect()
    }

    pub fn total(&self) -> Dyadic {
        self.probs.iter().copied().sum()
    }

    pub fn dump(&self) -> DistributionDump {
        let l = self.probs.iter().map(|p| p.denominator_log2()).max().unwrap_or(0);
        DistributionDump {
            n: self.n,
            denominator_log2: l,
            numerators: self.probs.iter().map(|p| p.numerator_at(l)).collect(),
        }
    }

    /// Marginal on `keep` (0-based sites, in the given order).
    pub fn marginal(&self, keep: &[usize]) -> OnticDistribution {
        let m = keep.len();
        let mut out = vec![Dyadic::ZERO; 1 << (2 * m)];
        for (o, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let k: usize = keep.iter().enumerate().map(|(j, &s)| (o >> (2 * s) & 3) << (2 * j)).sum();
            out[k] = out[k] + *p;
        }
        OnticDistribution { n: m, probs: out }
    }

    /// Probability-weighted mixture of equal-size distributions.
    pub fn mixture(parts: &[(Dyadic, OnticDistribution)]) -> Result<OnticDistribution> {
        let first = parts.first().ok_or_else(|| Error::Precondition("empty mixture".into()))?;
        let n = first.1.n;
        let mut probs = vec![Dyadic::ZERO; 1 << (2 * n)];
        for (w, d) in parts {
            if d.n != n {
                return Err(Error::LengthMismatch { expected: n, found: d.n });
            }
            for (acc, p) in probs.iter_mut().zip(&d.probs) {
                *acc = *acc + *w * *p;
            }
        }
        OnticDistribution::from_probabilities(n, probs)
    }

    /// Product distribution with `other` on the higher sites.
    pub fn tensor(&self, other: &OnticDistribution) -> OnticDistribution {
        let shift = 2 * self.n;
        let mut probs = vec![Dyadic::ZERO; 1 << (2 * (self.n + other.n))];
        for (j, q) in other.probs.iter().enumerate() {
            for (i, p) in self.probs.iter().enumerate() {
                probs[i | j << shift] = *p * *q;
            }
        }
        OnticDistribution { n: self.n + other.n, probs }
    }
}

/// Enumeration engine with a configurable size cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { cap: DEFAULT_CAP }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Oracle {
        Oracle { cap: cap.min(15) }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapExceeded { n, cap: self.cap });
        }
        Ok(())
    }

    /// Length-`4^n` list of `(a, b)` masks, one per ontic state.
    fn states(n: usize) -> impl Iterator<Item = (usize, u64, u64)> {
        (0..1usize << (2 * n)).map(move |o| {
            let (a, b) = split(o, n);
            (o, a, b)
        })
    }

    /// `rho_S = prod (I + g) / 4^n`, entrywise.
    pub fn distribution_of(&self, s: &StabilizerGroup) -> Result<OnticDistribution> {
        self.check(s.n())?;
        let n = s.n();
        let value = Dyadic::new(1, (2 * n - s.rank()) as u32);
        let probs = Oracle::states(n)
            .map(|(_, a, b)| {
                if s.generators().iter().all(|g| !g.flips_at(a, b)) {
                    value
                } else {
                    Dyadic::ZERO
                }
            })
            .collect();
        Ok(OnticDistribution { n, probs })
    }

    /// Diagonal `+-1` entries of an element.
    pub fn diagonal(&self, g: &ToyElement) -> Result<Vec<i8>> {
        self.check(g.len())?;
        Ok(Oracle::states(g.len()).map(|(_, a, b)| if g.flips_at(a, b) { -1 } else { 1 }).collect())
    }

    /// `Tr(P_T rho)`: mass of `rho` on states fixed by every generator of `T`.
    pub fn projector_probability(&self, t: &StabilizerGroup, rho: &OnticDistribution) -> Result<Dyadic> {
        self.check(rho.n)?;
        if t.n() != rho.n {
            return Err(Error::LengthMismatch { expected: rho.n, found: t.n() });
        }
        Ok(Oracle::states(rho.n)
            .filter(|(_, a, b)| t.generators().iter().all(|g| !g.flips_at(*a, *b)))
            .map(|(o, _, _)| rho.probs[o])
            .sum())
    }

    /// Output entry `i` is input entry `pi^-1(i)`, given the forward map `pi`.
    pub fn apply_table(&self, forward: &[usize], rho: &OnticDistribution) -> Result<OnticDistribution> {
        if forward.len() != rho.probs.len() {
            return Err(Error::LengthMismatch { expected: rho.probs.len(), found: forward.len() });
        }
        let mut probs = vec![Dyadic::ZERO; forward.len()];
        for (o, p) in rho.probs.iter().enumerate() {
            probs[forward[o]] = *p;
        }
        Ok(OnticDistribution { n: rho.n, probs })
    }

    /// Whether the branch supports are disjoint and cover every ontic state.
    pub fn is_partition(&self, n: usize, branches: &[&StabilizerGroup]) -> Result<bool> {
        self.check(n)?;
        for (_, a, b) in Oracle::states(n) {
            let hits = branches
                .iter()
                .filter(|t| t.generators().iter().all(|g| !g.flips_at(a, b)))
                .count();
            if hits != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Null space of the row vectors `rows` over `bits`-bit words.
fn null_space(rows: &[u64], bits: usize) -> Vec<u64> {
    let mut m: Vec<u64> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..bits {
        let Some(p) = (top..m.len()).find(|&r| m[r] >> c & 1 == 1) else { continue };
        m.swap(top, p);
        for r in 0..m.len() {
            if r != top && m[r] >> c & 1 == 1 {
                m[r] ^= m[top];
            }
        }
        pivots.push(c);
        top += 1;
    }
    (0..bits)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = 1u64 << free;
            for (r, &pc) in pivots.iter().enumerate() {
                if m[r] >> free & 1 == 1 {
                    v |= 1 << pc;
                }
            }
            v
        })
        .collect()
}

impl Oracle {
    /// The stabilizer group whose distribution is `rho`, if there is one.
    pub fn recognize(&self, rho: &OnticDistribution) -> Option<StabilizerGroup> {
        let n = rho.n;
        let support = rho.support();
        let value = rho.probs[support[0]];
        if support.iter().any(|&o| rho.probs[o] != value) || !support.len().is_power_of_two() {
            return None;
        }
        let v0 = support[0] as u64;
        let mut basis: Vec<u64> = Vec::new();
        for &o in &support {
            let mut r = o as u64 ^ v0;
            for b in &basis {
                r = r.min(r ^ b);
            }
            if r != 0 {
                basis.push(r);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        if 1usize << basis.len() != support.len() {
            return None;
        }
        let gens: Vec<ToyElement> = null_space(&basis, 2 * n)
            .into_iter()
            .map(|mask| {
                let syms: Vec<_> = (0..n)
                    .map(|i| crate::algebra::ToySymbol::from_code((mask >> (2 * i)) as u8 & 3))
                    .collect();
                ToyElement::from_symbols((mask & v0).count_ones() & 1 == 1, &syms)
            })
            .collect();
        StabilizerGroup::new(n, gens).ok()
    }
}

/// Draw an ontic state with exactly the listed probabilities.
pub fn sample_ontic<R: Rng + ?Sized>(rho: &OnticDistribution, rng: &mut R) -> OnticState {
    let index = sample_index(&rho.probs, rng);
    OnticState { n: rho.n, index }
}

/// Index drawn from exact dyadic weights that sum to 1.
pub fn sample_index<R: Rng + ?Sized>(weights: &[Dyadic], rng: &mut R) -> usize {
    let l = weights.iter().map(|p| p.denominator_log2()).max().unwrap_or(0);
    assert!(l <= 120, "denominator 2^{l} too fine to sample");
    let draw: u128 = rng.gen::<u128>() >> (128 - l.max(1));
    let draw = if l == 0 { 0 } else { draw };
    let mut acc: i128 = 0;
    for (i, p) in weights.iter().enumerate() {
        acc += p.numerator_at(l);
        if (draw as i128) < acc {
            return i;
        }
    }
    weights.iter().rposition(|p| !p.is_zero()).expect("weights sum to 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    #[test]
    fn labels_and_bits() {
        let s = OnticState::from_labels(&[2, 3]);
        assert_eq!(s.index, 1 | 2 << 2);
        assert!(s.a(0) && !s.b(0) && !s.a(1) && s.b(1));
        assert_eq!(s.labels(), vec![2, 3]);
        assert_eq!(join(0b01, 0b10, 2), s.index);
    }

    #[test]
    fn single_system_distributions() {
        let o = Oracle::default();
        let d = o.distribution_of(&g("+Z")).unwrap();
        let h = Dyadic::new(1, 1);
        assert_eq!(d.probabilities(), &[h, h, Dyadic::ZERO, Dyadic::ZERO]);
        assert_eq!(o.distribution_of(&StabilizerGroup::maximally_mixed(1)).unwrap(), OnticDistribution::uniform(1));
        let bell = o.distribution_of(&g("XX,YY")).unwrap();
        assert_eq!(bell.support().len(), 4);
    }

    #[test]
    fn sampling_respects_support() {
        let o = Oracle::default();
        let d = o.distribution_of(&g("+Z")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert!(!sample_ontic(&d, &mut rng).b(0));
        }
        let point = OnticDistribution::from_probabilities(1, vec![Dyadic::ZERO, Dyadic::ZERO, Dyadic::ONE, Dyadic::ZERO]).unwrap();
        assert_eq!(sample_ontic(&point, &mut rng).index, 2);
    }

    #[test]
    fn recognizes_stabilizer_distributions() {
        let o = Oracle::default();
        for text in ["+Z", "-X", "XX,ZZ", "-YZ", "XZI,ZXZ,-IZX"] {
            let s = g(text);
            assert_eq!(o.recognize(&o.distribution_of(&s).unwrap()), Some(s));
        }
        let mixed = StabilizerGroup::maximally_mixed(2);
        assert_eq!(o.recognize(&o.distribution_of(&mixed).unwrap()), Some(mixed));
        let h = Dyadic::new(1, 1);
        let point = OnticDistribution::from_probabilities(1, vec![h, Dyadic::ZERO, Dyadic::ZERO, h]).unwrap();
        assert_eq!(o.recognize(&point), Some(g("Y")));
        let one = OnticDistribution::from_probabilities(1, vec![Dyadic::ONE, Dyadic::ZERO, Dyadic::ZERO, Dyadic::ZERO]).unwrap();
        assert_eq!(o.recognize(&one), None);
    }

    #[test]
    fn cap_is_enforced() {
        let o = Oracle::with_cap(2);
        assert_eq!(
            o.distribution_of(&StabilizerGroup::maximally_mixed(3)),
            Err(Error::CapExceeded { n: 3, cap: 2 })
        );
    }
}
