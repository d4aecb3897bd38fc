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

//! Choice points shared by sampled runs and exhaustive enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::Result;
use crate::rational::Ratio;

/// Resolves a choice between alternatives with positive weights summing to 1.
pub trait Chooser {
    fn pick(&mut self, weights: &[Ratio]) -> usize;

    /// Uniform choice among `k` alternatives.
    fn pick_uniform(&mut self, k: usize) -> usize {
        if k <= 1 {
            return 0;
        }
        let w = Ratio::new(1.into(), (k as i64).into());
        self.pick(&vec![w; k])
    }
}

/// Draws every choice from a random generator, exactly.
pub struct Sampler<R: Rng> {
    rng: R,
}

impl<R: Rng> Sampler<R> {
    pub fn new(rng: R) -> Sampler<R> {
        Sampler { rng }
    }
}

impl<R: Rng> Chooser for Sampler<R> {
    fn pick(&mut self, weights: &[Ratio]) -> usize {
        if weights.len() <= 1 {
            return 0;
        }
        let den = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let den = den.to_u128().expect("weight denominators fit in 128 bits");
        let draw = self.rng.gen_range(0..den);
        let mut acc = 0u128;
        for (i, w) in weights.iter().enumerate() {
            acc += (w * Ratio::from_integer(den.into())).to_integer().to_u128().expect("nonnegative weight");
            if draw < acc {
                return i;
            }
        }
        weights.len() - 1
    }
}

/// Follows a fixed prefix of choices, then takes the first alternative,
/// recording every choice point and the probability of the path.
#[derive(Clone, Debug)]
pub struct Script {
    prefix: Vec<usize>,
    taken: Vec<(usize, usize)>,
    weight: Ratio,
}

impl Script {
    pub fn new(prefix: Vec<usize>) -> Script {
        Script { prefix, taken: Vec::new(), weight: Ratio::one() }
    }

    /// Probability of the choices made so far.
    pub fn weight(&self) -> &Ratio {
        &self.weight
    }

    /// The choices made so far.
    pub fn path(&self) -> Vec<usize> {
        self.taken.iter().map(|(c, _)| *c).collect()
    }
}

impl Chooser for Script {
    fn pick(&mut self, weights: &[Ratio]) -> usize {
        if weights.len() <= 1 {
            return 0;
        }
        let i = self.taken.len();
        let c = self.prefix.get(i).copied().unwrap_or(0).min(weights.len() - 1);
        self.taken.push((c, weights.len()));
        self.weight *= &weights[c];
        c
    }
}

/// Run `f` once per leaf of its choice tree, returning each result with its
/// path probability. The probabilities of all leaves sum to 1.
pub fn enumerate<T>(mut f: impl FnMut(&mut dyn Chooser) -> Result<T>) -> Result<Vec<(Ratio, T)>> {
    let mut stack = vec![Vec::new()];
    let mut leaves = Vec::new();
    while let Some(prefix) = stack.pop() {
        let mut script = Script::new(prefix.clone());
        let value = f(&mut script)?;
        for k in (prefix.len()..script.taken.len()).rev() {
            let (_, arity) = script.taken[k];
            for alt in (1..arity).rev() {
                let mut p: Vec<usize> = script.taken[..k].iter().map(|(c, _)| *c).collect();
                p.push(alt);
                stack.push(p);
            }
        }
        leaves.push((script.weight, value));
    }
    debug_assert!(leaves.iter().map(|(w, _)| w.clone()).fold(Ratio::zero(), |a, b| a + b).is_one());
    Ok(leaves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_covers_all_paths() {
        let leaves = enumerate(|c| {
            let a = c.pick_uniform(3);
            let b = if a == 0 { c.pick_uniform(2) } else { 0 };
            Ok((a, b))
        })
        .unwrap();
        let mut paths: Vec<_> = leaves.iter().map(|(_, v)| *v).collect();
        paths.sort_unstable();
        assert_eq!(paths, vec![(0, 0), (0, 1), (1, 0), (2, 0)]);
        let sixth = Ratio::new(1.into(), 6.into());
        assert_eq!(leaves.iter().filter(|(w, _)| *w == sixth).count(), 2);
    }

    #[test]
    fn sampler_frequencies() {
        let mut s = Sampler::new(ChaCha8Rng::seed_from_u64(1));
        let w = [Ratio::new(1.into(), 4.into()), Ratio::new(3.into(), 4.into())];
        let hits = (0..4000).filter(|_| s.pick(&w) == 0).count();
        assert!((800..1200).contains(&hits), "{hits}");
    }
}
