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


//! Structural invariants checked on generated inputs. Each case draws a
//! seed and builds its fixture with the library's seeded generators.

use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toystab::algebra::{Membership, StabilizerGroup, ToyElement, ToySymbol};
use toystab::bvc::{decoded_distribution, estimate_pfail, run_blind, run_delegated, run_verified, Deviation, Estimator, Mode};
use toystab::codes::{apply_error, single_system_states, CodeError, ToyCode};
use toystab::dynamics::{outcomes, partial_trace, purify, Measurement};
use toystab::mbtc::{deterministic_output, find_gflow, verify_gflow, OpenGraph, Pattern};
use toystab::oracle::Oracle;
use toystab::random::{random_any_group, random_element, random_nontrivial_element, random_permutation};
use toystab::rational::Dyadic;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn products_commute_associate_and_match_diagonals(seed: u64, n in 1usize..4) {
        let mut r = rng(seed);
        let (a, b, c) = (random_element(n, &mut r), random_element(n, &mut r), random_element(n, &mut r));
        let ab = a.multiply(&b).unwrap();
        prop_assert_eq!(&ab, &b.multiply(&a).unwrap());
        prop_assert_eq!(ab.multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
        let o = Oracle::default();
        let expected: Vec<i8> = o.diagonal(&a).unwrap().iter().zip(o.diagonal(&b).unwrap()).map(|(x, y)| x * y).collect();
        prop_assert_eq!(o.diagonal(&ab).unwrap(), expected);
    }

    #[test]
    fn canonical_form_ignores_generator_choice(seed: u64, n in 1usize..6) {
        let mut r = rng(seed);
        let s = random_any_group(n, &mut r);
        let mut gens = s.generators().to_vec();
        if gens.len() >= 2 {
            let (i, j) = (r.gen_range(0..gens.len()), r.gen_range(0..gens.len()));
            if i != j {
                gens[i] = gens[i].multiply(&gens[j]).unwrap();
            }
            gens.reverse();
        }
        prop_assert_eq!(StabilizerGroup::new(n, gens).unwrap(), s.clone());
        for e in s.elements() {
            prop_assert_eq!(s.member(&e).unwrap(), Membership::InGroup);
            prop_assert_eq!(s.member(&e.negated()).unwrap(), Membership::NegationInGroup);
        }
    }

    #[test]
    fn support_size_follows_rank(seed: u64, n in 1usize..5) {
        let s = random_any_group(n, &mut rng(seed));
        let d = Oracle::default().distribution_of(&s).unwrap();
        prop_assert_eq!(d.total(), Dyadic::ONE);
        prop_assert_eq!(d.support().len(), (1usize << (2 * n)) >> s.rank());
        prop_assert_eq!(Oracle::default().recognize(&d), Some(s));
    }

    #[test]
    fn permutations_invert_and_match_the_oracle(seed: u64, n in 1usize..4) {
        let mut r = rng(seed);
        let s = random_any_group(n, &mut r);
        let p = random_permutation(n, 3 * n, &mut r);
        let q = random_permutation(n, 2 * n, &mut r);
        let moved = p.conjugate(&s).unwrap();
        prop_assert_eq!(p.inverse().conjugate(&moved).unwrap(), s.clone());
        prop_assert_eq!(p.then(&q).conjugate(&s).unwrap(), q.conjugate(&moved).unwrap());
        let o = Oracle::default();
        prop_assert_eq!(o.distribution_of(&moved).unwrap(), o.apply_table(&p.ontic_table(), &o.distribution_of(&s).unwrap()).unwrap());
        prop_assert_eq!(moved.rank(), s.rank());
    }

    #[test]
    fn measurement_is_normalized_and_repeatable(seed: u64, n in 1usize..5) {
        let mut r = rng(seed);
        let s = random_any_group(n, &mut r);
        let g = random_nontrivial_element(n, &mut r);
        let m = Measurement::observable(&g);
        let outs = outcomes(&s, &m).unwrap();
        prop_assert_eq!(outs.iter().map(|o| o.probability).sum::<Dyadic>(), Dyadic::ONE);
        for o in &outs {
            let negative = o.label == "-1";
            prop_assert!(o.state.contains(&g.with_sign(negative)));
            let again = outcomes(&o.state, &m).unwrap();
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(&again[0].label, &o.label);
            prop_assert!(o.state.rank() >= s.rank());
        }
    }

    #[test]
    fn partial_trace_composes_and_undoes_tensors(seed: u64, n in 1usize..4, m in 1usize..3) {
        let mut r = rng(seed);
        let a = random_any_group(n, &mut r);
        let b = random_any_group(m, &mut r);
        let ab = a.tensor(&b);
        prop_assert_eq!(partial_trace(&ab, &(0..n).collect::<Vec<_>>()).unwrap(), a.clone());
        prop_assert_eq!(partial_trace(&ab, &(n..n + m).collect::<Vec<_>>()).unwrap(), b);
        if n >= 2 {
            let first = partial_trace(&a, &(0..n - 1).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(partial_trace(&first, &[0]).unwrap(), partial_trace(&a, &[0]).unwrap());
        }
    }

    #[test]
    fn purification_reduces_back(seed: u64, n in 1usize..5) {
        let s = random_any_group(n, &mut rng(seed));
        let p = purify(&s);
        prop_assert!(p.is_pure());
        prop_assert_eq!(partial_trace(&p, &(0..n).collect::<Vec<_>>()).unwrap(), s);
    }

    #[test]
    fn five_code_corrects_single_errors(state in 0usize..6, site in 0usize..5, sym in 0u8..3) {
        let code = ToyCode::five();
        let encoded = code.encode(&single_system_states()[state]).unwrap();
        let e = ToyElement::single(5, site, ToySymbol::NONTRIVIAL[sym as usize]);
        let (_, recovered) = code.correct(&apply_error(&encoded, &CodeError::Pauli(e)).unwrap()).unwrap();
        prop_assert_eq!(code.decode(&recovered).unwrap(), single_system_states()[state].clone());
    }
}

fn random_pattern(r: &mut ChaCha8Rng, n: usize) -> Option<Pattern> {
    let nodes: Vec<u32> = (1..=n as u32).collect();
    let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v, v + 1)).collect();
    for a in 1..=n as u32 {
        for b in a + 2..=n as u32 {
            if r.gen_bool(0.3) {
                edges.push((a, b));
            }
        }
    }
    let graph = OpenGraph::new(&nodes, &edges, &[1], &[n as u32]).ok()?;
    let flow = find_gflow(&graph)?;
    let angles = (0..n - 1).map(|v| (v, r.gen_range(0..4u8))).collect();
    Pattern::new(graph, angles, Some(flow)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gflow_patterns_are_deterministic(seed: u64, n in 2usize..6, input in 0usize..6) {
        let mut r = rng(seed);
        if let Some(p) = random_pattern(&mut r, n) {
            prop_assert!(verify_gflow(&p.graph, &p.gflow).is_ok());
            prop_assert!(deterministic_output(&p, &single_system_states()[input]).unwrap().is_some());
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn padding_never_changes_decoded_outcomes(seed: u64, a in 0u8..4, b in 0u8..4) {
        let graph = OpenGraph::line(3).without_inputs();
        let p = Pattern::new(graph, [(0, a), (1, b)].into(), None).unwrap();
        let none = StabilizerGroup::maximally_mixed(0);
        prop_assert_eq!(decoded_distribution(&p, &none, Mode::Blind).unwrap(), decoded_distribution(&p, &none, Mode::Delegated).unwrap());
        let delegated = run_delegated(&p, &none, seed).unwrap();
        let blind = run_blind(&p, &none, seed).unwrap();
        prop_assert_eq!(delegated.transcript.mod4_calls, 3);
        prop_assert_eq!(blind.transcript.mod4_calls, 3);
    }

    #[test]
    fn honest_verified_runs_accept(seed: u64, n in 2usize..7) {
        let mut r = rng(seed);
        let closed = OpenGraph::line(n).without_inputs();
        let angles = (0..n - 1).map(|v| (v, r.gen_range(0..4u8))).collect();
        let p = Pattern::new(closed, angles, None).unwrap();
        let s = run_verified(&p, &Deviation::Honest, seed).unwrap();
        prop_assert!(s.transcript.accepted);
        prop_assert!(!s.transcript.aborted);
    }

    #[test]
    fn random_deviations_stay_under_the_bound(seed in 0u64..1000) {
        let graph = OpenGraph::line(3).without_inputs();
        let p = Pattern::with_uniform_angle(graph, 0).unwrap();
        let r = estimate_pfail(&p, &Deviation::random(3, seed), Estimator::Exact).unwrap();
        let (fail, accept) = r.exact.unwrap();
        prop_assert!(r.within_bound);
        prop_assert!(fail <= accept);
        prop_assert!(!accept.is_zero() || fail.is_zero());
    }
}
