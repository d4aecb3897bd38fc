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

//! Delegated, blind and trap-verified toy computation.
//!
//! Alice knows the secrets and does only `Z_4`/`Z_2` bookkeeping; Bob holds
//! the physical register and sees nothing but the messages a [`Transport`]
//! carries. Deviations are permutations or message tampering on Bob's side.
//!
//! Two-bit values on the wire use the low bit for the sign and the high bit
//! for the basis: `0: X, 1: -X, 2: Y, 3: -Y`. Pattern angles keep the
//! `0: X, 1: Y, 2: -X, 3: -Y` numbering and are converted before blinding.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{StabilizerGroup, ToyElement, ToySymbol};
use crate::branch::{enumerate, Chooser, Sampler};
use crate::dynamics::{outcomes, Measurement};
use crate::error::{Error, Result};
use crate::mbtc::{adapt_angle, Pattern};
use crate::oracle::Oracle;
use crate::permutation::{Factor, LocalPerm, ToyPermutation};
use crate::random::random_permutation;
use crate::rational::{ratio_to_f64, Dyadic, Ratio, RationalJson};

/// Measurement setting sent to Bob; all values are two-bit, `x = x1 + 2 x2`.
pub fn blind_delta(phi: u8, theta: u8, r: bool) -> u8 {
    let d1 = (phi & 1) ^ (theta & 1) ^ u8::from(r);
    let d2 = ((theta >> 1) & 1) ^ ((phi >> 1) & 1);
    d1 + 2 * d2
}

/// Wire value of a pattern angle.
pub fn wire_from_angle(angle: u8) -> u8 {
    let basis = angle & 1;
    let sign = (angle >> 1) & 1;
    sign + 2 * basis
}

/// Observable selected by a wire value.
pub fn wire_observable(n: usize, site: usize, wire: u8) -> ToyElement {
    let sym = if wire & 2 == 0 { ToySymbol::X } else { ToySymbol::Y };
    ToyElement::single(n, site, sym).with_sign(wire & 1 == 1)
}

/// `X <-> Y` basis swap that commutes with controlled-Z.
fn basis_swap() -> LocalPerm {
    LocalPerm::from_images([0, 1, 3, 2]).expect("bijection")
}

/// Local permutation taking `<+X>` to the padded state of wire value `theta`.
pub fn pad_permutation(theta: u8) -> LocalPerm {
    let mut p = LocalPerm::IDENTITY;
    if theta & 1 == 1 {
        p = p.then(LocalPerm::pauli(ToySymbol::Z));
    }
    if theta & 2 == 2 {
        p = p.then(basis_swap());
    }
    p
}

/// Classical message between the parties.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Message {
    /// Announces that system `system` has been handed over; carries no state data.
    Delivery { system: usize },
    Instruction { system: usize, delta: u8 },
    Outcome { system: usize, bit: u8 },
}

/// Carries one message; implementations may serialize, log or drop.
pub trait Transport {
    fn carry(&mut self, msg: &Message) -> Result<Message>;
}

/// Round-trips every message through JSON text.
#[derive(Default)]
pub struct InProcess;

impl Transport for InProcess {
    fn carry(&mut self, msg: &Message) -> Result<Message> {
        let wire = serde_json::to_string(msg).map_err(|e| Error::Internal(e.to_string()))?;
        serde_json::from_str(&wire).map_err(|e| Error::Parse(format!("message: {e}")))
    }
}

/// Everything Bob saw, in order, plus Alice's verdict and `Z_4` call count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub accepted: bool,
    pub aborted: bool,
    pub mod4_calls: usize,
}

/// Which secrets Alice draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// No pads, no trap.
    Delegated,
    /// Uniform state pads and outcome pads.
    Blind,
    /// Blind plus one trap with dummies around it.
    Verified,
}

/// Overrides for enumerations that fix part of the randomness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SecretOverrides {
    pub trap: Option<usize>,
    pub no_pads: bool,
    pub positive_dummies: bool,
}

/// Alice's private parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliceSecrets {
    pub theta: Vec<u8>,
    pub r: Vec<bool>,
    pub trap: Option<usize>,
    /// Dummy vertex to "prepared in `-Z`".
    pub dummies: BTreeMap<usize, bool>,
}

impl AliceSecrets {
    pub fn draw(p: &Pattern, mode: Mode, over: SecretOverrides, chooser: &mut dyn Chooser) -> AliceSecrets {
        let n = p.graph.n();
        let pads = mode != Mode::Delegated && !over.no_pads;
        let trap = match mode {
            Mode::Verified => Some(over.trap.unwrap_or_else(|| chooser.pick_uniform(n))),
            _ => None,
        };
        let theta = (0..n).map(|_| if pads { chooser.pick_uniform(4) as u8 } else { 0 }).collect();
        let r = (0..n).map(|_| pads && chooser.pick_uniform(2) == 1).collect();
        let dummies = match trap {
            Some(t) => p
                .graph
                .neighbors(t)
                .iter()
                .map(|&j| (j, !over.positive_dummies && chooser.pick_uniform(2) == 1))
                .collect(),
            None => BTreeMap::new(),
        };
        AliceSecrets { theta, r, trap, dummies }
    }

    fn computes(&self, v: usize) -> bool {
        self.trap != Some(v) && !self.dummies.contains_key(&v)
    }
}

struct Alice<'a> {
    pattern: &'a Pattern,
    secrets: AliceSecrets,
    order: Vec<usize>,
    step: usize,
    sx: Vec<bool>,
    sz: Vec<bool>,
    decoded: Vec<(usize, bool)>,
    mod4_calls: usize,
}

impl<'a> Alice<'a> {
    fn new(pattern: &'a Pattern, secrets: AliceSecrets) -> Alice<'a> {
        let n = pattern.graph.n();
        let mut order = pattern.measurement_order();
        order.extend(pattern.graph.outputs().iter().copied());
        let mut sz = vec![false; n];
        for (&j, &negative) in &secrets.dummies {
            if negative {
                pattern.graph.neighbors(j).iter().for_each(|&k| sz[k] ^= true);
            }
        }
        Alice { pattern, secrets, order, step: 0, sx: vec![false; n], sz, decoded: Vec::new(), mod4_calls: 0 }
    }

    /// Padded product state handed to Bob.
    fn prepare(&self, input: &StabilizerGroup) -> Result<StabilizerGroup> {
        let g = &self.pattern.graph;
        let n = g.n();
        let mut gens: Vec<ToyElement> = input.embed(n, g.inputs()).generators().to_vec();
        for v in (0..n).filter(|v| !g.is_input(*v)) {
            gens.push(match self.secrets.dummies.get(&v) {
                Some(&negative) => ToyElement::single(n, v, ToySymbol::Z).with_sign(negative),
                None => ToyElement::single(n, v, ToySymbol::X),
            });
        }
        let pads: Vec<Factor> = (0..n)
            .filter(|v| !self.secrets.dummies.contains_key(v))
            .map(|v| Factor::local(v, pad_permutation(self.secrets.theta[v])))
            .collect();
        ToyPermutation::new(n, pads)?.conjugate(&StabilizerGroup::new(n, gens)?)
    }

    fn next_instruction(&mut self) -> Option<Message> {
        let &v = self.order.get(self.step)?;
        let base = if self.secrets.computes(v) { self.pattern.angles.get(&v).copied().unwrap_or(0) } else { 0 };
        let angle = if self.secrets.dummies.contains_key(&v) { 0 } else { adapt_angle(base, self.sx[v], self.sz[v]) };
        self.mod4_calls += 1;
        let delta = blind_delta(wire_from_angle(angle), self.secrets.theta[v], self.secrets.r[v]);
        Some(Message::Instruction { system: v, delta })
    }

    /// Record an outcome; `false` means the message was out of order.
    fn receive(&mut self, msg: &Message) -> bool {
        let expected = self.order[self.step];
        let Message::Outcome { system, bit } = *msg else { return false };
        if system != expected || bit > 1 {
            return false;
        }
        let s = (bit == 1) ^ self.secrets.r[system];
        self.decoded.push((system, s));
        if s && self.secrets.computes(system) && !self.pattern.graph.is_output(system) {
            let (xs, zs) = self.pattern.corrections(system);
            for j in xs.into_iter().filter(|&j| self.secrets.computes(j)) {
                self.sx[j] ^= true;
            }
            for k in zs.into_iter().filter(|&k| self.secrets.computes(k)) {
                self.sz[k] ^= true;
            }
        }
        self.step += 1;
        true
    }

    fn trap_passed(&self) -> bool {
        match self.secrets.trap {
            Some(t) => self.decoded.iter().any(|&(v, s)| v == t && !s),
            None => true,
        }
    }
}

/// Ways Bob departs from the honest protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deviation {
    Honest,
    /// Report every outcome bit flipped.
    FlipAll,
    /// Report the outcome of one system flipped.
    FlipAt(usize),
    /// Apply a local permutation to a system just before measuring it.
    PermAt { site: usize, perm: LocalPerm },
    /// As `PermAt`, only when the instruction for that system equals `delta`.
    Conditioned { site: usize, delta: u8, perm: LocalPerm },
    /// Apply a permutation over the register and `ancillas` private systems
    /// after entangling.
    Global { perm: ToyPermutation, ancillas: usize },
    /// Answer with the wrong system id once.
    Reorder,
}

impl Deviation {
    /// Sign flip of `Y`-basis states at one system.
    pub fn extremal(site: usize) -> Deviation {
        Deviation::PermAt { site, perm: LocalPerm::pauli(ToySymbol::X) }
    }

    /// Random permutation over the register plus one private system.
    pub fn random(n: usize, seed: u64) -> Deviation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Deviation::Global { perm: random_permutation(n + 1, 2 * n, &mut rng), ancillas: 1 }
    }

    /// `honest`, `flip-all`, `flip-at:V`, `extremal:V`, `perm-at:V:NAME`,
    /// `cond-at:V:DELTA:NAME`, `reorder`, `random:SEED`, or `factors:JSON`
    /// (a factor list over the register plus one private system). `V` is a
    /// node label of the pattern.
    pub fn parse(p: &Pattern, text: &str) -> Result<Deviation> {
        let node = |s: &str| -> Result<usize> {
            let label: u32 = s.parse().map_err(|_| Error::Parse(format!("bad node {s:?}")))?;
            p.graph.index_of(label).ok_or_else(|| Error::Parse(format!("unknown node {label}")))
        };
        let perm = |s: &str| LocalPerm::by_name(s).ok_or_else(|| Error::Parse(format!("unknown permutation {s:?}")));
        let n = p.graph.n();
        let parts: Vec<&str> = text.trim().splitn(2, ':').collect();
        let rest = parts.get(1).copied().unwrap_or("");
        let args: Vec<&str> = rest.split(':').collect();
        match (parts[0], args.as_slice()) {
            ("honest", _) if rest.is_empty() => Ok(Deviation::Honest),
            ("flip-all", _) if rest.is_empty() => Ok(Deviation::FlipAll),
            ("reorder", _) if rest.is_empty() => Ok(Deviation::Reorder),
            ("flip-at", [v]) => Ok(Deviation::FlipAt(node(v)?)),
            ("extremal", [v]) => Ok(Deviation::extremal(node(v)?)),
            ("perm-at", [v, name]) => Ok(Deviation::PermAt { site: node(v)?, perm: perm(name)? }),
            ("cond-at", [v, d, name]) => {
                let delta: u8 = d.parse().ok().filter(|d| *d < 4).ok_or_else(|| Error::Parse(format!("bad delta {d:?}")))?;
                Ok(Deviation::Conditioned { site: node(v)?, delta, perm: perm(name)? })
            }
            ("random", [s]) => Ok(Deviation::random(n, s.parse().map_err(|_| Error::Parse(format!("bad seed {s:?}")))?)),
            ("factors", _) => Ok(Deviation::Global { perm: ToyPermutation::from_json(n + 1, rest)?, ancillas: 1 }),
            _ => Err(Error::Parse(format!("unknown deviation {text:?}"))),
        }
    }

    pub fn describe(&self, p: &Pattern) -> String {
        let l = |v: &usize| p.graph.label(*v);
        match self {
            Deviation::Honest => "honest".into(),
            Deviation::FlipAll => "flip-all".into(),
            Deviation::FlipAt(v) => format!("flip-at:{}", l(v)),
            Deviation::PermAt { site, perm } if *perm == LocalPerm::pauli(ToySymbol::X) => format!("extremal:{}", l(site)),
            Deviation::PermAt { site, perm } => format!("perm-at:{}:{}", l(site), perm.name()),
            Deviation::Conditioned { site, delta, perm } => format!("cond-at:{}:{delta}:{}", l(site), perm.name()),
            Deviation::Global { perm, .. } => format!("factors:{}", perm.to_json()),
            Deviation::Reorder => "reorder".into(),
        }
    }
}

struct Bob<'a> {
    pattern: &'a Pattern,
    deviation: &'a Deviation,
    register: StabilizerGroup,
    reorder_pending: bool,
}

impl<'a> Bob<'a> {
    fn new(pattern: &'a Pattern, deviation: &'a Deviation, delivered: StabilizerGroup) -> Result<Bob<'a>> {
        let mut register = pattern.graph.entangler().conjugate(&delivered)?;
        if let Deviation::Global { perm, ancillas } = deviation {
            let n = pattern.graph.n();
            if perm.n() != n + ancillas {
                return Err(Error::LengthMismatch { expected: n + ancillas, found: perm.n() });
            }
            let private = StabilizerGroup::new(
                *ancillas,
                (0..*ancillas).map(|i| ToyElement::single(*ancillas, i, ToySymbol::Z)).collect(),
            )?;
            register = perm.conjugate(&register.tensor(&private))?;
        }
        Ok(Bob { pattern, deviation, register, reorder_pending: *deviation == Deviation::Reorder })
    }

    fn answer(&mut self, msg: &Message, chooser: &mut dyn Chooser) -> Result<Message> {
        let Message::Instruction { system, delta } = *msg else {
            return Err(Error::Internal("Bob expected an instruction".into()));
        };
        let n = self.register.n();
        let tamper = match self.deviation {
            Deviation::PermAt { site, perm } if *site == system => Some(*perm),
            Deviation::Conditioned { site, delta: d, perm } if *site == system && *d == delta => Some(*perm),
            _ => None,
        };
        if let Some(perm) = tamper {
            self.register = ToyPermutation::local(n, system, perm).conjugate(&self.register)?;
        }
        let obs = wire_observable(n, system, delta);
        let mut outs = outcomes(&self.register, &Measurement::observable(&obs))?;
        let weights: Vec<Ratio> = outs.iter().map(|o| o.probability.to_ratio()).collect();
        let o = outs.swap_remove(chooser.pick(&weights));
        let mut bit = u8::from((o.label == "-1") ^ obs.is_negative());
        self.register = o.state;
        match self.deviation {
            Deviation::FlipAll => bit ^= 1,
            Deviation::FlipAt(v) if *v == system => bit ^= 1,
            _ => {}
        }
        let mut reported = system;
        if self.reorder_pending {
            self.reorder_pending = false;
            reported = (system + 1) % self.pattern.graph.n();
        }
        Ok(Message::Outcome { system: reported, bit })
    }
}

/// Result of one protocol session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Session {
    pub transcript: Transcript,
    /// Decoded outcomes `(vertex, s)` in measurement order, `true` for `-1`.
    pub decoded: Vec<(usize, bool)>,
    /// Decoded output bits, outputs other than the trap in output order.
    pub output_bits: Vec<bool>,
    pub trap: Option<usize>,
}

/// Run one session with every random choice coming from `chooser`.
pub fn run_session(
    p: &Pattern,
    input: &StabilizerGroup,
    mode: Mode,
    deviation: &Deviation,
    over: SecretOverrides,
    transport: &mut dyn Transport,
    chooser: &mut dyn Chooser,
) -> Result<Session> {
    if input.n() != p.graph.inputs().len() {
        return Err(Error::LengthMismatch { expected: p.graph.inputs().len(), found: input.n() });
    }
    if mode == Mode::Verified && !p.graph.inputs().is_empty() {
        return Err(Error::Precondition("verified runs take no input systems".into()));
    }
    let secrets = AliceSecrets::draw(p, mode, over, chooser);
    let trap = secrets.trap;
    let mut alice = Alice::new(p, secrets);
    let mut messages = Vec::new();
    let delivered = alice.prepare(input)?;
    for v in 0..p.graph.n() {
        messages.push(transport.carry(&Message::Delivery { system: v })?);
    }
    let mut bob = Bob::new(p, deviation, delivered)?;
    let mut aborted = false;
    while let Some(instr) = alice.next_instruction() {
        let instr = transport.carry(&instr)?;
        messages.push(instr.clone());
        let reply = transport.carry(&bob.answer(&instr, chooser)?)?;
        messages.push(reply.clone());
        if !alice.receive(&reply) {
            aborted = true;
            break;
        }
    }
    let accepted = !aborted && alice.trap_passed();
    let decoded_map: BTreeMap<usize, bool> = alice.decoded.iter().copied().collect();
    let output_bits = if aborted {
        Vec::new()
    } else {
        p.graph.outputs().iter().filter(|&&o| Some(o) != trap).map(|o| decoded_map[o]).collect()
    };
    Ok(Session {
        transcript: Transcript { messages, accepted, aborted, mod4_calls: alice.mod4_calls },
        decoded: alice.decoded,
        output_bits,
        trap,
    })
}

fn seeded(seed: u64) -> Sampler<ChaCha8Rng> {
    Sampler::new(ChaCha8Rng::seed_from_u64(seed))
}

/// Honest parties, no secrets.
pub fn run_delegated(p: &Pattern, input: &StabilizerGroup, seed: u64) -> Result<Session> {
    run_session(p, input, Mode::Delegated, &Deviation::Honest, SecretOverrides::default(), &mut InProcess, &mut seeded(seed))
}

/// Honest parties with uniform pads.
pub fn run_blind(p: &Pattern, input: &StabilizerGroup, seed: u64) -> Result<Session> {
    run_session(p, input, Mode::Blind, &Deviation::Honest, SecretOverrides::default(), &mut InProcess, &mut seeded(seed))
}

/// Trap-verified run against `deviation`.
pub fn run_verified(p: &Pattern, deviation: &Deviation, seed: u64) -> Result<Session> {
    let none = StabilizerGroup::maximally_mixed(0);
    run_session(p, &none, Mode::Verified, deviation, SecretOverrides::default(), &mut InProcess, &mut seeded(seed))
}

/// Exact distribution of Bob's view (all messages) over secrets and branches.
pub fn bob_view_distribution(p: &Pattern, input: &StabilizerGroup, mode: Mode) -> Result<BTreeMap<Vec<Message>, Ratio>> {
    let mut dist: BTreeMap<Vec<Message>, Ratio> = BTreeMap::new();
    let leaves = enumerate(|c| run_session(p, input, mode, &Deviation::Honest, SecretOverrides::default(), &mut InProcess, c))?;
    for (w, s) in leaves {
        *dist.entry(s.transcript.messages).or_insert_with(Ratio::zero) += w;
    }
    Ok(dist)
}

/// Exact distribution of decoded outcomes over secrets and branches.
pub fn decoded_distribution(p: &Pattern, input: &StabilizerGroup, mode: Mode) -> Result<BTreeMap<Vec<(usize, bool)>, Ratio>> {
    let mut dist: BTreeMap<Vec<(usize, bool)>, Ratio> = BTreeMap::new();
    let leaves = enumerate(|c| run_session(p, input, mode, &Deviation::Honest, SecretOverrides::default(), &mut InProcess, c))?;
    for (w, s) in leaves {
        *dist.entry(s.decoded).or_insert_with(Ratio::zero) += w;
    }
    Ok(dist)
}

/// Half the l1 distance between two distributions.
pub fn statistical_distance<K: Ord + Clone>(a: &BTreeMap<K, Ratio>, b: &BTreeMap<K, Ratio>) -> Ratio {
    let keys: BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    let total = keys.into_iter().fold(Ratio::zero(), |acc, k| {
        let d = a.get(k).cloned().unwrap_or_else(Ratio::zero) - b.get(k).cloned().unwrap_or_else(Ratio::zero);
        acc + if d < Ratio::zero() { -d } else { d }
    });
    total / Ratio::from_integer(2.into())
}

/// Outcome marginal of one system under a uniform `r` pad:
/// the average over `r` of `Tr(P_m Z~^r rho Z~^r)`.
pub fn r_pad_marginal(rho: &StabilizerGroup, measured: &ToyElement, oracle: &Oracle) -> Result<Dyadic> {
    let dist = oracle.distribution_of(rho)?;
    let branch = StabilizerGroup::new(rho.n(), vec![measured.clone()])?;
    let z = ToyPermutation::local(rho.n(), 0, LocalPerm::pauli(ToySymbol::Z));
    let plain = oracle.projector_probability(&branch, &dist)?;
    let flipped = oracle.projector_probability(&branch, &oracle.apply_table(&z.ontic_table(), &dist)?)?;
    Ok((plain + flipped).half())
}

/// Honest decoded output strings for a fixed trap position, with pads off
/// and `+Z` dummies.
pub fn honest_outputs(p: &Pattern, trap: usize) -> Result<BTreeSet<Vec<bool>>> {
    let over = SecretOverrides { trap: Some(trap), no_pads: true, positive_dummies: true };
    let none = StabilizerGroup::maximally_mixed(0);
    Ok(enumerate(|c| run_session(p, &none, Mode::Verified, &Deviation::Honest, over, &mut InProcess, c))?
        .into_iter()
        .map(|(_, s)| s.output_bits)
        .collect())
}

/// Estimation method for [`estimate_pfail`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// A probability either exact or estimated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Probability {
    Exact(#[serde(serialize_with = "crate::rational::serialize_ratio")] Ratio),
    Estimate { estimate: f64, ci: [f64; 2] },
}

impl Probability {
    pub fn value(&self) -> f64 {
        match self {
            Probability::Exact(r) => ratio_to_f64(r),
            Probability::Estimate { estimate, .. } => *estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionStats {
    pub trap: u32,
    pub weight: Probability,
    pub detected: Probability,
}

/// Result of [`estimate_pfail`]. `acceptance` bounds `p_fail` from above; it
/// is the failure probability obtained when every accepted run is counted as
/// corrupted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PfailReport {
    pub n: usize,
    pub mode: &'static str,
    pub deviation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub p_fail: Probability,
    pub acceptance: Probability,
    pub bound: RationalJson,
    pub within_bound: bool,
    pub per_position: Vec<PositionStats>,
    #[serde(skip)]
    pub exact: Option<(Ratio, Ratio)>,
}

/// `1 - 1/(2n)`.
pub fn security_bound(n: usize) -> Ratio {
    Ratio::one() - Ratio::new(1.into(), (2 * n as i64).into())
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> [f64; 2] {
    const Z: f64 = 1.959_963_984_540_054;
    if n == 0 {
        return [0.0, 1.0];
    }
    let (kf, nf) = (k as f64, n as f64);
    let p = kf / nf;
    let denom = 1.0 + Z * Z / nf;
    let center = (p + Z * Z / (2.0 * nf)) / denom;
    let half = Z * (p * (1.0 - p) / nf + Z * Z / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    [lo, hi]
}

const CHUNK: u64 = 2048;

/// Per-chunk counts: trap position seen, trap position detected, accepted, failed.
type Tally = [Vec<u64>; 4];

/// Failure probability of the single-trap protocol against `deviation`:
/// accepted runs whose decoded output is not an honest output for that trap.
pub fn estimate_pfail(p: &Pattern, deviation: &Deviation, how: Estimator) -> Result<PfailReport> {
    if !p.graph.inputs().is_empty() {
        return Err(Error::Precondition("p_fail estimation needs a pattern without input vertices".into()));
    }
    let n = p.graph.n();
    let honest: Vec<BTreeSet<Vec<bool>>> = (0..n).map(|t| honest_outputs(p, t)).collect::<Result<_>>()?;
    let none = StabilizerGroup::maximally_mixed(0);
    let bound = security_bound(n);
    let label = deviation.describe(p);
    let run = |c: &mut dyn Chooser| -> Result<(usize, bool, bool)> {
        let s = run_session(p, &none, Mode::Verified, deviation, SecretOverrides::default(), &mut InProcess, c)?;
        let t = s.trap.expect("verified sessions place a trap");
        let accepted = s.transcript.accepted;
        Ok((t, accepted, accepted && !honest[t].contains(&s.output_bits)))
    };
    match how {
        Estimator::Exact => {
            let mut fail = Ratio::zero();
            let mut accept = Ratio::zero();
            let mut weight = vec![Ratio::zero(); n];
            let mut detected = vec![Ratio::zero(); n];
            for (w, (t, acc, failed)) in enumerate(run)? {
                weight[t] += &w;
                if acc {
                    accept += &w;
                } else {
                    detected[t] += &w;
                }
                if failed {
                    fail += &w;
                }
            }
            let per_position = (0..n)
                .map(|t| PositionStats {
                    trap: p.graph.label(t),
                    detected: Probability::Exact(&detected[t] / &weight[t]),
                    weight: Probability::Exact(weight[t].clone()),
                })
                .collect();
            Ok(PfailReport {
                n,
                mode: "exact",
                deviation: label,
                trials: None,
                seed: None,
                within_bound: fail <= bound,
                p_fail: Probability::Exact(fail.clone()),
                acceptance: Probability::Exact(accept.clone()),
                bound: RationalJson::from_ratio(&bound),
                per_position,
                exact: Some((fail, accept)),
            })
        }
        Estimator::MonteCarlo { trials, seed } => {
            let chunks = trials.div_ceil(CHUNK) as usize;
            let next = AtomicUsize::new(0);
            let results: Mutex<Vec<Option<Result<Tally>>>> = Mutex::new(vec![None; chunks]);
            let workers = std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1).min(chunks.max(1));
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| loop {
                        let c = next.fetch_add(1, Ordering::Relaxed);
                        if c >= chunks {
                            break;
                        }
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(c as u64);
                        let mut sampler = Sampler::new(rng);
                        let count = CHUNK.min(trials - c as u64 * CHUNK);
                        let mut tally: Tally = [vec![0u64; n], vec![0u64; n], vec![0u64; 1], vec![0u64; 1]];
                        let outcome = (0..count).try_for_each(|_| {
                            let (t, acc, failed) = run(&mut sampler)?;
                            tally[0][t] += 1;
                            tally[1][t] += u64::from(!acc);
                            tally[2][0] += u64::from(acc);
                            tally[3][0] += u64::from(failed);
                            Ok(())
                        });
                        results.lock().expect("no poisoned workers")[c] = Some(outcome.map(|_| tally));
                    });
                }
            });
            let mut seen = vec![0u64; n];
            let mut caught = vec![0u64; n];
            let (mut accepted, mut failed) = (0u64, 0u64);
            for r in results.into_inner().expect("no poisoned workers") {
                let t = r.ok_or_else(|| Error::Internal("missing Monte Carlo chunk".into()))??;
                (0..n).for_each(|i| {
                    seen[i] += t[0][i];
                    caught[i] += t[1][i];
                });
                accepted += t[2][0];
                failed += t[3][0];
            }
            let est = |k: u64, m: u64| Probability::Estimate {
                estimate: if m == 0 { 0.0 } else { k as f64 / m as f64 },
                ci: wilson_interval(k, m),
            };
            let p_fail = est(failed, trials);
            let within_bound = match &p_fail {
                Probability::Estimate { ci, .. } => ci[0] <= ratio_to_f64(&bound),
                Probability::Exact(_) => unreachable!(),
            };
            Ok(PfailReport {
                n,
                mode: "monte_carlo",
                deviation: label,
                trials: Some(trials),
                seed: Some(seed),
                p_fail,
                acceptance: est(accepted, trials),
                bound: RationalJson::from_ratio(&bound),
                within_bound,
                per_position: (0..n)
                    .map(|t| PositionStats { trap: p.graph.label(t), weight: est(seen[t], trials), detected: est(caught[t], seen[t]) })
                    .collect(),
                exact: None,
            })
        }
    }
}

/// The shipped deviation family for a pattern.
pub fn deviation_family(p: &Pattern) -> Vec<Deviation> {
    let n = p.graph.n();
    let mut out = vec![Deviation::Honest, Deviation::FlipAll, Deviation::Reorder];
    for v in 0..n {
        out.push(Deviation::FlipAt(v));
        out.push(Deviation::extremal(v));
        for s in ["Y", "Z", "1"] {
            out.push(Deviation::PermAt { site: v, perm: LocalPerm::by_name(s).expect("named") });
        }
        out.push(Deviation::Conditioned { site: v, delta: 2, perm: LocalPerm::pauli(ToySymbol::Z) });
    }
    if n >= 2 {
        out.push(Deviation::Global {
            perm: ToyPermutation::new(n + 1, vec![Factor::local(0, LocalPerm::pauli(ToySymbol::Z)), Factor::local(1, LocalPerm::pauli(ToySymbol::X))])
                .expect("in range"),
            ancillas: 1,
        });
        out.push(Deviation::Global { perm: ToyPermutation::from_factor(n + 1, Factor::cx(0, n)), ancillas: 1 });
    }
    out.extend((0..3).map(|s| Deviation::random(n, s)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbtc::OpenGraph;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    fn line(angles: &[u8]) -> Pattern {
        let graph = OpenGraph::line(angles.len() + 1).without_inputs();
        Pattern::new(graph, angles.iter().enumerate().map(|(v, a)| (v, *a)).collect(), None).unwrap()
    }

    #[test]
    fn delta_formula() {
        assert_eq!(blind_delta(0, 0, false), 0);
        assert_eq!(blind_delta(1, 2, true), 2);
        for phi in 0..4 {
            let mut counts = [0; 4];
            for theta in 0..4 {
                for r in [false, true] {
                    counts[blind_delta(phi, theta, r) as usize] += 1;
                }
            }
            assert_eq!(counts, [2; 4]);
        }
    }

    #[test]
    fn pads_match_wire_states() {
        for theta in 0..4 {
            let padded = ToyPermutation::local(1, 0, pad_permutation(theta)).conjugate(&g("X")).unwrap();
            assert_eq!(padded, StabilizerGroup::new(1, vec![wire_observable(1, 0, theta)]).unwrap());
            let cz_then = ToyPermutation::new(2, vec![Factor::cz(0, 1), Factor::local(0, pad_permutation(theta))]).unwrap();
            let then_cz = ToyPermutation::new(2, vec![Factor::local(0, pad_permutation(theta)), Factor::cz(0, 1)]).unwrap();
            assert_eq!(cz_then.ontic_table(), then_cz.ontic_table());
        }
    }

    #[test]
    fn delegated_matches_pattern_run() {
        let graph = OpenGraph::line(2);
        let p = Pattern::new(graph, [(0, 0)].into(), None).unwrap();
        for seed in 0..8 {
            let s = run_delegated(&p, &g("Z"), seed).unwrap();
            let direct = crate::mbtc::run_pattern(&p, &g("Z"), seed).unwrap();
            assert_eq!(s.decoded[..1], direct.outcomes[..]);
            assert_eq!(s.output_bits, vec![false]);
            assert_eq!(s.transcript.messages.len(), 2 + 2 * 2);
        }
    }

    #[test]
    fn blind_correct_and_blind() {
        let a = line(&[0, 0]);
        let b = line(&[1, 3]);
        let none = StabilizerGroup::maximally_mixed(0);
        assert_eq!(
            decoded_distribution(&a, &none, Mode::Blind).unwrap(),
            decoded_distribution(&a, &none, Mode::Delegated).unwrap()
        );
        let va = bob_view_distribution(&a, &none, Mode::Blind).unwrap();
        let vb = bob_view_distribution(&b, &none, Mode::Blind).unwrap();
        assert!(statistical_distance(&va, &vb).is_zero());
        let da = bob_view_distribution(&a, &none, Mode::Delegated).unwrap();
        let db = bob_view_distribution(&b, &none, Mode::Delegated).unwrap();
        assert!(!statistical_distance(&da, &db).is_zero());
    }

    #[test]
    fn r_pad_identity() {
        let oracle = Oracle::default();
        for rho in crate::codes::single_system_states() {
            for m in ["+X", "-X", "+Y", "-Y"] {
                assert_eq!(r_pad_marginal(&rho, &m.parse().unwrap(), &oracle).unwrap(), Dyadic::pow2_inv(1));
            }
        }
    }

    #[test]
    fn honest_and_extremal() {
        let p = line(&[0, 0]);
        let honest = estimate_pfail(&p, &Deviation::Honest, Estimator::Exact).unwrap();
        let (fail, accept) = honest.exact.unwrap();
        assert!(fail.is_zero() && accept.is_one());
        let ext = estimate_pfail(&p, &Deviation::extremal(1), Estimator::Exact).unwrap();
        assert_eq!(ext.exact.unwrap().1, security_bound(3));
        let reorder = run_verified(&p, &Deviation::Reorder, 1).unwrap();
        assert!(reorder.transcript.aborted && !reorder.transcript.accepted);
    }

    #[test]
    fn parse_deviations() {
        let p = line(&[0, 0]);
        assert_eq!(Deviation::parse(&p, "flip-at:2").unwrap(), Deviation::FlipAt(1));
        assert_eq!(Deviation::parse(&p, "extremal:3").unwrap(), Deviation::extremal(2));
        assert!(Deviation::parse(&p, "flip-at:9").is_err());
        assert!(Deviation::parse(&p, "bogus").is_err());
        assert!(Deviation::parse(&p, "honest:1").is_err());
        let d = Deviation::parse(&p, r#"factors:[{"cz":[1,4]}]"#).unwrap();
        assert_eq!(Deviation::parse(&p, &d.describe(&p)).unwrap(), d);
    }
}
