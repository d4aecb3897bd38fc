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

//! Measurement-based toy computation: open graphs, graph states, gflow,
//! pattern execution with corrections, and a gate catalog.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{StabilizerGroup, ToyElement, ToySymbol};
use crate::branch::{enumerate, Chooser, Sampler};
use crate::dynamics::{outcomes, partial_trace, Measurement};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::permutation::{Factor, LocalPerm, ToyPermutation};
use crate::rational::Ratio;

/// Simple undirected graph with input and output vertex lists.
///
/// Vertices are addressed by index `0..n`; `labels` carries the external ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenGraph {
    labels: Vec<u32>,
    adjacency: Vec<BTreeSet<usize>>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl OpenGraph {
    /// Build from external labels; inputs and outputs keep the given order.
    pub fn new(nodes: &[u32], edges: &[(u32, u32)], inputs: &[u32], outputs: &[u32]) -> Result<OpenGraph> {
        let mut labels = nodes.to_vec();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse("duplicate node id".into()));
        }
        let index = |v: u32| labels.binary_search(&v).map_err(|_| Error::Parse(format!("unknown node {v}")));
        let mut adjacency = vec![BTreeSet::new(); labels.len()];
        for &(a, b) in edges {
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(Error::Parse(format!("self-loop on node {a}")));
            }
            if !adjacency[i].insert(j) {
                return Err(Error::Parse(format!("repeated edge {a}-{b}")));
            }
            adjacency[j].insert(i);
        }
        let list = |vs: &[u32], what: &str| -> Result<Vec<usize>> {
            let out = vs.iter().map(|&v| index(v)).collect::<Result<Vec<_>>>()?;
            if out.iter().collect::<BTreeSet<_>>().len() != out.len() {
                return Err(Error::Parse(format!("repeated {what} node")));
            }
            Ok(out)
        };
        Ok(OpenGraph { inputs: list(inputs, "input")?, outputs: list(outputs, "output")?, labels, adjacency })
    }

    /// Path `1 - 2 - ... - n` with input `1` and output `n`.
    pub fn line(n: usize) -> OpenGraph {
        let nodes: Vec<u32> = (1..=n as u32).collect();
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i, i + 1)).collect();
        OpenGraph::new(&nodes, &edges, &[1], &[n as u32]).expect("line is well formed")
    }

    /// Same graph without inputs, keeping the outputs.
    pub fn without_inputs(&self) -> OpenGraph {
        OpenGraph { inputs: Vec::new(), ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn is_input(&self, v: usize) -> bool {
        self.inputs.contains(&v)
    }

    pub fn is_output(&self, v: usize) -> bool {
        self.outputs.contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).flat_map(|i| self.adjacency[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect()
    }

    /// Vertices adjacent to an odd number of members of `set`.
    pub fn odd(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut parity = vec![false; self.n()];
        for &v in set {
            for &w in &self.adjacency[v] {
                parity[w] ^= true;
            }
        }
        (0..self.n()).filter(|&v| parity[v]).collect()
    }

    /// `X_v` times `Z` on every neighbor of `v`.
    pub fn graph_generator(&self, v: usize) -> ToyElement {
        let mut k = ToyElement::single(self.n(), v, ToySymbol::X);
        for &w in &self.adjacency[v] {
            k.set(w, ToySymbol::Z);
        }
        k
    }

    /// The controlled-Z permutation of every edge.
    pub fn entangler(&self) -> ToyPermutation {
        let factors = self.edges().into_iter().map(|(a, b)| Factor::cz(a, b)).collect();
        ToyPermutation::new(self.n(), factors).expect("edges are in range")
    }
}

/// Inputs take `input` (systems in input order), every other vertex `<+X>`,
/// then every edge applies a controlled-Z.
pub fn graph_state(graph: &OpenGraph, input: &StabilizerGroup) -> Result<StabilizerGroup> {
    if input.n() != graph.inputs.len() {
        return Err(Error::LengthMismatch { expected: graph.inputs.len(), found: input.n() });
    }
    let n = graph.n();
    let mut gens: Vec<ToyElement> = input.embed(n, &graph.inputs).generators().to_vec();
    gens.extend((0..n).filter(|v| !graph.is_input(*v)).map(|v| ToyElement::single(n, v, ToySymbol::X)));
    graph.entangler().conjugate(&StabilizerGroup::new(n, gens)?)
}

/// Correction sets and measurement layers (lower layers are measured first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GflowMap {
    pub g: BTreeMap<usize, BTreeSet<usize>>,
    pub layers: Vec<usize>,
}

impl GflowMap {
    fn precedes(&self, i: usize, j: usize) -> bool {
        self.layers[i] < self.layers[j]
    }
}

/// First condition a candidate gflow fails, with vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum GflowViolation {
    Domain { vertex: usize, detail: String },
    G1 { i: usize, j: usize },
    G2 { i: usize, j: usize },
    G3 { i: usize },
}

impl fmt::Display for GflowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GflowViolation::Domain { vertex, detail } => write!(f, "domain at vertex index {vertex}: {detail}"),
            GflowViolation::G1 { i, j } => write!(f, "g(1): {j} in g({i}) but {i} does not precede {j}"),
            GflowViolation::G2 { i, j } => write!(f, "g(2): {j} precedes {i} but lies in Odd(g({i}))"),
            GflowViolation::G3 { i } => write!(f, "g(3): {i} in g({i}) or not in Odd(g({i}))"),
        }
    }
}

/// Check the three gflow conditions literally, then that `g` is defined on
/// exactly the measured vertices.
pub fn verify_gflow(graph: &OpenGraph, flow: &GflowMap) -> std::result::Result<(), GflowViolation> {
    let n = graph.n();
    if flow.layers.len() != n {
        return Err(GflowViolation::Domain { vertex: 0, detail: format!("{} layers for {n} vertices", flow.layers.len()) });
    }
    for (&i, set) in &flow.g {
        if i >= n || graph.is_output(i) {
            return Err(GflowViolation::Domain { vertex: i, detail: "g defined on an output or unknown vertex".into() });
        }
        if let Some(&j) = set.iter().find(|&&j| j >= n || graph.is_input(j)) {
            return Err(GflowViolation::Domain { vertex: i, detail: format!("g({i}) contains input or unknown vertex {j}") });
        }
    }
    for (&i, set) in &flow.g {
        if let Some(&j) = set.iter().find(|&&j| j != i && !flow.precedes(i, j)) {
            return Err(GflowViolation::G1 { i, j });
        }
        let odd = graph.odd(set);
        if let Some(j) = (0..n).find(|&j| j != i && flow.precedes(j, i) && odd.contains(&j)) {
            return Err(GflowViolation::G2 { i, j });
        }
        if set.contains(&i) || !odd.contains(&i) {
            return Err(GflowViolation::G3 { i });
        }
    }
    if let Some(v) = (0..n).find(|v| !graph.is_output(*v) && !flow.g.contains_key(v)) {
        return Err(GflowViolation::Domain { vertex: v, detail: "measured vertex without correction set".into() });
    }
    Ok(())
}

/// Solve `A x = e_target` over GF(2), rows indexed by `rows`, columns by `cols`.
fn solve_gf2(graph: &OpenGraph, rows: &[usize], cols: &[usize], target: usize) -> Option<BTreeSet<usize>> {
    let w = cols.len();
    let mut m: Vec<(Vec<bool>, bool)> = rows
        .iter()
        .map(|&r| (cols.iter().map(|&c| graph.adjacency[c].contains(&r)).collect(), r == target))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..w {
        let Some(p) = (row..m.len()).find(|&r| m[r].0[col]) else { continue };
        m.swap(row, p);
        for r in 0..m.len() {
            if r != row && m[r].0[col] {
                let (src, rhs) = (m[row].0.clone(), m[row].1);
                m[r].0.iter_mut().zip(&src).for_each(|(a, b)| *a ^= *b);
                m[r].1 ^= rhs;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    Some(pivots.iter().enumerate().filter(|(r, _)| m[*r].1).map(|(_, &c)| cols[c]).collect())
}

/// Maximally delayed gflow by layer peeling from the outputs.
pub fn find_gflow(graph: &OpenGraph) -> Option<GflowMap> {
    let n = graph.n();
    let mut depth = vec![usize::MAX; n];
    let mut g = BTreeMap::new();
    let mut processed: BTreeSet<usize> = graph.outputs.iter().copied().collect();
    for &o in &graph.outputs {
        depth[o] = 0;
    }
    let mut round = 0;
    loop {
        let unprocessed: Vec<usize> = (0..n).filter(|v| !processed.contains(v)).collect();
        if unprocessed.is_empty() {
            break;
        }
        round += 1;
        let cols: Vec<usize> = processed.iter().copied().filter(|v| !graph.is_input(*v)).collect();
        let found: Vec<(usize, BTreeSet<usize>)> =
            unprocessed.iter().filter_map(|&u| solve_gf2(graph, &unprocessed, &cols, u).map(|k| (u, k))).collect();
        if found.is_empty() {
            return None;
        }
        for (u, k) in found {
            depth[u] = round;
            processed.insert(u);
            g.insert(u, k);
        }
    }
    let max = depth.iter().copied().max().unwrap_or(0);
    Some(GflowMap { g, layers: depth.into_iter().map(|d| max - d).collect() })
}

/// Observable on `site` for a quarter-turn angle: `0: X, 1: Y, 2: -X, 3: -Y`.
pub fn angle_observable(n: usize, site: usize, angle: u8) -> ToyElement {
    let sym = if angle.is_multiple_of(2) { ToySymbol::X } else { ToySymbol::Y };
    ToyElement::single(n, site, sym).with_sign(angle % 4 >= 2)
}

/// Angle after folding pending `X~` and `Z~` byproducts into the measurement.
pub fn adapt_angle(angle: u8, x_byproduct: bool, z_byproduct: bool) -> u8 {
    let a = if x_byproduct { (4 - angle % 4) % 4 } else { angle % 4 };
    (a + if z_byproduct { 2 } else { 0 }) % 4
}

/// Graph, angles on the measured vertices, and a verified gflow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub graph: OpenGraph,
    pub angles: BTreeMap<usize, u8>,
    pub gflow: GflowMap,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct FlowJson {
    g: BTreeMap<String, Vec<u32>>,
    layers: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FlowSpec {
    Auto(String),
    Given(FlowJson),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternJson {
    graph: GraphJson,
    #[serde(default)]
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    #[serde(default)]
    angles: BTreeMap<u32, u8>,
    #[serde(default = "auto")]
    gflow: FlowSpec,
}

fn auto() -> FlowSpec {
    FlowSpec::Auto("auto".into())
}

impl Pattern {
    /// Angles must cover exactly the non-output vertices. Without an explicit
    /// gflow one is searched for.
    pub fn new(graph: OpenGraph, angles: BTreeMap<usize, u8>, gflow: Option<GflowMap>) -> Result<Pattern> {
        for v in 0..graph.n() {
            match (graph.is_output(v), angles.get(&v)) {
                (false, None) => return Err(Error::InvalidMeasurement(format!("no angle for node {}", graph.label(v)))),
                (true, Some(_)) => return Err(Error::InvalidMeasurement(format!("angle on output node {}", graph.label(v)))),
                (_, Some(a)) if *a > 3 => return Err(Error::InvalidMeasurement(format!("angle {a} outside 0..=3"))),
                _ => {}
            }
        }
        if let Some(&v) = angles.keys().find(|v| **v >= graph.n()) {
            return Err(Error::InvalidMeasurement(format!("angle on unknown vertex index {v}")));
        }
        let gflow = match gflow {
            Some(f) => {
                verify_gflow(&graph, &f).map_err(|v| Error::Precondition(format!("gflow rejected: {v}")))?;
                f
            }
            None => find_gflow(&graph).ok_or_else(|| Error::Precondition("graph has no gflow".into()))?,
        };
        Ok(Pattern { graph, angles, gflow })
    }

    /// Uniform angle on every measured vertex.
    pub fn with_uniform_angle(graph: OpenGraph, angle: u8) -> Result<Pattern> {
        let angles = (0..graph.n()).filter(|v| !graph.is_output(*v)).map(|v| (v, angle)).collect();
        Pattern::new(graph, angles, None)
    }

    pub fn from_json(text: &str) -> Result<Pattern> {
        let raw: PatternJson = serde_json::from_str(text).map_err(|e| Error::Parse(format!("pattern JSON: {e}")))?;
        let graph = OpenGraph::new(&raw.graph.nodes, &raw.graph.edges, &raw.inputs, &raw.outputs)?;
        let idx = |v: u32| graph.index_of(v).ok_or_else(|| Error::Parse(format!("unknown node {v}")));
        let key = |k: &str| k.parse::<u32>().map_err(|_| Error::Parse(format!("bad node id {k:?}"))).and_then(idx);
        let angles = raw.angles.iter().map(|(&v, &a)| Ok((idx(v)?, a))).collect::<Result<BTreeMap<_, _>>>()?;
        let flow = match raw.gflow {
            FlowSpec::Auto(s) if s == "auto" => None,
            FlowSpec::Auto(s) => return Err(Error::Parse(format!("gflow must be \"auto\" or an object, got {s:?}"))),
            FlowSpec::Given(f) => {
                let mut layers = vec![usize::MAX; graph.n()];
                for (v, &l) in &f.layers {
                    layers[key(v)?] = l;
                }
                if let Some(v) = layers.iter().position(|l| *l == usize::MAX) {
                    return Err(Error::Parse(format!("no layer for node {}", graph.label(v))));
                }
                let g = f
                    .g
                    .iter()
                    .map(|(v, set)| Ok((key(v)?, set.iter().map(|&w| idx(w)).collect::<Result<BTreeSet<_>>>()?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Some(GflowMap { g, layers })
            }
        };
        Pattern::new(graph, angles, flow)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gr = &self.graph;
        let l = |v: &usize| gr.label(*v);
        let raw = PatternJson {
            graph: GraphJson { nodes: gr.labels.clone(), edges: gr.edges().iter().map(|(a, b)| (l(a), l(b))).collect() },
            inputs: gr.inputs.iter().map(l).collect(),
            outputs: gr.outputs.iter().map(l).collect(),
            angles: self.angles.iter().map(|(v, a)| (l(v), *a)).collect(),
            gflow: FlowSpec::Given(FlowJson {
                g: self.gflow.g.iter().map(|(v, s)| (l(v).to_string(), s.iter().map(l).collect())).collect(),
                layers: self.gflow.layers.iter().enumerate().map(|(v, &k)| (gr.label(v).to_string(), k)).collect(),
            }),
        };
        serde_json::to_value(raw).expect("pattern serializes")
    }

    /// Non-output vertices by layer, then by index.
    pub fn measurement_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.angles.keys().copied().collect();
        order.sort_by_key(|&v| (self.gflow.layers[v], v));
        order
    }

    /// Vertices receiving `X~` and `Z~` corrections after a `-1` at `i`.
    pub fn corrections(&self, i: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let gi = self.gflow.g.get(&i).cloned().unwrap_or_default();
        let mut odd = self.graph.odd(&gi);
        odd.remove(&i);
        (gi, odd)
    }
}

/// How `-1` outcomes are corrected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionMode {
    /// Fold byproducts into later angles and fix outputs at the end.
    Adaptive,
    /// Apply `X~`/`Z~` permutations to unmeasured vertices immediately.
    Physical,
}

/// One branch of a pattern run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRun {
    /// `(vertex, outcome)` in measurement order; `true` is a `-1` outcome.
    pub outcomes: Vec<(usize, bool)>,
    /// Corrected state of the outputs, systems in output order.
    pub output: StabilizerGroup,
}

fn pauli_factor(site: usize, x: bool, z: bool) -> Option<Factor> {
    let sym = ToySymbol::from_bits(x, z);
    (sym != ToySymbol::I).then(|| Factor::local(site, LocalPerm::pauli(sym)))
}

/// Execute with choices drawn from `chooser`.
pub fn run_pattern_with(p: &Pattern, input: &StabilizerGroup, mode: CorrectionMode, chooser: &mut dyn Chooser) -> Result<PatternRun> {
    let n = p.graph.n();
    let mut state = graph_state(&p.graph, input)?;
    let mut sx = vec![false; n];
    let mut sz = vec![false; n];
    let mut measured = vec![false; n];
    let mut record = Vec::new();
    for v in p.measurement_order() {
        let angle = match mode {
            CorrectionMode::Adaptive => adapt_angle(p.angles[&v], sx[v], sz[v]),
            CorrectionMode::Physical => p.angles[&v],
        };
        let obs = angle_observable(n, v, angle);
        let mut outs = outcomes(&state, &Measurement::observable(&obs))?;
        let weights: Vec<Ratio> = outs.iter().map(|o| o.probability.to_ratio()).collect();
        let o = outs.swap_remove(chooser.pick(&weights));
        let minus = (o.label == "-1") ^ obs.is_negative();
        state = o.state;
        measured[v] = true;
        record.push((v, minus));
        if !minus {
            continue;
        }
        let (xs, zs) = p.corrections(v);
        match mode {
            CorrectionMode::Adaptive => {
                xs.iter().for_each(|&j| sx[j] ^= true);
                zs.iter().for_each(|&k| sz[k] ^= true);
            }
            CorrectionMode::Physical => {
                let factors: Vec<Factor> = (0..n)
                    .filter(|&j| !measured[j])
                    .filter_map(|j| pauli_factor(j, xs.contains(&j), zs.contains(&j)))
                    .collect();
                state = ToyPermutation::new(n, factors)?.conjugate(&state)?;
            }
        }
    }
    if mode == CorrectionMode::Adaptive {
        let factors: Vec<Factor> = p.graph.outputs.iter().filter_map(|&o| pauli_factor(o, sx[o], sz[o])).collect();
        state = ToyPermutation::new(n, factors)?.conjugate(&state)?;
    }
    let output = if p.graph.outputs.is_empty() {
        StabilizerGroup::maximally_mixed(0)
    } else {
        partial_trace(&state, &p.graph.outputs)?
    };
    Ok(PatternRun { outcomes: record, output })
}

/// Seeded run with angle adaptation.
pub fn run_pattern(p: &Pattern, input: &StabilizerGroup, seed: u64) -> Result<PatternRun> {
    run_pattern_with(p, input, CorrectionMode::Adaptive, &mut Sampler::new(ChaCha8Rng::seed_from_u64(seed)))
}

/// Every outcome branch with its probability.
pub fn pattern_branches(p: &Pattern, input: &StabilizerGroup, mode: CorrectionMode) -> Result<Vec<(Ratio, PatternRun)>> {
    enumerate(|c| run_pattern_with(p, input, mode, c))
}

/// Shared output when every branch agrees, in both correction modes.
pub fn deterministic_output(p: &Pattern, input: &StabilizerGroup) -> Result<Option<StabilizerGroup>> {
    let mut first: Option<StabilizerGroup> = None;
    for mode in [CorrectionMode::Adaptive, CorrectionMode::Physical] {
        for (_, run) in pattern_branches(p, input, mode)? {
            if first.get_or_insert_with(|| run.output.clone()) != &run.output {
                return Ok(None);
            }
        }
    }
    Ok(first)
}

/// A pattern and the permutation it implements on its inputs.
#[derive(Clone, Debug)]
pub struct GatePattern {
    pub name: &'static str,
    pub pattern: Pattern,
    pub gate: ToyPermutation,
}

fn line_pattern(angles: &[u8]) -> Pattern {
    let graph = OpenGraph::line(angles.len() + 1);
    let angles = angles.iter().enumerate().map(|(v, a)| (v, *a)).collect();
    Pattern::new(graph, angles, None).expect("lines have gflow")
}

/// Patterns for `CNOT`, `H`, `P`, `X~`, `Y~`, `Z~`.
pub fn gate_patterns() -> Vec<GatePattern> {
    let local = |name, p: LocalPerm, angles: &[u8]| GatePattern {
        name,
        pattern: line_pattern(angles),
        gate: ToyPermutation::local(1, 0, p),
    };
    let named = |s: &str| LocalPerm::by_name(s).expect("named perm");
    // Control 1 (kept as output), target enters at 2 and leaves at 4.
    let cnot_graph = OpenGraph::new(&[1, 2, 3, 4], &[(1, 3), (2, 3), (3, 4)], &[1, 2], &[1, 4]).expect("fixed graph");
    let cnot = Pattern::new(cnot_graph, [(1, 0), (2, 0)].into_iter().collect(), None).expect("cnot graph has gflow");
    vec![
        GatePattern { name: "CNOT", pattern: cnot, gate: ToyPermutation::from_factor(2, Factor::cx(0, 1)) },
        local("H", LocalPerm::hadamard(), GATE_ANGLES_H),
        local("P", named("P"), GATE_ANGLES_P),
        local("X", named("X"), GATE_ANGLES_X),
        local("Y", named("Y"), GATE_ANGLES_Y),
        local("Z", named("Z"), GATE_ANGLES_Z),
    ]
}

// Shortest line angles found by exhaustive search over lines of up to four
// measured vertices; `gate_catalog_matches` re-checks them.
const GATE_ANGLES_H: &[u8] = &[0];
const GATE_ANGLES_P: &[u8] = &[3, 2];
const GATE_ANGLES_X: &[u8] = &[0, 2];
const GATE_ANGLES_Y: &[u8] = &[2, 2];
const GATE_ANGLES_Z: &[u8] = &[2, 0];

/// `P_(+s) = Z~ P_(-s) Z~` for `s` in `{X, Y}`, as 4x4 matrices on ontic states.
pub fn projector_rule_holds() -> bool {
    let z = LocalPerm::pauli(ToySymbol::Z);
    let perm_matrix: Vec<Vec<i32>> =
        (0..4).map(|r| (0..4).map(|c| i32::from(z.apply(c as u8) as usize == r)).collect()).collect();
    let projector = |sym: ToySymbol, sign: i32| -> Vec<Vec<i32>> {
        let d = sym.diagonal();
        (0..4).map(|r| (0..4).map(|c| if r == c { 1 + sign * d[r] as i32 } else { 0 }).collect()).collect()
    };
    let mul = |a: &Vec<Vec<i32>>, b: &Vec<Vec<i32>>| -> Vec<Vec<i32>> {
        (0..4).map(|r| (0..4).map(|c| (0..4).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
    };
    let transpose = |a: &Vec<Vec<i32>>| -> Vec<Vec<i32>> { (0..4).map(|r| (0..4).map(|c| a[c][r]).collect()).collect() };
    [ToySymbol::X, ToySymbol::Y].iter().all(|&s| {
        let conj = mul(&mul(&perm_matrix, &projector(s, -1)), &transpose(&perm_matrix));
        conj == projector(s, 1)
    })
}

/// On the closed graph state of `graph`, `Z~_i` acts like `X~_j` times
/// `Z~` on `N(j) \ {i}` for a neighbor `j`, compared as ontic distributions.
pub fn relayed_correction_holds(graph: &OpenGraph, i: usize, j: usize, oracle: &Oracle) -> Result<bool> {
    if !graph.neighbors(i).contains(&j) {
        return Err(Error::Precondition(format!("{j} is not a neighbor of {i}")));
    }
    let closed = graph.without_inputs();
    let n = closed.n();
    let state = graph_state(&closed, &StabilizerGroup::maximally_mixed(0))?;
    let rho = oracle.distribution_of(&state)?;
    let z = LocalPerm::pauli(ToySymbol::Z);
    let direct = ToyPermutation::local(n, i, z);
    let mut factors = vec![Factor::local(j, LocalPerm::pauli(ToySymbol::X))];
    factors.extend(closed.neighbors(j).iter().filter(|&&k| k != i).map(|&k| Factor::local(k, z)));
    let relayed = ToyPermutation::new(n, factors)?;
    Ok(oracle.apply_table(&direct.ontic_table(), &rho)? == oracle.apply_table(&relayed.ontic_table(), &rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> StabilizerGroup {
        s.replace(',', "\n").parse().unwrap()
    }

    fn closed(n: usize, edges: &[(u32, u32)]) -> OpenGraph {
        let nodes: Vec<u32> = (1..=n as u32).collect();
        OpenGraph::new(&nodes, edges, &[], &[]).unwrap()
    }

    #[test]
    fn graph_states() {
        let none = StabilizerGroup::maximally_mixed(0);
        assert_eq!(graph_state(&closed(2, &[(1, 2)]), &none).unwrap(), g("XZ,ZX"));
        assert_eq!(graph_state(&closed(2, &[]), &none).unwrap(), g("XI,IX"));
        assert_eq!(graph_state(&closed(3, &[(1, 2), (2, 3)]), &none).unwrap(), g("XZI,ZXZ,IZX"));
    }

    #[test]
    fn gflow_checks() {
        let path = OpenGraph::new(&[1, 2], &[(1, 2)], &[1], &[2]).unwrap();
        let f = GflowMap { g: [(0, [1].into())].into(), layers: vec![0, 1] };
        assert_eq!(verify_gflow(&path, &f), Ok(()));
        let empty = OpenGraph::new(&[1], &[], &[], &[1]).unwrap();
        assert_eq!(verify_gflow(&empty, &GflowMap { g: BTreeMap::new(), layers: vec![0] }), Ok(()));
        let line = OpenGraph::line(3);
        let bad = GflowMap { g: [(0, [2].into()), (1, [2].into())].into(), layers: vec![0, 1, 2] };
        assert_eq!(verify_gflow(&line, &bad), Err(GflowViolation::G3 { i: 0 }));
    }

    #[test]
    fn gflow_search() {
        for n in 2..7 {
            let line = OpenGraph::line(n);
            let f = find_gflow(&line).unwrap();
            assert_eq!(verify_gflow(&line, &f), Ok(()));
            for i in 0..n - 1 {
                assert_eq!(f.g[&i], [i + 1].into());
            }
        }
        assert!(find_gflow(&OpenGraph::new(&[1, 2], &[(1, 2)], &[], &[]).unwrap()).is_none());
    }

    #[test]
    fn teleport_both_branches() {
        let p = line_pattern(&[0]);
        let runs = pattern_branches(&p, &g("Z"), CorrectionMode::Adaptive).unwrap();
        assert_eq!(runs.len(), 2);
        assert!(runs.iter().all(|(_, r)| r.output == g("X")));
    }

    #[test]
    fn gate_catalog_matches() {
        let singles = crate::codes::single_system_states();
        for gate in gate_patterns() {
            let inputs: Vec<StabilizerGroup> = if gate.gate.n() == 1 {
                singles.clone()
            } else {
                singles.iter().flat_map(|a| singles.iter().map(move |b| a.tensor(b))).chain([g("XX,ZZ"), g("-YY,ZZ")]).collect()
            };
            for s in inputs {
                let want = gate.gate.conjugate(&s).unwrap();
                assert_eq!(deterministic_output(&gate.pattern, &s).unwrap(), Some(want), "{} on {s}", gate.name);
            }
        }
    }

    #[test]
    fn adaptive_and_physical_agree_on_lines() {
        for code in 0..64u32 {
            let angles: Vec<u8> = (0..3).map(|i| ((code >> (2 * i)) & 3) as u8).collect();
            let p = line_pattern(&angles);
            for s in crate::codes::single_system_states() {
                assert!(deterministic_output(&p, &s).unwrap().is_some(), "{angles:?} on {s}");
            }
        }
    }

    #[test]
    fn rules() {
        assert!(projector_rule_holds());
        let oracle = Oracle::default();
        let tri = closed(3, &[(1, 2), (2, 3), (1, 3)]);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            assert!(relayed_correction_holds(&tri, i, j, &oracle).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"graph":{"nodes":[1,2,3],"edges":[[1,2],[2,3]]},"inputs":[1],"outputs":[3],"angles":{"1":0,"2":1},"gflow":"auto"}"#;
        let p = Pattern::from_json(text).unwrap();
        let back = Pattern::from_json(&p.to_json().to_string()).unwrap();
        assert_eq!(back.gflow, p.gflow);
        assert_eq!(back.angles, p.angles);
        assert!(Pattern::from_json(r#"{"graph":{"nodes":[1],"edges":[]},"outputs":[]}"#).is_err());
        assert!(Pattern::from_json(r#"{"graph":{"nodes":[1,2],"edges":[[1,1]]},"outputs":[2],"angles":{"1":0}}"#).is_err());
    }
}
