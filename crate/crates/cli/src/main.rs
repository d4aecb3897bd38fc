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

//! `toystab` command-line front end.
//!
//! Machine-readable output is JSON, written to standard output or to
//! `--out`. Exit codes: 1 malformed input, 2 domain rule violated,
//! 3 internal assertion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toystab::algebra::{validate_group, StabilizerGroup, ToyElement};
use toystab::bvc::{estimate_pfail, Deviation, Estimator};
use toystab::codes::{ec_demo, CodeError, ToyCode};
use toystab::crypto::{bc_cheat_imperfect, bc_cheat_perfect, trace_distance, Commitment};
use toystab::dynamics::{measure, outcomes, partial_trace, purify, Measurement};
use toystab::error::{Error, ErrorClass, Result};
use toystab::mbtc::{pattern_branches, run_pattern_with, CorrectionMode, Pattern};
use toystab::branch::Sampler;
use toystab::mbtc::OpenGraph;
use toystab::oracle::Oracle;
use toystab::permutation::ToyPermutation;
use toystab::rational::{Dyadic, RationalJson};

const SEED_ENV: &str = "TOYSTAB_SEED";

#[derive(Parser)]
#[command(name = "toystab", version, about = "Exact simulator for the stabilizer toy theory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random choice; defaults to $TOYSTAB_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest system count the ontic enumeration accepts.
    #[arg(long, global = true, default_value_t = 6)]
    cap: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check or pretty-print a stabilizer group.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
    /// Ontic-space distribution of a state.
    Ontic {
        #[command(subcommand)]
        action: OnticAction,
    },
    /// Measure an observable or a branch file.
    Measure {
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// Single observable, e.g. `+XI`.
        #[arg(long, conflicts_with = "branches", allow_hyphen_values = true)]
        observable: Option<String>,
        /// File of `[label]` blocks, one group per branch.
        #[arg(long)]
        branches: Option<String>,
        /// Sample one branch instead of listing all of them.
        #[arg(long)]
        sample: bool,
    },
    /// Reversible dynamics.
    Perm {
        #[command(subcommand)]
        action: PermAction,
    },
    /// Reduced state on a subset of systems.
    Trace {
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// Systems to keep, 1-based.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Pure state on twice the systems reducing to the input.
    Purify {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
    /// Bit-commitment cheating demonstrations.
    Bc {
        #[command(subcommand)]
        action: BcAction,
    },
    /// Error-correction round trip.
    Ec {
        #[command(subcommand)]
        action: EcAction,
    },
    /// Secret sharing over a toy code.
    Share {
        #[command(subcommand)]
        action: ShareAction,
    },
    /// Measurement-based computation.
    Mbtc {
        #[command(subcommand)]
        action: MbtcAction,
    },
    /// Delegated, blind and trap-verified computation.
    Bvc {
        #[command(subcommand)]
        action: BvcAction,
    },
    /// Run the single-system fixture end to end.
    Selftest,
}

#[derive(Subcommand)]
enum StateAction {
    Validate {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
    Print {
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// Also list every group element.
        #[arg(long)]
        elements: bool,
    },
}

#[derive(Subcommand)]
enum OnticAction {
    Dump {
        #[arg(allow_hyphen_values = true)]
        state: String,
    },
}

#[derive(Subcommand)]
enum PermAction {
    Apply {
        #[arg(allow_hyphen_values = true)]
        state: String,
        /// JSON factor list (inline or file), sites 1-based.
        #[arg(long)]
        perm: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BcMode {
    Perfect,
    Imperfect,
}

#[derive(Subcommand)]
enum BcAction {
    Demo {
        /// File with `[0]` and `[1]` group blocks.
        #[arg(long)]
        encoding: String,
        /// Committer's systems, 1-based.
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        #[arg(long, value_enum, default_value = "perfect")]
        mode: BcMode,
    },
}

#[derive(Subcommand)]
enum EcAction {
    Demo {
        #[arg(long, default_value = "five")]
        code: String,
        /// `X@3`, `Z@1,Y@4` or `erase@2,4`.
        #[arg(long)]
        error: String,
        #[arg(long, default_value = "+Z", allow_hyphen_values = true)]
        secret: String,
    },
}

#[derive(Subcommand)]
enum ShareAction {
    /// Encode a one-system secret into shares.
    Deal {
        #[arg(long, default_value = "five")]
        code: String,
        #[arg(long, default_value = "+Z", allow_hyphen_values = true)]
        secret: String,
    },
    /// Recover the secret from a subset of players.
    Reconstruct {
        #[arg(long, default_value = "five")]
        code: String,
        /// Secret to deal before reconstructing.
        #[arg(long, default_value = "+Z", conflicts_with = "shares", allow_hyphen_values = true)]
        secret: String,
        /// Previously dealt shares (group text) instead of `--secret`.
        #[arg(long, allow_hyphen_values = true)]
        shares: Option<String>,
        /// Players holding shares, 1-based.
        #[arg(long, value_delimiter = ',', required = true)]
        players: Vec<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Branches {
    All,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Correction {
    Adaptive,
    Physical,
}

#[derive(Subcommand)]
enum MbtcAction {
    Run {
        pattern: String,
        /// State of the input systems, in input order.
        #[arg(long, allow_hyphen_values = true)]
        input: Option<String>,
        #[arg(long, value_enum, default_value = "all")]
        branches: Branches,
        #[arg(long, value_enum, default_value = "adaptive")]
        correction: Correction,
    },
}

#[derive(Subcommand)]
enum BvcAction {
    Simulate {
        /// Pattern JSON; defaults to a three-vertex line measured in X.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, default_value = "honest")]
        deviation: String,
        /// Monte Carlo trials; omit for exact enumeration.
        #[arg(long)]
        trials: Option<u64>,
        /// Alias of `--out`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Inline text or the contents of an existing file. Inline text may use
/// `,`, `;` or a literal `\n` between lines.
fn text_arg(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")));
    }
    Ok(arg.replace("\\n", "\n").replace([',', ';'], "\n"))
}

fn file_arg(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn state_arg(arg: &str) -> Result<StabilizerGroup> {
    text_arg(arg)?.parse()
}

fn sites_arg(n: usize, sites: &[usize]) -> Result<Vec<usize>> {
    sites
        .iter()
        .map(|&s| if s == 0 || s > n { Err(Error::Parse(format!("site {s} outside 1..={n}"))) } else { Ok(s - 1) })
        .collect()
}

fn ratio(d: Dyadic) -> Value {
    serde_json::to_value(RationalJson::from_ratio(&d.to_ratio())).expect("json")
}

fn canonical(s: &StabilizerGroup) -> Value {
    json!({ "n": s.n(), "generators": s.generators().iter().map(ToString::to_string).collect::<Vec<_>>() })
}

struct Ctx {
    seed: u64,
    oracle: Oracle,
}

/// JSON value plus optional human-readable text for standard output.
struct Report {
    json: Option<Value>,
    text: Option<String>,
}

impl Report {
    fn json(v: Value) -> Report {
        Report { json: Some(v), text: None }
    }
}

fn run(cmd: Command, ctx: &Ctx) -> Result<Report> {
    match cmd {
        Command::State { action: StateAction::Validate { state } } => {
            let text = text_arg(&state)?;
            let gens: Vec<ToyElement> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::parse)
                .collect::<Result<_>>()?;
            let n = gens.first().map(ToyElement::len).ok_or_else(|| Error::Parse("no generators".into()))?;
            validate_group(n, &gens).map_err(|v| Error::InvalidGroup(v.to_string()))?;
            let s = StabilizerGroup::new(n, gens)?;
            Ok(Report::json(json!({ "ok": true, "n": n, "rank": s.rank(), "pure": s.is_pure(), "canonical": canonical(&s) })))
        }
        Command::State { action: StateAction::Print { state, elements } } => {
            let s = state_arg(&state)?;
            let mut text = format!("n={} rank={} {}\n", s.n(), s.rank(), if s.is_pure() { "pure" } else { "mixed" });
            s.generators().iter().for_each(|g| text.push_str(&format!("  {g}\n")));
            if elements {
                text.push_str("elements:\n");
                s.elements().iter().for_each(|g| text.push_str(&format!("  {g}\n")));
            }
            Ok(Report { json: None, text: Some(text) })
        }
        Command::Ontic { action: OnticAction::Dump { state } } => {
            let s = state_arg(&state)?;
            Ok(Report::json(serde_json::to_value(ctx.oracle.distribution_of(&s)?.dump()).expect("json")))
        }
        Command::Measure { state, observable, branches, sample } => {
            let s = state_arg(&state)?;
            let m = match (observable, branches) {
                (Some(o), None) => {
                    let g: ToyElement = o.parse()?;
                    if g.len() != s.n() {
                        return Err(Error::LengthMismatch { expected: s.n(), found: g.len() });
                    }
                    if g.is_identity_symbols() {
                        return Err(Error::InvalidMeasurement("cannot measure the identity".into()));
                    }
                    Measurement::observable(&g)
                }
                (None, Some(b)) => Measurement::parse(s.n(), &file_arg(&b)?)?,
                _ => return Err(Error::Parse("give --observable or --branches".into())),
            };
            let branch = |o: &toystab::dynamics::Outcome| {
                json!({ "label": o.label, "probability": ratio(o.probability), "state": canonical(&o.state) })
            };
            if sample {
                let o = measure(&s, &m, &mut ChaCha8Rng::seed_from_u64(ctx.seed))?;
                Ok(Report::json(json!({ "sampled": branch(&o) })))
            } else {
                Ok(Report::json(json!({ "outcomes": outcomes(&s, &m)?.iter().map(branch).collect::<Vec<_>>() })))
            }
        }
        Command::Perm { action: PermAction::Apply { state, perm } } => {
            let s = state_arg(&state)?;
            let p = ToyPermutation::from_json(s.n(), &file_arg(&perm)?)?;
            Ok(Report::json(json!({ "permutation": p.to_json(), "state": canonical(&p.conjugate(&s)?) })))
        }
        Command::Trace { state, keep } => {
            let s = state_arg(&state)?;
            let keep = sites_arg(s.n(), &keep)?;
            Ok(Report::json(json!({ "kept": keep.iter().map(|k| k + 1).collect::<Vec<_>>(), "state": canonical(&partial_trace(&s, &keep)?) })))
        }
        Command::Purify { state } => {
            let s = state_arg(&state)?;
            let p = purify(&s);
            let back = partial_trace(&p, &(0..s.n()).collect::<Vec<_>>())?;
            if back != s {
                return Err(Error::Internal("purification does not reduce to the input".into()));
            }
            Ok(Report::json(json!({ "purification": canonical(&p) })))
        }
        Command::Bc { action: BcAction::Demo { encoding, partition, mode } } => {
            let m = parse_blocks(&file_arg(&encoding)?)?;
            let (s0, s1) = match (m.get("0"), m.get("1")) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                _ => return Err(Error::Parse("encoding file needs [0] and [1] blocks".into())),
            };
            if s0.n() != s1.n() {
                return Err(Error::LengthMismatch { expected: s0.n(), found: s1.n() });
            }
            let a_sites = sites_arg(s0.n(), &partition)?;
            match mode {
                BcMode::Perfect => {
                    let c = Commitment::new(s0, s1, a_sites)?;
                    let r = bc_cheat_perfect(&c)?;
                    let cheated = c.flip.conjugate(&c.s1)?;
                    let distance =
                        trace_distance(&ctx.oracle.distribution_of(&cheated)?, &ctx.oracle.distribution_of(&c.s0)?)?;
                    Ok(Report::json(json!({
                        "mode": "perfect",
                        "epsilon": ratio(Dyadic::ZERO),
                        "cheat_distance": ratio(distance),
                        "acceptance_probability": ratio(r.acceptance_probability),
                        "committer_local": r.committer_local,
                        "cheat": c.flip.to_json(),
                    })))
                }
                BcMode::Imperfect => {
                    let (r, sigma) = bc_cheat_imperfect(&s0, &s1, &a_sites, &ctx.oracle)?;
                    Ok(Report::json(json!({
                        "mode": "imperfect",
                        "epsilon": ratio(r.epsilon),
                        "cheat_distance": ratio(r.cheat_distance),
                        "acceptance_probability": ratio(r.acceptance_probability),
                        "beats_sqrt_two_epsilon": r.beats_sqrt_two_epsilon,
                        "cheat_state": canonical(&sigma),
                    })))
                }
            }
        }
        Command::Ec { action: EcAction::Demo { code, error, secret } } => {
            let code = ToyCode::by_name(&code)?;
            let err = CodeError::parse(code.n, &error)?;
            let demo = ec_demo(&code, &state_arg(&secret)?, &err)?;
            Ok(Report::json(serde_json::to_value(demo).expect("json")))
        }
        Command::Share { action: ShareAction::Deal { code, secret } } => {
            let code = ToyCode::by_name(&code)?;
            let (l, l_prime) = code.ramp();
            let shares = code.share_secret(&state_arg(&secret)?)?;
            Ok(Report::json(json!({ "code": code.name, "players": code.n, "reconstruct": l, "hide": l_prime, "shares": canonical(&shares) })))
        }
        Command::Share { action: ShareAction::Reconstruct { code, secret, shares, players } } => {
            let code = ToyCode::by_name(&code)?;
            let (l, l_prime) = code.ramp();
            let dealt = match shares {
                Some(s) => state_arg(&s)?,
                None => code.share_secret(&state_arg(&secret)?)?,
            };
            if dealt.n() != code.n {
                return Err(Error::LengthMismatch { expected: code.n, found: dealt.n() });
            }
            let mut who = sites_arg(code.n, &players)?;
            who.sort_unstable();
            who.dedup();
            let labels: Vec<usize> = who.iter().map(|p| p + 1).collect();
            if who.len() >= l {
                let s = code.reconstruct(&dealt, &who)?;
                Ok(Report::json(json!({ "players": labels, "reconstructed": canonical(&s) })))
            } else {
                let secrets = toystab::codes::single_system_states();
                let hidden = code.marginal_is_secret_independent(&who, &secrets)?;
                let guarantee = if who.len() <= l_prime { "hidden" } else { "none" };
                Ok(Report::json(json!({
                    "players": labels,
                    "reconstructed": Value::Null,
                    "marginal_secret_independent": hidden,
                    "guarantee": guarantee,
                    "marginal": canonical(&partial_trace(&dealt, &who)?),
                })))
            }
        }
        Command::Mbtc { action: MbtcAction::Run { pattern, input, branches, correction } } => {
            let p = Pattern::from_json(&file_arg(&pattern)?)?;
            let k = p.graph.inputs().len();
            let input = match input {
                Some(i) => state_arg(&i)?,
                None if k == 0 => StabilizerGroup::maximally_mixed(0),
                None => return Err(Error::Precondition(format!("pattern has {k} inputs; pass --input"))),
            };
            let mode = match correction {
                Correction::Adaptive => CorrectionMode::Adaptive,
                Correction::Physical => CorrectionMode::Physical,
            };
            let labelled = |outs: &[(usize, bool)]| -> Value {
                outs.iter().map(|(v, s)| json!([p.graph.label(*v), u8::from(*s)])).collect()
            };
            if branches == Branches::Sample {
                let run = run_pattern_with(&p, &input, mode, &mut Sampler::new(ChaCha8Rng::seed_from_u64(ctx.seed)))?;
                return Ok(Report::json(json!({ "outcomes": labelled(&run.outcomes), "output": canonical(&run.output) })));
            }
            let all = pattern_branches(&p, &input, mode)?;
            let deterministic = all.windows(2).all(|w| w[0].1.output == w[1].1.output);
            Ok(Report::json(json!({
                "deterministic": deterministic,
                "branches": all.iter().map(|(w, r)| json!({
                    "weight": RationalJson::from_ratio(w),
                    "outcomes": labelled(&r.outcomes),
                    "output": canonical(&r.output),
                })).collect::<Vec<_>>(),
            })))
        }
        Command::Bvc { action: BvcAction::Simulate { pattern, deviation, trials, report: _ } } => {
            let p = match pattern {
                Some(text) => Pattern::from_json(&file_arg(&text)?)?,
                None => Pattern::with_uniform_angle(OpenGraph::line(3).without_inputs(), 0)?,
            };
            let dev = Deviation::parse(&p, &deviation)?;
            let how = match trials {
                Some(trials) => Estimator::MonteCarlo { trials, seed: ctx.seed },
                None => Estimator::Exact,
            };
            let r = estimate_pfail(&p, &dev, how)?;
            let text = format!(
                "n={} deviation={} p_fail={:.6} acceptance={:.6} bound={}/{} within_bound={}\n",
                r.n,
                r.deviation,
                r.p_fail.value(),
                r.acceptance.value(),
                r.bound.num,
                r.bound.den,
                r.within_bound
            );
            Ok(Report { json: Some(serde_json::to_value(&r).expect("json")), text: Some(text) })
        }
        Command::Selftest => selftest(ctx),
    }
}

fn parse_blocks(text: &str) -> Result<BTreeMap<String, StabilizerGroup>> {
    let mut out = BTreeMap::new();
    let mut label: Option<String> = None;
    let mut body = String::new();
    let mut flush = |label: &mut Option<String>, body: &mut String| -> Result<()> {
        if let Some(l) = label.take() {
            out.insert(l, body.parse()?);
        } else if !body.trim().is_empty() {
            return Err(Error::Parse("group lines before the first [label]".into()));
        }
        body.clear();
        Ok(())
    };
    for line in text.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse(format!("unterminated label {line:?}")))?;
            flush(&mut label, &mut body)?;
            label = Some(name.trim().to_string());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    flush(&mut label, &mut body)?;
    Ok(out)
}

fn selftest(ctx: &Ctx) -> Result<Report> {
    let z: StabilizerGroup = "+Z".parse()?;
    let rho = ctx.oracle.distribution_of(&z)?;
    let half = Dyadic::pow2_inv(1);
    let mut checks: Vec<(&str, bool)> = vec![(
        "ontic distribution of +Z is (1/2, 1/2, 0, 0)",
        rho.probabilities() == [half, half, Dyadic::ZERO, Dyadic::ZERO],
    )];
    for (name, branch, expected) in
        [("+Z", "+Z", Dyadic::ONE), ("-Z", "-Z", Dyadic::ZERO), ("+X", "+X", half), ("-X", "-X", half)]
    {
        let p = ctx.oracle.projector_probability(&branch.parse()?, &rho)?;
        let label = match name {
            "+Z" => "P(+Z) = 1",
            "-Z" => "P(-Z) = 0",
            "+X" => "P(+X) = 1/2",
            _ => "P(-X) = 1/2",
        };
        checks.push((label, p == expected));
    }
    let after = outcomes(&z, &Measurement::observable(&"X".parse()?))?;
    let states: Vec<StabilizerGroup> = after.iter().map(|o| o.state.clone()).collect();
    checks.push(("X measurement leaves <+X> or <-X>", states == ["+X".parse()?, "-X".parse()?]));
    let text: String = checks.iter().map(|(n, ok)| format!("{} {n}\n", if *ok { "PASS" } else { "FAIL" })).collect();
    let ok = checks.iter().all(|(_, ok)| *ok);
    let json = json!({ "ok": ok, "checks": checks.iter().map(|(n, ok)| json!({ "check": n, "pass": ok })).collect::<Vec<_>>() });
    if !ok {
        return Err(Error::Internal(format!("selftest failed:\n{text}")));
    }
    Ok(Report { json: Some(json), text: Some(text) })
}

fn exit_for(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Parse => 1,
        ErrorClass::Domain => 2,
        ErrorClass::Internal => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let seed = match (cli.global.seed, std::env::var(SEED_ENV)) {
        (Some(s), _) => s,
        (None, Ok(v)) => match v.trim().parse() {
            Ok(s) => s,
            Err(_) => {
                eprintln!("error: {SEED_ENV}={v:?} is not an unsigned integer");
                return ExitCode::from(1);
            }
        },
        (None, Err(_)) => 0,
    };
    let ctx = Ctx { seed, oracle: Oracle::with_cap(cli.global.cap) };
    let out = match &cli.command {
        Command::Bvc { action: BvcAction::Simulate { report: Some(p), .. } } => Some(p.clone()),
        _ => cli.global.out.clone(),
    };
    let report = match run(cli.command, &ctx) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    if let Some(mut v) = report.json {
        if let Value::Object(map) = &mut v {
            map.insert("seed".into(), json!(seed));
        }
        let body = serde_json::to_string_pretty(&v).expect("json") + "\n";
        match &out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => {
                print!("{body}");
                return ExitCode::SUCCESS;
            }
        }
    }
    if let Some(t) = report.text {
        print!("{t}");
    }
    ExitCode::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_for(&Error::Parse("x".into())), 1);
        assert_eq!(exit_for(&Error::InvalidGroup("x".into())), 2);
        assert_eq!(exit_for(&Error::CapExceeded { n: 9, cap: 6 }), 2);
        assert_eq!(exit_for(&Error::Internal("x".into())), 3);
    }
}
