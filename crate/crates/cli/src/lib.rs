//! Command handlers for the `floodcast` binary.
//!
//! Handlers write their primary artifact to `--out` when given (stdout
//! otherwise) and report progress on stdout. Failures split into usage
//! errors (exit 2) and check/runtime failures (exit 1, with a JSON
//! diagnostic on stderr); the split lives in [`CliError`] so the thin
//! `main` only maps variants to exit codes.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use floodcast::bounds::{bound_windows, min_fks_time};
use floodcast::cords::{chi_cycle_certificates, SEARCH_NODE_LIMIT};
use floodcast::graph::{GraphSequence, NodeId, SequenceDump};
use floodcast::knowledge::{run, write_trace_csv, KnowledgeState};
use floodcast::montecarlo::{derive_seed, sweep};
use floodcast::oracle::{duality_check, product_reachability};
use floodcast::schedules::{
    cp_path_schedule, doubling_schedule, dp_path_schedule, eta_schedule, fixed_cycle_schedule,
    nu_schedule, psi_schedule, random_schedule, Schedule, ScheduleDump, ScheduleName,
};
use floodcast::{graph, seeded_rng};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or out-of-limit parameters; maps to exit code 2.
    Usage(String),
    /// A verification or equivalence check failed; the payload is the
    /// machine-readable diagnostic. Maps to exit code 1.
    Check(serde_json::Value),
    /// I/O failure; a broken pipe on stdout is treated as a clean exit.
    Io(std::io::Error),
    /// Everything else (internal contract violations). Exit code 1.
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Check(value) => write!(f, "{value}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<floodcast::Error> for CliError {
    fn from(e: floodcast::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("json error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Inclusive integer range, parsed from `A..B` or a single value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeSpec {
    pub lo: usize,
    pub hi: usize,
}

impl RangeSpec {
    pub fn values(self, step: usize) -> Vec<usize> {
        (self.lo..=self.hi).step_by(step.max(1)).collect()
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |piece: &str| {
            piece
                .parse::<usize>()
                .map_err(|_| format!("`{piece}` is not a positive integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(RangeSpec { lo, hi })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "floodcast",
    version,
    about = "Flooding on time-varying digraphs: schedules, simulation, oracle checks, bounds, and Monte Carlo sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a named schedule and print per-round knowledge cardinalities.
    Simulate(SimulateArgs),
    /// Construct a named schedule and dump it as JSON with certificates.
    Schedule(ScheduleArgs),
    /// Monte Carlo sweep over network sizes; emits the sweep CSV.
    Sweep(SweepArgs),
    /// Closed-form bound evaluation over network sizes; emits the bounds CSV.
    Bounds(BoundsArgs),
    /// Cross-check the set engine against the matrix oracle on random sequences.
    Oracle(OracleArgs),
    /// Verify a dumped schedule's certificates, or search a dumped sequence
    /// against a cycle-length requirement.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ScheduleSelection {
    /// Schedule family: dp_path, cp_path, psi, nu, eta, fixed_cycle,
    /// doubling, or random.
    #[arg(long = "schedule", visible_alias = "name", value_parser = parse_schedule_name)]
    pub schedule: ScheduleName,

    /// Network size.
    #[arg(long)]
    pub n: usize,

    /// Round count, for the fixed_cycle and random families (default n-1).
    #[arg(long)]
    pub steps: Option<usize>,

    /// Distinguished node: source for dp_path (default 1), sink for cp_path
    /// (default n).
    #[arg(long)]
    pub node: Option<u32>,

    /// RNG seed for the random family.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_schedule_name(s: &str) -> Result<ScheduleName, String> {
    ScheduleName::from_str(s).map_err(|e| e.to_string())
}

impl ScheduleSelection {
    pub fn build(&self) -> CliResult<Schedule> {
        if matches!(self.schedule, ScheduleName::DpPath | ScheduleName::CpPath)
            && self.node == Some(0)
        {
            return Err(CliError::Usage("node labels start at 1".into()));
        }
        if self.n >= u32::MAX as usize {
            return Err(CliError::Usage(format!(
                "network size {} exceeds the label space",
                self.n
            )));
        }
        let n = self.n;
        let steps = self.steps.unwrap_or(n.saturating_sub(1));
        let built = match self.schedule {
            ScheduleName::DpPath => dp_path_schedule(n, NodeId::new(self.node.unwrap_or(1))),
            ScheduleName::CpPath => cp_path_schedule(n, NodeId::new(self.node.unwrap_or(n as u32))),
            ScheduleName::Psi => psi_schedule(n),
            ScheduleName::Nu => nu_schedule(n),
            ScheduleName::Eta => eta_schedule(n),
            ScheduleName::FixedCycle => fixed_cycle_schedule(n, steps),
            ScheduleName::Doubling => doubling_schedule(n),
            ScheduleName::Random => random_schedule(n, steps, self.seed),
        };
        // Size and node-range rejections come from the caller's flags.
        built.map_err(|e| match e {
            floodcast::Error::InvalidSize { .. } | floodcast::Error::InvalidNode { .. } => {
                CliError::Usage(e.to_string())
            }
            other => other.into(),
        })
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub selection: ScheduleSelection,

    /// Write the per-round trace CSV (round,node,cardinality,is_fcs) here.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,

    /// Write the run's graph sequence as JSON here.
    #[arg(long)]
    pub dump_graphs: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub selection: ScheduleSelection,

    /// Output path for the schedule JSON (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Network sizes, as an inclusive range `A..B` or a single value.
    /// Sizes below 3 have no analytic windows and are rejected.
    #[arg(long)]
    pub n: RangeSpec,

    /// Stride through the size range.
    #[arg(long, default_value_t = 1)]
    pub step: usize,

    /// Trials per network size.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    /// Base seed; per-trial seeds derive from it deterministically.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path for the sweep CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Network sizes, as an inclusive range `A..B` or a single value.
    #[arg(long = "n-range")]
    pub n_range: RangeSpec,

    /// Stride through the size range.
    #[arg(long, default_value_t = 1)]
    pub step: usize,

    /// Output path for the bounds CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Network size.
    #[arg(long)]
    pub n: usize,

    /// Number of random sequences to cross-check.
    #[arg(long, default_value_t = 100)]
    pub sequences: usize,

    /// Base seed for the sequence draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Rounds per sequence (default n-1).
    #[arg(long)]
    pub len: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// JSON file holding either a schedule dump (with certificates) or a
    /// bare sequence dump.
    #[arg(long)]
    pub input: PathBuf,

    /// Constant cycle-length requirement for bare sequences.
    #[arg(long)]
    pub chi: Option<usize>,

    /// Round-indexed requirement profile for bare sequences: psi, nu, or eta.
    #[arg(long, conflicts_with = "chi")]
    pub profile: Option<String>,
}

/// Runs one parsed command, writing human-readable progress to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Simulate(args) => simulate(args, out),
        Command::Schedule(args) => schedule(args, out),
        Command::Sweep(args) => run_sweep(args, out),
        Command::Bounds(args) => bounds(args, out),
        Command::Oracle(args) => oracle(args, out),
        Command::Verify(args) => verify(args, out),
    }
}

fn write_artifact(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(path) => {
            fs::write(path, bytes)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn cardinality_line(state: &KnowledgeState) -> String {
    let n = state.n();
    let cards: Vec<usize> = (1..=n as u32)
        .map(|v| state.cardinality(NodeId::new(v)))
        .collect();
    let min = cards.iter().min().copied().unwrap_or(0);
    let max = cards.iter().max().copied().unwrap_or(0);
    let sum: usize = cards.iter().sum();
    if n <= 24 {
        let list = cards
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        format!("round {}: |K| = [{list}] sum={sum}", state.round())
    } else {
        format!("round {}: |K| min={min} max={max} sum={sum}", state.round())
    }
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let schedule = args.selection.build()?;
    schedule.verify_certificates()?;
    let states = run(&schedule.sequence)?;

    writeln!(
        out,
        "schedule {} on n={} ({} rounds)",
        schedule.name,
        schedule.params.n,
        schedule.sequence.len()
    )?;
    for state in &states {
        writeln!(out, "{}", cardinality_line(state))?;
    }

    if let Some(target) = schedule.params.target {
        if let Some(k) = states.iter().position(|s| s.is_fcs(target)) {
            writeln!(out, "FCS for node {target} at round {k}")?;
        }
        if let Some(k) = states.iter().position(|s| s.is_fds(target)) {
            writeln!(out, "FDS for node {target} at round {k}")?;
        }
    }
    match states.iter().position(KnowledgeState::is_fks) {
        Some(k) => writeln!(out, "FKS at round {k}")?,
        None => writeln!(out, "no FKS within {} rounds", schedule.sequence.len())?,
    }

    if let Some(path) = &args.trace_out {
        let mut buf = Vec::new();
        write_trace_csv(&states, &mut buf)?;
        fs::write(path, buf)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    if let Some(path) = &args.dump_graphs {
        let text = serde_json::to_string_pretty(&schedule.sequence.to_dump())?;
        fs::write(path, text)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn schedule(args: &ScheduleArgs, out: &mut dyn Write) -> CliResult<()> {
    let schedule = args.selection.build()?;
    schedule.verify_certificates()?;
    let mut text = serde_json::to_string_pretty(&schedule.to_dump())?;
    text.push('\n');
    write_artifact(out, args.out.as_deref(), text.as_bytes())
}

fn run_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.n.lo < 3 {
        return Err(CliError::Usage(format!(
            "sweep sizes start at 3 (got {}): smaller networks have no analytic windows",
            args.n.lo
        )));
    }
    if args.trials < 1 {
        return Err(CliError::Usage("sweep needs at least one trial".into()));
    }
    let sizes = args.n.values(args.step);
    let report = sweep(&sizes, args.trials, args.seed)?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    write_artifact(out, args.out.as_deref(), &buf)
}

fn bounds(args: &BoundsArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.n_range.lo < 3 {
        return Err(CliError::Usage(format!(
            "bounds are defined for n >= 3 (got {})",
            args.n_range.lo
        )));
    }
    let mut buf = Vec::new();
    writeln!(
        buf,
        "n,phi,latest_low,latest_high,earliest_low,earliest_high,min_fks"
    )?;
    for n in args.n_range.values(args.step) {
        let w = bound_windows(n)?;
        writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            n,
            w.phi,
            w.latest.0,
            w.latest.1,
            w.earliest.0,
            w.earliest.1,
            min_fks_time(n)
        )?;
    }
    write_artifact(out, args.out.as_deref(), &buf)
}

fn oracle(args: &OracleArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.n < 2 {
        return Err(CliError::Usage(format!(
            "oracle checks need n >= 2 (got {})",
            args.n
        )));
    }
    let n = args.n;
    let len = args.len.unwrap_or(n - 1);
    let mut mismatches = Vec::new();
    for trial in 0..args.sequences {
        let seed = derive_seed(args.seed, n, trial);
        let seq = graph::random_sequence(n, len, &mut seeded_rng(seed))?;
        let final_state = run(&seq)?.pop().expect("run returns >= 1 state");
        let product = product_reachability(&seq);
        let probe = NodeId::new((trial % n) as u32 + 1);
        if !product.matches_knowledge(&final_state) {
            mismatches.push(json!({"trial": trial, "seed": seed, "kind": "reachability"}));
        } else if !duality_check(&seq, probe) {
            mismatches.push(json!({"trial": trial, "seed": seed, "kind": "duality"}));
        }
    }
    let matched = args.sequences - mismatches.len();
    writeln!(out, "{matched}/{} match", args.sequences)?;
    if !mismatches.is_empty() {
        return Err(CliError::Check(json!({
            "error": "oracle mismatch",
            "n": n,
            "len": len,
            "mismatches": mismatches,
        })));
    }
    Ok(())
}

fn chi_requirement(profile: &str, n: usize, round: usize) -> CliResult<usize> {
    use floodcast::schedules::{eta_value, nu_value, psi_value};
    match profile {
        "psi" => Ok(psi_value(n, round)),
        "nu" => Ok(nu_value(n, round)),
        "eta" => Ok(eta_value(n, round)),
        other => Err(CliError::Usage(format!(
            "unknown profile `{other}` (expected psi, nu, or eta)"
        ))),
    }
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = fs::read_to_string(&args.input)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Failure(format!("malformed input: {e}")))?;

    if value.get("certificates").is_some() {
        let dump: ScheduleDump = serde_json::from_value(value)?;
        let schedule = dump.into_schedule()?;
        match schedule.verify_certificates() {
            Ok(()) => {
                for k in 0..schedule.sequence.len() {
                    writeln!(out, "{}", json!({"round": k, "certificate": "ok"}))?;
                }
                writeln!(
                    out,
                    "all {} round certificates verify",
                    schedule.sequence.len()
                )?;
                Ok(())
            }
            Err(e) => Err(CliError::Check(json!({
                "error": "certificate verification failed",
                "detail": e.to_string(),
            }))),
        }
    } else {
        let dump: SequenceDump = serde_json::from_value(value)?;
        let seq: GraphSequence = dump.into_sequence()?;
        if seq.n() > SEARCH_NODE_LIMIT {
            return Err(CliError::Usage(format!(
                "search-based verification is capped at n <= {SEARCH_NODE_LIMIT} (got n={}); \
                 dump a schedule with certificates instead",
                seq.n()
            )));
        }
        let constant = args.chi;
        let profile = args.profile.as_deref();
        if constant.is_none() && profile.is_none() {
            return Err(CliError::Usage(
                "bare sequences need --chi <int> or --profile <psi|nu|eta>".into(),
            ));
        }
        if profile.is_some() && seq.len() > seq.n().saturating_sub(1) {
            return Err(CliError::Usage(format!(
                "profiles cover rounds 0..{} at n={}, but the sequence has {} rounds",
                seq.n().saturating_sub(2),
                seq.n(),
                seq.len()
            )));
        }
        for (k, snap) in seq.iter().enumerate() {
            let chi = match (constant, profile) {
                (Some(c), _) => c,
                (None, Some(p)) => chi_requirement(p, seq.n(), k)?,
                (None, None) => unreachable!("checked above"),
            };
            match chi_cycle_certificates(snap, chi) {
                Some(certs) => {
                    for cert in certs {
                        let nodes: Vec<u32> = cert.nodes.iter().map(|v| v.value()).collect();
                        writeln!(
                            out,
                            "{}",
                            json!({
                                "round": k,
                                "node": cert.target.value(),
                                "chi": chi,
                                "nodes": nodes,
                                "closed": cert.closed,
                            })
                        )?;
                    }
                }
                None => {
                    return Err(CliError::Check(json!({
                        "error": "cycle requirement not met",
                        "round": k,
                        "chi": chi,
                    })));
                }
            }
        }
        writeln!(out, "all {} rounds satisfy the requirement", seq.len())?;
        Ok(())
    }
}
