// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Every subcommand writes JSON or CSV to stdout and nothing else, so runs
//! can be scripted and diffed. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, schedule valid, or audit universal |
//! | 1 | schedule invalid, negative cycle, or audit not universal |
//! | 2 | search refused because the budget ran out |
//! | 3 | bad arguments or unreadable input |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::{detect_negative_cycle_residue, exact_distances, parse_weights, run_schedule, Distance, DistanceVector, EngineError};
use crate::factorization::audit_lower_bound;
use crate::graph::Digraph;
use crate::reduction::{aps_to_validity, ApsInstance};
use crate::schedule::{randomized_yen, round_robin, yen, Schedule, ScheduleHeader, VertexOrder};
use crate::validity::{is_k_valid, is_valid, Budget, ValidityError, DEFAULT_BUDGET};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_REFUSED: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "relaxsched", version, about = "Generate, run, validate and audit non-adaptive relaxation schedules")]
pub struct Cli {
    /// Cap on path-extension steps for exhaustive searches.
    #[arg(long, global = true, env = "RELAXSCHED_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Do not print notes to stderr.
    #[arg(long, global = true)]
    pub machine: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a schedule for the complete digraph on n vertices.
    Generate(GenerateArgs),
    /// Execute a schedule on a weighted graph and report distances.
    Run(RunArgs),
    /// Decide validity of a schedule by exhaustive path enumeration.
    Validate(ValidateArgs),
    /// Check a schedule against the matching-family lower bound.
    #[command(name = "audit-lowerbound")]
    AuditLowerbound(AuditArgs),
    /// Turn an APS instance into a graph and schedule.
    Reduce(ReduceArgs),
    /// Tabulate schedule lengths (and optionally validity) as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    RoundRobin,
    Yen,
    RandomizedYen,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::RoundRobin => "round-robin",
            Generator::Yen => "yen",
            Generator::RandomizedYen => "randomized-yen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub generator: Generator,
    #[arg(long)]
    pub n: usize,
    /// Round-robin rounds [default: n - 1].
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Yen half-passes [default: n].
    #[arg(long)]
    pub half_passes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    /// Check only paths with exactly k edges.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// JSON file `{"n": <alphabet size>, "T": [symbols...]}`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Directory for graph.txt, schedule.txt and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Generator::RoundRobin, Generator::Yen])]
    pub generators: Vec<Generator>,
    /// Run the exhaustive validity check on every row.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Add a wall-clock column. Output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

/// What a subcommand produced: the stdout payload, the exit code and notes
/// meant for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(stdout: String, code: u8) -> Self {
        Outcome { stdout, code, notes: Vec::new() }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let budget = Budget::new(cli.budget);
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args),
        Command::Validate(args) => cmd_validate(args, budget),
        Command::AuditLowerbound(args) => cmd_audit(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Bench(args) => cmd_bench(args, budget),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// A generated schedule together with the header describing it.
pub fn generate_schedule(generator: Generator, n: usize, rounds: Option<usize>, half_passes: Option<usize>, seed: u64) -> Result<(Schedule, ScheduleHeader)> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    let g = Digraph::complete(n)?;
    let mut parameters = BTreeMap::new();
    let (schedule, seed) = match generator {
        Generator::RoundRobin => {
            let rounds = rounds.unwrap_or((n - 1).max(1));
            parameters.insert("rounds".to_string(), rounds as u64);
            (round_robin(&g, rounds)?, None)
        }
        Generator::Yen => {
            let half_passes = half_passes.unwrap_or(n);
            parameters.insert("half_passes".to_string(), half_passes as u64);
            (yen(&g, &VertexOrder::identity(n), half_passes)?, None)
        }
        Generator::RandomizedYen => {
            parameters.insert("half_passes".to_string(), n as u64);
            (randomized_yen(&g, seed)?, Some(seed))
        }
    };
    let header = ScheduleHeader {
        n,
        generator: generator.name().to_string(),
        parameters,
        seed,
    };
    Ok((schedule, header))
}

fn cmd_generate(args: &GenerateArgs) -> Result<Outcome> {
    let (schedule, header) = generate_schedule(args.generator, args.n, args.rounds, args.half_passes, args.seed)?;
    let length = schedule.len();
    let body = match args.format {
        Format::Text => schedule.to_text(),
        Format::Json => to_json(&schedule.to_document(header))?,
    };
    let summary = format!("{} schedule for n = {}: {} steps", args.generator.name(), args.n, length);
    match &args.output {
        Some(path) => {
            write(path, &body)?;
            Ok(Outcome::new(String::new(), EXIT_OK).note(summary))
        }
        None => Ok(Outcome::new(body, EXIT_OK).note(summary)),
    }
}

/// Integers as JSON numbers, other rationals as `"p/q"` strings, infinity as null.
fn rational_json(d: Distance<Rational64>) -> Value {
    match d {
        Distance::Infinite => Value::Null,
        Distance::Finite(r) if r.is_integer() => json!(r.to_integer()),
        Distance::Finite(r) => json!(r.to_string()),
    }
}

fn distances_json(d: &DistanceVector<Rational64>) -> Value {
    Value::Array(d.as_slice().iter().map(|&x| rational_json(x)).collect())
}

fn cmd_run(args: &RunArgs) -> Result<Outcome> {
    let g = Digraph::from_text(&read(&args.graph)?)?;
    let w = parse_weights(&read(&args.weights)?, &g)?;
    let s = Schedule::parse(&read(&args.schedule)?, g.vertex_count())?;
    let d = run_schedule(&g, &w, &s)?;
    let residue = detect_negative_cycle_residue(&g, &w, &d);
    let (exact, negative_cycle, correct, code) = match exact_distances(&g, &w) {
        Ok(exact) => {
            let correct = exact == d;
            (distances_json(&exact), Value::Null, Some(correct), EXIT_OK)
        }
        Err(EngineError::NegativeCycle(report)) => {
            let vertices: Vec<usize> = report.vertices.iter().map(|v| v.index()).collect();
            (Value::Null, json!(vertices), None, EXIT_NEGATIVE)
        }
        Err(other) => return Err(other.into()),
    };
    let report = json!({
        "n": g.vertex_count(),
        "source": g.source().index(),
        "schedule_length": s.len(),
        "distances": distances_json(&d),
        "exact_distances": exact,
        "correct": correct,
        "negative_cycle": negative_cycle,
        "relaxation_residue": residue,
    });
    Ok(Outcome::new(to_json(&report)?, code))
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    valid: Option<bool>,
    witness: Option<Vec<usize>>,
    paths_checked: Option<u64>,
    budget_exhausted: bool,
}

fn cmd_validate(args: &ValidateArgs, budget: Budget) -> Result<Outcome> {
    let g = Digraph::from_text(&read(&args.graph)?)?;
    let s = Schedule::parse(&read(&args.schedule)?, g.vertex_count())?;
    let result = match args.k {
        Some(k) => is_k_valid(&s, &g, k, budget),
        None => is_valid(&s, &g, budget),
    };
    let (report, code) = match result {
        Ok(r) => (
            ValidateReport {
                valid: Some(r.valid),
                witness: r.witness.as_ref().map(|p| p.indices()),
                paths_checked: Some(r.paths_checked),
                budget_exhausted: false,
            },
            if r.valid { EXIT_OK } else { EXIT_NEGATIVE },
        ),
        Err(ValidityError::BudgetExceeded(_)) => (
            ValidateReport {
                valid: None,
                witness: None,
                paths_checked: None,
                budget_exhausted: true,
            },
            EXIT_REFUSED,
        ),
        Err(other) => return Err(other.into()),
    };
    Ok(Outcome::new(to_json(&report)?, code))
}

fn cmd_audit(args: &AuditArgs) -> Result<Outcome> {
    let g = Digraph::complete(args.n)?;
    let s = Schedule::parse(&read(&args.schedule)?, args.n)?;
    s.check_targets(&g)?;
    let audit = audit_lower_bound(&s, &g)?;
    let code = if audit.all_universal { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(Outcome::new(to_json(&audit)?, code))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<Outcome> {
    let instance: ApsInstance = serde_json::from_str(&read(&args.instance)?).context("parsing APS instance")?;
    let out = aps_to_validity(&instance)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    write(&args.out_dir.join("graph.txt"), &out.graph.to_text())?;
    write(&args.out_dir.join("schedule.txt"), &out.schedule.to_text())?;
    let manifest = to_json(&out.manifest())?;
    write(&args.out_dir.join("manifest.json"), &manifest)?;
    Ok(Outcome::new(manifest, EXIT_OK).note(format!("wrote {}", args.out_dir.display())))
}

/// One row of the bench table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub generator: String,
    pub parameters: String,
    pub n: usize,
    pub length: usize,
    pub length_per_n3: f64,
    /// `true`, `false`, `refused`, or empty when not requested.
    pub verified: String,
    pub certified_lower_bound: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

/// Builds the bench rows for every `(generator, n)` cell, generators varying
/// fastest. Budget refusals are recorded in the row.
pub fn bench_rows(n_range: std::ops::RangeInclusive<usize>, generators: &[Generator], verify: bool, seed: u64, budget: Budget, timing: bool) -> Result<Vec<ExperimentReport>> {
    let mut rows = Vec::new();
    for n in n_range {
        let g = Digraph::complete(n)?;
        for &generator in generators {
            let started = Instant::now();
            let (schedule, header) = generate_schedule(generator, n, None, None, seed)?;
            let verified = if !verify {
                String::new()
            } else {
                match is_valid(&schedule, &g, budget) {
                    Ok(report) => report.valid.to_string(),
                    Err(ValidityError::BudgetExceeded(_)) => "refused".to_string(),
                    Err(other) => return Err(other.into()),
                }
            };
            let certified_lower_bound = if n >= 4 { audit_lower_bound(&schedule, &g)?.certified_lower_bound } else { None };
            let parameters = header.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
            rows.push(ExperimentReport {
                generator: generator.name().to_string(),
                parameters,
                n,
                length: schedule.len(),
                length_per_n3: schedule.len() as f64 / (n * n * n) as f64,
                verified,
                certified_lower_bound,
                seed: header.seed,
                wall_ms: timing.then(|| started.elapsed().as_secs_f64() * 1e3),
            });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[ExperimentReport]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

fn cmd_bench(args: &BenchArgs, budget: Budget) -> Result<Outcome> {
    if args.n_min == 0 || args.n_min > args.n_max {
        bail!("need 1 <= n-min <= n-max");
    }
    let rows = bench_rows(args.n_min..=args.n_max, &args.generators, args.verify, args.seed, budget, args.timing)?;
    let refused = rows.iter().filter(|r| r.verified == "refused").count();
    let mut outcome = Outcome::new(rows_to_csv(&rows)?, EXIT_OK);
    if refused > 0 {
        outcome = outcome.note(format!("{refused} row(s) exceeded the search budget"));
    }
    Ok(outcome)
}
