//! Command-line front end.
//!
//! Every subcommand except `bench` reads instance records (JSON lines or
//! CSV) and writes one JSON line per input record, in input order.
//! Exit codes: `0` when every record succeeded, `2` when some record was
//! unreachable, degenerate or had a zero direction, `1` on usage errors or
//! malformed input.

pub mod records;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{self, BenchConfig};
use crate::domain::{effective_norm, ProblemInstance};
use crate::error::Error;
use crate::grad::gradient_eta;
use crate::noise::{clipping_aware_noise, record_rng, rescale_then_clip, NoiseDistribution};
use crate::solver::{solve_eta, BreakpointProfile};
use records::{
    status_of, Defaults, GradientRecord, InstanceRecord, NoiseRecord, NormRecord, SolutionRecord,
    Status,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED_RECORDS: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "clipscale",
    version,
    about = "Clipping-aware rescaling of perturbations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for eta on every record.
    Solve(SolveArgs),
    /// Evaluate the clipped perturbation norm at a fixed eta.
    Norm(NormArgs),
    /// Emit partial derivatives of eta.
    Grad(GradArgs),
    /// Draw random directions and rescale them to the budget after clipping.
    Noise(NoiseArgs),
    /// Time the analytic solver against bisection.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Gaussian,
    Uniform,
}

impl From<Dist> for NoiseDistribution {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Gaussian => NoiseDistribution::Gaussian,
            Dist::Uniform => NoiseDistribution::Uniform,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Read records from this file instead of stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write records to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: InputFormat,
    /// CSV columns holding x, e.g. `0-3` or `x0,x1`.
    #[arg(long)]
    pub x_cols: Option<String>,
    /// CSV columns holding delta.
    #[arg(long)]
    pub delta_cols: Option<String>,
    /// Norm order for records that do not set `p`.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Lower box bound for records that do not set `a`.
    #[arg(long = "min", default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Upper box bound for records that do not set `b`.
    #[arg(long = "max", default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Target norm for records that do not set `eps`.
    #[arg(long)]
    pub eps: Option<f64>,
}

impl IoArgs {
    fn defaults(&self) -> Defaults {
        Defaults {
            eps: self.eps,
            p: self.p,
            a: self.a,
            b: self.b,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Include clip(x + eta * delta) in each output record.
    #[arg(long)]
    pub emit_vector: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Scale at which to evaluate the norm.
    #[arg(long)]
    pub eta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GradArgs {
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: Dist,
    /// Seed for all draws; a fresh one is generated and reported when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also emit the drawn direction.
    #[arg(long)]
    pub emit_vector: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub batch: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bisection residual tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_bisect: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the selected subcommand.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs against the process's standard streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(
        args,
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] Error),
}

/// One input record, or the reason its line could not be parsed.
struct Item {
    line: usize,
    record: Result<InstanceRecord, String>,
}

fn execute(
    command: Command,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    match command {
        Command::Solve(args) => {
            let defaults = args.io.defaults();
            let emit = args.emit_vector;
            process(&args.io, stdin, stdout, stderr, |_, item| {
                match &item.record {
                    Ok(rec) => solve_record(rec, &defaults, emit),
                    Err(msg) => invalid_solution(msg),
                }
            })
        }
        Command::Norm(args) => {
            let mut defaults = args.io.defaults();
            defaults.eps.get_or_insert(0.0);
            let eta = args.eta;
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--eta must be finite and non-negative, got {eta}"
                )));
            }
            process(&args.io, stdin, stdout, stderr, |_, item| {
                match &item.record {
                    Ok(rec) => norm_record(rec, &defaults, eta),
                    Err(msg) => NormRecord {
                        error: Some(msg.clone()),
                        ..Default::default()
                    },
                }
            })
        }
        Command::Grad(args) => {
            let defaults = args.io.defaults();
            process(&args.io, stdin, stdout, stderr, |_, item| {
                match &item.record {
                    Ok(rec) => grad_record(rec, &defaults),
                    Err(msg) => GradientRecord {
                        error: Some(msg.clone()),
                        ..Default::default()
                    },
                }
            })
        }
        Command::Noise(args) => {
            let defaults = args.io.defaults();
            let seed = resolve_seed(args.seed, stderr)?;
            let dist = args.dist.into();
            let emit = args.emit_vector;
            process(&args.io, stdin, stdout, stderr, |index, item| {
                match &item.record {
                    Ok(rec) => noise_record(rec, &defaults, dist, seed, index as u64, emit),
                    Err(msg) => NoiseRecord {
                        solution: invalid_solution(msg),
                        naive_norm: None,
                        delta: None,
                    },
                }
            })
        }
        Command::Bench(args) => {
            let seed = resolve_seed(args.seed, stderr)?;
            let config = BenchConfig {
                n: args.n,
                batch: args.batch,
                p: args.p,
                trials: args.trials,
                seed,
                tol: args.tol_bisect,
                ..BenchConfig::default()
            };
            let report = bench::run(&config)?;
            let mut out = open_output(args.output.as_ref(), stdout)?;
            match args.format {
                ReportFormat::Text => out.write_all(report.to_text().as_bytes())?,
                ReportFormat::Jsonl => {
                    for rec in &report.records {
                        writeln!(out, "{}", serde_json::to_string(rec).expect("serializes"))?;
                    }
                }
            }
            out.flush()?;
            Ok(EXIT_OK)
        }
    }
}

fn resolve_seed(seed: Option<u64>, stderr: &mut dyn Write) -> Result<u64, CliError> {
    Ok(match seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            writeln!(stderr, "seed: {s}")?;
            s
        }
    })
}

fn open_output<'a>(
    path: Option<&PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(stdout)),
    })
}

trait HasStatus {
    fn status(&self) -> Status;
}

impl HasStatus for SolutionRecord {
    fn status(&self) -> Status {
        self.status
    }
}

impl HasStatus for NormRecord {
    fn status(&self) -> Status {
        self.status
    }
}

impl HasStatus for GradientRecord {
    fn status(&self) -> Status {
        self.status
    }
}

impl HasStatus for NoiseRecord {
    fn status(&self) -> Status {
        self.solution.status
    }
}

/// Reads all records, maps them in parallel and writes the results in
/// input order.
fn process<R, F>(
    io_args: &IoArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    f: F,
) -> Result<i32, CliError>
where
    R: Serialize + HasStatus + Send,
    F: Fn(usize, &Item) -> R + Sync,
{
    let input: Box<dyn Read + '_> = match &io_args.input {
        Some(path) => Box::new(File::open(path)?),
        None => Box::new(stdin),
    };
    let items = match io_args.format {
        InputFormat::Jsonl => read_jsonl(input)?,
        InputFormat::Csv => read_csv(input, io_args)?,
    };
    for item in &items {
        if let Err(msg) = &item.record {
            writeln!(stderr, "line {}: {msg}", item.line)?;
        }
    }
    let results: Vec<R> = items
        .par_iter()
        .enumerate()
        .map(|(k, item)| f(k, item))
        .collect();

    let mut out = open_output(io_args.output.as_ref(), stdout)?;
    let mut code = EXIT_OK;
    for (item, rec) in items.iter().zip(&results) {
        writeln!(out, "{}", serde_json::to_string(rec).expect("serializes"))?;
        match rec.status() {
            Status::Ok => {}
            Status::Invalid => {
                if item.record.is_ok() {
                    writeln!(stderr, "line {}: invalid record", item.line)?;
                }
                code = EXIT_USAGE;
            }
            _ if code == EXIT_OK => code = EXIT_FAILED_RECORDS,
            _ => {}
        }
    }
    out.flush()?;
    Ok(code)
}

fn read_jsonl(input: Box<dyn Read + '_>) -> Result<Vec<Item>, CliError> {
    let mut items = Vec::new();
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(Item {
            line: k + 1,
            record: InstanceRecord::from_json(&line).map_err(|e| e.to_string()),
        });
    }
    Ok(items)
}

/// Resolves a column list such as `0-3,5` or `x0,x1` against the header.
fn parse_columns(spec: &str, headers: &csv::StringRecord) -> Result<Vec<usize>, CliError> {
    let mut cols = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some(pos) = headers.iter().position(|h| h == token) {
            cols.push(pos);
        } else if let Some((lo, hi)) = token.split_once('-') {
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("bad column range `{token}`")))
            };
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(CliError::Usage(format!("empty column range `{token}`")));
            }
            cols.extend(lo..=hi);
        } else {
            cols.push(
                token
                    .parse()
                    .map_err(|_| CliError::Usage(format!("unknown column `{token}`")))?,
            );
        }
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= headers.len()) {
        return Err(CliError::Usage(format!("column {c} out of range")));
    }
    Ok(cols)
}

fn read_csv(input: Box<dyn Read + '_>, io_args: &IoArgs) -> Result<Vec<Item>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Usage(e.to_string()))?
        .clone();
    let x_cols = io_args
        .x_cols
        .as_deref()
        .ok_or_else(|| CliError::Usage("--x-cols is required for csv input".into()))
        .and_then(|s| parse_columns(s, &headers))?;
    let delta_cols = io_args
        .delta_cols
        .as_deref()
        .map(|s| parse_columns(s, &headers))
        .transpose()?;
    let named = |name: &str| headers.iter().position(|h| h == name);
    let (id_col, eps_col, p_col, a_col, b_col) = (
        named("id"),
        named("eps"),
        named("p"),
        named("a"),
        named("b"),
    );

    let mut items = Vec::new();
    for (k, row) in reader.records().enumerate() {
        // Header is line 1.
        let line = k + 2;
        let record = row.map_err(|e| e.to_string()).and_then(|row| {
            let num = |c: usize| -> Result<f64, String> {
                row.get(c)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|e| format!("column {c}: {e}"))
            };
            let opt = |c: Option<usize>| -> Result<Option<f64>, String> {
                match c.and_then(|c| row.get(c)).filter(|s| !s.is_empty()) {
                    Some(s) => s.parse().map(Some).map_err(|e| format!("{e}")),
                    None => Ok(None),
                }
            };
            Ok(InstanceRecord {
                id: id_col.and_then(|c| row.get(c)).map(str::to_owned),
                x: x_cols.iter().map(|&c| num(c)).collect::<Result<_, _>>()?,
                delta: delta_cols
                    .as_ref()
                    .map(|cols| cols.iter().map(|&c| num(c)).collect::<Result<_, _>>())
                    .transpose()?,
                eps: opt(eps_col)?,
                p: opt(p_col)?,
                a: opt(a_col)?,
                b: opt(b_col)?,
            })
        });
        items.push(Item { line, record });
    }
    Ok(items)
}

fn invalid_solution(msg: &str) -> SolutionRecord {
    SolutionRecord {
        status: Status::Invalid,
        error: Some(msg.to_owned()),
        ..Default::default()
    }
}

fn solve_record(rec: &InstanceRecord, defaults: &Defaults, emit_vector: bool) -> SolutionRecord {
    let inst = match rec.to_instance(defaults) {
        Ok(inst) => inst,
        Err(e) => return SolutionRecord::failed(rec.id.clone(), &e),
    };
    solution_for(&inst, rec.id.clone(), emit_vector)
}

fn solution_for(inst: &ProblemInstance, id: Option<String>, emit_vector: bool) -> SolutionRecord {
    match solve_eta(inst) {
        Ok(sol) => SolutionRecord {
            id,
            status: Status::Ok,
            eta: Some(sol.eta),
            achieved_norm: Some(sol.achieved_norm),
            saturated_count: Some(sol.saturated_count),
            vector: emit_vector.then(|| inst.perturbed(sol.eta)),
            ..Default::default()
        },
        Err(e) => SolutionRecord::failed(id, &e),
    }
}

fn norm_record(rec: &InstanceRecord, defaults: &Defaults, eta: f64) -> NormRecord {
    let fail = |e: Error| NormRecord {
        id: rec.id.clone(),
        status: status_of(&e),
        error: Some(e.to_string()),
        ..Default::default()
    };
    let inst = match rec.to_instance(defaults) {
        Ok(inst) => inst,
        Err(e) => return fail(e),
    };
    let max_norm = match BreakpointProfile::build(&inst) {
        Ok(profile) => profile.max_norm(),
        Err(e) => return fail(e),
    };
    NormRecord {
        id: rec.id.clone(),
        status: Status::Ok,
        eta: Some(eta),
        effective_norm: Some(effective_norm(&inst, eta)),
        unclipped_norm: Some(eta * inst.p().norm(inst.delta())),
        max_norm: Some(max_norm),
        error: None,
    }
}

fn grad_record(rec: &InstanceRecord, defaults: &Defaults) -> GradientRecord {
    let fail = |e: &Error| GradientRecord {
        id: rec.id.clone(),
        status: status_of(e),
        max_norm: match e {
            Error::Unreachable { max_norm } => Some(*max_norm),
            _ => None,
        },
        error: Some(e.to_string()),
        ..Default::default()
    };
    let solved = rec
        .to_instance(defaults)
        .and_then(|inst| solve_eta(&inst).map(|sol| (inst, sol)));
    let (inst, sol) = match solved {
        Ok(pair) => pair,
        Err(e) => return fail(&e),
    };
    match gradient_eta(&inst, &sol) {
        Ok(g) => GradientRecord {
            id: rec.id.clone(),
            status: Status::Ok,
            eta: Some(sol.eta),
            d_eps: Some(g.d_eps),
            d_x: Some(g.d_x),
            d_delta: Some(g.d_delta),
            at_breakpoint: Some(g.at_breakpoint),
            ..Default::default()
        },
        Err(e) => GradientRecord {
            eta: Some(sol.eta),
            ..fail(&e)
        },
    }
}

fn noise_record(
    rec: &InstanceRecord,
    defaults: &Defaults,
    dist: NoiseDistribution,
    seed: u64,
    index: u64,
    emit_delta: bool,
) -> NoiseRecord {
    let failed = |e: &Error| NoiseRecord {
        solution: SolutionRecord::failed(rec.id.clone(), e),
        naive_norm: None,
        delta: None,
    };
    if rec.delta.is_some() {
        return failed(&Error::InvalidParameter(
            "noise records carry x only; delta is drawn".into(),
        ));
    }
    let (eps, bounds) = match (rec.eps_or(defaults), rec.bounds_or(defaults)) {
        (Ok(eps), Ok(bounds)) => (eps, bounds),
        (Err(e), _) | (_, Err(e)) => return failed(&e),
    };
    let p = rec.p_or(defaults);
    let mut rng = record_rng(seed, index);
    let sample = match clipping_aware_noise(&rec.x, eps, p, bounds, dist, &mut rng) {
        Ok(sample) => sample,
        Err(e) => return failed(&e),
    };
    let naive_norm = rec
        .to_instance_with(sample.delta.clone(), defaults)
        .and_then(|inst| rescale_then_clip(&inst))
        .map(|(_, norm)| norm)
        .ok();
    NoiseRecord {
        solution: SolutionRecord {
            id: rec.id.clone(),
            status: Status::Ok,
            eta: Some(sample.solution.eta),
            achieved_norm: Some(sample.solution.achieved_norm),
            saturated_count: Some(sample.solution.saturated_count),
            vector: Some(sample.perturbed),
            ..Default::default()
        },
        naive_norm,
        delta: emit_delta.then_some(sample.delta),
    }
}
