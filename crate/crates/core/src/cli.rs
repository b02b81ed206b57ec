//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure (or a failed certificate in
//! `compare`), 2 bad flags or invalid input, 3 internal-consistency error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::dp::DpOptions;
use crate::error::Error;
use crate::instance::{generate_instance, parse_instance, validate_schedule, Instance, Schedule, TreeShape};
use crate::oracle::{greedy_baseline, solve_exact, DEFAULT_NODE_BUDGET};
use crate::rounding::Epsilon;
use crate::scalar::ExactScalar;
use crate::search::{certify, solve};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Column layout of `compare` output, version 1.
pub const COMPARE_HEADER_V1: &str =
    "label,n,m,seed,epsilon,opt,ptas_makespan,greedy_makespan,ratio,decide_calls,wall_seconds";

#[derive(Debug, Parser)]
#[command(name = "treesched", version, about = "Makespan scheduling on tree-hierarchical machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the approximation scheme and print the schedule JSON.
    Solve(SolveArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Check an instance, and optionally a schedule against it.
    Validate(ValidateArgs),
    /// Compute the exact optimum by branch-and-bound.
    Exact(ExactArgs),
    /// Benchmark the scheme against the exact optimum and greedy, as CSV.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Accuracy as a fraction a/b in (0,1].
    #[arg(long)]
    epsilon: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dominance_prune: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    machines: u64,
    #[arg(long)]
    jobs: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
    #[arg(long, value_enum)]
    shape: TreeShape,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Inclusive seed range, e.g. 1..5.
    #[arg(long, value_parser = parse_seed_range)]
    seeds: SeedRange,
    /// Comma-separated fractions, e.g. 1/1,1/2.
    #[arg(long, value_delimiter = ',', required = true)]
    epsilons: Vec<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    machines: u64,
    #[arg(long)]
    jobs: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
    #[arg(long, value_enum)]
    shape: TreeShape,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Oracle node budget; rows over budget report "-" for the optimum.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Fill the wall_seconds column (otherwise "-", keeping output reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    dominance_prune: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SeedRange {
    first: u64,
    last: u64,
}

fn parse_seed_range(s: &str) -> Result<SeedRange, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let first = a.trim().parse().map_err(|_| format!("bad seed {a:?}"))?;
    let last = b.trim().parse().map_err(|_| format!("bad seed {b:?}"))?;
    if first > last {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(SeedRange { first, last })
}

/// One line of `compare` output.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub epsilon: Epsilon,
    pub opt: Option<u64>,
    pub ptas_makespan: u64,
    pub greedy_makespan: u64,
    pub decide_calls: usize,
    pub wall_seconds: Option<f64>,
    pub certified: bool,
}

impl CompareRow {
    /// `ptas / opt` as an exact rational, when the optimum is known.
    pub fn ratio(&self) -> Option<Rational> {
        self.opt.map(|opt| {
            if opt == 0 {
                Rational::from_u64(1)
            } else {
                Rational::from_fraction(self.ptas_makespan, opt)
            }
        })
    }

    pub fn to_csv(&self) -> String {
        let opt = self.opt.map_or_else(|| "-".to_string(), |o| o.to_string());
        let ratio = self
            .ratio()
            .map_or_else(|| "-".to_string(), |r| format!("{:.6}", r.to_f64().unwrap_or(f64::NAN)));
        let wall = self.wall_seconds.map_or_else(|| "-".to_string(), |w| format!("{w:.6}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.label,
            self.n,
            self.m,
            self.seed,
            self.epsilon,
            opt,
            self.ptas_makespan,
            self.greedy_makespan,
            ratio,
            self.decide_calls,
            wall
        )
    }
}

/// Builds one compare row: oracle, scheme and greedy on a generated instance.
pub fn compare_row(inst: &Instance, seed: u64, shape: TreeShape, eps: Epsilon, budget: u64, options: DpOptions, timing: bool) -> Result<CompareRow, Error> {
    let start = Instant::now();
    let result = solve::<Rational>(inst, eps, options)?;
    let wall = start.elapsed().as_secs_f64();
    let opt = match solve_exact(inst, Some(budget)) {
        Ok(r) => Some(r.opt),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    let certified = certify(inst, &result, opt).passed();
    Ok(CompareRow {
        label: format!("{shape}-m{}-n{}-s{seed}", inst.machine_count(), inst.job_count()),
        n: inst.job_count(),
        m: inst.machine_count(),
        seed,
        epsilon: eps,
        opt,
        ptas_makespan: result.schedule.makespan,
        greedy_makespan: greedy_baseline(inst).makespan,
        decide_calls: result.decide_calls,
        wall_seconds: timing.then_some(wall),
        certified,
    })
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read_file(path)?)
        .map_err(|e| Failure::usage(format!("invalid instance {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => writeln!(stdout, "{text}").map_err(|e| Failure::usage(e.to_string())),
    }
}

fn cmd_solve(args: SolveArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let eps: Epsilon = args.epsilon.parse()?;
    let inst = read_instance(&args.instance)?;
    let options = DpOptions { dominance_prune: args.dominance_prune };
    let result = solve::<Rational>(&inst, eps, options)?;
    emit(&args.out, &result.schedule.to_json(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_generate(args: GenerateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = generate_instance(args.seed, args.machines as usize, args.jobs, args.max_size, args.shape);
    emit(&args.out, &inst.to_json(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_validate(args: ValidateArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = match parse_instance(&read_file(&args.instance)?) {
        Ok(inst) => inst,
        Err(e) => {
            writeln!(stdout, "invalid instance: {e}").ok();
            return Ok(EXIT_INVALID);
        }
    };
    let Some(path) = args.schedule else {
        writeln!(stdout, "ok").ok();
        return Ok(EXIT_OK);
    };
    let schedule = match Schedule::from_json(&read_file(&path)?) {
        Ok(s) => s,
        Err(e) => {
            writeln!(stdout, "invalid schedule: {e}").ok();
            return Ok(EXIT_INVALID);
        }
    };
    match validate_schedule(&inst, &schedule) {
        Ok(()) => {
            writeln!(stdout, "ok").ok();
            Ok(EXIT_OK)
        }
        Err(violations) => {
            for v in violations {
                writeln!(stdout, "{v}").ok();
            }
            Ok(EXIT_INVALID)
        }
    }
}

fn cmd_exact(args: ExactArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = read_instance(&args.instance)?;
    match solve_exact(&inst, args.budget) {
        Ok(r) => {
            writeln!(stdout, "opt {}", r.opt).ok();
            writeln!(stdout, "{}", r.schedule.to_json()).ok();
            Ok(EXIT_OK)
        }
        Err(Error::BudgetExceeded(b)) => {
            Err(Failure { code: EXIT_INVALID, message: format!("node budget {b} exhausted") })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_compare(args: CompareArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let epsilons: Vec<Epsilon> = args
        .epsilons
        .iter()
        .map(|s| s.parse::<Epsilon>())
        .collect::<Result<_, _>>()?;
    let options = DpOptions { dominance_prune: args.dominance_prune };
    let cells: Vec<(u64, Epsilon)> = (args.seeds.first..=args.seeds.last)
        .flat_map(|seed| epsilons.iter().map(move |&eps| (seed, eps)))
        .collect();
    let rows: Vec<CompareRow> = cells
        .par_iter()
        .map(|&(seed, eps)| {
            let inst = generate_instance(seed, args.machines as usize, args.jobs, args.max_size, args.shape);
            compare_row(&inst, seed, args.shape, eps, args.budget, options, args.timing)
        })
        .collect::<Result<_, _>>()?;

    let mut csv = String::from(COMPARE_HEADER_V1);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    match &args.csv {
        Some(path) => fs::write(path, &csv)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => write!(stdout, "{csv}").map_err(|e| Failure::usage(e.to_string()))?,
    }
    let failed: Vec<&CompareRow> = rows.iter().filter(|r| !r.certified).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        let labels: Vec<String> = failed.iter().map(|r| format!("{} eps={}", r.label, r.epsilon)).collect();
        Err(Failure { code: EXIT_INVALID, message: format!("certification failed: {}", labels.join(", ")) })
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                write!(stderr, "{rendered}").ok();
            } else {
                write!(stdout, "{rendered}").ok();
            }
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Validate(a) => cmd_validate(a, stdout),
        Command::Exact(a) => cmd_exact(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            writeln!(stderr, "error: {}", failure.message).ok();
            failure.code
        }
    }
}
