//! Command-line front end: code construction, verification reports,
//! fidelity tables, Taylor-coefficient comparisons, and dense-oracle runs.
//!
//! Every failure path exits nonzero with a single-line machine-parsable
//! reason as the last line of output. Exit codes: 0 success, 2 validation
//! failure, 3 check failure, 4 I/O failure. Identical invocations produce
//! byte-identical outputs.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use picodes::code_builder::{
    descriptor_json, gram_matrix, parse_descriptor, validate, validate_allow_odd,
};
use picodes::damping_analytics::{cross_term_vanishes, CrossTermVerdict};
use picodes::dense_oracle::{oracle_suite, render_report};
use picodes::error::Error as CoreError;
use picodes::exact_poly::rational_string;
use picodes::fidelity_bound::{
    bound_table_csv, fidelity_lower_bound, gamma_grid, taylor_comparison, taylor_report_text,
};
use picodes::number_theory::{build_coprime_sequence, prime_index, verify_no_interior_collision};
use picodes::CodeParameters;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "picodes",
    version,
    about = "Exact construction and verification of permutation-invariant codes under amplitude damping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate parameters and write the code descriptor.
    Build(BuildArgs),
    /// Evaluate the fidelity lower bound over a γ-grid and emit CSV.
    Fidelity(FidelityArgs),
    /// Compare extracted Taylor coefficients against the reference formulas.
    Taylor(TaylorArgs),
    /// Run the dense-oracle check suite at small m.
    Oracle(OracleArgs),
    /// Report pairwise overlaps and Diophantine collision analysis.
    Check(CheckArgs),
}

/// Code selection shared by the subcommands: either a descriptor file or
/// raw parameters.
#[derive(Args)]
struct CodeArgs {
    /// Read the code from a previously written descriptor file.
    #[arg(long, conflicts_with_all = ["n", "primes_from", "q", "allow_odd"])]
    code: Option<PathBuf>,
    /// Comma-separated block sizes, e.g. 5,6,7.
    #[arg(long, value_delimiter = ',', conflicts_with = "primes_from")]
    n: Vec<u64>,
    /// Use consecutive primes (and one successor) starting at this prime.
    #[arg(long)]
    primes_from: Option<u64>,
    /// Number of blocks when --primes-from is used.
    #[arg(long = "D", requires = "primes_from")]
    levels: Option<usize>,
    /// Replication exponent: m = N^q.
    #[arg(long)]
    q: Option<u32>,
    /// Accept an odd block-size product.
    #[arg(long)]
    allow_odd: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Write the descriptor here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Log,
    Linear,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Smallest damping rate on the grid (inclusive).
    #[arg(long, default_value_t = 1e-4)]
    gamma_min: f64,
    /// Largest damping rate on the grid (inclusive).
    #[arg(long, default_value_t = 1e-2)]
    gamma_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Grid spacing.
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    spacing: Spacing,
    /// Add the Gram-discounted bound column.
    #[arg(long)]
    discounted: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TaylorArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Qubit count for the dense simulation (≤ 14).
    #[arg(long)]
    m: usize,
    /// Damping rate.
    #[arg(long)]
    gamma: f64,
    /// Seed for the random permutations and test states.
    #[arg(long)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Io(PathBuf, std::io::Error),
    Check(String),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "IoError: {}: {e}", path.display()),
            CliError::Check(s) => write!(f, "CheckFailed: {s}"),
            CliError::Usage(s) => write!(f, "BadFlags: {s}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                CoreError::CollisionFound(_)
                | CoreError::IdentityViolation { .. }
                | CoreError::NotCorrectable(_) => 3,
                _ => 2,
            },
            CliError::Io(..) => 4,
            CliError::Check(_) => 3,
            CliError::Usage(_) => 2,
        }
    }
}

// ---------------------------------------------------------------------------
// Plumbing
// ---------------------------------------------------------------------------

fn resolve(args: &CodeArgs) -> Result<CodeParameters, CliError> {
    if let Some(path) = &args.code {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
        return Ok(parse_descriptor(&text)?);
    }
    let q = args
        .q
        .ok_or_else(|| CliError::Usage("--q is required unless --code is given".into()))?;
    let n: Vec<u64> = if let Some(p) = args.primes_from {
        let levels = args
            .levels
            .ok_or_else(|| CliError::Usage("--D is required with --primes-from".into()))?;
        let k = prime_index(p)
            .ok_or_else(|| CliError::Usage(format!("--primes-from {p} is not prime")))?;
        build_coprime_sequence(k, levels)?.values().to_vec()
    } else if !args.n.is_empty() {
        args.n.clone()
    } else {
        return Err(CliError::Usage(
            "give --n, --primes-from, or --code".into(),
        ));
    };
    let params = if args.allow_odd {
        validate_allow_odd(&n, q)?
    } else {
        validate(&n, q)?
    };
    Ok(params)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parameter_summary(params: &CodeParameters) -> Result<String, CliError> {
    let mut text = String::new();
    text.push_str(&format!("n = {:?}\n", params.n()));
    match params.q() {
        Some(q) => text.push_str(&format!("q = {q}\n")),
        None => text.push_str("q = none (legacy parameters)\n"),
    }
    text.push_str(&format!("N = {}\n", params.big_n()));
    text.push_str(&format!("g = {:?}\n", params.g()));
    text.push_str(&format!("m = {}\n", params.m()));
    let gram = gram_matrix(params)?;
    for d in 0..params.num_levels() {
        for d2 in d + 1..params.num_levels() {
            text.push_str(&format!(
                "gram[{}][{}] = {}\n",
                d + 1,
                d2 + 1,
                rational_string(&gram[d][d2])
            ));
        }
    }
    Ok(text)
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    let params = resolve(&args.code)?;
    let json = descriptor_json(&params)?;
    print!("{}", parameter_summary(&params)?);
    match &args.out {
        Some(path) => {
            fs::write(path, &json).map_err(|e| CliError::Io(path.clone(), e))?;
            println!("descriptor written to {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_fidelity(args: &FidelityArgs) -> Result<(), CliError> {
    let params = resolve(&args.code)?;
    let grid = gamma_grid(
        args.gamma_min,
        args.gamma_max,
        args.count,
        args.spacing == Spacing::Log,
    )?;
    let report = fidelity_lower_bound(&params, &grid)?;
    emit(&args.out, &bound_table_csv(&report, args.discounted))
}

fn cmd_taylor(args: &TaylorArgs) -> Result<(), CliError> {
    let params = resolve(&args.code)?;
    let comparison = taylor_comparison(&params)?;
    emit(&args.out, &taylor_report_text(&params, &comparison))?;
    if comparison.first_order_delta < num::BigRational::from_integer(0.into()) {
        return Err(CliError::Check(
            "extracted first-order coefficient falls below the reference bound".into(),
        ));
    }
    if let Some(row) = comparison.q_scaling.iter().find(|r| !r.within_envelope) {
        return Err(CliError::Check(format!(
            "first-order magnitude at q={} exceeds its envelope",
            row.q
        )));
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let lines = oracle_suite(args.m, args.gamma, args.seed)?;
    emit(&args.out, &render_report(&lines))?;
    let failures = lines.iter().filter(|l| !l.pass()).count();
    if failures > 0 {
        return Err(CliError::Check(format!(
            "{failures} of {} oracle checks failed",
            lines.len()
        )));
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let params = resolve(&args.code)?;
    let mut text = parameter_summary(&params)?;
    let mut failures: Vec<String> = Vec::new();

    if params.is_legacy() {
        text.push_str("diophantine analysis skipped (legacy parameters)\n");
    } else {
        let records = verify_no_interior_collision(&params)?;
        for r in &records {
            text.push_str(&format!(
                "pair ({},{}): gcd = {}, first shared weight = {}\n",
                r.d, r.d2, r.gcd, r.lcm
            ));
        }
        let levels = params.num_levels();
        for d in 1..=levels {
            for d2 in d + 1..=levels {
                for shift in [-1i64, 0, 1] {
                    let verdict = cross_term_vanishes(&params, d, d2, shift);
                    let line = match &verdict {
                        CrossTermVerdict::Vanishes {
                            diophantine_obstruction,
                        } => format!(
                            "cross({d},{d2},shift={shift:+}): vanishes [{}]",
                            if *diophantine_obstruction {
                                "diophantine obstruction"
                            } else {
                                "no index pair in range"
                            }
                        ),
                        CrossTermVerdict::Collides { t, t2, weight } => {
                            format!(
                                "cross({d},{d2},shift={shift:+}): collides at weight {weight} (t={t}, t2={t2})"
                            )
                        }
                    };
                    text.push_str(&line);
                    text.push('\n');
                    let acceptable = match &verdict {
                        CrossTermVerdict::Vanishes { .. } => true,
                        // A shared weight of the two supports is the known
                        // boundary collision only at the very top, w = N.
                        CrossTermVerdict::Collides { weight, .. } => {
                            shift == 0 && *weight == params.big_n()
                        }
                    };
                    if !acceptable {
                        failures.push(format!("cross({d},{d2},shift={shift:+})"));
                    }
                }
            }
        }
    }

    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    text.push_str(&format!("verdict: {verdict}\n"));
    emit(&args.out, &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join(", ")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Fidelity(args) => cmd_fidelity(args),
        Command::Taylor(args) => cmd_taylor(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
