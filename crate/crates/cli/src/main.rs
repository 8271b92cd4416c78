use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isoresidual::verify::Suite;
use isoresidual_cli::request::split_list;
use isoresidual_cli::{run_batch, run_count, run_multipliers, run_verify, verify_bounds, CliError, CountReport, CountRequest};

/// Count meromorphic differentials with prescribed residues.
#[derive(Parser)]
#[command(name = "isoresidual", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count one fiber, with per-s terms and partitions.
    Count {
        #[command(flatten)]
        input: Input,
        /// Cross-check against the level-graph recursion.
        #[arg(long)]
        recursive: bool,
        /// Cross-check against elimination (at most 3 poles).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count one fiber of at most 3 poles and compare with elimination.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification sweep.
    Verify {
        /// identities, special-cases, recursion, oracle, monotonic or degree.
        suite: Suite,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        b_max: Option<u64>,
        #[arg(long)]
        sum_b_max: Option<u64>,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Run a JSON-lines file of count requests ("-" reads stdin).
    Batch { path: PathBuf },
    /// Count polynomials with simple fixed points of the given multipliers.
    Multipliers {
        /// Comma-separated multipliers, e.g. "0,1/2,4/3" or "i,-i,2,-2".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        recursive: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Input {
    /// a,b1,...,bn
    #[arg(long, conflicts_with = "b")]
    mu: Option<String>,
    /// b1,...,bn with a inferred
    #[arg(long)]
    b: Option<String>,
    /// Residues r1,...,rn, e.g. "2,-1,-1" or "1/2,i,-1/2-i".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "vanishings")]
    rho: Option<String>,
    /// Generators of the vanishing subsets, e.g. "1,2;3,4".
    #[arg(long)]
    vanishings: Option<String>,
    /// Seed for realizing vanishings as residues.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Input {
    fn request(self, recursive: bool, oracle: bool) -> CountRequest {
        CountRequest {
            mu: self.mu.as_deref().map(split_list),
            b: self.b.as_deref().map(split_list),
            rho: self.rho.as_deref().map(split_list),
            vanishings: self.vanishings,
            recursive,
            oracle,
            seed: self.seed,
        }
    }
}

fn emit_count(report: &CountReport, json: bool) -> Result<u8, CliError> {
    let mut out = io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, report).map_err(|e| CliError::Internal(e.to_string()))?;
        writeln!(out)?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(if report.consistent() { 0 } else { 3 })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Count { input, recursive, oracle, json } => emit_count(&run_count(&input.request(recursive, oracle))?, json),
        Command::Oracle { input, json } => emit_count(&run_count(&input.request(false, true))?, json),
        Command::Multipliers { lambda, recursive, json } => emit_count(&run_multipliers(&split_list(&lambda), recursive)?, json),
        Command::Verify { suite, n_max, b_max, sum_b_max, seeds, seed, json } => {
            let report = run_verify(suite, verify_bounds(suite, n_max, b_max, sum_b_max, seeds, seed))?;
            let mut out = io::stdout().lock();
            if json {
                serde_json::to_writer(&mut out, &report).map_err(|e| CliError::Internal(e.to_string()))?;
                writeln!(out)?;
            } else {
                writeln!(out, "{report}")?;
                for note in &report.notes {
                    writeln!(out, "  {note}")?;
                }
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Batch { path } => {
            let out = BufWriter::new(io::stdout().lock());
            let summary = if path.as_os_str() == "-" {
                run_batch(io::stdin().lock(), out)?
            } else {
                let file = File::open(&path)
                    .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
                run_batch(BufReader::new(file), out)?
            };
            Ok(if summary.failed > 0 || summary.inconsistent > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
