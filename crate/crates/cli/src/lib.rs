//! Library side of the `isoresidual` command: request validation, the
//! count, batch, multiplier and verify runners, and their reports.

pub mod report;
pub mod request;

use std::io::{self, BufRead, Write};

use serde::Serialize;
use thiserror::Error;

use isoresidual::arith::GaussianRational;
use isoresidual::counting::count_closed_form;
use isoresidual::levelgraph::{PlanCache, RecursionConfig};
use isoresidual::oracle::{multipliers_to_residues, oracle_count, oracle_count_zero_residues, OracleCount};
use isoresidual::profile::ResidueTuple;
use isoresidual::verify::{run_suite, Bounds, Suite, SuiteReport};

pub use report::{CountReport, OracleReport, RecursionReport, TermReport};
pub use request::CountRequest;
use request::Source;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// A computation failed in a way valid input should not allow. Exit code 3.
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// Validate and count, adding the cross-checks the request asks for.
pub fn run_count(req: &CountRequest) -> Result<CountReport, CliError> {
    let v = req.validate()?;
    let breakdown = count_closed_form(&v.profile, &v.structure).map_err(internal)?;
    let total = breakdown.total.to_string();

    let recursion = if req.recursive {
        let mut cache = PlanCache::new(RecursionConfig::default());
        let plan = cache.recursion(&v.structure).map_err(internal)?;
        let trace = plan.trace(&v.profile).map_err(internal)?;
        Some(RecursionReport { total: trace.total.clone(), matches: trace.total == total, trace })
    } else {
        None
    };

    let oracle = if req.oracle {
        let rho = match &v.source {
            Source::Residues(rho) => rho.clone(),
            Source::Vanishings(s) => s.realize(req.seed).map_err(internal)?,
        };
        let found: OracleCount = if rho.is_zero() {
            oracle_count_zero_residues(&v.profile)
        } else {
            oracle_count(&v.profile, &rho)
        }
        .map_err(internal)?;
        Some(OracleReport {
            residues: rho.to_strings(),
            count: found.count.to_string(),
            eliminant: found.eliminant.to_string(),
            squarefree: found.squarefree,
            matches: found.count == breakdown.total,
        })
    } else {
        None
    };

    Ok(CountReport {
        input: req.clone(),
        a: v.profile.a().to_string(),
        b: v.profile.b().iter().map(u64::to_string).collect(),
        multipliers: None,
        closure: v.structure.closure().iter().map(ToString::to_string).collect(),
        generators: v.structure.generators().iter().map(ToString::to_string).collect(),
        rank: v.structure.rank(),
        terms: breakdown
            .per_s
            .iter()
            .map(|t| TermReport {
                s: t.s,
                value: t.value.to_string(),
                partitions: t.partitions.iter().map(ToString::to_string).collect(),
            })
            .collect(),
        max_s: breakdown.max_s,
        total,
        warnings: breakdown.warnings.iter().map(ToString::to_string).collect(),
        recursion,
        oracle,
    })
}

/// Count the polynomials with simple fixed points of the given multipliers,
/// through the residues `1 / (1 - lambda)` on the all-simple-pole profile.
pub fn run_multipliers(lambdas: &[String], recursive: bool) -> Result<CountReport, CliError> {
    let values = lambdas
        .iter()
        .map(|t| GaussianRational::parse(t).map_err(|e| CliError::Validation(format!("multiplier {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let rho: ResidueTuple = multipliers_to_residues(&values).map_err(|e| CliError::Validation(e.to_string()))?;
    let req = CountRequest {
        b: Some(vec!["1".to_string(); rho.n()]),
        rho: Some(rho.to_strings()),
        recursive,
        ..CountRequest::default()
    };
    let mut report = run_count(&req)?;
    report.multipliers = Some(values.iter().map(ToString::to_string).collect());
    Ok(report)
}

/// One line of batch output: a report, or the error for that line.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum BatchLine {
    Report(Box<CountReport>),
    Error { line: usize, error: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub processed: usize,
    /// Lines that failed to parse or validate.
    pub failed: usize,
    /// Reports whose cross-checks disagreed.
    pub inconsistent: usize,
}

/// Run every nonblank line of `input` as a JSON count request, writing one
/// JSON line per request in order. Line numbers are 1-based.
pub fn run_batch(input: impl BufRead, mut out: impl Write) -> Result<BatchSummary, CliError> {
    let mut summary = BatchSummary::default();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        summary.processed += 1;
        let result = serde_json::from_str::<CountRequest>(&line)
            .map_err(|e| CliError::Validation(format!("malformed request: {e}")))
            .and_then(|req| run_count(&req));
        let entry = match result {
            Ok(report) => {
                if !report.consistent() {
                    summary.inconsistent += 1;
                }
                BatchLine::Report(Box::new(report))
            }
            Err(e) => {
                summary.failed += 1;
                BatchLine::Error { line: k + 1, error: e.to_string() }
            }
        };
        serde_json::to_writer(&mut out, &entry).map_err(internal)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(summary)
}

/// Bounds for `suite`, with any given values replacing the defaults.
pub fn verify_bounds(
    suite: Suite,
    n_max: Option<usize>,
    b_max: Option<u64>,
    sum_b_max: Option<u64>,
    seeds: Option<u64>,
    seed: Option<u64>,
) -> Bounds {
    let d = suite.default_bounds();
    Bounds {
        n_max: n_max.unwrap_or(d.n_max),
        b_max: b_max.unwrap_or(d.b_max),
        sum_b_max: sum_b_max.unwrap_or(d.sum_b_max),
        seeds: seeds.unwrap_or(d.seeds),
        seed: seed.unwrap_or(d.seed),
    }
}

pub fn run_verify(suite: Suite, bounds: Bounds) -> Result<SuiteReport, CliError> {
    if bounds.n_max > 8 {
        return Err(CliError::Validation(format!("--n-max {} is too large; sweeps support at most 8", bounds.n_max)));
    }
    Ok(run_suite(suite, bounds))
}
