//! Batch front door: tensor compression via truncated decomposition, ring
//! discovery on black-box products, and tensor rank reports.
//!
//! Exit codes: 0 success (and a tubal verdict for `discover`), 2 bad
//! arguments, 3 I/O or parse failure, 4 numeric failure, 5 a not-tubal
//! verdict from `discover`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use tubal::files::{self, FileError};
use tubal::{
    classify_ring, frobenius_norm, m_rank, multirank, oracle_op, truncate_multirank,
    truncate_rank, tsvd, MultiRank, NotTubalReason, OracleKind, Verdict,
};

#[derive(Parser)]
#[command(name = "tubal", version, about = "Tubal tensor algebra toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a tensor, truncate its decomposition, write the result and a report
    #[command(group(ArgGroup::new("trunc").required(true).args(["rank", "multirank"])))]
    Compress {
        /// Input tensor file (TNS3)
        #[arg(long)]
        input: PathBuf,
        /// Transform name: dft, skew-dft, wht, split-complex, complex-field,
        /// identity, canonical:n,m, file:PATH
        #[arg(long)]
        transform: String,
        /// Truncate every slice to this rank
        #[arg(long)]
        rank: Option<usize>,
        /// Comma-separated per-slice ranks r1,...,rn
        #[arg(long, value_delimiter = ',')]
        multirank: Option<Vec<usize>>,
        /// Output tensor file
        #[arg(long)]
        output: PathBuf,
        /// JSON report path
        #[arg(long)]
        report: PathBuf,
    },
    /// Recover the defining transform of a black-box product
    Discover {
        /// Operation: tprod, negacyclic, xor:k, splitc, dual, table:PATH
        #[arg(long)]
        op: String,
        /// Tube length
        #[arg(long)]
        n: usize,
        /// RNG seed for the random draws
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dims, ranks and singular-tube norms of a tensor as JSON
    Info {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        transform: String,
    },
}

enum CliError {
    /// Semantically bad arguments (exit 2).
    Args(String),
    /// I/O or parse failure (exit 3).
    File(String),
    /// Numeric failure (exit 4).
    Numeric(String),
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::File(e.to_string())
    }
}

impl From<tubal::Error> for CliError {
    fn from(e: tubal::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

/// Bad names are bad arguments; anything wrong with a `file:` transform is
/// an I/O or parse failure.
fn resolve_transform(name: &str, n: usize) -> Result<tubal::TransformSpec, CliError> {
    let from_file = name.starts_with("file:");
    files::parse_transform(name, n).map_err(|e| match e {
        FileError::Format(msg) if !from_file => CliError::Args(msg),
        other => CliError::File(other.to_string()),
    })
}

#[derive(Serialize)]
struct CompressReport {
    transform: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multirank: Option<Vec<usize>>,
    relative_error: f64,
    sigma_norms: Vec<f64>,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct DiscoverReport {
    op: String,
    n: usize,
    seed: u64,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<MatrixJson>,
    diagnostics: DiagnosticsJson,
}

#[derive(Serialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    eigenbasis_condition: Option<f64>,
    max_residual: Option<f64>,
    trials: usize,
}

#[derive(Serialize)]
struct InfoReport {
    dims: [usize; 3],
    rank: usize,
    multirank: Vec<usize>,
    sigma_norms: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::File(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Compress {
            input,
            transform,
            rank,
            multirank: multi,
            output,
            report,
        } => cmd_compress(input, transform, rank, multi, output, report),
        Command::Discover { op, n, seed, out } => cmd_discover(op, n, seed, out),
        Command::Info { input, transform } => cmd_info(input, transform),
    }
}

fn cmd_compress(
    input: PathBuf,
    transform: String,
    rank: Option<usize>,
    multi: Option<Vec<usize>>,
    output: PathBuf,
    report_path: PathBuf,
) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let tensor = files::read_tensor(&input)?;
    let (m, p, n) = tensor.dims();
    let spec = resolve_transform(&transform, n)?;

    let max_rank = m.min(p);
    if let Some(k) = rank {
        if k > max_rank {
            return Err(CliError::Args(format!(
                "rank {k} exceeds min(m, p) = {max_rank}"
            )));
        }
    }
    if let Some(r) = &multi {
        if r.len() != n {
            return Err(CliError::Args(format!(
                "multirank needs {n} entries, got {}",
                r.len()
            )));
        }
        if let Some(&k) = r.iter().find(|&&k| k > max_rank) {
            return Err(CliError::Args(format!(
                "multirank entry {k} exceeds min(m, p) = {max_rank}"
            )));
        }
    }

    let factors = tsvd(&spec, &tensor)?;
    let truncated = match (&rank, &multi) {
        (Some(k), None) => truncate_rank(&spec, &factors, *k)?,
        (None, Some(r)) => truncate_multirank(&spec, &factors, &MultiRank(r.clone()))?,
        _ => unreachable!("clap enforces exactly one of rank/multirank"),
    };

    let norm = frobenius_norm(&tensor);
    let relative_error = if norm > 0.0 {
        frobenius_norm(&truncated.sub(&tensor)) / norm
    } else {
        0.0
    };

    files::write_tensor(&output, &truncated)?;
    let report = CompressReport {
        transform,
        rank,
        multirank: multi,
        relative_error,
        sigma_norms: factors.sigma().iter().map(|t| t.norm()).collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let file = std::fs::File::create(&report_path).map_err(FileError::Io)?;
    serde_json::to_writer_pretty(file, &report).map_err(FileError::Json)?;
    println!(
        "compressed {} -> {} (relative error {:.3e})",
        input.display(),
        output.display(),
        relative_error
    );
    Ok(ExitCode::SUCCESS)
}

fn resolve_op(op: &str, n: usize) -> Result<tubal::BlackBoxOp, CliError> {
    let bad_dim = |e: tubal::Error| CliError::Args(e.to_string());
    match op {
        "tprod" => oracle_op(OracleKind::CircConv, n).map_err(bad_dim),
        "negacyclic" => oracle_op(OracleKind::NegacyclicConv, n).map_err(bad_dim),
        "splitc" => oracle_op(OracleKind::SplitComplex, n).map_err(bad_dim),
        "dual" => oracle_op(OracleKind::DualNumbers, n).map_err(bad_dim),
        other => {
            if let Some(k) = other.strip_prefix("xor:") {
                let k: u32 = k
                    .parse()
                    .map_err(|_| CliError::Args(format!("bad xor bit count \"{k}\"")))?;
                if n != 1usize << k {
                    return Err(CliError::Args(format!(
                        "xor:{k} acts on dimension {}, but --n is {n}",
                        1usize << k
                    )));
                }
                oracle_op(OracleKind::XorConv, n).map_err(bad_dim)
            } else if let Some(path) = other.strip_prefix("table:") {
                let table_op = files::read_op_table(path)?;
                if table_op.n() != n {
                    return Err(CliError::Args(format!(
                        "op table has dimension {}, but --n is {n}",
                        table_op.n()
                    )));
                }
                Ok(table_op)
            } else {
                Err(CliError::Args(format!("unknown op \"{other}\"")))
            }
        }
    }
}

fn cmd_discover(op_name: String, n: usize, seed: u64, out: PathBuf) -> Result<ExitCode, CliError> {
    let op = resolve_op(&op_name, n)?;
    let report = classify_ring(&op, seed, 20);

    let (verdict, reason, realness, matrix, tubal_found) = match &report.verdict {
        Verdict::Tubal(spec) => (
            "tubal",
            None,
            Some(spec.realness()),
            Some(MatrixJson {
                n,
                rows: files::matrix_rows(spec.matrix()),
            }),
            true,
        ),
        Verdict::NotTubal(reason) => (
            "not-tubal",
            Some(match reason {
                NotTubalReason::NotDiagonalizable => "not-diagonalizable",
                NotTubalReason::ResidualTooLarge => "residual-too-large",
                NotTubalReason::NotCommutative => "not-commutative",
                NotTubalReason::NotAssociative => "not-associative",
            }),
            None,
            None,
            false,
        ),
    };
    let diag = &report.diagnostics;
    let json = DiscoverReport {
        op: op_name,
        n,
        seed,
        verdict,
        reason,
        realness,
        matrix,
        diagnostics: DiagnosticsJson {
            eigenbasis_condition: diag
                .eigenbasis_condition
                .is_finite()
                .then_some(diag.eigenbasis_condition),
            max_residual: diag.max_residual.is_finite().then_some(diag.max_residual),
            trials: diag.trials,
        },
    };
    let file = std::fs::File::create(&out).map_err(FileError::Io)?;
    serde_json::to_writer_pretty(file, &json).map_err(FileError::Json)?;
    println!("verdict: {verdict}{}", reason.map(|r| format!(" ({r})")).unwrap_or_default());
    if tubal_found {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(5))
    }
}

fn cmd_info(input: PathBuf, transform: String) -> Result<ExitCode, CliError> {
    let tensor = files::read_tensor(&input)?;
    let (m, p, n) = tensor.dims();
    let spec = resolve_transform(&transform, n)?;
    let factors = tsvd(&spec, &tensor)?;
    let report = InfoReport {
        dims: [m, p, n],
        rank: m_rank(&factors, None),
        multirank: multirank(&factors, None).0,
        sigma_norms: factors.sigma().iter().map(|t| t.norm()).collect(),
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(FileError::Json)?);
    Ok(ExitCode::SUCCESS)
}
