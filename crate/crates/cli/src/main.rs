//! `hausp` mines high average-utility sequential patterns, check runs
//! against the brute-force oracle, diff result files, duplicate datasets,
//! and benchmark strategy versions.
//!
//! Exit codes: 0 ok, 1 result-diff mismatch, 2 usage error, 3 parse
//! error, 4 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hausp_cli::dataset::{
    self, detect_format, duplicate_dataset, parse_eu_table, parse_qsdb, DatasetFormat,
};
use hausp_cli::report::{fingerprint, write_stats, RunReport};
use hausp_cli::results::{diff, parse_rational, read_results, write_results};
use hausp_core::bounds::RrsPolicy;
use hausp_core::miner::{mine, MinerConfig, StrategyVersion};
use hausp_core::model::{Database, Rational};
use hausp_oracle::{oracle_mine, OracleConfig};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "hausp",
    version,
    about = "High average-utility sequential pattern mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Rsau,
    Trsau,
    Advance,
}

impl From<StrategyArg> for StrategyVersion {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::Rsau => StrategyVersion::Rsau,
            StrategyArg::Trsau => StrategyVersion::Trsau,
            StrategyArg::Advance => StrategyVersion::Advance,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    /// Admit every occurrence of a label that rises somewhere.
    Global,
    /// Admit only occurrences that rise by themselves.
    Occurrence,
}

impl From<PolicyArg> for RrsPolicy {
    fn from(value: PolicyArg) -> Self {
        match value {
            PolicyArg::Global => RrsPolicy::ItemGlobal,
            PolicyArg::Occurrence => RrsPolicy::PerOccurrence,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// `item[utility]` tokens.
    Occ,
    /// `item:quantity` tokens with an external-utility table.
    Qty,
}

#[derive(Subcommand)]
enum Command {
    /// Mine high average-utility sequential patterns.
    Mine {
        #[arg(long)]
        input: PathBuf,
        /// External-utility table (quantity-mode inputs).
        #[arg(long)]
        eu: Option<PathBuf>,
        /// Force the input format instead of auto-detecting.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Threshold fraction in (0, 1], e.g. 0.12 or 3/25.
        #[arg(long)]
        xi: String,
        #[arg(long, value_enum, default_value = "advance")]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value = "global")]
        rrs_policy: PolicyArg,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        output: PathBuf,
        /// Also write a key=value run report.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Print one bound-annotation line per candidate to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Brute-force reference mining (desk scale only).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eu: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Set-compare two result files; exit 1 on mismatch.
    Diff { a: PathBuf, b: PathBuf },
    /// Duplicate a dataset k times (scalability inputs).
    Gen {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eu: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        dup: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// One run report per (xi, strategy) cell, to stdout.
    Bench {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eu: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Comma-separated thresholds, e.g. 0.10,0.12,0.14.
        #[arg(long, value_delimiter = ',')]
        xi_list: Vec<String>,
        /// Comma-separated strategies; all three by default.
        #[arg(long, value_delimiter = ',', value_enum)]
        strategies: Vec<StrategyArg>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Mine {
            input,
            eu,
            format,
            xi,
            strategy,
            rrs_policy,
            max_len,
            output,
            stats,
            trace,
        } => {
            let db = load_database(&input, eu.as_deref(), format)?;
            let xi_value = parse_xi(&xi)?;
            let mut cfg = MinerConfig::new(xi_value, strategy.into());
            cfg.rrs_policy = rrs_policy.into();
            cfg.max_pattern_length = max_len;
            cfg.trace = trace;
            let (results, mining_stats) =
                mine(&db, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            for line in &mining_stats.trace {
                eprintln!("{line}");
            }
            write_file(&output, |w| write_results(&results, w))?;
            if let Some(path) = stats {
                let report = RunReport {
                    input: input.display().to_string(),
                    xi: xi.clone(),
                    strategy: StrategyVersion::from(strategy).name().to_string(),
                    rrs_policy: policy_name(rrs_policy).to_string(),
                    max_len,
                    results_path: Some(output.display().to_string()),
                    fingerprint: fingerprint(&db),
                    stats: mining_stats,
                };
                write_file(&path, |w| write_stats(&report, w))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            input,
            eu,
            format,
            xi,
            max_len,
            output,
        } => {
            let db = load_database(&input, eu.as_deref(), format)?;
            let cfg = OracleConfig {
                xi: parse_xi(&xi)?,
                max_pattern_length: max_len,
            };
            let results = oracle_mine(&db, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            write_file(&output, |w| write_results(&results, w))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Diff { a, b } => {
            let left = read_results(&read_text(&a)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", a.display())))?;
            let right = read_results(&read_text(&b)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", b.display())))?;
            let mismatches = diff(&left, &right);
            if mismatches.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for line in mismatches {
                    println!("{line}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Gen {
            input,
            eu,
            format,
            dup,
            output,
        } => {
            if dup == 0 {
                return Err(CliError::Usage("--dup must be at least 1".into()));
            }
            let db = load_database(&input, eu.as_deref(), format)?;
            let bigger = duplicate_dataset(&db, dup);
            write_file(&output, |w| {
                w.write_all(dataset::write_occurrence_format(&bigger).as_bytes())
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            input,
            eu,
            format,
            xi_list,
            strategies,
        } => {
            if xi_list.is_empty() {
                return Err(CliError::Usage("--xi-list needs at least one value".into()));
            }
            let strategies = if strategies.is_empty() {
                vec![StrategyArg::Rsau, StrategyArg::Trsau, StrategyArg::Advance]
            } else {
                strategies
            };
            let db = load_database(&input, eu.as_deref(), format)?;
            let fp = fingerprint(&db);
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for xi in &xi_list {
                let xi_value = parse_xi(xi)?;
                for &strategy in &strategies {
                    let cfg = MinerConfig::new(xi_value, strategy.into());
                    let (_, mining_stats) =
                        mine(&db, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
                    let report = RunReport {
                        input: input.display().to_string(),
                        xi: xi.clone(),
                        strategy: StrategyVersion::from(strategy).name().to_string(),
                        rrs_policy: "global".to_string(),
                        max_len: None,
                        results_path: None,
                        fingerprint: fp.clone(),
                        stats: mining_stats,
                    };
                    write_stats(&report, &mut out).map_err(|e| CliError::Io(e.to_string()))?;
                    writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn policy_name(policy: PolicyArg) -> &'static str {
    match policy {
        PolicyArg::Global => "global",
        PolicyArg::Occurrence => "occurrence",
    }
}

fn parse_xi(s: &str) -> Result<Rational, CliError> {
    let value = parse_rational(s)
        .ok_or_else(|| CliError::Usage(format!("cannot parse threshold {s:?}")))?;
    if value <= Rational::from_integer(0) || value > Rational::from_integer(1) {
        return Err(CliError::Usage(format!(
            "threshold must lie in (0, 1], got {s}"
        )));
    }
    Ok(value)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(
    path: &Path,
    writer: impl FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let file =
        fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut buf = std::io::BufWriter::new(file);
    writer(&mut buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    buf.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_database(
    input: &Path,
    eu: Option<&Path>,
    format: Option<FormatArg>,
) -> Result<Database, CliError> {
    let text = read_text(input)?;
    let format = match format {
        Some(FormatArg::Occ) => DatasetFormat::OccurrenceUtility,
        Some(FormatArg::Qty) => DatasetFormat::QuantityWithTable,
        None => detect_format(&text).ok_or_else(|| {
            CliError::Parse(format!(
                "{}: cannot detect the dataset format; pass --format",
                input.display()
            ))
        })?,
    };
    let table = match (format, eu) {
        (DatasetFormat::QuantityWithTable, Some(path)) => Some(
            parse_eu_table(&read_text(path)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?,
        ),
        (DatasetFormat::QuantityWithTable, None) => {
            return Err(CliError::Usage(
                "quantity-mode input needs --eu <table>".into(),
            ))
        }
        _ => None,
    };
    let parsed = parse_qsdb(&text, format, table.as_ref())
        .map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
    for warning in &parsed.warnings {
        eprintln!("warning: {}: {warning}", input.display());
    }
    Ok(parsed.database)
}
