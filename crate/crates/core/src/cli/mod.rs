//! The `fdo` command-line tool.

pub mod bench;
pub mod index_file;
pub mod selfcheck;
pub mod workload;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::decision::Oracle;
use crate::distance::exact_distance;
use crate::series::parse_text;

#[derive(Debug, Parser)]
#[command(name = "fdo", version, about = "Fréchet distance oracle for 1D curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index a curve and write the index file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print YES if the Fréchet distance is at most DELTA, NO otherwise.
    Decide {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, allow_negative_numbers = true, value_parser = parse_delta)]
        delta: f64,
    },
    /// Print the exact Fréchet distance.
    Dist {
        #[arg(long, required_unless_present = "p", conflicts_with = "p")]
        index: Option<PathBuf>,
        /// Curve file to index on the fly instead of an index file.
        #[arg(long)]
        p: Option<PathBuf>,
        #[arg(long)]
        query: PathBuf,
    },
    /// Compare the oracle against the free-space program on random curves.
    Selfcheck {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        max_m: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Measure build and query times for growing curves.
    Bench {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "16384,65536,262144,1048576"
        )]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip the exact-distance rounds column.
        #[arg(long)]
        no_rounds: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

fn parse_delta(s: &str) -> std::result::Result<f64, String> {
    let d: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if d.is_nan() || d < 0.0 {
        return Err(format!("delta must be non-negative, got {s}"));
    }
    Ok(d)
}

fn read_curve(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let values = parse_text(&text).with_context(|| format!("in {}", path.display()))?;
    if values.is_empty() {
        anyhow::bail!(crate::Error::EmptySeries);
    }
    Ok(values)
}

fn load_index(path: &Path) -> Result<Oracle> {
    index_file::load(path).with_context(|| format!("loading index {}", path.display()))
}

/// Runs one command, writing results to `out`. Returns the exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<ExitCode> {
    match cli.command {
        Command::Build { input, output } => {
            let raw = read_curve(&input)?;
            let oracle = Oracle::build(&raw)?;
            index_file::save(&oracle, &output)
                .with_context(|| format!("writing {}", output.display()))?;
            writeln!(out, "n: {}", oracle.original_len())?;
            writeln!(out, "canonical length: {}", oracle.series().len())?;
            writeln!(
                out,
                "hierarchy levels: {}",
                oracle.hierarchy().levels().len()
            )?;
        }
        Command::Decide {
            index,
            query,
            delta,
        } => {
            let oracle = load_index(&index)?;
            let q = read_curve(&query)?;
            let yes = oracle.decide(&q, delta)?;
            writeln!(out, "{}", if yes { "YES" } else { "NO" })?;
        }
        Command::Dist { index, p, query } => {
            let oracle = match (index, p) {
                (Some(path), _) => load_index(&path)?,
                (None, Some(path)) => Oracle::build(&read_curve(&path)?)?,
                (None, None) => unreachable!("clap requires one of --index and --p"),
            };
            let q = read_curve(&query)?;
            writeln!(out, "{}", exact_distance(&oracle, &q)?)?;
        }
        Command::Selfcheck {
            trials,
            seed,
            max_n,
            max_m,
            inject_fault,
        } => {
            let cfg = selfcheck::SelfcheckConfig {
                trials,
                seed,
                max_n: max_n as usize,
                max_m: max_m as usize,
                inject_fault,
            };
            let report = selfcheck::run(&cfg);
            for line in &report.failures {
                writeln!(out, "FAIL {line}")?;
            }
            writeln!(out, "{}/{} ok", report.passed, report.trials)?;
            if !report.failures.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench {
            n_list,
            m,
            trials,
            format: Format::Csv,
            seed,
            no_rounds,
        } => {
            let cfg = bench::BenchConfig {
                n_list,
                m,
                trials: trials as usize,
                seed,
                rounds: !no_rounds,
            };
            let rows = bench::run(&cfg, |w| eprintln!("warning: {w}"));
            bench::write_csv(&mut *out, &cfg, &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
