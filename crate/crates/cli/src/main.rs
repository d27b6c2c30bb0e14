//! `barrett`: count primes with Barrett's formula, tabulate it against
//! `n / ln n`, inspect single terms and run the verification sweep.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use barrett_core::sieve::DEFAULT_SIEVE_CAP;
use clap::{Parser, Subcommand};

use commands::{CliError, Method, RunConfig};
use output::OutputFormat;

const THREADS_ENV: &str = "BARRETT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "barrett", version, about = "Barrett's prime-counting formula, evaluated exactly")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: OutputFormat,

    /// Worker threads [env: BARRETT_THREADS; default: available parallelism].
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    /// Largest sieve the oracle may build.
    #[arg(long, global = true, default_value_t = DEFAULT_SIEVE_CAP)]
    sieve_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Barr(n) next to the modern π(n-1).
    Count { n: u64 },
    /// Barr(n), π(n-1), n/ln n and Barr(n)·ln n/n for n = from, from+step, ..., to.
    Table { from: u64, to: u64, step: u64 },
    /// Evaluate one summand.
    Term {
        k: u64,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
    },
    /// Compare the exact, reduced-trig and naive-float summands over a range of k.
    Compare { k_lo: u64, k_hi: u64 },
    /// Check every summand in [5, max] against the sieve.
    Verify { max: u64 },
    /// Time serial against parallel evaluation of the summands in [5, max].
    Bench { max: u64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match resolve_threads(cli.threads) {
        Ok(threads) => threads,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let config = RunConfig {
        threads,
        sieve_cap: cli.sieve_cap,
        format: cli.format,
    };

    let result = match cli.command {
        Command::Count { n } => commands::count(n, &config),
        Command::Table { from, to, step } => commands::table(from, to, step, &config),
        Command::Term { k, method } => commands::term(k, method),
        Command::Compare { k_lo, k_hi } => commands::compare(k_lo, k_hi),
        Command::Verify { max } => commands::verify(max, &config),
        Command::Bench { max } => commands::bench(max, &config),
    };

    match result {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.table.render(config.format).as_bytes());
            let _ = stdout.flush();
            for note in &report.notes {
                eprintln!("# {note}");
            }
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}


/// `--threads`, then `BARRETT_THREADS`, then the machine's parallelism.
fn resolve_threads(flag: Option<u64>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t as usize);
    }
    match std::env::var(THREADS_ENV) {
        Ok(value) => match value.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
