use std::fmt;
use std::process::ExitCode;
use std::time::Instant;

use barrett_core::arith::absorption_check;
use barrett_core::counter::{
    barrett_term, count_table, evaluate_terms, BarrettSeries, FIRST_TERM,
};
use barrett_core::sieve::SieveOracle;
use barrett_core::trig::{compare_methods, term_naive_float, term_reduced_trig, NaiveFloat};
use barrett_core::Error;
use rayon::prelude::*;

use crate::output::{Cell, OutputFormat, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub threads: usize,
    pub sieve_cap: u64,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Exact,
    ReducedTrig,
    NaiveFloat,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ReducedTrig => "reduced-trig",
            Method::NaiveFloat => "naive-float",
        }
    }
}

/// Failures that map onto the exit-code contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Resource(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Resource(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => CliError::Usage(e.to_string()),
            Error::Resource { .. } => CliError::Resource(e.to_string()),
        }
    }
}

/// What a command prints and how it exits.
pub struct Report {
    pub table: Table,
    /// Extra lines for stderr (timings, mismatch details).
    pub notes: Vec<String>,
    pub success: bool,
}

impl Report {
    fn ok(table: Table) -> Self {
        Report {
            table,
            notes: Vec::new(),
            success: true,
        }
    }
}

fn require_formula_domain(what: &str, value: u64) -> Result<(), CliError> {
    if value < FIRST_TERM {
        return Err(CliError::Usage(format!(
            "{what} must be greater than 4 (Barrett's formula is defined for n > 4), got {value}"
        )));
    }
    Ok(())
}

fn sieve(limit: u64, config: &RunConfig) -> Result<SieveOracle, CliError> {
    Ok(SieveOracle::with_cap(limit.max(2), config.sieve_cap)?)
}

pub fn count(n: u64, config: &RunConfig) -> Result<Report, CliError> {
    require_formula_domain("n", n)?;
    let oracle = sieve(n - 1, config)?;
    let barr = BarrettSeries::up_to(n, config.threads)?
        .count(n)
        .expect("series covers n");
    let pi = oracle.pi(n - 1)?;
    let mut table = Table::new(vec!["n", "barr", "pi", "diff"]);
    table.push(vec![n.into(), barr.into(), pi.into(), (barr - pi).into()]);
    Ok(Report::ok(table))
}

pub fn table(from: u64, to: u64, step: u64, config: &RunConfig) -> Result<Report, CliError> {
    require_formula_domain("from", from)?;
    if to < from || step == 0 {
        return Err(CliError::Usage(format!(
            "table needs from <= to and step >= 1, got {from} {to} {step}"
        )));
    }
    let oracle = sieve(to - 1, config)?;
    let rows = count_table(from, to, step, config.threads, &oracle)?;
    let mut table = Table::new(vec!["n", "barr", "pi", "pnt", "ratio"]);
    for row in rows {
        table.push(vec![
            row.n.into(),
            row.barr.into(),
            row.pi_oracle.into(),
            Cell::Real(row.pnt),
            Cell::Real(row.ratio),
        ]);
    }
    Ok(Report::ok(table))
}

pub fn term(k: u64, method: Method) -> Result<Report, CliError> {
    require_formula_domain("k", k)?;
    let exact = barrett_term(k)?;
    let (value, abs_error, note) = match method {
        Method::Exact => (Cell::Int(exact.value as u64), Cell::Sci(0.0), ""),
        Method::ReducedTrig => {
            let v = term_reduced_trig(k)?;
            (Cell::Real(v), Cell::Sci((v - exact.value as f64).abs()), "")
        }
        Method::NaiveFloat => match term_naive_float(k)? {
            NaiveFloat::Defined { value, .. } => (
                Cell::Real(value),
                Cell::Sci((value - exact.value as f64).abs()),
                "",
            ),
            NaiveFloat::Undefined { reason } => (Cell::Undefined, Cell::Undefined, reason),
        },
    };
    let mut table = Table::new(vec!["k", "method", "m", "classification", "value", "abs_error", "note"]);
    table.push(vec![
        k.into(),
        method.name().into(),
        exact.m.into(),
        exact.classification.as_str().into(),
        value,
        abs_error,
        note.into(),
    ]);
    Ok(Report::ok(table))
}

pub fn compare(k_lo: u64, k_hi: u64) -> Result<Report, CliError> {
    require_formula_domain("k_lo", k_lo)?;
    let report = compare_methods(k_lo, k_hi)?;
    let opt = |v: Option<f64>, cell: fn(f64) -> Cell| v.map_or(Cell::Undefined, cell);
    let mut table = Table::new(vec![
        "k",
        "exact",
        "reduced_trig",
        "abs_error_reduced",
        "naive_float",
        "naive_numerator",
        "abs_error_naive",
    ]);
    for row in &report.rows {
        table.push(vec![
            row.k.into(),
            Cell::Int(row.exact as u64),
            Cell::Real(row.reduced_trig),
            Cell::Sci(row.abs_error_reduced),
            opt(row.naive_float, Cell::Real),
            opt(row.naive_numerator, Cell::Real),
            opt(row.abs_error_naive, Cell::Sci),
        ]);
    }
    let divergence = report
        .first_naive_divergence
        .map_or_else(|| "none".to_owned(), |k| k.to_string());
    Ok(Report {
        table,
        notes: vec![
            format!("max reduced-trig error: {:.6e}", report.max_reduced_error),
            format!("first naive-float divergence (error > 0.5): {divergence}"),
        ],
        success: true,
    })
}

pub fn verify(max: u64, config: &RunConfig) -> Result<Report, CliError> {
    require_formula_domain("max", max)?;
    let started = Instant::now();
    let oracle = sieve(max, config)?;
    let range = oracle.verify_range(FIRST_TERM, max, config.threads)?;

    let composites: Vec<u64> = (6..=max)
        .filter(|&k| !oracle.is_prime(k).expect("k within sieve"))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Resource(format!("cannot start worker pool: {e}")))?;
    let absorption_failures: Vec<u64> = pool.install(|| {
        composites
            .par_iter()
            .filter(|&&k| {
                absorption_check(k).map_or(true, |r| !r.absorbed || !r.is_consistent())
            })
            .copied()
            .collect()
    });
    let four = absorption_check(4)?;
    let four_exception = !four.absorbed
        && four.factorial_residue == 2
        && four.valuations.len() == 1
        && four.valuations[0].nu == 1
        && four.valuations[0].alpha == 2;

    let success = range.passed() && absorption_failures.is_empty() && four_exception;
    let mut table = Table::new(vec![
        "max",
        "terms_checked",
        "primes",
        "composites",
        "composite_m_zero",
        "composite_m_k",
        "absorption_checked",
        "absorption_failures",
        "k4_exception",
        "mismatches",
        "status",
    ]);
    table.push(vec![
        max.into(),
        range.checked.into(),
        range.primes.into(),
        range.composites.into(),
        range.composite_m_zero.into(),
        range.composite_m_k.into(),
        (composites.len() as u64).into(),
        (absorption_failures.len() as u64).into(),
        four_exception.into(),
        (range.mismatches.len() as u64).into(),
        if success { "ok" } else { "mismatch" }.into(),
    ]);

    let mut notes: Vec<String> = range
        .mismatches
        .iter()
        .take(20)
        .map(|m| {
            format!(
                "mismatch: k={} m={} value={} sieve_prime={}",
                m.k, m.m, m.value, m.oracle_prime
            )
        })
        .collect();
    notes.extend(
        absorption_failures
            .iter()
            .take(20)
            .map(|k| format!("absorption failure: k={k}")),
    );
    notes.push(format!(
        "verified k in [5, {max}] in {:.3} s",
        started.elapsed().as_secs_f64()
    ));
    Ok(Report {
        table,
        notes,
        success,
    })
}

pub fn bench(max: u64, config: &RunConfig) -> Result<Report, CliError> {
    require_formula_domain("max", max)?;
    let threads = config.threads;

    let t0 = Instant::now();
    let serial = evaluate_terms(FIRST_TERM, max, 1)?;
    let serial_secs = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let parallel = evaluate_terms(FIRST_TERM, max, threads)?;
    let parallel_secs = t1.elapsed().as_secs_f64();

    let identical = serial == parallel;
    let terms = serial.len() as u64;
    let term_sum: u64 = serial.iter().map(|t| t.value as u64).sum();
    let rate = |secs: f64| if secs > 0.0 { terms as f64 / secs } else { f64::INFINITY };

    let mut table = Table::new(vec![
        "max",
        "threads",
        "terms",
        "term_sum",
        "serial_secs",
        "parallel_secs",
        "serial_terms_per_sec",
        "parallel_terms_per_sec",
        "identical",
    ]);
    table.push(vec![
        max.into(),
        (threads as u64).into(),
        terms.into(),
        term_sum.into(),
        Cell::Real(serial_secs),
        Cell::Real(parallel_secs),
        Cell::Real(rate(serial_secs)),
        Cell::Real(rate(parallel_secs)),
        identical.into(),
    ]);
    Ok(Report {
        table,
        notes: Vec::new(),
        success: identical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(threads: usize) -> RunConfig {
        RunConfig {
            threads,
            sieve_cap: 1_000_000,
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn count_records() {
        let r = count(17, &config(1)).unwrap();
        assert_eq!(r.table.rows[0], vec![Cell::Int(17), Cell::Int(7), Cell::Int(6), Cell::Int(1)]);
        let r = count(5, &config(1)).unwrap();
        assert_eq!(r.table.rows[0][1..3], [Cell::Int(3), Cell::Int(2)]);
        assert!(matches!(count(4, &config(1)), Err(CliError::Usage(_))));
    }

    #[test]
    fn sieve_cap_is_a_resource_error() {
        let mut c = config(1);
        c.sieve_cap = 100;
        assert!(matches!(count(102, &c), Err(CliError::Resource(_))));
        assert!(matches!(verify(101, &c), Err(CliError::Resource(_))));
        assert!(verify(100, &c).unwrap().success);
    }

    #[test]
    fn term_methods() {
        let r = term(7, Method::Exact).unwrap();
        assert_eq!(r.table.rows[0][2], Cell::Int(6));
        assert_eq!(r.table.rows[0][4], Cell::Int(1));
        let r = term(8, Method::ReducedTrig).unwrap();
        assert!(matches!(r.table.rows[0][4], Cell::Real(v) if v.abs() < 1e-12));
        let r = term(25, Method::NaiveFloat).unwrap();
        assert_eq!(r.table.rows[0][4], Cell::Undefined);
        assert_eq!(r.table.rows[0][6], Cell::Text("factorial not representable".into()));
        assert!(term(4, Method::Exact).is_err());
    }

    #[test]
    fn verify_counts() {
        let r = verify(10_000, &config(2)).unwrap();
        assert!(r.success);
        assert_eq!(r.table.rows[0][1], Cell::Int(9996));
        let r = verify(5, &config(1)).unwrap();
        assert!(r.success);
        assert_eq!(r.table.rows[0][1], Cell::Int(1));
    }

    #[test]
    fn bench_agrees() {
        let r = bench(2000, &config(3)).unwrap();
        assert!(r.success);
        assert_eq!(r.table.rows[0][3], Cell::Int(303 - 2));
        assert!(bench(5, &config(1)).unwrap().success);
    }

    #[test]
    fn table_rows() {
        let r = table(6, 17, 1, &config(1)).unwrap();
        let barr: Vec<_> = r.table.rows.iter().map(|row| row[1].clone()).collect();
        let expected: Vec<_> = [4, 4, 5, 5, 5, 5, 6, 6, 7, 7, 7, 7].map(Cell::Int).to_vec();
        assert_eq!(barr, expected);
        assert!(table(10, 9, 1, &config(1)).is_err());
        assert!(table(10, 20, 0, &config(1)).is_err());
    }
}
