//! Exact evaluation of Barrett's counter.
//!
//! The summand `sin[((k-1)!/k)·π] / sin(π/k)` depends on `(k-1)!` only
//! through `m = (k-1)! mod 2k`, because `sin(mπ/k)` has period `2k` in `m`.
//! At a prime `k`, Wilson gives `(k-1)! + 1 = k·q` with `q` odd, so `m = k - 1`
//! and the summand is `sin(π - π/k) / sin(π/k) = 1`. At a composite `k >= 6`,
//! `k | (k-1)!`, so `m ∈ {0, k}` and the summand is 0. No sine is evaluated
//! here.
//!
//! The base constant 3 counts `{1, 2, 3}`: Barrett treats 1 as prime, so
//! `Barr(n) = π(n - 1) + 1` where `π` is the modern prime-counting function.

use rayon::prelude::*;

use crate::arith::factorial_mod_unchecked;
use crate::error::{Error, Result};
use crate::sieve::SieveOracle;

/// Smallest `k` for which the summand is defined (and smallest valid `n`).
pub const FIRST_TERM: u64 = 5;

/// Value of `Barr(5)`, the empty sum.
pub const BASE_COUNT: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Prime,
    Composite,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Prime => "prime",
            Classification::Composite => "composite",
        }
    }
}

/// One summand of the counter, evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BarrettTerm {
    pub k: u64,
    /// `(k-1)! mod 2k`, the reduced sine argument.
    pub m: u64,
    pub value: u8,
    pub classification: Classification,
}

fn check_term_domain(k: u64) -> Result<()> {
    if k < FIRST_TERM {
        return Err(Error::domain(format!(
            "Barrett terms are defined for k > 4, got {k}"
        )));
    }
    if k > crate::arith::MAX_MODULUS / 2 {
        return Err(Error::domain(format!("k = {k} exceeds the supported width")));
    }
    Ok(())
}

/// `(k-1)! mod 2k`.
pub fn reduced_sine_argument(k: u64) -> Result<u64> {
    check_term_domain(k)?;
    Ok(factorial_mod_unchecked(k - 1, 2 * k))
}

pub fn barrett_term(k: u64) -> Result<BarrettTerm> {
    let m = reduced_sine_argument(k)?;
    let prime = m == k - 1;
    Ok(BarrettTerm {
        k,
        m,
        value: prime as u8,
        classification: if prime {
            Classification::Prime
        } else {
            Classification::Composite
        },
    })
}

/// Evaluates the terms for `k` in `[k_lo, k_hi]` on `threads` workers.
///
/// The output is ordered by `k` and identical for every worker count.
pub fn evaluate_terms(k_lo: u64, k_hi: u64, threads: usize) -> Result<Vec<BarrettTerm>> {
    check_term_domain(k_lo)?;
    if k_hi < k_lo {
        return Ok(Vec::new());
    }
    check_term_domain(k_hi)?;
    if threads <= 1 {
        return (k_lo..=k_hi).map(barrett_term).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("cannot start {threads} workers: {e}")))?;
    // Large k dominate the cost, so hand out small chunks.
    pool.install(|| {
        (k_lo as usize..k_hi as usize + 1)
            .into_par_iter()
            .with_max_len(64)
            .map(|k| barrett_term(k as u64))
            .collect()
    })
}

/// `Barr(n) = 3 + Σ_{k=5}^{n-1} term(k)`.
pub fn barrett_count(n: u64) -> Result<u64> {
    if n < FIRST_TERM {
        return Err(Error::domain(format!(
            "Barrett's formula is defined for n > 4, got {n}"
        )));
    }
    let terms = evaluate_terms(FIRST_TERM, n - 1, 1)?;
    Ok(BASE_COUNT + terms.iter().map(|t| t.value as u64).sum::<u64>())
}

/// Running values of `Barr(n)` built from a term vector starting at `k = 5`.
#[derive(Debug, Clone)]
pub struct BarrettSeries {
    /// `counts[i]` is `Barr(5 + i)`.
    counts: Vec<u64>,
}

impl BarrettSeries {
    /// Computes `Barr(n)` for every `n` in `[5, n_max]` with one term
    /// evaluation per `k`.
    pub fn up_to(n_max: u64, threads: usize) -> Result<Self> {
        if n_max < FIRST_TERM {
            return Err(Error::domain(format!(
                "Barrett's formula is defined for n > 4, got {n_max}"
            )));
        }
        let terms = evaluate_terms(FIRST_TERM, n_max - 1, threads)?;
        Ok(Self::from_terms(&terms))
    }

    /// Prefix sums of `terms`, which must start at `k = 5` and be contiguous.
    pub fn from_terms(terms: &[BarrettTerm]) -> Self {
        let mut counts = Vec::with_capacity(terms.len() + 1);
        let mut running = BASE_COUNT;
        counts.push(running);
        for (i, term) in terms.iter().enumerate() {
            debug_assert_eq!(term.k, FIRST_TERM + i as u64);
            running += term.value as u64;
            counts.push(running);
        }
        BarrettSeries { counts }
    }

    pub fn n_max(&self) -> u64 {
        FIRST_TERM + self.counts.len() as u64 - 1
    }

    /// `Barr(n)`, or `None` outside `[5, n_max]`.
    pub fn count(&self, n: u64) -> Option<u64> {
        let i = n.checked_sub(FIRST_TERM)?;
        self.counts.get(i as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (FIRST_TERM + i as u64, c))
    }
}

/// `(n, Barr(n))` for every `n` in `[5, n_max]`.
pub fn barrett_series(n_max: u64) -> Result<Vec<(u64, u64)>> {
    Ok(BarrettSeries::up_to(n_max, 1)?.iter().collect())
}

/// Modern `π(n)` (primes `<= n`, 1 excluded) from Barrett's counter.
pub fn pi_modern(n: u64) -> Result<u64> {
    if n < 4 {
        return Err(Error::domain(format!("pi_modern needs n >= 4, got {n}")));
    }
    Ok(barrett_count(n + 1)? - 1)
}

/// The prime number theorem estimate `n / ln n`.
pub fn pnt_estimate(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("n / ln n needs n >= 2, got {n}")));
    }
    let x = n as f64;
    Ok(x / x.ln())
}

/// One row of the counter-versus-asymptotic comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRow {
    pub n: u64,
    pub barr: u64,
    /// Modern `π(n - 1)`.
    pub pi_oracle: u64,
    /// `n / ln n`.
    pub pnt: f64,
    /// `barr · ln n / n`.
    pub ratio: f64,
}

impl CountRow {
    pub fn new(n: u64, barr: u64, pi_oracle: u64) -> Result<Self> {
        let pnt = pnt_estimate(n)?;
        Ok(CountRow {
            n,
            barr,
            pi_oracle,
            pnt,
            ratio: barr as f64 / pnt,
        })
    }
}

/// Builds the comparison row at `n`, with `π(n - 1)` taken from `oracle`.
pub fn asymptotic_ratio(n: u64, oracle: &SieveOracle) -> Result<CountRow> {
    let barr = barrett_count(n)?;
    CountRow::new(n, barr, oracle.pi(n - 1)?)
}

/// Rows for `n = from, from + step, ...` up to `to`, evaluating each term once.
pub fn count_table(
    from: u64,
    to: u64,
    step: u64,
    threads: usize,
    oracle: &SieveOracle,
) -> Result<Vec<CountRow>> {
    if from < FIRST_TERM || from > to || step == 0 {
        return Err(Error::domain(format!(
            "table range needs 5 <= from <= to and step >= 1, got from={from} to={to} step={step}"
        )));
    }
    oracle.pi(to - 1)?;
    let series = BarrettSeries::up_to(to, threads)?;
    (from..=to)
        .step_by(step as usize)
        .map(|n| {
            let barr = series.count(n).expect("n within series");
            CountRow::new(n, barr, oracle.pi(n - 1)?)
        })
        .collect()
}
