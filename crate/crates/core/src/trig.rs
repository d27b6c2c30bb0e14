//! Floating-point evaluation of the summand `sin[((k-1)!/k)·π] / sin(π/k)`.
//!
//! Two routes: [`term_reduced_trig`] feeds the sine `m·π/k` with
//! `m = (k-1)! mod 2k`, an argument below `2π`, and stays within `1e-9` of the
//! exact value. [`term_naive_float`] forms `(k-1)!·π/k` directly and leaves
//! the reduction to the math library, which loses the fractional part of the
//! argument once `(k-1)!` approaches `2^53`.
//!
//! Exact `{0, 1}` values from [`crate::counter::barrett_term`] are the
//! reference for all errors reported here.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::counter::{barrett_term, reduced_sine_argument};
use crate::error::{Error, Result};

/// Largest `k` whose `(k-1)!` is at most `2^53`.
pub const NAIVE_MAX_K: u64 = 19;

/// Naive error above which a term counts as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 0.5;

pub const NOT_REPRESENTABLE: &str = "factorial not representable";

/// `sin(m·π/k) / sin(π/k)` with the reduced argument `m`.
pub fn term_reduced_trig(k: u64) -> Result<f64> {
    let m = reduced_sine_argument(k)?;
    let k = k as f64;
    Ok((m as f64 * PI / k).sin() / (PI / k).sin())
}

/// Result of the literal floating-point evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NaiveFloat {
    Defined {
        /// `sin((k-1)!·π/k)` as returned by the library.
        numerator: f64,
        /// `numerator / sin(π/k)`.
        value: f64,
    },
    Undefined {
        reason: &'static str,
    },
}

impl NaiveFloat {
    pub fn value(&self) -> Option<f64> {
        match *self {
            NaiveFloat::Defined { value, .. } => Some(value),
            NaiveFloat::Undefined { .. } => None,
        }
    }

    pub fn numerator(&self) -> Option<f64> {
        match *self {
            NaiveFloat::Defined { numerator, .. } => Some(numerator),
            NaiveFloat::Undefined { .. } => None,
        }
    }
}

/// The summand evaluated literally: `(k-1)!` in floating point, times `π`,
/// divided by `k`, passed to `sin`.
///
/// Undefined for `k > 19`, where `(k-1)!` exceeds `2^53`.
pub fn term_naive_float(k: u64) -> Result<NaiveFloat> {
    if k < 5 {
        return Err(Error::domain(format!(
            "Barrett terms are defined for k > 4, got {k}"
        )));
    }
    if k > NAIVE_MAX_K {
        return Ok(NaiveFloat::Undefined {
            reason: NOT_REPRESENTABLE,
        });
    }
    let factorial = (2..k).fold(1.0f64, |acc, i| acc * i as f64);
    let kf = k as f64;
    let numerator = (factorial * PI / kf).sin();
    Ok(NaiveFloat::Defined {
        numerator,
        value: numerator / (PI / kf).sin(),
    })
}

/// Both floating-point routes for one `k`, against the exact term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermComparison {
    pub k: u64,
    pub exact: u8,
    pub reduced_trig: f64,
    pub naive_float: Option<f64>,
    /// Raw `sin((k-1)!·π/k)` from the naive route.
    pub naive_numerator: Option<f64>,
    pub naive_defined: bool,
    pub abs_error_reduced: f64,
    pub abs_error_naive: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<TermComparison>,
    pub max_reduced_error: f64,
    /// Smallest `k` whose naive error exceeds [`DIVERGENCE_THRESHOLD`].
    pub first_naive_divergence: Option<u64>,
}

pub fn compare_term(k: u64) -> Result<TermComparison> {
    let exact = barrett_term(k)?.value;
    let reduced_trig = term_reduced_trig(k)?;
    let naive = term_naive_float(k)?;
    let naive_float = naive.value();
    Ok(TermComparison {
        k,
        exact,
        reduced_trig,
        naive_float,
        naive_numerator: naive.numerator(),
        naive_defined: naive_float.is_some(),
        abs_error_reduced: (reduced_trig - exact as f64).abs(),
        abs_error_naive: naive_float.map(|v| (v - exact as f64).abs()),
    })
}

/// Compares both routes for every `k` in `[k_lo, k_hi]`; rows are sorted by `k`.
pub fn compare_methods(k_lo: u64, k_hi: u64) -> Result<ComparisonReport> {
    if k_lo < 5 || k_lo > k_hi {
        return Err(Error::domain(format!(
            "comparison range [{k_lo}, {k_hi}] must satisfy 5 <= lo <= hi"
        )));
    }
    let rows = (k_lo as usize..k_hi as usize + 1)
        .into_par_iter()
        .with_max_len(64)
        .map(|k| compare_term(k as u64))
        .collect::<Result<Vec<_>>>()?;
    let max_reduced_error = rows
        .iter()
        .map(|r| r.abs_error_reduced)
        .fold(0.0, f64::max);
    let first_naive_divergence = rows
        .iter()
        .find(|r| r.abs_error_naive.is_some_and(|e| e > DIVERGENCE_THRESHOLD))
        .map(|r| r.k);
    Ok(ComparisonReport {
        rows,
        max_reduced_error,
        first_naive_divergence,
    })
}
