//! Sieve of Eratosthenes with block-sampled prefix counts.
//!
//! This is the ground truth for every check in the crate. It is a plain,
//! non-segmented sieve: one bit per integer in `0..=limit`, with a prime count
//! stored every [`BLOCK_SIZE`] integers so that `π(n)` costs one table lookup
//! plus a popcount over at most one block.
//!
//! The oracle uses the modern convention (1 is not prime). Barrett's
//! convention is handled by [`crate::counter::pi_modern`].

use crate::counter::{evaluate_terms, Classification};
use crate::error::{Error, Result};

/// Default upper bound on the sieve limit (about 12.5 MB of bitmap).
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

/// Integers per prefix-count sample.
pub const BLOCK_SIZE: u64 = 4096;

const WORDS_PER_BLOCK: usize = (BLOCK_SIZE / 64) as usize;

/// Immutable primality bitmap and prefix prime counts up to `limit`.
#[derive(Debug, Clone)]
pub struct SieveOracle {
    limit: u64,
    /// Bit `i` set means `i` is not prime. Bits for 0 and 1 are set by
    /// convention; bits past `limit` are set so they never count as primes.
    is_composite: Vec<u64>,
    /// `prefix_counts[b]` is the number of primes below `b * BLOCK_SIZE`.
    prefix_counts: Vec<u64>,
}

/// Builds a sieve up to `limit` under the default memory cap.
pub fn build_sieve(limit: u64) -> Result<SieveOracle> {
    SieveOracle::with_cap(limit, DEFAULT_SIEVE_CAP)
}

impl SieveOracle {
    /// Builds a sieve up to `limit`, refusing limits above `cap`.
    pub fn with_cap(limit: u64, cap: u64) -> Result<SieveOracle> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > cap {
            return Err(Error::Resource { requested: limit, cap });
        }
        let len = limit as usize + 1;
        let blocks = len.div_ceil(BLOCK_SIZE as usize);
        let mut bits = vec![0u64; blocks * WORDS_PER_BLOCK];
        let set = |bits: &mut [u64], i: usize| bits[i / 64] |= 1 << (i % 64);

        set(&mut bits, 0);
        set(&mut bits, 1);
        for i in len..bits.len() * 64 {
            set(&mut bits, i);
        }
        let mut p = 2usize;
        while p * p < len {
            if bits[p / 64] >> (p % 64) & 1 == 0 {
                let mut multiple = p * p;
                while multiple < len {
                    set(&mut bits, multiple);
                    multiple += p;
                }
            }
            p += 1;
        }

        let mut prefix_counts = Vec::with_capacity(blocks + 1);
        let mut running = 0u64;
        prefix_counts.push(0);
        for block in bits.chunks_exact(WORDS_PER_BLOCK) {
            running += block.iter().map(|w| w.count_zeros() as u64).sum::<u64>();
            prefix_counts.push(running);
        }

        Ok(SieveOracle {
            limit,
            is_composite: bits,
            prefix_counts,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n > self.limit {
            return Err(Error::domain(format!(
                "{n} is beyond the sieve limit {}",
                self.limit
            )));
        }
        Ok(())
    }

    /// Primality by bitmap lookup; 0 and 1 are not prime.
    pub fn is_prime(&self, k: u64) -> Result<bool> {
        self.check_range(k)?;
        let k = k as usize;
        Ok(self.is_composite[k / 64] >> (k % 64) & 1 == 0)
    }

    /// Number of primes `<= n`.
    pub fn pi(&self, n: u64) -> Result<u64> {
        self.check_range(n)?;
        let block = (n / BLOCK_SIZE) as usize;
        let start = block * WORDS_PER_BLOCK;
        let last = n as usize / 64;
        let mut count = self.prefix_counts[block];
        for &word in &self.is_composite[start..last] {
            count += word.count_zeros() as u64;
        }
        let tail_bits = n as usize % 64 + 1;
        let mask = if tail_bits == 64 { u64::MAX } else { (1u64 << tail_bits) - 1 };
        count += (!self.is_composite[last] & mask).count_ones() as u64;
        Ok(count)
    }

    /// Primes up to the limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(|&k| self.is_prime(k).unwrap_or(false))
    }

    /// Checks every Barrett term in `[k_lo, k_hi]` against the bitmap.
    ///
    /// For each `k` the term value must be 1 exactly at primes, and the
    /// reduced argument `m = (k-1)! mod 2k` must be `k - 1` at primes and one
    /// of `{0, k}` at composites. Terms are evaluated on `threads` workers;
    /// the result does not depend on the worker count.
    pub fn verify_range(&self, k_lo: u64, k_hi: u64, threads: usize) -> Result<RangeVerification> {
        if k_lo < 5 || k_lo > k_hi {
            return Err(Error::domain(format!(
                "verification range [{k_lo}, {k_hi}] must satisfy 5 <= lo <= hi"
            )));
        }
        self.check_range(k_hi)?;
        let terms = evaluate_terms(k_lo, k_hi, threads)?;

        let mut report = RangeVerification {
            k_lo,
            k_hi,
            ..RangeVerification::default()
        };
        for term in &terms {
            let oracle_prime = self.is_prime(term.k)?;
            report.checked += 1;
            if oracle_prime {
                report.primes += 1;
            } else {
                report.composites += 1;
                if term.m == 0 {
                    report.composite_m_zero += 1;
                } else if term.m == term.k {
                    report.composite_m_k += 1;
                }
            }

            let value_ok = (term.value == 1) == oracle_prime
                && (term.classification == Classification::Prime) == oracle_prime;
            let argument_ok = if oracle_prime {
                term.m == term.k - 1
            } else {
                term.m == 0 || term.m == term.k
            };
            if !value_ok || !argument_ok {
                report.mismatches.push(Mismatch {
                    k: term.k,
                    m: term.m,
                    value: term.value,
                    oracle_prime,
                });
            }
        }
        Ok(report)
    }
}

/// A Barrett term that disagrees with the sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub k: u64,
    pub m: u64,
    pub value: u8,
    pub oracle_prime: bool,
}

/// Outcome of [`SieveOracle::verify_range`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RangeVerification {
    pub k_lo: u64,
    pub k_hi: u64,
    pub checked: u64,
    pub primes: u64,
    pub composites: u64,
    /// Composites whose reduced argument was 0.
    pub composite_m_zero: u64,
    /// Composites whose reduced argument was `k`.
    pub composite_m_k: u64,
    pub mismatches: Vec<Mismatch>,
}

impl RangeVerification {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_sieves() {
        let s = build_sieve(10).unwrap();
        assert_eq!(s.primes().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        let s = build_sieve(2).unwrap();
        assert_eq!(s.primes().collect::<Vec<_>>(), vec![2]);
        assert_eq!(s.pi(2), Ok(1));
        assert_eq!(build_sieve(100).unwrap().pi(100), Ok(25));
    }

    #[test]
    fn bitmap_matches_trial_division() {
        let s = build_sieve(20_000).unwrap();
        let mut count = 0;
        for n in 0..=20_000 {
            let prime = trial_prime(n);
            assert_eq!(s.is_prime(n), Ok(prime), "n = {n}");
            count += prime as u64;
            assert_eq!(s.pi(n), Ok(count), "n = {n}");
        }
    }

    #[test]
    fn pi_at_block_and_word_edges() {
        let s = build_sieve(3 * BLOCK_SIZE).unwrap();
        for n in [63, 64, 65, 4095, 4096, 4097, 8191, 8192, 3 * BLOCK_SIZE] {
            let direct = (0..=n).filter(|&k| trial_prime(k)).count() as u64;
            assert_eq!(s.pi(n), Ok(direct), "n = {n}");
        }
    }

    #[test]
    fn oracle_examples() {
        let s = build_sieve(10_000).unwrap();
        assert_eq!(s.pi(0), Ok(0));
        assert_eq!(s.pi(1), Ok(0));
        assert_eq!(s.pi(10_000), Ok(1229));
        assert_eq!(s.is_prime(2), Ok(true));
        assert_eq!(s.is_prime(1), Ok(false));
        assert_eq!(s.is_prime(0), Ok(false));
        assert_eq!(s.is_prime(91), Ok(false));
        assert!(s.pi(10_001).is_err());
        assert!(s.is_prime(10_001).is_err());
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(build_sieve(1), Err(Error::Domain(_))));
        assert_eq!(
            SieveOracle::with_cap(1001, 1000).unwrap_err(),
            Error::Resource { requested: 1001, cap: 1000 }
        );
        assert!(build_sieve(DEFAULT_SIEVE_CAP + 1).is_err());
    }

    #[test]
    fn verify_small_ranges() {
        let s = build_sieve(2000).unwrap();
        let single = s.verify_range(5, 5, 1).unwrap();
        assert!(single.passed());
        assert_eq!((single.checked, single.primes), (1, 1));

        let r = s.verify_range(5, 2000, 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 1996);
        assert_eq!(r.primes, s.pi(2000).unwrap() - 2);
        assert_eq!(r.composites, r.composite_m_zero + r.composite_m_k);

        assert!(s.verify_range(4, 10, 1).is_err());
        assert!(s.verify_range(10, 9, 1).is_err());
        assert!(s.verify_range(5, 2001, 1).is_err());
    }
}
