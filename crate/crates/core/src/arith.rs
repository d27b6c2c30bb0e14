//! Exact integer primitives: modular products and factorials, Wilson
//! residues, trial factorization and Legendre valuations.
//!
//! Moduli are limited to [`MAX_MODULUS`] (2^62). Products are formed in a
//! 64-bit word when the modulus fits in 32 bits and in a 128-bit word
//! otherwise, so no operation here can overflow.

use crate::error::{Error, Result};

/// Largest modulus accepted by [`mulmod`] and [`factorial_mod`].
pub const MAX_MODULUS: u64 = 1 << 62;

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("modulus must be at least 1"));
    }
    if m > MAX_MODULUS {
        return Err(Error::domain(format!(
            "modulus {m} exceeds the supported width 2^62"
        )));
    }
    Ok(())
}

/// `(a * b) mod m` for `a, b < m <= MAX_MODULUS`, without range checks.
#[inline]
pub(crate) fn mul_reduce(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// Returns `(a * b) mod m` exactly.
///
/// Both factors must already be reduced (`a, b < m`).
pub fn mulmod(a: u64, b: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    if a >= m || b >= m {
        return Err(Error::domain(format!(
            "factors ({a}, {b}) must be reduced below the modulus {m}"
        )));
    }
    Ok(mul_reduce(a, b, m))
}

/// Reduction modulo a fixed `m <= 2^32` by multiplying with a precomputed
/// reciprocal instead of dividing.
#[derive(Debug, Clone, Copy)]
struct SmallModulus {
    m: u64,
    /// `floor((2^64 - 1) / m)`
    recip: u64,
}

impl SmallModulus {
    fn new(m: u64) -> Self {
        debug_assert!((1..=1 << 32).contains(&m));
        SmallModulus { m, recip: u64::MAX / m }
    }

    /// `x mod m` for any 64-bit `x`. The quotient estimate is at most one
    /// below the true quotient.
    #[inline]
    fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.recip as u128) >> 64) as u64;
        let r = x - q * self.m;
        if r >= self.m {
            r - self.m
        } else {
            r
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }
}

/// Unchecked `t! mod m`; `m` must already be validated.
pub(crate) fn factorial_mod_unchecked(t: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        let modulus = SmallModulus::new(m);
        let mut acc = 1 % m;
        let mut i = 2;
        while i <= t && acc != 0 {
            acc = modulus.mul(acc, if i < m { i } else { modulus.reduce(i) });
            i += 1;
        }
        return acc;
    }
    let mut acc = 1;
    let mut i = 2;
    while i <= t && acc != 0 {
        acc = mul_reduce(acc, i % m, m);
        i += 1;
    }
    acc
}

/// Returns `t! mod m`.
///
/// The product is accumulated one factor at a time and stops as soon as the
/// running residue reaches zero, which for composite moduli usually happens
/// long before `t`.
pub fn factorial_mod(t: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    Ok(factorial_mod_unchecked(t, m))
}

/// `k` together with `(k-1)! mod k`.
///
/// By Wilson's theorem the residue is `k - 1` exactly when `k` is prime. For
/// composite `k` it is 0, except for `k = 4` where it is 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WilsonWitness {
    pub k: u64,
    pub residue: u64,
}

impl WilsonWitness {
    pub fn is_prime(&self) -> bool {
        self.residue == self.k - 1
    }
}

pub fn wilson_witness(k: u64) -> Result<WilsonWitness> {
    if k < 2 {
        return Err(Error::domain(format!("Wilson witness needs k >= 2, got {k}")));
    }
    let residue = factorial_mod(k - 1, k)?;
    Ok(WilsonWitness { k, residue })
}

/// Primality by Wilson's theorem: `(k-1)! ≡ -1 (mod k)`.
pub fn is_prime_wilson(k: u64) -> Result<bool> {
    Ok(wilson_witness(k)?.is_prime())
}

/// Prime factorization `k = ∏ p^alpha`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub k: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// True when `k` has a single prime factor of multiplicity one.
    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    /// Multiplies the factors back together.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, alpha)| p.pow(alpha))
            .product()
    }
}

/// Factorizes `k` by trial division up to `√k`.
pub fn trial_factorize(k: u64) -> Result<Factorization> {
    if k < 2 {
        return Err(Error::domain(format!("cannot factorize {k}; need k >= 2")));
    }
    let mut factors = Vec::new();
    let mut rest = k;
    let mut d = 2u64;
    while d.saturating_mul(d) <= rest {
        if rest.is_multiple_of(d) {
            let mut alpha = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                alpha += 1;
            }
            factors.push((d, alpha));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { k, factors })
}

/// Exponent of `p` in `t!` by Legendre's formula, `Σ_{j>=1} ⌊t / p^j⌋`.
///
/// `p` is assumed prime; only `p >= 2` is checked. For composite `p` the sum
/// is still computed but has no valuation meaning.
pub fn legendre_valuation(p: u64, t: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::domain(format!("Legendre valuation needs p >= 2, got {p}")));
    }
    let mut nu = 0;
    let mut power = p;
    while power <= t {
        nu += t / power;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    Ok(nu)
}

/// One prime factor of `k`: its exponent in `k` and its valuation in `(k-1)!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeValuation {
    pub p: u64,
    pub alpha: u32,
    pub nu: u64,
}

impl PrimeValuation {
    pub fn absorbed(&self) -> bool {
        self.nu >= self.alpha as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionReport {
    pub k: u64,
    pub valuations: Vec<PrimeValuation>,
    /// Every prime power of `k` divides `(k-1)!`.
    pub absorbed: bool,
    /// `(k-1)! mod k`, computed independently of the valuations.
    pub factorial_residue: u64,
}

impl AbsorptionReport {
    /// The valuation route and the modular route agree.
    pub fn is_consistent(&self) -> bool {
        self.absorbed == (self.factorial_residue == 0)
    }
}

/// Checks whether `k | (k-1)!` by comparing each prime exponent of `k` with
/// its Legendre valuation in `(k-1)!`.
pub fn absorption_check(k: u64) -> Result<AbsorptionReport> {
    if k < 4 {
        return Err(Error::domain(format!("absorption check needs composite k >= 4, got {k}")));
    }
    let factorization = trial_factorize(k)?;
    if factorization.is_prime() {
        return Err(Error::domain(format!("absorption check needs composite k, {k} is prime")));
    }
    let valuations = factorization
        .factors
        .iter()
        .map(|&(p, alpha)| {
            legendre_valuation(p, k - 1).map(|nu| PrimeValuation { p, alpha, nu })
        })
        .collect::<Result<Vec<_>>>()?;
    let absorbed = valuations.iter().all(PrimeValuation::absorbed);
    let factorial_residue = factorial_mod(k - 1, k)?;
    Ok(AbsorptionReport {
        k,
        valuations,
        absorbed,
        factorial_residue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mulmod_examples() {
        assert_eq!(mulmod(3, 4, 5), Ok(2));
        assert_eq!(mulmod(0, 4, 5), Ok(0));
        assert_eq!(mulmod(0, 0, 1), Ok(0));
        let m = MAX_MODULUS;
        assert_eq!(mulmod(m - 1, m - 1, m), Ok(1));
    }

    #[test]
    fn mulmod_rejects_bad_moduli() {
        assert!(matches!(mulmod(0, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(mulmod(1, 1, MAX_MODULUS + 1), Err(Error::Domain(_))));
        assert!(matches!(mulmod(5, 1, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn factorial_mod_examples() {
        assert_eq!(factorial_mod(4, 5), Ok(4));
        assert_eq!(factorial_mod(0, 7), Ok(1));
        assert_eq!(factorial_mod(0, 1), Ok(0));
        assert_eq!(factorial_mod(5, 6), Ok(0));
        assert_eq!(factorial_mod(20, (1 << 61) - 1), Ok(2_432_902_008_176_640_000 % ((1 << 61) - 1)));
        assert!(factorial_mod(3, 0).is_err());
    }

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_witness(5).unwrap().residue, 4);
        assert_eq!(wilson_witness(6).unwrap().residue, 0);
        assert_eq!(wilson_witness(4).unwrap().residue, 2);
        assert_eq!(is_prime_wilson(7), Ok(true));
        assert_eq!(is_prime_wilson(8), Ok(false));
        assert_eq!(is_prime_wilson(2), Ok(true));
        assert!(wilson_witness(1).is_err());
        assert!(is_prime_wilson(0).is_err());
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(trial_factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(trial_factorize(13).unwrap().factors, vec![(13, 1)]);
        assert_eq!(trial_factorize(360).unwrap().factors, vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(trial_factorize(2).unwrap().factors, vec![(2, 1)]);
        assert_eq!(trial_factorize(49).unwrap().factors, vec![(7, 2)]);
        assert!(trial_factorize(1).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(2, 7), Ok(4));
        assert_eq!(legendre_valuation(3, 8), Ok(2));
        assert_eq!(legendre_valuation(11, 10), Ok(0));
        assert_eq!(legendre_valuation(2, 0), Ok(0));
        assert_eq!(legendre_valuation(2, u64::MAX), Ok(u64::MAX - u64::MAX.count_ones() as u64));
        assert!(legendre_valuation(1, 10).is_err());
    }

    #[test]
    fn absorption_examples() {
        let r8 = absorption_check(8).unwrap();
        assert_eq!(r8.valuations, vec![PrimeValuation { p: 2, alpha: 3, nu: 4 }]);
        assert!(r8.absorbed && r8.is_consistent());

        let r9 = absorption_check(9).unwrap();
        assert_eq!(r9.valuations, vec![PrimeValuation { p: 3, alpha: 2, nu: 2 }]);
        assert!(r9.absorbed && r9.is_consistent());

        let r4 = absorption_check(4).unwrap();
        assert_eq!(r4.valuations, vec![PrimeValuation { p: 2, alpha: 2, nu: 1 }]);
        assert!(!r4.absorbed);
        assert_eq!(r4.factorial_residue, 2);
        assert!(r4.is_consistent());

        assert!(absorption_check(7).is_err());
        assert!(absorption_check(3).is_err());
    }

    proptest::proptest! {
        #[test]
        fn reciprocal_reduction_matches_division(x: u64, m in 1u64..=1 << 32) {
            proptest::prop_assert_eq!(SmallModulus::new(m).reduce(x), x % m);
        }
    }

    #[test]
    fn reciprocal_reduction_edges() {
        for m in [1, 2, 3, 7, 1 << 31, (1 << 32) - 1, 1 << 32] {
            let modulus = SmallModulus::new(m);
            for x in [0, 1, m - 1, m, m + 1, u64::MAX, u64::MAX - 1, (m - 1) * (m - 1)] {
                assert_eq!(modulus.reduce(x), x % m, "x = {x}, m = {m}");
            }
        }
    }
}
