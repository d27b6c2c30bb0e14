//! Barrett's prime-counting formula, evaluated three ways.
//!
//! The counter
//!
//! ```text
//! Barr(n) = 3 + Σ_{k=5}^{n-1} sin[((k-1)!/k)·π] / sin(π/k)
//! ```
//!
//! counts the primes below `n` when 1 is treated as a prime. Every summand is
//! exactly 0 or 1, and which one it is depends only on `(k-1)! mod 2k`:
//!
//! - [`arith`] holds the exact integer primitives (modular products and
//!   factorials, Wilson residues, trial factorization, Legendre valuations).
//! - [`counter`] collapses each summand to `{0, 1}` without touching a sine
//!   and sums them into `Barr(n)`, plus the prime number theorem comparison.
//! - [`trig`] evaluates the summand in floating point, once with the reduced
//!   argument and once literally, to show where the literal form breaks.
//! - [`sieve`] is the sieve of Eratosthenes every result is checked against.
//!
//! ```
//! use barrett_core::counter::barrett_count;
//!
//! assert_eq!(barrett_count(6).unwrap(), 4);
//! assert_eq!(barrett_count(17).unwrap(), 7);
//! ```

pub mod arith;
pub mod counter;
pub mod error;
pub mod sieve;
pub mod trig;

pub use error::{Error, Result};
