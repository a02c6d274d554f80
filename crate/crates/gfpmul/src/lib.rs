//! Integer multiplication through number-theoretic transforms over prime
//! fields `Z/pZ` with `p = r^(2^lambda) + 1`, a generalized Fermat prime.
//!
//! The crate has three legs that share the same field arithmetic:
//!
//! * [`multiplier`] builds multi-level multiplication plans and executes
//!   them: integers are cut into radix-`2^eta` chunks, transformed with a
//!   half-length DFT over the field, multiplied pointwise, and recovered.
//!   Pointwise products recurse into a smaller field of the same shape,
//!   either by regrouping base-`r` digits or by Kronecker substitution.
//! * [`primes`] searches for the primes themselves and estimates how many
//!   to expect in a given window, following the Bateman-Horn heuristic.
//! * [`costmodel`] predicts the number of expensive modular products a
//!   plan will spend on an `n`-bit input without running anything.
//!
//! [`gfp`] holds the field representation (little-endian base-`r` digit
//! vectors), [`transform`] the DFT machinery, [`reference`] slow oracles
//! used by the test suite, and [`counters`] the per-field operation
//! tallies that back the cost model's claims.

pub mod counters;
pub mod costmodel;
pub mod gfp;
pub mod multiplier;
pub mod primes;
pub mod reference;
pub mod textio;
pub mod transform;
