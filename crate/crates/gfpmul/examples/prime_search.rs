//! Hunt for generalized Fermat primes r^(2^lambda) + 1.
//!
//! Walks even bases upward from a starting point for a few shapes, then
//! reproduces the record list of working moduli at one prime per lambda,
//! including the minimal 90-bit-plus base at lambda = 4.

use gfpmul::primes::{self, SearchDirection};
use num_bigint::BigUint;

fn main() {
    println!("smallest prime base at or above a starting point:");
    for (start, lambda) in [(50u64, 4u32), (100, 5), (2, 3)] {
        match primes::next_gfp(start, lambda, SearchDirection::Up) {
            Ok(r) => {
                let p = BigUint::from(r).pow(1u32 << lambda) + 1u32;
                println!(
                    "  lambda={lambda}, start={start}: r = {r} ({} bits)",
                    p.bits()
                );
            }
            Err(e) => println!("  lambda={lambda}, start={start}: {e}"),
        }
    }

    println!("verified working moduli, one per shape:");
    for (r, lambda) in [(74u64, 4u32), (884, 5), (1084, 6), (1738, 7), (1348, 8)] {
        let verdict = if primes::is_gfp_prime(r, lambda) {
            "prime"
        } else {
            "composite"
        };
        println!("  {r}^{} + 1: {verdict}", 1u64 << lambda);
    }
}
