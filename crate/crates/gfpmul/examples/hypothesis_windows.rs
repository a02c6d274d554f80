//! Probe the growth-law windows [X, X (1 + lambda^2)] for prime bases.
//!
//! The recursion's level moduli come from such windows with X following a
//! growth law gamma(lambda); the interesting empirical question is whether
//! every window along the way actually contains a prime. The canonical
//! probes are X = 2^gamma and X = 2^(2 gamma); extra sample points can be
//! mixed in freely.

use gfpmul::primes::{self, GammaShape};

fn main() {
    for lambda in [2u32, 3, 4, 5] {
        println!("lambda = {lambda}, gamma identity:");
        for s in primes::hypothesis_window_check(lambda, GammaShape::Identity, &[]) {
            match s.found {
                Some(r) => println!(
                    "  X = {:>6}: [{}, {}] contains r = {r}",
                    s.x, s.lo, s.hi
                ),
                None => println!("  X = {:>6}: [{}, {}] is EMPTY", s.x, s.lo, s.hi),
            }
        }
    }

    // A steeper growth law widens the probes; explicit samples land
    // between the canonical endpoints.
    println!("lambda = 4, gamma square, with extra samples:");
    for s in primes::hypothesis_window_check(4, GammaShape::Square, &[100, 40_000]) {
        let verdict = match s.found {
            Some(r) => format!("contains r = {r}"),
            None => "is EMPTY".to_string(),
        };
        println!("  X = {:>8}: [{}, {}] {verdict}", s.x, s.lo, s.hi);
    }
}
