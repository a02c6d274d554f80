//! Multiply two random integers through the transform pipeline and check
//! the product against plain big-integer arithmetic.
//!
//! The plan is built once for the worst-case operand size and reused; its
//! outline (modulus, transform length, grouping) is printed so the shape
//! of the computation is visible next to the verification verdict.

use gfpmul::counters;
use gfpmul::multiplier::{self, PlanConfig};
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let bits = 1u64 << 17;
    let plan = multiplier::precompute(bits, &PlanConfig::default()).expect("plan");
    println!("plan for {bits}-bit operands:");
    for (depth, level) in plan.levels().iter().enumerate() {
        println!(
            "  level {depth}: p = {}^{} + 1, N = 2^{}, eta = {}, beta = {}",
            level.params().r(),
            1u64 << level.params().lambda(),
            level.big_n().trailing_zeros(),
            level.eta(),
            level.beta(),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut buf = vec![0u8; (bits / 8) as usize];
    rng.fill_bytes(&mut buf);
    let a = BigUint::from_bytes_le(&buf);
    rng.fill_bytes(&mut buf);
    let b = BigUint::from_bytes_le(&buf);

    counters::reset();
    let product = multiplier::multiply(&a, &b, &plan).expect("multiply");
    assert_eq!(product, &a * &b, "pipeline diverged from big-integer oracle");
    println!("product verified against the big-integer oracle");

    for ((r, lambda), c) in counters::report() {
        println!(
            "  field {r}^{}+1: {} expensive products, {} shifts, {} additions",
            1u64 << lambda,
            c.expensive_muls,
            c.cheap_shifts,
            c.additions
        );
    }
}
