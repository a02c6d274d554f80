//! Count expensive products in an executed multiplication and compare with
//! the closed form N (3 ceil(log2 N / (lambda+1)) + 1).
//!
//! Twiddle multiplications by powers of the radix are shifts and stay out
//! of the expensive tally; what remains is the pointwise layer plus the
//! generic twiddle compositions of the three half-transforms. The
//! instrumented pipeline must land on the formula exactly, not just in
//! order of magnitude.

use gfpmul::counters;
use gfpmul::multiplier::{self, PlanConfig};
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for bits in [1u64 << 14, 1 << 17] {
        let plan = multiplier::precompute(bits, &PlanConfig::default()).expect("plan");
        let top = &plan.levels()[0];
        let (r, lambda, big_n) = (top.params().r(), top.params().lambda(), top.big_n());

        let mut buf = vec![0u8; (bits / 8) as usize];
        rng.fill_bytes(&mut buf);
        let a = BigUint::from_bytes_le(&buf);
        rng.fill_bytes(&mut buf);
        let b = BigUint::from_bytes_le(&buf);

        counters::reset();
        let product = multiplier::multiply(&a, &b, &plan).expect("multiply");
        assert_eq!(product, &a * &b);

        let measured = counters::counts_for(r, lambda).expensive_muls;
        let log_n = u64::from(big_n.trailing_zeros());
        let closed_form = big_n * (3 * log_n.div_ceil(u64::from(lambda) + 1) + 1);
        println!(
            "{bits}-bit multiply over {r}^{}+1 (N = 2^{log_n}): measured {measured}, closed form {closed_form}",
            1u64 << lambda
        );
        assert_eq!(measured, closed_form, "counter parity broken");
    }
    println!("instrumented counts match the closed form exactly");
}
