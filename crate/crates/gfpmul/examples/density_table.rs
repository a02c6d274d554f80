//! Prime-density bookkeeping: the window count of generalized Fermat
//! primes against the expectancy-based estimate.
//!
//! For each shape lambda the two standard intervals are
//! \[2^lambda, 2^lambda (1 + lambda^2)\] and \[4^lambda, 4^lambda (1 +
//! lambda^2)\]. The estimate integrates the conjectured density with the
//! constant C_lambda, truncated at K = 10^6; counting is exact but only
//! cheap enough to run here for the smaller shapes.

use gfpmul::primes::{self, SearchWindow};
use gfpmul::textio;

fn main() {
    let k = 1_000_000;
    let lambdas = [2u32, 3, 4, 5];
    let constants = primes::c_lambda_batch(&lambdas, k);
    println!("density constants truncated at K = 10^6:");
    for (lambda, c) in lambdas.iter().zip(&constants) {
        println!("  C_{lambda} = {:.9}", c.value);
    }

    for (lambda, c) in lambdas.iter().copied().zip(&constants) {
        for lo in [1u64 << lambda, 1 << (2 * lambda)] {
            let hi = lo * (1 + u64::from(lambda) * u64::from(lambda));
            let count = primes::count_gfp(&SearchWindow { lambda, lo, hi });
            let estimate = primes::delta_with_c(lo as f64, lambda, c.value);
            println!(
                "{}",
                textio::format_density_record(lambda, lo, hi, Some(count), estimate)
            );
        }
    }
}
