//! Closed-form operation counts for plan-shaped multiplication, without
//! building or running anything.
//!
//! For an `n`-bit input multiplied modulo `p = r^(2^lambda) + 1`, the model
//! fixes the chunk size `eta` from the modulus shape alone (the widest
//! power of two with `2 eta <= 2^lambda ceil(log2 r)`, half the packed
//! digit capacity), sets `N` to the transform length `ceil_pow2(2n /
//! eta)`, and charges the standard bill: `N` pointwise products plus `3 N
//! (ceil(log2 N / (lambda+1)) - 1)` twiddles plus `3 N` half-transform
//! compositions, which collapses to `N (3 ceil(log2 N / (lambda+1)) + 1)`
//! expensive products.
//!
//! The model is deliberately *formal*: it evaluates the count arithmetic
//! for whatever modulus it is handed, without checking that `p` is prime or
//! that the field actually contains a root of order `2N`. Comparative cost
//! tables routinely include hypothetical or composite moduli, and the
//! arithmetic is the same either way; executable-plan construction is where
//! those requirements are enforced.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostError {
    /// No power-of-two chunk size satisfies the capacity inequality.
    #[error("no valid chunk size: {n}-bit inputs do not fit r={r}, lambda={lambda}")]
    NoValidEta { n: u64, r: u64, lambda: u32 },
}

/// The bit budget of the modulus: `floor(log2(r^(2^lambda) + 1))`, computed
/// exactly (the modulus is odd, so it is never a power of two).
pub fn modulus_bit_budget(r: u64, lambda: u32) -> u64 {
    let p = BigUint::from(r).pow(1u32 << lambda) + 1u32;
    p.bits() - 1
}

fn ceil_pow2(x: u64) -> u64 {
    x.max(1).next_power_of_two()
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Chunk geometry and expensive-product count for one `n`-bit multiply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountBreakdown {
    /// Chunk width in bits.
    pub eta: u64,
    /// Transform length.
    pub big_n: u64,
    /// Expensive products per full multiplication.
    pub count: u64,
}

/// Fixes the chunk size from the modulus shape and returns the count.
///
/// A product of two `n`-bit integers needs `2n` bits of payload, cut into
/// `N = ceil_pow2(2n / eta)` chunks of `eta` bits. The chunk size depends
/// on the modulus alone: `eta` is the largest power of two with `2 eta <=
/// 2^lambda ceil(log2 r)`, half the bit capacity of the packed digit
/// vector, so a product of two chunks never outgrows the representation.
///
/// Before that, a feasibility gate checks that *some* power-of-two chunk
/// size keeps convolution coefficients (below `N 2^(2 eta)`) inside the
/// modulus bit budget at this `n`; a modulus too small for the operands is
/// rejected outright rather than billed.
pub fn expensive_count(n: u64, r: u64, lambda: u32) -> Result<CountBreakdown, CostError> {
    let budget = modulus_bit_budget(r, lambda);
    let mut feasible = false;
    let mut probe = 1u64;
    loop {
        let big_n = ceil_pow2(ceil_div(2 * n, probe));
        if 2 * probe + u64::from(big_n.trailing_zeros()) <= budget {
            feasible = true;
            break;
        }
        if probe >= 2 * n || 2 * probe > budget {
            break;
        }
        probe <<= 1;
    }
    if !feasible {
        return Err(CostError::NoValidEta { n, r, lambda });
    }
    let coeff_bits = 64 - u64::from((r - 1).leading_zeros());
    let capacity = coeff_bits << lambda;
    let eta = 1u64 << (capacity / 2).max(1).ilog2();
    debug_assert!(
        2 * eta <= capacity && 4 * eta > capacity,
        "eta not the widest half-capacity fit"
    );
    let big_n = ceil_pow2(ceil_div(2 * n, eta));
    let count = big_n * transform_rounds(big_n, lambda);
    Ok(CountBreakdown { eta, big_n, count })
}

/// `3 ceil(log2 N / (lambda+1)) + 1`: expensive products per transform
/// slot across the three half-transforms and the pointwise layer.
fn transform_rounds(big_n: u64, lambda: u32) -> u64 {
    let log_n = big_n.trailing_zeros() as u64;
    3 * ceil_div(log_n, u64::from(lambda) + 1) + 1
}

/// Bit size of the Kronecker packing of one field element: `2^lambda`
/// coefficient slots of `2 ceil(log2 r) + lambda` bits each. This is the
/// integer size the recursive level actually multiplies.
pub fn ks_bitsize(r: u64, lambda: u32) -> u64 {
    let coeff_bits = 64 - u64::from((r - 1).leading_zeros());
    (2 * coeff_bits + u64::from(lambda)) << lambda
}

/// Expensive products inside one cyclic transform of length `big_n` when
/// the shift group has order `2^radix_log`: `N (ceil(log2 N / radix_log) - 1)`.
/// The comparison point for classic 2-adic (radix 2) transforms is
/// `radix_log = 1`, where this degenerates to the familiar `N (log2 N - 1)`.
pub fn fermat_fft_count(big_n: u64, radix_log: u32) -> u64 {
    let log_n = big_n.trailing_zeros() as u64;
    big_n * ceil_div(log_n, u64::from(radix_log)).saturating_sub(1)
}

/// Transform length a classic Schonhage-Strassen style split would use at
/// input size `n`: about `sqrt(2n)` pieces, `2^ceil((log2 n + 1)/2)`
/// exactly. A coarse comparison figure, not a tuned parameterization;
/// reports that print it label it approximate.
pub fn ssa_transform_length(n: u64) -> u64 {
    1u64 << ((u64::from(n.max(1).ilog2()) + 2) / 2)
}

/// Measured seconds for one generic product at a given operand bit size,
/// interpolated piecewise-linearly in `log2(bits)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingProfile {
    /// `(bits, seconds)` points, strictly increasing in bits.
    points: Vec<(u64, f64)>,
}

impl TimingProfile {
    pub fn new(mut points: Vec<(u64, f64)>) -> TimingProfile {
        points.sort_by_key(|&(b, _)| b);
        points.dedup_by_key(|&mut (b, _)| b);
        TimingProfile { points }
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    /// Seconds for one product of `bits`-bit operands. Linear in log-size
    /// between points, flat at the end values outside the measured range
    /// (extrapolating a local slope invents data, and can even go
    /// negative). `None` without any points.
    pub fn estimate(&self, bits: u64) -> Option<f64> {
        if self.points.is_empty() || bits == 0 {
            return None;
        }
        let (b_first, s_first) = self.points[0];
        if bits <= b_first {
            return Some(s_first);
        }
        let &(b_last, s_last) = self.points.last().unwrap();
        if bits >= b_last {
            return Some(s_last);
        }
        let x = (bits as f64).log2();
        for w in self.points.windows(2) {
            let (b0, s0) = w[0];
            let (b1, s1) = w[1];
            if bits <= b1 {
                let x0 = (b0 as f64).log2();
                let x1 = (b1 as f64).log2();
                return Some(s0 + (s1 - s0) * (x - x0) / (x1 - x0));
            }
        }
        unreachable!()
    }
}

/// One row of a comparative cost table.
#[derive(Clone, Debug, PartialEq)]
pub struct CostRow {
    /// Input size in bits the row was evaluated at.
    pub n: u64,
    pub r: u64,
    pub lambda: u32,
    pub eta: u64,
    pub big_n: u64,
    pub count: u64,
    pub ks_bits: u64,
    /// `count` scaled by the profiled cost of one `ks_bits`-bit product,
    /// when a profile is supplied.
    pub seconds: Option<f64>,
}

/// Evaluates the model for each modulus at input size `n`, one row per
/// `(r, lambda)` pair, in input order.
pub fn table_report(
    n: u64,
    prime_list: &[(u64, u32)],
    profile: Option<&TimingProfile>,
) -> Result<Vec<CostRow>, CostError> {
    prime_list
        .iter()
        .map(|&(r, lambda)| {
            let bd = expensive_count(n, r, lambda)?;
            let ks_bits = ks_bitsize(r, lambda);
            let seconds = profile
                .and_then(|pr| pr.estimate(ks_bits))
                .map(|per| per * bd.count as f64);
            Ok(CostRow {
                n,
                r,
                lambda,
                eta: bd.eta,
                big_n: bd.big_n,
                count: bd.count,
                ks_bits,
                seconds,
            })
        })
        .collect()
}

#[cfg(test)]
mod model_sanity {
    use super::*;

    #[test]
    fn chunk_width_is_half_the_digit_capacity() {
        // Worked by hand: r = 44, lambda = 4 packs 16 digits of
        // ceil(log2 44) = 6 bits, 96 bits of capacity. The widest power of
        // two with 2 eta <= 96 is eta = 32, independent of n; at n = 2^20
        // that cuts 2^21 product bits into 2^16 chunks.
        let bd = expensive_count(1 << 20, 44, 4).unwrap();
        assert_eq!(bd.eta, 32);
        assert_eq!(bd.big_n, 1 << 16);
    }
}
