//! Arithmetic in `Z/pZ` for `p = r^(2^lambda) + 1` prime, on the radix-`r`
//! digit representation.
//!
//! An element is stored as `2^lambda` little-endian digits in `[0, r)`;
//! the digit vector carries the value `sum d_i r^i` in `[0, p - 1)`. The one
//! residue that does not fit this window, `p - 1 = r^(2^lambda)`, gets a
//! dedicated flag. The payoff for the skewed window is that `r` behaves as
//! a `2^(lambda+1)`-th root of unity whose powers act by digit shifts:
//! `r^(2^lambda) = -1 (mod p)`, so multiplying by `r^j` is a rotation with
//! sign flips, never a real multiplication.
//!
//! Nothing here allocates per digit or touches `BigUint` outside the
//! encode/decode boundary; the hot paths are plain `u64`/`i128` loops.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::counters::{self, FieldKey};
use crate::primes;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfpError {
    /// `r^(2^lambda) + 1` failed the primality check.
    #[error("r^(2^{lambda}) + 1 with r={r} is not prime")]
    CompositeModulus { r: u64, lambda: u32 },
    /// The base must be even (odd bases give an even modulus).
    #[error("base {r} is odd")]
    OddBase { r: u64 },
    /// A value fell outside its documented range.
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },
    /// `mul_by_r_power` exponent outside `[0, 2^(lambda+1))`.
    #[error("shift exponent {j} outside [0, {limit})")]
    ShiftOutOfRange { j: u64, limit: u64 },
}

/// Field constants shared by every element of one `Z/pZ`.
#[derive(Clone, Debug)]
pub struct GfpParams {
    r: u64,
    lambda: u32,
    /// `2^lambda`, the digit count.
    digits: usize,
    p: BigUint,
    /// `ceil(log2 r)`.
    coeff_bits: u32,
    /// `floor(log2 p)`; the modulus spans `floor_log2_p + 1` bits.
    floor_log2_p: u64,
    /// Whether schoolbook convolutions fit signed 128-bit accumulators.
    i128_ok: bool,
}

impl GfpParams {
    pub fn r(&self) -> u64 {
        self.r
    }
    pub fn lambda(&self) -> u32 {
        self.lambda
    }
    pub fn digits(&self) -> usize {
        self.digits
    }
    pub fn modulus(&self) -> &BigUint {
        &self.p
    }
    pub fn coeff_bits(&self) -> u32 {
        self.coeff_bits
    }
    pub fn floor_log2_p(&self) -> u64 {
        self.floor_log2_p
    }
    pub(crate) fn key(&self) -> FieldKey {
        (self.r, self.lambda)
    }
}

/// Builds the field constants, verifying the modulus really is prime.
pub fn make_params(r: u64, lambda: u32) -> Result<GfpParams, GfpError> {
    if r % 2 != 0 {
        return Err(GfpError::OddBase { r });
    }
    if r < 2 {
        return Err(GfpError::OutOfRange {
            what: "base r",
            value: r.to_string(),
        });
    }
    if lambda > 24 {
        // 2^24 digits per element is already past anything the planner can
        // produce; treat larger values as a caller bug, not an allocation.
        return Err(GfpError::OutOfRange {
            what: "lambda",
            value: lambda.to_string(),
        });
    }
    if !primes::is_gfp_prime(r, lambda) {
        return Err(GfpError::CompositeModulus { r, lambda });
    }
    let digits = 1usize << lambda;
    let p = BigUint::from(r).pow(digits as u32) + 1u32;
    let coeff_bits = 64 - (r - 1).leading_zeros();
    // p is odd and > 2, hence never a power of two, so bits() - 1 is exact.
    let floor_log2_p = p.bits() - 1;
    let i128_ok = u64::from(lambda) + 2 * u64::from(coeff_bits) <= 126;
    Ok(GfpParams {
        r,
        lambda,
        digits,
        p,
        coeff_bits,
        floor_log2_p,
        i128_ok,
    })
}

/// One residue of `Z/pZ`.
///
/// Invariant: all digits lie in `[0, r)`, and a set `minus_one` flag forces
/// the digit vector to all zeros, so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfpElement {
    coeffs: Vec<u64>,
    minus_one: bool,
}

impl GfpElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    pub fn is_minus_one(&self) -> bool {
        self.minus_one
    }
    pub fn is_zero(&self) -> bool {
        !self.minus_one && self.coeffs.iter().all(|&d| d == 0)
    }
}

pub fn zero(params: &GfpParams) -> GfpElement {
    GfpElement {
        coeffs: vec![0; params.digits],
        minus_one: false,
    }
}

pub fn one(params: &GfpParams) -> GfpElement {
    let mut e = zero(params);
    e.coeffs[0] = 1;
    e
}

pub fn minus_one(params: &GfpParams) -> GfpElement {
    GfpElement {
        coeffs: vec![0; params.digits],
        minus_one: true,
    }
}

// ---------------------------------------------------------------------------
// Encode / decode
// ---------------------------------------------------------------------------

/// Encodes an integer in `[0, p)` as digits.
pub fn encode(x: &BigUint, params: &GfpParams) -> Result<GfpElement, GfpError> {
    if x >= &params.p {
        return Err(GfpError::OutOfRange {
            what: "encode input",
            value: x.to_string(),
        });
    }
    if let Some(small) = x.to_u128() {
        return Ok(encode_u128(small, params));
    }
    let p_minus_1 = &params.p - 1u32;
    if *x == p_minus_1 {
        return Ok(minus_one(params));
    }
    let mut e = zero(params);
    let r = BigUint::from(params.r);
    let mut rest = x.clone();
    for slot in e.coeffs.iter_mut() {
        if rest.is_zero() {
            break;
        }
        let (q, rem) = rest.div_rem(&r);
        *slot = rem.to_u64().expect("digit fits u64 by construction");
        rest = q;
    }
    debug_assert!(rest.is_zero());
    Ok(e)
}

/// Encodes a small integer. The caller guarantees `x < p`; this always
/// holds for chunk payloads, whose width is checked at plan time.
pub(crate) fn encode_u128(x: u128, params: &GfpParams) -> GfpElement {
    let mut e = zero(params);
    let r = params.r as u128;
    let mut rest = x;
    for slot in e.coeffs.iter_mut() {
        if rest == 0 {
            break;
        }
        *slot = (rest % r) as u64;
        rest /= r;
    }
    if rest != 0 {
        // x was p - 1 (the only in-range value needing the top power).
        debug_assert!(e.is_zero() && rest == 1);
        return minus_one(params);
    }
    e
}

/// Recovers the integer in `[0, p)`.
pub fn decode(e: &GfpElement, params: &GfpParams) -> BigUint {
    if e.minus_one {
        return &params.p - 1u32;
    }
    let r = BigUint::from(params.r);
    let mut acc = BigUint::zero();
    for &d in e.coeffs.iter().rev() {
        acc = acc * &r + d;
    }
    acc
}

// ---------------------------------------------------------------------------
// Addition family
// ---------------------------------------------------------------------------

/// Adds 1 in place. Returns the canonical successor.
fn incremented(mut e: GfpElement, params: &GfpParams) -> GfpElement {
    if e.minus_one {
        return zero(params);
    }
    for d in e.coeffs.iter_mut() {
        if *d + 1 < params.r {
            *d += 1;
            return e;
        }
        *d = 0;
    }
    // Every digit wrapped: the value was p - 2, its successor is p - 1.
    minus_one(params)
}

/// Subtracts 1 in place.
fn decremented(mut e: GfpElement, params: &GfpParams) -> GfpElement {
    if e.minus_one {
        // p - 2 = r^(2^lambda) - 1: all digits at r - 1.
        return GfpElement {
            coeffs: vec![params.r - 1; params.digits],
            minus_one: false,
        };
    }
    for d in e.coeffs.iter_mut() {
        if *d > 0 {
            *d -= 1;
            return e;
        }
        *d = params.r - 1;
    }
    // Zero decrements to p - 1; undo the borrow fill.
    minus_one(params)
}

fn add_core(a: &GfpElement, b: &GfpElement, params: &GfpParams) -> GfpElement {
    match (a.minus_one, b.minus_one) {
        (true, true) => {
            // (p - 1) + (p - 1) = p - 2.
            return GfpElement {
                coeffs: vec![params.r - 1; params.digits],
                minus_one: false,
            };
        }
        (true, false) => return decremented(b.clone(), params),
        (false, true) => return decremented(a.clone(), params),
        (false, false) => {}
    }
    let mut out = a.clone();
    let mut carry = 0u64;
    for (d, &s) in out.coeffs.iter_mut().zip(&b.coeffs) {
        let v = *d + s + carry;
        if v >= params.r {
            *d = v - params.r;
            carry = 1;
        } else {
            *d = v;
            carry = 0;
        }
    }
    if carry == 1 {
        // The sum overflowed by exactly r^(2^lambda) = p - 1 = -1 mod p.
        decremented(out, params)
    } else {
        out
    }
}

fn sub_core(a: &GfpElement, b: &GfpElement, params: &GfpParams) -> GfpElement {
    if b.minus_one {
        // a - (p - 1) = a + 1.
        return incremented(a.clone(), params);
    }
    if a.minus_one {
        // (p - 1) - b = -(b + 1).
        return neg_core(&incremented(b.clone(), params), params);
    }
    let mut out = a.clone();
    let mut borrow = 0u64;
    for (d, &s) in out.coeffs.iter_mut().zip(&b.coeffs) {
        let need = s + borrow;
        if *d >= need {
            *d -= need;
            borrow = 0;
        } else {
            *d = *d + params.r - need;
            borrow = 1;
        }
    }
    if borrow == 1 {
        // a < b as digit values: the result is short by r^(2^lambda),
        // and -r^(2^lambda) = 1 mod p.
        incremented(out, params)
    } else {
        out
    }
}

pub(crate) fn neg_core(e: &GfpElement, params: &GfpParams) -> GfpElement {
    if e.is_zero() {
        return zero(params);
    }
    if e.minus_one {
        return one(params);
    }
    // p - x = (r^(2^lambda) - 1 - x) + 2; the parenthesis is a digitwise
    // complement, then two increments absorb the +2.
    let complemented = GfpElement {
        coeffs: e.coeffs.iter().map(|&d| params.r - 1 - d).collect(),
        minus_one: false,
    };
    incremented(incremented(complemented, params), params)
}

/// Field addition. Counts one addition in the field tally.
pub fn add(a: &GfpElement, b: &GfpElement, params: &GfpParams) -> GfpElement {
    counters::tally_addition(params.key());
    add_core(a, b, params)
}

/// Field subtraction. Counts one addition in the field tally.
pub fn sub(a: &GfpElement, b: &GfpElement, params: &GfpParams) -> GfpElement {
    counters::tally_addition(params.key());
    sub_core(a, b, params)
}

/// Field negation. Counts one addition in the field tally.
pub fn neg(a: &GfpElement, params: &GfpParams) -> GfpElement {
    counters::tally_addition(params.key());
    neg_core(a, params)
}

// ---------------------------------------------------------------------------
// Cheap multiplications by powers of r
// ---------------------------------------------------------------------------

/// Multiplies by `r^j` for `j` in `[0, 2^(lambda+1))`, as a digit rotation
/// with negacyclic sign flips. Counts one cheap shift.
pub fn mul_by_r_power(
    a: &GfpElement,
    j: u64,
    params: &GfpParams,
) -> Result<GfpElement, GfpError> {
    let limit = 1u64 << (params.lambda + 1);
    if j >= limit {
        return Err(GfpError::ShiftOutOfRange { j, limit });
    }
    counters::tally_shift(params.key());
    Ok(shift_core(a, j, params))
}

pub(crate) fn shift_core(a: &GfpElement, j: u64, params: &GfpParams) -> GfpElement {
    let half = params.digits as u64;
    let (negate, t) = if j >= half { (true, j - half) } else { (false, j) };
    if a.is_zero() {
        return zero(params);
    }
    if a.minus_one {
        // (p - 1) r^t = -r^t; with the extra negation it is +r^t.
        let mut raw = vec![0i128; params.digits];
        raw[t as usize] = if negate { 1 } else { -1 };
        return normalize_i128(&mut raw, params);
    }
    let t = t as usize;
    let n = params.digits;
    let mut raw = vec![0i128; n];
    for (i, &d) in a.coeffs.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let pos = i + t;
        let (slot, mut sign) = if pos >= n { (pos - n, -1i128) } else { (pos, 1i128) };
        if negate {
            sign = -sign;
        }
        raw[slot] += sign * d as i128;
    }
    normalize_i128(&mut raw, params)
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Folds an arbitrary signed digit vector back to canonical form.
///
/// Each pass runs a borrow/carry chain putting digits into `[0, r)`; a
/// leftover carry `c` at the top is worth `c r^(2^lambda) = -c mod p` and is
/// folded into digit 0. The one value the digit window cannot express,
/// `p - 1`, shows up as a clean `carry = 1` over an all-zero vector and
/// becomes the flag.
pub fn normalize_i128(raw: &mut [i128], params: &GfpParams) -> GfpElement {
    let r = params.r as i128;
    for _round in 0..128 {
        let mut carry = 0i128;
        for slot in raw.iter_mut() {
            let v = *slot + carry;
            let q = v.div_euclid(r);
            *slot = v - q * r;
            carry = q;
        }
        if carry == 0 {
            return GfpElement {
                coeffs: raw.iter().map(|&d| d as u64).collect(),
                minus_one: false,
            };
        }
        if carry == 1 && raw.iter().all(|&d| d == 0) {
            return minus_one(params);
        }
        raw[0] -= carry;
    }
    unreachable!("carry folding did not settle; inputs exceeded documented bounds");
}

/// [`normalize_i128`] for accumulators too wide for 128 bits.
pub fn normalize_big(raw: &mut [BigInt], params: &GfpParams) -> GfpElement {
    let r = BigInt::from(params.r);
    for _round in 0..256 {
        let mut carry = BigInt::zero();
        for slot in raw.iter_mut() {
            let v = &*slot + &carry;
            let (q, rem) = v.div_mod_floor(&r);
            *slot = rem;
            carry = q;
        }
        if carry.is_zero() {
            return GfpElement {
                coeffs: raw
                    .iter()
                    .map(|d| d.to_u64().expect("digit in [0, r)"))
                    .collect(),
                minus_one: false,
            };
        }
        if carry.is_one() && raw.iter().all(|d| d.is_zero()) {
            return minus_one(params);
        }
        raw[0] -= carry;
    }
    unreachable!("carry folding did not settle; inputs exceeded documented bounds");
}

// ---------------------------------------------------------------------------
// Generic multiplication
// ---------------------------------------------------------------------------

/// How [`mul_generic`] realizes the product.
pub enum MulStrategy<'a> {
    /// Negacyclic schoolbook convolution of the digit vectors.
    Schoolbook,
    /// Caller-provided engine; multiplication plans inject their recursive
    /// level multiplier here so the transform code stays level-agnostic.
    Custom(&'a dyn Fn(&GfpElement, &GfpElement) -> GfpElement),
}

/// Full modular product. Counts one expensive multiplication in this
/// field's tally regardless of strategy.
pub fn mul_generic(
    a: &GfpElement,
    b: &GfpElement,
    params: &GfpParams,
    strategy: &MulStrategy,
) -> GfpElement {
    counters::tally_expensive(params.key());
    // -1 times anything is a negation, not a real product, but it still
    // counts as one: the tally mirrors how often the multiplier is invoked,
    // not how lucky the operands are.
    if a.minus_one {
        return neg_core(b, params);
    }
    if b.minus_one {
        return neg_core(a, params);
    }
    match strategy {
        MulStrategy::Schoolbook => schoolbook(a, b, params),
        MulStrategy::Custom(f) => f(a, b),
    }
}

fn schoolbook(a: &GfpElement, b: &GfpElement, params: &GfpParams) -> GfpElement {
    let n = params.digits;
    if params.i128_ok {
        let mut raw = vec![0i128; n];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let prod = (ai as u128 * bj as u128) as i128;
                let t = i + j;
                if t < n {
                    raw[t] += prod;
                } else {
                    raw[t - n] -= prod;
                }
            }
        }
        normalize_i128(&mut raw, params)
    } else {
        let mut raw = vec![BigInt::zero(); n];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let ai = BigInt::from(ai);
            for (j, &bj) in b.coeffs.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let prod = &ai * bj;
                let t = i + j;
                if t < n {
                    raw[t] += prod;
                } else {
                    raw[t - n] -= prod;
                }
            }
        }
        normalize_big(&mut raw, params)
    }
}

/// The inverse of `2^k` modulo `p`, used to fold the `1/N` factor of
/// inverse transforms into composition tables.
pub fn inv_pow2(k: u32, params: &GfpParams) -> GfpElement {
    let inv2: BigUint = (&params.p + 1u32) >> 1;
    let v = inv2.modpow(&BigUint::from(k), &params.p);
    encode(&v, params).expect("modular value is reduced")
}

/// Modular exponentiation on elements, through the integer side. Intended
/// for table construction, not hot paths.
pub fn pow(e: &GfpElement, exp: &BigUint, params: &GfpParams) -> GfpElement {
    let v = decode(e, params).modpow(exp, &params.p);
    encode(&v, params).expect("modular value is reduced")
}
