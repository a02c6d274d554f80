//! Number-theoretic transforms over `Z/pZ`, `p = r^(2^lambda) + 1`, built
//! so that almost all twiddle factors are powers of `r` and therefore cost
//! digit shifts instead of multiplications.
//!
//! The length-`2N` root `omega` is constructed *aligned*: it satisfies
//! `omega^(2N / 2^(lambda+1)) = r`, so the unique subgroup of order
//! `2^(lambda+1)` is exactly the shift group generated by `r`. A cyclic
//! transform of length `L` then decomposes into `2^(lambda+1)` interleaved
//! transforms of length `L / 2^(lambda+1)`, one layer of generic twiddles,
//! and a pile of tiny FFTs whose twiddles are all powers of `r`. Only the
//! middle layer pays real multiplications: `L (ceil(log2 L / (lambda+1)) - 1)`
//! of them for the full recursion.
//!
//! Negacyclic (polynomial mod `x^N + 1`) products use the standard odd-root
//! trick: compose with powers of `omega`, run the *cyclic* machinery at
//! `omega^2`, and undo the composition on the way back. The `1/N` factor of
//! the inverse transform rides along inside the stored inverse composition
//! constants, so no separate scaling pass exists or is counted.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::gfp::{self, mul_generic, GfpElement, GfpParams, MulStrategy};
use crate::primes;

/// Multiplication engine for transform internals.
///
/// The twiddle layers multiply by *known* table constants, and a recursive
/// multiplier can exploit that: the forward transform of each constant can
/// be precomputed once per plan, halving the work of every twiddle product.
/// The index-carrying methods exist so an engine can recognize which
/// constant it is multiplying by; the defaults just fall back to a generic
/// product with the looked-up value.
pub trait TwiddleEngine {
    fn mul_pair(&self, a: &GfpElement, b: &GfpElement) -> GfpElement;

    fn mul_by_power(&self, x: &GfpElement, idx: u64, table: &TwiddleTable) -> GfpElement {
        self.mul_pair(x, table.power(idx))
    }

    fn mul_by_inv_comp(&self, x: &GfpElement, k: u64, table: &TwiddleTable) -> GfpElement {
        self.mul_pair(x, table.inv_composition(k))
    }
}

/// The plain engine: every product is a schoolbook convolution.
pub struct SchoolbookEngine<'a> {
    pub params: &'a GfpParams,
}

impl TwiddleEngine for SchoolbookEngine<'_> {
    fn mul_pair(&self, a: &GfpElement, b: &GfpElement) -> GfpElement {
        mul_generic(a, b, self.params, &MulStrategy::Schoolbook)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    /// The base `r` could not be factored, so a generator cannot be
    /// certified.
    #[error("cannot certify a generator: {r} has an unfactored composite part {rest}")]
    FactorizationFailure { r: u64, rest: u64 },
    /// The multiplicative group has no element of the requested order.
    #[error("no root of order {requested} in this field (2-adic capacity {capacity})")]
    OrderUnavailable { requested: u64, capacity: u64 },
    /// A cheap-twiddle transform was asked to multiply by something that is
    /// not a power of `r`.
    #[error("twiddle is not a power of r; cheap mode cannot realize it")]
    CheapModeViolation,
    /// The twiddle table's order does not cover the requested length.
    #[error("table of order {table_order} cannot serve a length-{requested} transform")]
    TableTooSmall { table_order: u64, requested: u64 },
    /// A vector arrived in the wrong phase (coefficient vs evaluation).
    #[error("expected a vector in {expected:?} phase, got {got:?}")]
    PhaseMismatch { expected: Phase, got: Phase },
}

/// Which side of the transform a vector currently lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Coefficient,
    Evaluation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Twiddle selection policy for the plain radix-2 transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwiddleMode {
    /// Every twiddle must be a power of `r`; anything else is an error.
    /// This is the mode the large-radix recursion relies on.
    CheapOnly,
    /// Twiddles are applied with generic multiplications. Slow, but valid
    /// for any root; exists for cross-checking.
    Generic,
}

/// A coefficient or evaluation vector tagged with its phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalVector {
    pub values: Vec<GfpElement>,
    pub phase: Phase,
}

impl EvalVector {
    pub fn coefficients(values: Vec<GfpElement>) -> EvalVector {
        EvalVector {
            values,
            phase: Phase::Coefficient,
        }
    }
}

// ---------------------------------------------------------------------------
// Generators and principal roots
// ---------------------------------------------------------------------------

fn prime_factors_u64(mut n: u64) -> Result<Vec<u64>, (u64, u64)> {
    let original = n;
    let mut out = Vec::new();
    for d in std::iter::once(2).chain((3..).step_by(2)) {
        if d > 1 << 21 || d * d > n {
            break;
        }
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
    }
    if n > 1 {
        if primes::is_prime_u64(n) {
            out.push(n);
        } else {
            return Err((original, n));
        }
    }
    Ok(out)
}

/// Smallest certified generator of the multiplicative group.
///
/// `p - 1 = r^(2^lambda)`, so the prime factors of the group order are
/// exactly 2 and the odd prime factors of `r`; certification is the usual
/// `g^((p-1)/q) != 1` check for each of them.
pub fn find_generator(params: &GfpParams) -> Result<GfpElement, TransformError> {
    let factors = prime_factors_u64(params.r()).map_err(|(r, rest)| {
        TransformError::FactorizationFailure { r, rest }
    })?;
    let p = params.modulus();
    let group_order = p - 1u32;
    let one = BigUint::one();
    'cand: for g in 2u64.. {
        let gb = BigUint::from(g);
        if gb >= *p {
            break;
        }
        for &q in &factors {
            let e = &group_order / q;
            if gb.modpow(&e, p) == one {
                continue 'cand;
            }
        }
        return Ok(gfp::encode(&gb, params).expect("g < p"));
    }
    unreachable!("a prime field always has a generator");
}

/// A principal root of unity of order `two_n` (a power of two), aligned
/// with the shift group: `omega^(two_n / 2^(lambda+1)) = r` whenever
/// `two_n >= 2^(lambda+1)`.
///
/// Alignment is what lets every transform built on this root push its
/// bottom layers onto powers of `r`. An arbitrary root of the right order
/// would be correct but would pay generic products where shifts suffice.
pub fn principal_root(two_n: u64, params: &GfpParams) -> Result<GfpElement, TransformError> {
    let p = params.modulus();
    let m = 1u64 << (params.lambda() + 1);
    if two_n == 0 || !two_n.is_power_of_two() {
        return Err(TransformError::OrderUnavailable {
            requested: two_n,
            capacity: 0,
        });
    }
    if two_n <= m {
        // Inside the shift group itself: the plain power r^(2^(lambda+1) / two_n).
        let e = m / two_n;
        let val = BigUint::from(params.r()).modpow(&BigUint::from(e), p);
        return Ok(gfp::encode(&val, params).expect("reduced"));
    }
    // v2(p - 1) = 2^lambda * v2(r): the group's 2-Sylow capacity.
    let v2_r = params.r().trailing_zeros() as u64;
    let capacity = v2_r << params.lambda();
    let needed = two_n.trailing_zeros() as u64;
    if needed > capacity {
        return Err(TransformError::OrderUnavailable {
            requested: two_n,
            capacity,
        });
    }
    let g = find_generator(params)?;
    let group_order = p - 1u32;
    let h = gfp::decode(&g, params).modpow(&(&group_order / two_n), p);
    // h has order two_n but need not be aligned. h^(two_n / 2^(lambda+1))
    // has order 2^(lambda+1) and so lives in the unique subgroup of that
    // order, which is generated by r; find which odd power it is.
    let torsion = h.modpow(&BigUint::from(two_n / m), p);
    let r_big = BigUint::from(params.r());
    let r_sq = (&r_big * &r_big) % p;
    let mut cur = r_big.clone() % p;
    let mut j0 = None;
    for j in 0..(m / 2) {
        if cur == torsion {
            j0 = Some(j);
            break;
        }
        cur = (&cur * &r_sq) % p;
    }
    let j0 = j0.ok_or(TransformError::OrderUnavailable {
        requested: two_n,
        capacity,
    })?;
    // (2 j0 + 1) is odd, hence invertible mod 2^(lambda+1); raising h to
    // the inverse keeps the order and rotates the torsion part onto r.
    let k = inv_mod_pow2(2 * j0 + 1, m);
    let omega = h.modpow(&BigUint::from(k), p);
    debug_assert_eq!(omega.modpow(&BigUint::from(two_n / m), p), r_big % p);
    Ok(gfp::encode(&omega, params).expect("reduced"))
}

/// Inverse of odd `a` modulo the power of two `m`, by Newton lifting.
fn inv_mod_pow2(a: u64, m: u64) -> u64 {
    debug_assert!(a % 2 == 1 && m.is_power_of_two());
    let mut x = 1u64; // inverse mod 2
    let mut modulus = 2u64;
    while modulus < m {
        modulus <<= 1;
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x))) & (modulus - 1);
    }
    x & (m - 1)
}

// ---------------------------------------------------------------------------
// Twiddle tables
// ---------------------------------------------------------------------------

/// Precomputed powers of an aligned order-`2N` root, plus the inverse
/// composition constants with the `1/N` folded in.
#[derive(Clone, Debug)]
pub struct TwiddleTable {
    two_n: u64,
    /// `omega^j` for `j` in `[0, 2N)`.
    powers: Vec<GfpElement>,
    /// `omega^(-k) N^(-1)` for `k` in `[0, N)`: the inverse half-transform
    /// multiplies index `k` by exactly this.
    inv_comp: Vec<GfpElement>,
    /// When the root itself is a power of `r` (tiny transforms), its
    /// exponent; compositions then shift instead of multiplying.
    r_exponent: Option<u64>,
}

impl TwiddleTable {
    pub fn two_n(&self) -> u64 {
        self.two_n
    }
    pub fn root(&self) -> &GfpElement {
        &self.powers[1]
    }
    pub fn power(&self, j: u64) -> &GfpElement {
        &self.powers[(j % self.two_n) as usize]
    }
    pub fn inv_composition(&self, k: u64) -> &GfpElement {
        &self.inv_comp[k as usize]
    }
    pub fn r_exponent(&self) -> Option<u64> {
        self.r_exponent
    }
}

/// Builds the order-`two_n` table for this field.
pub fn build_table(two_n: u64, params: &GfpParams) -> Result<TwiddleTable, TransformError> {
    let omega = principal_root(two_n, params)?;
    let p = params.modulus();
    let w = gfp::decode(&omega, params);
    let mut powers = Vec::with_capacity(two_n as usize);
    let mut acc = BigUint::one();
    for _ in 0..two_n {
        powers.push(gfp::encode(&acc, params).expect("reduced"));
        acc = &acc * &w % p;
    }
    debug_assert!(acc.is_one(), "root order must be exactly two_n");
    let n = two_n / 2;
    let inv_n = gfp::decode(&gfp::inv_pow2(n.trailing_zeros(), params), params);
    let w_inv = w.modpow(&(p - 2u32), p);
    let mut inv_comp = Vec::with_capacity(n as usize);
    let mut acc = inv_n;
    for _ in 0..n {
        inv_comp.push(gfp::encode(&acc, params).expect("reduced"));
        acc = &acc * &w_inv % p;
    }
    let m = 1u64 << (params.lambda() + 1);
    let r_exponent = if two_n <= m { Some(m / two_n) } else { None };
    Ok(TwiddleTable {
        two_n,
        powers,
        inv_comp,
        r_exponent,
    })
}

// ---------------------------------------------------------------------------
// Radix-2 transform (the cheap bottom layer)
// ---------------------------------------------------------------------------

fn bit_reverse_permute(v: &mut [GfpElement]) {
    let n = v.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i as u64).reverse_bits() >> (64 - bits) as u64;
        let j = j as usize;
        if i < j {
            v.swap(i, j);
        }
    }
}

/// In-place iterative radix-2 transform at root exponent `e`, i.e. at the
/// root `r^e`, whose order must equal `v.len()`. All twiddles are shifts.
fn radix2_shift_fft(v: &mut [GfpElement], e: u64, params: &GfpParams) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let m = 1u64 << (params.lambda() + 1);
    debug_assert!(
        n as u64 == m / gcd_u64(e % m, m).max(1) || n <= 1,
        "root order must match the transform length"
    );
    bit_reverse_permute(v);
    let mut len = 2usize;
    while len <= n {
        // Root for this stage: (r^e)^(n/len).
        let stage_e = (e * (n / len) as u64) % m;
        let half = len / 2;
        for block in v.chunks_mut(len) {
            let mut tw = 0u64;
            for k in 0..half {
                let t = gfp::mul_by_r_power(&block[half + k], tw, params)
                    .expect("exponent reduced mod 2^(lambda+1)");
                let u = block[k].clone();
                block[k] = gfp::add(&u, &t, params);
                block[half + k] = gfp::sub(&u, &t, params);
                tw = (tw + stage_e) % m;
            }
        }
        len <<= 1;
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Plain radix-2 Cooley-Tukey transform at an explicit root.
///
/// `CheapOnly` insists the root is a power of `r` (and fails with
/// [`TransformError::CheapModeViolation`] otherwise), so the whole
/// transform costs shifts and additions only. `Generic` accepts any root
/// of the right order and pays one multiplication per twiddle.
pub fn radix2_fft(
    v: &mut [GfpElement],
    omega: &GfpElement,
    params: &GfpParams,
    mode: TwiddleMode,
) -> Result<(), TransformError> {
    let n = v.len();
    if n <= 1 {
        return Ok(());
    }
    if !n.is_power_of_two() {
        return Err(TransformError::OrderUnavailable {
            requested: n as u64,
            capacity: 0,
        });
    }
    match mode {
        TwiddleMode::CheapOnly => {
            let m = 1u64 << (params.lambda() + 1);
            let mut exponent = None;
            let one = gfp::one(params);
            for e in 0..m {
                if &gfp::shift_core(&one, e, params) == omega {
                    exponent = Some(e);
                    break;
                }
            }
            let e = exponent.ok_or(TransformError::CheapModeViolation)?;
            let order = if e == 0 { 1 } else { m / gcd_u64(e, m) };
            if order != n as u64 {
                return Err(TransformError::OrderUnavailable {
                    requested: n as u64,
                    capacity: order,
                });
            }
            radix2_shift_fft(v, e, params);
            Ok(())
        }
        TwiddleMode::Generic => {
            let p = params.modulus();
            let wb = gfp::decode(omega, params);
            if !wb.modpow(&BigUint::from(n as u64), p).is_one()
                || wb
                    .modpow(&BigUint::from((n / 2) as u64), p)
                    .is_one()
            {
                return Err(TransformError::OrderUnavailable {
                    requested: n as u64,
                    capacity: 0,
                });
            }
            // Stage twiddle tables, then the same butterfly schedule as the
            // cheap path with generic products.
            bit_reverse_permute(v);
            let mut len = 2usize;
            while len <= n {
                let stage_w = wb.modpow(&BigUint::from((n / len) as u64), p);
                let half = len / 2;
                let mut tw = Vec::with_capacity(half);
                let mut acc = BigUint::one();
                for _ in 0..half {
                    tw.push(gfp::encode(&acc, params).expect("reduced"));
                    acc = &acc * &stage_w % p;
                }
                for block in v.chunks_mut(len) {
                    for k in 0..half {
                        let t = mul_generic(&block[half + k], &tw[k], params, &MulStrategy::Schoolbook);
                        let u = block[k].clone();
                        block[k] = gfp::add(&u, &t, params);
                        block[half + k] = gfp::sub(&u, &t, params);
                    }
                }
                len <<= 1;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Large-radix recursion
// ---------------------------------------------------------------------------

/// Cyclic transform of `v` at the root `omega^stride` (of order `v.len()`),
/// where `omega` is the table's aligned order-`2N` root.
///
/// Recursion scheme for length `L` at stride `s`, with `M = 2^(lambda+1)`:
/// split into `M` interleaved subsequences of length `L/M`, transform each
/// at stride `sM`, twiddle entry `(j, k1)` by `omega^(s j k1)` (the only
/// generic products in the whole transform), then finish with `L/M` cheap
/// length-`M` transforms at the root `r^(sL/2N)`, a power of `r` by
/// alignment. Lengths at or below `M` are entirely cheap.
fn fft_rec(
    v: &mut [GfpElement],
    stride: u64,
    table: &TwiddleTable,
    params: &GfpParams,
    engine: &dyn TwiddleEngine,
) {
    let l = v.len() as u64;
    if l <= 1 {
        return;
    }
    let two_n = table.two_n;
    let m = 1u64 << (params.lambda() + 1);
    debug_assert_eq!(stride * l % two_n, 0, "root order must divide the length");
    if l <= m {
        // omega^stride = r^(stride * M / 2N) here; the division is exact
        // because stride * L = 0 mod 2N and L divides M.
        debug_assert_eq!(stride * m % two_n, 0);
        let e = (stride * m / two_n) % m;
        radix2_shift_fft(v, e, params);
        return;
    }
    let sub_len = (l / m) as usize;
    let m_us = m as usize;
    // Gather the M interleaved subsequences and transform each.
    let mut subs: Vec<Vec<GfpElement>> = (0..m_us)
        .map(|j| {
            let mut q = Vec::with_capacity(sub_len);
            for t in 0..sub_len {
                q.push(v[j + m_us * t].clone());
            }
            q
        })
        .collect();
    let sub_stride = (stride * m) % two_n;
    for q in subs.iter_mut() {
        fft_rec(q, sub_stride, table, params, engine);
    }
    // Twiddle layer: the only generic multiplications. Every (j, k1) pair
    // pays one, identities included; operation-count claims rely on that.
    for (j, q) in subs.iter_mut().enumerate() {
        for (k1, x) in q.iter_mut().enumerate() {
            let idx = (j as u64 * k1 as u64) % two_n * stride % two_n;
            *x = engine.mul_by_power(x, idx, table);
        }
    }
    // Bottom layer: for each k1, a cheap length-M transform across j at the
    // root r^(stride * L / 2N), odd by alignment, then scatter to natural
    // order: out[k1 + (L/M) k2].
    debug_assert_eq!(stride * l % two_n, 0);
    let e = (stride * l / two_n) % m;
    let mut col: Vec<GfpElement> = Vec::with_capacity(m_us);
    for k1 in 0..sub_len {
        col.clear();
        for q in subs.iter() {
            col.push(q[k1].clone());
        }
        radix2_shift_fft(&mut col, e, params);
        for (k2, x) in col.iter().enumerate() {
            v[k1 + sub_len * k2] = x.clone();
        }
    }
}

/// Forward cyclic transform of length `v.len()` (a power of two dividing
/// the table order), using the table's root. Entirely in natural order.
pub fn large_radix_fft(
    v: &mut [GfpElement],
    table: &TwiddleTable,
    params: &GfpParams,
) -> Result<(), TransformError> {
    large_radix_fft_with(v, table, params, &SchoolbookEngine { params })
}

/// [`large_radix_fft`] with an explicit multiplication engine for the
/// twiddle layer.
pub fn large_radix_fft_with(
    v: &mut [GfpElement],
    table: &TwiddleTable,
    params: &GfpParams,
    engine: &dyn TwiddleEngine,
) -> Result<(), TransformError> {
    let l = v.len() as u64;
    if l == 0 {
        return Ok(());
    }
    if !l.is_power_of_two() || l > table.two_n || table.two_n % l != 0 {
        return Err(TransformError::TableTooSmall {
            table_order: table.two_n,
            requested: l,
        });
    }
    fft_rec(v, table.two_n / l, table, params, engine);
    Ok(())
}

// ---------------------------------------------------------------------------
// Negacyclic half-transform
// ---------------------------------------------------------------------------

fn compose_forward(
    v: &mut [GfpElement],
    table: &TwiddleTable,
    params: &GfpParams,
    engine: &dyn TwiddleEngine,
) {
    if let Some(e) = table.r_exponent {
        // The root is a power of r, so every composition is a shift.
        let m = 1u64 << (params.lambda() + 1);
        for (k, x) in v.iter_mut().enumerate() {
            let j = (e * k as u64) % m;
            *x = gfp::mul_by_r_power(x, j, params).expect("reduced exponent");
        }
    } else {
        for (k, x) in v.iter_mut().enumerate() {
            *x = engine.mul_by_power(x, k as u64, table);
        }
    }
}

/// Negacyclic transform pair on vectors of length `N = table order / 2`.
///
/// Forward: compose index `k` with `omega^k`, then a cyclic transform at
/// `omega^2`; the output entry `k` is the evaluation at the odd power
/// `omega^(2k+1)`. Inverse: cyclic transform at `omega^-2`, then compose
/// index `k` with `omega^(-k) N^(-1)` (one stored constant, so the `1/N`
/// never costs a separate pass).
pub fn half_dft(
    v: EvalVector,
    table: &TwiddleTable,
    params: &GfpParams,
    direction: Direction,
) -> Result<EvalVector, TransformError> {
    half_dft_with(v, table, params, direction, &SchoolbookEngine { params })
}

/// [`half_dft`] with an explicit multiplication engine.
pub fn half_dft_with(
    mut v: EvalVector,
    table: &TwiddleTable,
    params: &GfpParams,
    direction: Direction,
    engine: &dyn TwiddleEngine,
) -> Result<EvalVector, TransformError> {
    let n = v.values.len() as u64;
    if 2 * n != table.two_n {
        return Err(TransformError::TableTooSmall {
            table_order: table.two_n,
            requested: 2 * n,
        });
    }
    match direction {
        Direction::Forward => {
            if v.phase != Phase::Coefficient {
                return Err(TransformError::PhaseMismatch {
                    expected: Phase::Coefficient,
                    got: v.phase,
                });
            }
            compose_forward(&mut v.values, table, params, engine);
            fft_rec(&mut v.values, 2, table, params, engine);
            Ok(EvalVector {
                values: v.values,
                phase: Phase::Evaluation,
            })
        }
        Direction::Inverse => {
            if v.phase != Phase::Evaluation {
                return Err(TransformError::PhaseMismatch {
                    expected: Phase::Evaluation,
                    got: v.phase,
                });
            }
            fft_rec(&mut v.values, table.two_n - 2, table, params, engine);
            // The 1/N factor is baked into inv_comp, so this composition is
            // a generic product even when the table is otherwise cheap.
            for (k, x) in v.values.iter_mut().enumerate() {
                *x = engine.mul_by_inv_comp(x, k as u64, table);
            }
            Ok(EvalVector {
                values: v.values,
                phase: Phase::Coefficient,
            })
        }
    }
}

/// Entrywise product of two evaluation-phase vectors.
pub fn pointwise_product(
    a: &EvalVector,
    b: &EvalVector,
    params: &GfpParams,
) -> Result<EvalVector, TransformError> {
    pointwise_product_with(a, b, &SchoolbookEngine { params })
}

/// [`pointwise_product`] with an explicit multiplication engine.
pub fn pointwise_product_with(
    a: &EvalVector,
    b: &EvalVector,
    engine: &dyn TwiddleEngine,
) -> Result<EvalVector, TransformError> {
    for v in [a, b] {
        if v.phase != Phase::Evaluation {
            return Err(TransformError::PhaseMismatch {
                expected: Phase::Evaluation,
                got: v.phase,
            });
        }
    }
    debug_assert_eq!(a.values.len(), b.values.len());
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| engine.mul_pair(x, y))
        .collect();
    Ok(EvalVector {
        values,
        phase: Phase::Evaluation,
    })
}
