//! Plan construction and execution for integer multiplication through
//! transforms over `p = r^(2^lambda) + 1`.
//!
//! A plan is a chain of fields. Level 0 multiplies integers: the operands
//! are cut into `eta`-bit chunks, the chunk vectors are run through a
//! negacyclic transform of length `N` over the level-0 field, multiplied
//! pointwise, transformed back, and reassembled. Every generic product the
//! transform performs (twiddles, compositions, pointwise) is itself a
//! multiplication in a generalized Fermat field, so it recurses: level `i`
//! elements are regrouped, `beta` base-`r` digits to a chunk, into a short
//! vector over the level `i+1` field, and the same transform machinery
//! runs there. The chain ends at a field small enough that Kronecker
//! substitution plus an ordinary integer product is cheaper than another
//! transform level.
//!
//! Two facts make the recursion sound and cheap:
//!
//! * capacity: convolution coefficients at level `i` are bounded by
//!   `N_(i+1) r_i^(2 beta)`, and the next modulus is chosen at least that
//!   large, so exact integers survive the modular detour;
//! * root alignment: the next field is chosen with `2 N_(i+1)` dividing
//!   `p_(i+1) - 1` (a 2-adic condition on `r_(i+1)`), so the aligned root
//!   needed by the cheap-twiddle transform actually exists.
//!
//! Twiddle operands are plan constants, so each level (except the last)
//! stores the forward transforms of its table entries over the next field;
//! a twiddle product then costs one forward transform instead of two.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::counters;
use crate::gfp::{self, GfpElement, GfpParams, MulStrategy};
use crate::primes::{self, GammaShape};
use crate::transform::{
    self, Direction, EvalVector, Phase, TransformError, TwiddleEngine, TwiddleTable,
};

#[derive(Debug, Error)]
pub enum PlanError {
    /// Even `beta = 1` violates the capacity inequality for the proposed
    /// next level; the caller falls back to the Kronecker path.
    #[error("no power-of-two grouping fits: r={r}, lambda={lambda} into next lambda={next_lambda}")]
    NoValidBeta {
        r: u64,
        lambda: u32,
        next_lambda: u32,
    },
    /// The level chain exceeded the depth cap, which in practice means the
    /// base threshold is so low the chain stopped shrinking.
    #[error("plan recursion exceeded {max_depth} levels; base threshold too aggressive")]
    PlanTooDeep { max_depth: u32 },
    /// Inputs larger than the plan's capacity.
    #[error("operands need {needed} bits but the plan covers {capacity}")]
    Overflow { needed: u64, capacity: u64 },
    /// A level index or plan shape precondition failed.
    #[error("invalid level reference: {what}")]
    BadLevel { what: String },
    #[error(transparent)]
    Field(#[from] gfp::GfpError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Search(#[from] primes::SearchError),
}

/// How the top-level field parameters are derived from the input size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanMode {
    /// Sizes tuned for hardware word widths: `lambda` grows like
    /// `log2 log2 n` and chunk widths stay near the machine word.
    Practical,
    /// The asymptotic shapes: `2^lambda` is pushed up to `log2` of the
    /// product capacity, which makes the chunk payload of each coefficient
    /// as large as the field can carry.
    Theoretical,
}

#[derive(Clone, Debug)]
pub struct PlanConfig {
    pub mode: PlanMode,
    /// Forces the top-level `lambda` instead of the mode's rule.
    pub lambda_override: Option<u32>,
    /// Integers below this bit size (as a product capacity) are multiplied
    /// directly; recursion also stops once the packed coefficient size
    /// falls below it.
    pub base_threshold_bits: u64,
    /// Window growth law assumed when hunting for level moduli.
    pub gamma: GammaShape,
    /// Hard cap on the level chain length.
    pub max_depth: u32,
}

impl Default for PlanConfig {
    fn default() -> PlanConfig {
        PlanConfig {
            mode: PlanMode::Practical,
            lambda_override: None,
            base_threshold_bits: 4096,
            gamma: GammaShape::Identity,
            max_depth: 8,
        }
    }
}

/// Forward transforms of a level's table constants over the next field.
/// `None` entries are constants with no chunk representation (the `-1`
/// residue), which multiply by negation anyway.
struct LevelCache {
    fwd_powers: Vec<Option<EvalVector>>,
    fwd_inv_comp: Vec<Option<EvalVector>>,
}

/// One field in the chain, with its transform data.
pub struct PlanLevel {
    params: GfpParams,
    /// Bits per chunk entering this level's coefficients: the integer
    /// chunk width at level 0, `ceil(log2 r_prev^beta)` deeper down.
    eta: u64,
    /// Transform length over this field.
    big_n: u64,
    /// Digits-per-chunk grouping into the *next* level; 0 means this is
    /// the last level and pointwise products take the Kronecker path.
    beta: u64,
    table: TwiddleTable,
    /// `r_prev^beta`: chunk values at this level live in `[0, chunk_base)`.
    /// Level 0 uses `2^eta`.
    chunk_base: BigUint,
    cache: Option<LevelCache>,
}

impl PlanLevel {
    pub fn params(&self) -> &GfpParams {
        &self.params
    }
    pub fn eta(&self) -> u64 {
        self.eta
    }
    pub fn big_n(&self) -> u64 {
        self.big_n
    }
    pub fn beta(&self) -> u64 {
        self.beta
    }
    pub fn table(&self) -> &TwiddleTable {
        &self.table
    }
}

/// A ready-to-run multiplication plan.
pub struct MultiplyPlan {
    levels: Vec<PlanLevel>,
    input_bits: u64,
    capacity_bits: u64,
    config: PlanConfig,
}

impl MultiplyPlan {
    pub fn levels(&self) -> &[PlanLevel] {
        &self.levels
    }
    pub fn input_bits(&self) -> u64 {
        self.input_bits
    }
    /// Product capacity in bits: `eta * N` at level 0.
    pub fn capacity_bits(&self) -> u64 {
        self.capacity_bits
    }
    pub fn config(&self) -> &PlanConfig {
        &self.config
    }
    /// The serializable shape of the plan: one spec per level.
    pub fn specs(&self) -> Vec<LevelSpec> {
        self.levels
            .iter()
            .map(|lv| LevelSpec {
                r: lv.params.r(),
                lambda: lv.params.lambda(),
                eta: lv.eta,
                big_n: lv.big_n,
                beta: lv.beta,
            })
            .collect()
    }
}

/// One level's parameters, as they appear in a serialized plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub r: u64,
    pub lambda: u32,
    pub eta: u64,
    pub big_n: u64,
    pub beta: u64,
}

// ---------------------------------------------------------------------------
// Plan construction
// ---------------------------------------------------------------------------

fn ceil_pow2(x: u64) -> u64 {
    x.max(1).next_power_of_two()
}

/// Top-level exponent log for `n`-bit inputs.
fn top_lambda(n: u64, config: &PlanConfig) -> u32 {
    if let Some(l) = config.lambda_override {
        return l;
    }
    match config.mode {
        // floor(log2 log2 n), floored at 2: digit vectors shorter than 4
        // leave the transform nothing to split.
        PlanMode::Practical => n.max(4).ilog2().ilog2().max(2),
        PlanMode::Theoretical => {
            // Smallest lambda with 2^(2^lambda) >= 2n, i.e. the digit count
            // reaches the log of the product capacity.
            let s = 2 * n;
            let mut lambda = 1u32;
            while lambda < 24 && (1u64 << lambda) < 63 && s > 1u64 << (1u64 << lambda) {
                lambda += 1;
            }
            lambda
        }
    }
}

/// Smallest exponent log whose digit count covers `log2 log2 p`: the rule
/// that sizes each recursive level from the field above it.
pub fn next_level_lambda(params: &GfpParams) -> u32 {
    let log2_p = (params.digits() as f64) * (params.r() as f64).log2();
    let target = log2_p.log2();
    let mut lambda = 1u32;
    while ((1u64 << lambda) as f64) < target {
        lambda += 1;
    }
    lambda
}

/// Largest power-of-two grouping `beta` such that chunks of `beta` digits
/// convolve within the capacity a `next_lambda` field is expected to have.
///
/// Grouped chunks are bounded by `r^beta` and there are `2^lambda / beta`
/// of them, so convolution coefficients need `2 beta log2 r + lambda -
/// log2 beta` bits. The expected budget of the next field is `2 gamma
/// (next_lambda) 2^next_lambda` bits: window position `2^gamma` times the
/// square allowed by the product bound. `beta` is capped at half the digit
/// count so the transform below keeps at least two points.
pub fn choose_beta(
    level_params: &GfpParams,
    next_lambda: u32,
    gamma: GammaShape,
) -> Result<u64, PlanError> {
    let lambda = level_params.lambda();
    let log2_r = (level_params.r() as f64).log2();
    let budget = 2.0 * gamma.gamma(next_lambda) as f64 * (1u64 << next_lambda) as f64;
    let mut best = None;
    let mut beta = 1u64;
    while beta <= (1u64 << lambda) / 2 {
        let need = 2.0 * beta as f64 * log2_r + f64::from(lambda) - (beta as f64).log2();
        if need <= budget {
            best = Some(beta);
        }
        beta <<= 1;
    }
    best.ok_or(PlanError::NoValidBeta {
        r: level_params.r(),
        lambda,
        next_lambda,
    })
}

/// Finds the smallest even base `r` whose modulus is prime, passes the
/// caller's capacity check, and has 2-adic room for a root of order
/// `two_n` (`v2(r) 2^lambda >= log2(two_n)`).
fn find_level_prime(
    lambda: u32,
    two_n: u64,
    fits: &dyn Fn(u64) -> bool,
) -> Result<u64, PlanError> {
    let log2_two_n = u64::from(two_n.trailing_zeros());
    let v2_min = log2_two_n.div_ceil(1u64 << lambda).max(1);
    let lam2 = 1 + u64::from(lambda) * u64::from(lambda);
    let mut first_fit: Option<u64> = None;
    let mut r = 2u64;
    loop {
        if r % (1u64 << v2_min) == 0 && fits(r) {
            if first_fit.is_none() {
                first_fit = Some(r);
            }
            if primes::is_gfp_prime(r, lambda) {
                return Ok(r);
            }
        }
        r += 2;
        if let Some(f) = first_fit {
            // One prime per (1 + lambda^2) growth window is the expected
            // rate; dozens of empty windows means the hunt is hopeless.
            if r > f.saturating_mul(lam2).saturating_mul(64).max(1 << 20) {
                return Err(primes::SearchError::SearchExhausted {
                    r_start: f,
                    lambda,
                    ceiling: r,
                }
                .into());
            }
        } else if r > 1 << 40 {
            return Err(primes::SearchError::PrimeNotFound {
                lambda,
                lo: 2,
                hi: r,
            }
            .into());
        }
    }
}

/// Exact `ceil(log2 x)` for `x >= 1`.
fn ceil_log2_big(x: &BigUint) -> u64 {
    let bits = x.bits();
    if x.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Derives the level chain for multiplying two `n`-bit integers, without
/// building any tables: pure parameter search, cheap at any size.
///
/// Level 0 geometry: `mu` is the smallest power of two at or above
/// `gamma(lambda)/2`, the chunk width is `eta = 2^lambda mu` bits, and the
/// transform length is `N = ceil_pow2(2n / eta)`. The level-0 modulus is
/// the smallest prime base with `floor(log2 p) >= 2 eta + log2 N` (so
/// convolution coefficients fit) that can host an order-`2N` root. Deeper
/// levels regroup digits by the largest feasible `beta` and stop once the
/// Kronecker-packed coefficient size drops under the base threshold.
///
/// An empty result means the inputs are below the threshold and should be
/// multiplied directly.
pub fn plan_outline(n: u64, config: &PlanConfig) -> Result<Vec<LevelSpec>, PlanError> {
    let s = 2 * n.max(1);
    if s < config.base_threshold_bits {
        return Ok(Vec::new());
    }
    let lambda = top_lambda(n, config);
    let gamma = config.gamma.gamma(lambda);
    let mu = ceil_pow2(gamma.div_ceil(2));
    let eta = (1u64 << lambda) * mu;
    let big_n = ceil_pow2(s.div_ceil(eta));
    let log2_n = u64::from(big_n.trailing_zeros());
    let needed_bits = 2 * eta + log2_n;
    let r0 = find_level_prime(lambda, 2 * big_n, &|r| {
        crate::costmodel::modulus_bit_budget(r, lambda) >= needed_bits
    })?;
    let mut specs = vec![LevelSpec {
        r: r0,
        lambda,
        eta,
        big_n,
        beta: 0,
    }];

    loop {
        let cur = *specs.last().expect("at least level 0");
        let ks_bits = crate::costmodel::ks_bitsize(cur.r, cur.lambda);
        if ks_bits < config.base_threshold_bits {
            break;
        }
        if specs.len() as u32 >= config.max_depth {
            return Err(PlanError::PlanTooDeep {
                max_depth: config.max_depth,
            });
        }
        let cur_params = gfp::make_params(cur.r, cur.lambda)?;
        let next_lambda = next_level_lambda(&cur_params);
        let beta = match choose_beta(&cur_params, next_lambda, config.gamma) {
            Ok(b) => b,
            // No grouping fits the next field's expected capacity: settle
            // for the Kronecker base case at this size.
            Err(PlanError::NoValidBeta { .. }) => break,
            Err(e) => return Err(e),
        };
        let n_chunks = (cur_params.digits() as u64) / beta;
        let chunk_base = BigUint::from(cur.r).pow(beta as u32);
        // Convolution bound: N_next * (r^beta)^2.
        let width = &chunk_base * &chunk_base * n_chunks;
        let r_next = find_level_prime(next_lambda, 2 * n_chunks, &|r| {
            BigUint::from(r).pow(1u32 << next_lambda) >= width
        })?;
        specs.last_mut().expect("nonempty").beta = beta;
        specs.push(LevelSpec {
            r: r_next,
            lambda: next_lambda,
            eta: ceil_log2_big(&chunk_base),
            big_n: n_chunks,
            beta: 0,
        });
    }
    Ok(specs)
}

/// Builds the runnable plan for `n`-bit inputs: [`plan_outline`] plus
/// tables and caches. Memory scales with the level-0 transform length
/// (the twiddle table holds `2N` field elements), so realizing plans much
/// beyond 2^24 input bits is expensive; use [`plan_outline`] when only the
/// shape is wanted.
pub fn precompute(n: u64, config: &PlanConfig) -> Result<MultiplyPlan, PlanError> {
    let specs = plan_outline(n, config)?;
    if specs.is_empty() {
        return Ok(MultiplyPlan {
            levels: Vec::new(),
            input_bits: n,
            capacity_bits: 2 * n.max(1),
            config: config.clone(),
        });
    }
    realize(&specs, n, config)
}

/// Rebuilds a runnable plan from serialized level parameters, re-deriving
/// everything the text form drops: field constants, twiddle tables, chunk
/// bases, and the transformed-constant caches. Linkage and capacity are
/// validated first, since the specs may come from an edited file.
pub fn assemble(specs: &[LevelSpec], config: &PlanConfig) -> Result<MultiplyPlan, PlanError> {
    if specs.is_empty() {
        return Err(PlanError::BadLevel {
            what: "a serialized plan needs at least one level".into(),
        });
    }
    for (i, spec) in specs.iter().enumerate() {
        let params = gfp::make_params(spec.r, spec.lambda)?;
        if spec.big_n < 2 || !spec.big_n.is_power_of_two() {
            return Err(PlanError::BadLevel {
                what: format!("level {i}: N={} is not a power of two >= 2", spec.big_n),
            });
        }
        let last = i == specs.len() - 1;
        if last != (spec.beta == 0) {
            return Err(PlanError::BadLevel {
                what: format!("level {i}: beta={} disagrees with chain position", spec.beta),
            });
        }
        let chunk_base = if i == 0 {
            BigUint::one() << spec.eta
        } else {
            let prev = &specs[i - 1];
            let expect_n = (1u64 << prev.lambda) / prev.beta;
            if spec.big_n != expect_n {
                return Err(PlanError::BadLevel {
                    what: format!(
                        "level {i}: N={} but the level above groups into {expect_n} chunks",
                        spec.big_n
                    ),
                });
            }
            BigUint::from(prev.r).pow(prev.beta as u32)
        };
        if i > 0 && spec.eta != ceil_log2_big(&chunk_base) {
            return Err(PlanError::BadLevel {
                what: format!("level {i}: eta={} does not match the grouping above", spec.eta),
            });
        }
        if spec.beta != 0
            && (!spec.beta.is_power_of_two() || spec.beta > (1u64 << spec.lambda) / 2)
        {
            return Err(PlanError::BadLevel {
                what: format!(
                    "level {i}: beta={} is not a power of two <= 2^(lambda-1)",
                    spec.beta
                ),
            });
        }
        // Exact capacity: convolution coefficients live below N * base^2.
        if &chunk_base * &chunk_base * spec.big_n > *params.modulus() {
            return Err(PlanError::BadLevel {
                what: format!("level {i}: N * chunk_base^2 exceeds the modulus"),
            });
        }
    }
    let capacity_bits = specs[0].eta * specs[0].big_n;
    realize(specs, capacity_bits / 2, config)
}

/// Turns validated specs into live levels: field constants, twiddle
/// tables, chunk bases, then the shared finishing pass.
fn realize(
    specs: &[LevelSpec],
    input_bits: u64,
    config: &PlanConfig,
) -> Result<MultiplyPlan, PlanError> {
    let mut levels = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let params = gfp::make_params(spec.r, spec.lambda)?;
        let table = transform::build_table(2 * spec.big_n, &params)?;
        let chunk_base = if i == 0 {
            BigUint::one() << spec.eta
        } else {
            BigUint::from(specs[i - 1].r).pow(specs[i - 1].beta as u32)
        };
        levels.push(PlanLevel {
            params,
            eta: spec.eta,
            big_n: spec.big_n,
            beta: spec.beta,
            table,
            chunk_base,
            cache: None,
        });
    }
    let capacity_bits = levels[0].eta * levels[0].big_n;
    let plan = MultiplyPlan {
        levels,
        input_bits,
        capacity_bits,
        config: config.clone(),
    };
    finish_plan(plan)
}

/// Shared tail of plan construction: the build-time validity assertion and
/// the transformed-constant caches, built deepest level first so each cache
/// is assembled with the machinery below it already complete.
fn finish_plan(mut plan: MultiplyPlan) -> Result<MultiplyPlan, PlanError> {
    for lv in &plan.levels {
        debug_assert!(
            2 * lv.eta + u64::from(lv.big_n.trailing_zeros()) <= lv.params.floor_log2_p(),
            "level capacity violated: 2 eta + log2 N must fit the modulus budget"
        );
    }
    for i in (0..plan.levels.len().saturating_sub(1)).rev() {
        let cache = build_level_cache(&plan, i)?;
        plan.levels[i].cache = Some(cache);
    }
    Ok(plan)
}

fn build_level_cache(plan: &MultiplyPlan, level: usize) -> Result<LevelCache, PlanError> {
    let lv = &plan.levels[level];
    let next = level + 1;
    let transform_one = |e: &GfpElement| -> Result<Option<EvalVector>, PlanError> {
        if e.is_minus_one() {
            return Ok(None);
        }
        let chunks = group_to_next_field(e, plan, level)?;
        let engine = LevelEngine { plan, level: next };
        let fwd = transform::half_dft_with(
            EvalVector::coefficients(chunks),
            &plan.levels[next].table,
            &plan.levels[next].params,
            Direction::Forward,
            &engine,
        )?;
        Ok(Some(fwd))
    };
    let mut fwd_powers = Vec::with_capacity(lv.table.two_n() as usize);
    for j in 0..lv.table.two_n() {
        fwd_powers.push(transform_one(lv.table.power(j))?);
    }
    let mut fwd_inv_comp = Vec::with_capacity((lv.table.two_n() / 2) as usize);
    for k in 0..lv.table.two_n() / 2 {
        fwd_inv_comp.push(transform_one(lv.table.inv_composition(k))?);
    }
    Ok(LevelCache {
        fwd_powers,
        fwd_inv_comp,
    })
}

// ---------------------------------------------------------------------------
// Grouping between levels
// ---------------------------------------------------------------------------

/// Chunk values of an element grouped `beta` digits at a time: entry `k`
/// is `sum_(t < beta) d_(beta k + t) r^t`, an integer below `r^beta`.
///
/// The `-1` residue has no such representation (its digit vector is the
/// flag, not digits) and is rejected; multiplication paths peel that case
/// off before grouping, since multiplying by `-1` is a negation.
pub fn group_coefficients(
    e: &GfpElement,
    beta: u64,
    params: &GfpParams,
) -> Result<Vec<BigUint>, PlanError> {
    if e.is_minus_one() {
        return Err(PlanError::BadLevel {
            what: "cannot group the -1 residue".into(),
        });
    }
    if beta == 0 || !beta.is_power_of_two() || beta > params.digits() as u64 {
        return Err(PlanError::BadLevel {
            what: format!("beta={beta} incompatible with 2^{} digits", params.lambda()),
        });
    }
    let r = BigUint::from(params.r());
    Ok(e
        .coeffs()
        .chunks(beta as usize)
        .map(|chunk| {
            let mut acc = BigUint::zero();
            for &d in chunk.iter().rev() {
                acc = &acc * &r + d;
            }
            acc
        })
        .collect())
}

/// Groups a level-`level` element into encoded chunks over level `level+1`.
fn group_to_next_field(
    e: &GfpElement,
    plan: &MultiplyPlan,
    level: usize,
) -> Result<Vec<GfpElement>, PlanError> {
    let lv = &plan.levels[level];
    let next = &plan.levels[level + 1];
    let beta = lv.beta;
    debug_assert!(beta > 0);
    let r = lv.params.r() as u128;
    let fits_u128 = u64::from(lv.params.coeff_bits()) * beta <= 126;
    let mut out = Vec::with_capacity(next.big_n as usize);
    if fits_u128 {
        for chunk in e.coeffs().chunks(beta as usize) {
            let mut acc = 0u128;
            for &d in chunk.iter().rev() {
                acc = acc * r + d as u128;
            }
            out.push(gfp::encode_u128(acc, &next.params));
        }
    } else {
        for v in group_coefficients(e, beta, &lv.params)? {
            out.push(gfp::encode(&v, &next.params)?);
        }
    }
    Ok(out)
}

/// Signed lift of a negacyclic convolution coefficient from its residue.
///
/// Index `k` of a length-`N` negacyclic product of vectors with entries in
/// `[0, B)` lies in `[-(N-1-k) B^2, (k+1) B^2)`; the window is at most
/// `N B^2` wide, which the modulus dominates, so the residue determines
/// the integer: subtract `p` when the residue reaches the upper bound.
fn lift_signed(
    residue: &GfpElement,
    k: u64,
    chunk_sq: &BigUint,
    params: &GfpParams,
) -> BigInt {
    let x = gfp::decode(residue, params);
    let upper = chunk_sq * (k + 1);
    if x < upper {
        BigInt::from_biguint(Sign::Plus, x)
    } else {
        -BigInt::from_biguint(Sign::Plus, params.modulus() - &x)
    }
}

/// Scatters signed chunk values back into digit lanes at stride `beta`,
/// wrapping negacyclically, and renormalizes.
fn fold_chunks_to_element(
    values: &[BigInt],
    beta: u64,
    params: &GfpParams,
) -> GfpElement {
    let digits = params.digits();
    let r = params.r();
    let mut lanes = vec![0i128; digits];
    for (k, w) in values.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let negative = w.is_negative();
        let mag = w.magnitude();
        // Radix-r digit stream of |w|, least significant first.
        let digit_stream: Vec<u64> = if let Some(small) = mag.to_u128() {
            let mut v = small;
            let mut ds = Vec::new();
            while v > 0 {
                ds.push((v % r as u128) as u64);
                v /= r as u128;
            }
            ds
        } else {
            let mut v = mag.clone();
            let rb = BigUint::from(r);
            let mut ds = Vec::new();
            while !v.is_zero() {
                let (q, rem) = num_integer::Integer::div_rem(&v, &rb);
                ds.push(rem.to_u64().expect("digit below r"));
                v = q;
            }
            ds
        };
        for (t, d) in digit_stream.into_iter().enumerate() {
            if d == 0 {
                continue;
            }
            let mut idx = k * beta as usize + t;
            let mut sign = if negative { -1i128 } else { 1i128 };
            while idx >= digits {
                idx -= digits;
                sign = -sign;
            }
            lanes[idx] += sign * d as i128;
        }
    }
    gfp::normalize_i128(&mut lanes, params)
}

// ---------------------------------------------------------------------------
// Level engines
// ---------------------------------------------------------------------------

/// The multiplication engine for one level: generic products recurse into
/// the next level (or take the Kronecker path at the last one), and
/// products by table constants reuse the cached forward transforms.
struct LevelEngine<'a> {
    plan: &'a MultiplyPlan,
    level: usize,
}

impl LevelEngine<'_> {
    fn params(&self) -> &GfpParams {
        &self.plan.levels[self.level].params
    }
}

impl TwiddleEngine for LevelEngine<'_> {
    fn mul_pair(&self, a: &GfpElement, b: &GfpElement) -> GfpElement {
        let recurse = |x: &GfpElement, y: &GfpElement| raw_level_mul(self.plan, self.level, x, y);
        gfp::mul_generic(a, b, self.params(), &MulStrategy::Custom(&recurse))
    }

    fn mul_by_power(&self, x: &GfpElement, idx: u64, table: &TwiddleTable) -> GfpElement {
        let lv = &self.plan.levels[self.level];
        if let Some(cache) = &lv.cache {
            return match &cache.fwd_powers[idx as usize] {
                Some(fwd) => cached_constant_mul(self.plan, self.level, x, fwd, table.power(idx)),
                // The -1 entry: still one counted product, done by negation.
                None => {
                    counters::tally_expensive(lv.params.key());
                    gfp::neg_core(x, &lv.params)
                }
            };
        }
        self.mul_pair(x, table.power(idx))
    }

    fn mul_by_inv_comp(&self, x: &GfpElement, k: u64, table: &TwiddleTable) -> GfpElement {
        let lv = &self.plan.levels[self.level];
        if let Some(cache) = &lv.cache {
            return match &cache.fwd_inv_comp[k as usize] {
                Some(fwd) => {
                    cached_constant_mul(self.plan, self.level, x, fwd, table.inv_composition(k))
                }
                None => {
                    counters::tally_expensive(lv.params.key());
                    gfp::neg_core(x, &lv.params)
                }
            };
        }
        self.mul_pair(x, table.inv_composition(k))
    }
}

/// Generic product at `level`, operands already canonical and flag-free.
fn raw_level_mul(plan: &MultiplyPlan, level: usize, a: &GfpElement, b: &GfpElement) -> GfpElement {
    let lv = &plan.levels[level];
    if lv.beta == 0 {
        let inner = |x: &BigUint, y: &BigUint| x * y;
        kronecker_multiply(a, b, &lv.params, &inner).expect("canonical operands")
    } else {
        grouped_convolve(plan, level, a, GroupedRhs::Plain(b))
            .expect("plan invariants hold for canonical operands")
    }
}

/// Product of `x` by a constant whose forward transform is cached.
/// Counts one expensive product at this level, like any other twiddle.
fn cached_constant_mul(
    plan: &MultiplyPlan,
    level: usize,
    x: &GfpElement,
    cached_fwd: &EvalVector,
    plain: &GfpElement,
) -> GfpElement {
    let lv = &plan.levels[level];
    counters::tally_expensive(lv.params.key());
    if x.is_zero() {
        return gfp::zero(&lv.params);
    }
    if x.is_minus_one() {
        // The flag has no chunk form; (-1) * c is just -c.
        return gfp::neg_core(plain, &lv.params);
    }
    grouped_convolve(plan, level, x, GroupedRhs::Cached(cached_fwd))
        .expect("plan invariants hold")
}

enum GroupedRhs<'a> {
    Plain(&'a GfpElement),
    Cached(&'a EvalVector),
}

/// The grouped recursive product at `level`: group both operands into
/// chunk vectors over level+1, transform, pointwise multiply, transform
/// back, lift each coefficient through its signed window, and fold back
/// into digits.
fn grouped_convolve(
    plan: &MultiplyPlan,
    level: usize,
    a: &GfpElement,
    b: GroupedRhs,
) -> Result<GfpElement, PlanError> {
    let lv = &plan.levels[level];
    let next = &plan.levels[level + 1];
    let engine = LevelEngine {
        plan,
        level: level + 1,
    };
    let fa = transform::half_dft_with(
        EvalVector::coefficients(group_to_next_field(a, plan, level)?),
        &next.table,
        &next.params,
        Direction::Forward,
        &engine,
    )?;
    let fb_owned;
    let fb: &EvalVector = match b {
        GroupedRhs::Plain(b) => {
            fb_owned = transform::half_dft_with(
                EvalVector::coefficients(group_to_next_field(b, plan, level)?),
                &next.table,
                &next.params,
                Direction::Forward,
                &engine,
            )?;
            &fb_owned
        }
        GroupedRhs::Cached(fwd) => fwd,
    };
    let pw = transform::pointwise_product_with(&fa, fb, &engine)?;
    let back = transform::half_dft_with(pw, &next.table, &next.params, Direction::Inverse, &engine)?;
    let chunk_sq = &next.chunk_base * &next.chunk_base;
    let lifted: Vec<BigInt> = back
        .values
        .iter()
        .enumerate()
        .map(|(k, c)| lift_signed(c, k as u64, &chunk_sq, &next.params))
        .collect();
    Ok(fold_chunks_to_element(&lifted, lv.beta, &lv.params))
}

/// Public entry for the grouped path: multiplies two elements of the field
/// *above* `next_level` by convolving over `next_level`.
pub fn recursive_level_multiply(
    a: &GfpElement,
    b: &GfpElement,
    plan: &MultiplyPlan,
    next_level: usize,
) -> Result<GfpElement, PlanError> {
    if next_level == 0 || next_level >= plan.levels.len() {
        return Err(PlanError::BadLevel {
            what: format!(
                "next_level={next_level} outside 1..{}",
                plan.levels.len()
            ),
        });
    }
    let level = next_level - 1;
    if plan.levels[level].beta == 0 {
        return Err(PlanError::BadLevel {
            what: format!("level {level} has no grouping"),
        });
    }
    let params = &plan.levels[level].params;
    if a.is_minus_one() {
        return Ok(gfp::neg_core(b, params));
    }
    if b.is_minus_one() {
        return Ok(gfp::neg_core(a, params));
    }
    grouped_convolve(plan, level, a, GroupedRhs::Plain(b))
}

// ---------------------------------------------------------------------------
// Kronecker substitution
// ---------------------------------------------------------------------------

/// Multiplies two field elements by packing their digit vectors into
/// integers with `2 ceil(log2 r) + lambda` bits of padding per digit,
/// multiplying the integers with `inner_multiplier`, and folding the plain
/// convolution read off the product back into the negacyclic result.
///
/// The padding is sized so distinct convolution coefficients never touch:
/// each is below `2^lambda (r-1)^2 <= 2^(2 ceil(log2 r) + lambda)`.
pub fn kronecker_multiply(
    a: &GfpElement,
    b: &GfpElement,
    params: &GfpParams,
    inner_multiplier: &dyn Fn(&BigUint, &BigUint) -> BigUint,
) -> Result<GfpElement, PlanError> {
    if a.is_minus_one() {
        return Ok(gfp::neg_core(b, params));
    }
    if b.is_minus_one() {
        return Ok(gfp::neg_core(a, params));
    }
    let digits = params.digits();
    let stride = 2 * u64::from(params.coeff_bits()) + u64::from(params.lambda());
    let pack = |e: &GfpElement| -> BigUint {
        // Little-endian digit payloads at bit offsets stride * i, built on
        // a 64-bit limb accumulator.
        let total_bits = stride * digits as u64 + 64;
        let mut limbs = vec![0u64; (total_bits / 64 + 1) as usize];
        for (i, &d) in e.coeffs().iter().enumerate() {
            add_word_at(&mut limbs, d, stride * i as u64);
        }
        biguint_from_limbs(&limbs)
    };
    let packed = inner_multiplier(&pack(a), &pack(b));
    let words = packed.to_u64_digits();
    let mask_bits = stride;
    let mut lanes = vec![0i128; digits];
    for t in 0..(2 * digits - 1) {
        let c = extract_bits_u128(&words, t as u64 * stride, mask_bits);
        if c == 0 {
            continue;
        }
        // Plain convolution coefficient c_t: digit stream in radix r,
        // scattered with negacyclic wrap.
        let r = params.r() as u128;
        let mut v = c;
        let mut t_off = 0usize;
        while v > 0 {
            let d = (v % r) as i128;
            v /= r;
            if d != 0 {
                let mut idx = t + t_off;
                let mut sign = 1i128;
                while idx >= digits {
                    idx -= digits;
                    sign = -sign;
                }
                lanes[idx] += sign * d;
            }
            t_off += 1;
        }
    }
    Ok(gfp::normalize_i128(&mut lanes, params))
}

// ---------------------------------------------------------------------------
// Bit-level helpers
// ---------------------------------------------------------------------------

/// Adds `word` into the limb vector at an arbitrary bit offset.
fn add_word_at(limbs: &mut [u64], word: u64, bit: u64) {
    if word == 0 {
        return;
    }
    let idx = (bit / 64) as usize;
    let off = (bit % 64) as u32;
    let lo = word << off;
    let hi = if off == 0 { 0 } else { word >> (64 - off) };
    let mut carry;
    let (v, c) = limbs[idx].overflowing_add(lo);
    limbs[idx] = v;
    carry = c as u64 + hi;
    let mut i = idx + 1;
    while carry != 0 {
        let (v, c) = limbs[i].overflowing_add(carry);
        limbs[i] = v;
        carry = c as u64;
        i += 1;
    }
}

fn biguint_from_limbs(limbs: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(limbs.len() * 8);
    for l in limbs {
        bytes.extend_from_slice(&l.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

/// Reads `len <= 128` bits starting at `bit` from a little-endian word
/// array, zero-extended past the end.
fn extract_bits_u128(words: &[u64], bit: u64, len: u64) -> u128 {
    debug_assert!(len <= 128);
    let idx = (bit / 64) as usize;
    let off = (bit % 64) as u32;
    let w = |i: usize| -> u128 {
        if i < words.len() {
            words[i] as u128
        } else {
            0
        }
    };
    let mut v = (w(idx) | (w(idx + 1) << 64)) >> off;
    if off > 0 {
        v |= w(idx + 2) << (128 - off);
    }
    if len < 128 {
        v &= (1u128 << len) - 1;
    }
    v
}

/// Reads an arbitrary-width bit field as a `BigUint`.
fn extract_bits_big(words: &[u64], bit: u64, len: u64) -> BigUint {
    if len <= 128 {
        return BigUint::from(extract_bits_u128(words, bit, len));
    }
    let mut out_words = Vec::with_capacity((len / 64 + 2) as usize);
    let mut consumed = 0u64;
    while consumed < len {
        let take = (len - consumed).min(64);
        out_words.push(extract_bits_u128(words, bit + consumed, take) as u64);
        consumed += 64;
    }
    let mut bytes = Vec::with_capacity(out_words.len() * 8);
    for w in &out_words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

// ---------------------------------------------------------------------------
// Top-level integer multiplication
// ---------------------------------------------------------------------------

/// Multiplies two integers under a plan.
///
/// With an empty plan (inputs under the base threshold) this is a direct
/// product. Otherwise the operands are cut into `eta`-bit chunks, pushed
/// through the level-0 negacyclic transform with recursive pointwise
/// products, and the signed convolution coefficients are reassembled and
/// folded modulo `2^capacity + 1`; exactness holds because the true
/// product fits the capacity, which is checked up front.
pub fn multiply(a: &BigUint, b: &BigUint, plan: &MultiplyPlan) -> Result<BigUint, PlanError> {
    let needed = a.bits() + b.bits();
    if needed > plan.capacity_bits {
        return Err(PlanError::Overflow {
            needed,
            capacity: plan.capacity_bits,
        });
    }
    if plan.levels.is_empty() {
        return Ok(a * b);
    }
    let lv = &plan.levels[0];
    let eta = lv.eta;
    let n = lv.big_n;
    let params = &lv.params;
    let engine = LevelEngine { plan, level: 0 };

    let split = |x: &BigUint| -> Vec<GfpElement> {
        let words = x.to_u64_digits();
        (0..n)
            .map(|k| {
                if eta <= 128 {
                    gfp::encode_u128(extract_bits_u128(&words, k * eta, eta), params)
                } else {
                    gfp::encode(&extract_bits_big(&words, k * eta, eta), params)
                        .expect("chunk below modulus by capacity choice")
                }
            })
            .collect()
    };

    let fa = transform::half_dft_with(
        EvalVector::coefficients(split(a)),
        &lv.table,
        params,
        Direction::Forward,
        &engine,
    )?;
    let fb = transform::half_dft_with(
        EvalVector::coefficients(split(b)),
        &lv.table,
        params,
        Direction::Forward,
        &engine,
    )?;
    let pw = transform::pointwise_product_with(&fa, &fb, &engine)?;
    let back = transform::half_dft_with(pw, &lv.table, params, Direction::Inverse, &engine)?;
    debug_assert_eq!(back.phase, Phase::Coefficient);

    // Signed lift and recomposition at 2^eta, then one fold modulo
    // 2^capacity + 1; the negacyclic wrap at the chunk level is exactly
    // reduction by that modulus, and the true product is below it.
    let chunk_sq = &lv.chunk_base * &lv.chunk_base;
    let cap_bits = plan.capacity_bits;
    // Highest bit touched: chunk N-1 starts at (N-1) eta and its lifted
    // coefficient spans 2 eta + log2 N + 1 bits, plus carry headroom.
    let limb_len = ((cap_bits + 2 * eta + 192) / 64) as usize + 1;
    let mut pos = vec![0u64; limb_len];
    let mut neg = vec![0u64; limb_len];
    for (k, c) in back.values.iter().enumerate() {
        let w = lift_signed(c, k as u64, &chunk_sq, params);
        if w.is_zero() {
            continue;
        }
        let acc = if w.is_negative() { &mut neg } else { &mut pos };
        for (i, word) in w.magnitude().to_u64_digits().into_iter().enumerate() {
            add_word_at(acc, word, k as u64 * eta + i as u64 * 64);
        }
    }
    let total = BigInt::from_biguint(Sign::Plus, biguint_from_limbs(&pos))
        - BigInt::from_biguint(Sign::Plus, biguint_from_limbs(&neg));
    Ok(fold_mod_fermat(total, cap_bits))
}

/// Reduces modulo `2^cap + 1` using `2^cap = -1`: split at `cap` bits and
/// subtract the high part from the low. The recomposed total overshoots
/// `cap` bits by at most a couple hundred, so the high part is far below
/// the modulus and each pass lands in range.
fn fold_mod_fermat(total: BigInt, cap: u64) -> BigUint {
    let modulus = (BigUint::one() << cap) + 1u32;
    let (sign, mut t) = total.into_parts();
    while t >= modulus {
        let hi = &t >> cap;
        debug_assert!(hi < modulus, "fold input exceeded documented headroom");
        let lo = &t - (&hi << cap);
        t = if lo >= hi { lo - hi } else { &modulus + lo - hi };
    }
    if sign == Sign::Minus && !t.is_zero() {
        t = &modulus - t;
    }
    t
}
