//! Plan construction and end-to-end multiplication, checked against
//! independent integer arithmetic.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfpmul::gfp::{self, MulStrategy};
use gfpmul::multiplier::{
    assemble, choose_beta, group_coefficients, kronecker_multiply, multiply, plan_outline,
    precompute, recursive_level_multiply, LevelSpec, PlanConfig, PlanError, PlanMode,
};
use gfpmul::primes::GammaShape;
use gfpmul::textio;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random integer with the top bit of `bits` set.
fn random_exact_bits(rng: &mut ChaCha8Rng, bits: u64) -> BigUint {
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill(&mut bytes[..]);
    let excess = bytes.len() as u64 * 8 - bits;
    (BigUint::from_bytes_le(&bytes) >> excess) | (BigUint::one() << (bits - 1))
}

fn random_element(rng: &mut ChaCha8Rng, params: &gfp::GfpParams) -> gfp::GfpElement {
    let p = params.modulus();
    let wide = random_exact_bits(rng, p.bits() + 64);
    gfp::encode(&(wide % p), params).expect("reduced")
}

// ---------------------------------------------------------------------------
// Plan shapes
// ---------------------------------------------------------------------------

#[test]
fn practical_outlines_pick_the_expected_fields() {
    let cfg = PlanConfig::default();
    let shape = |n: u64| plan_outline(n, &cfg).unwrap();
    assert_eq!(
        shape(1 << 14),
        vec![LevelSpec { r: 132, lambda: 3, eta: 16, big_n: 1 << 11, beta: 0 }]
    );
    assert_eq!(
        shape(1 << 17),
        vec![LevelSpec { r: 44, lambda: 4, eta: 32, big_n: 1 << 13, beta: 0 }]
    );
    assert_eq!(
        shape(1 << 20),
        vec![LevelSpec { r: 44, lambda: 4, eta: 32, big_n: 1 << 16, beta: 0 }]
    );
    // 74 would fit the bit budget here but cannot host an order-2N root
    // (its 2-adic valuation is 1); the planner must skip to 76.
    assert_eq!(
        shape(1 << 30),
        vec![LevelSpec { r: 76, lambda: 4, eta: 32, big_n: 1 << 26, beta: 0 }]
    );
}

#[test]
fn lambda_override_reshapes_the_top_level() {
    let cfg = PlanConfig {
        lambda_override: Some(5),
        ..PlanConfig::default()
    };
    assert_eq!(
        plan_outline(1 << 30, &cfg).unwrap(),
        vec![LevelSpec { r: 432, lambda: 5, eta: 128, big_n: 1 << 24, beta: 0 }]
    );
}

#[test]
fn theoretical_mode_pushes_lambda_to_the_capacity_log() {
    let cfg = PlanConfig {
        mode: PlanMode::Theoretical,
        ..PlanConfig::default()
    };
    // 2^(2^5) >= 2n forces lambda = 5; the first fitting base that is
    // prime is 360 (348 fits the budget but 348^32 + 1 is composite).
    assert_eq!(
        plan_outline(1 << 20, &cfg).unwrap(),
        vec![LevelSpec { r: 360, lambda: 5, eta: 128, big_n: 1 << 14, beta: 0 }]
    );
}

#[test]
fn small_inputs_get_an_empty_outline() {
    let cfg = PlanConfig::default();
    assert!(plan_outline(1 << 10, &cfg).unwrap().is_empty());
    let plan = precompute(1 << 10, &cfg).unwrap();
    assert!(plan.levels().is_empty());
    let a = BigUint::from(12345u32);
    let b = BigUint::from(67890u32);
    assert_eq!(multiply(&a, &b, &plan).unwrap(), &a * &b);
}

#[test]
fn a_lower_threshold_recurses_once() {
    let cfg = PlanConfig {
        base_threshold_bits: 256,
        ..PlanConfig::default()
    };
    let specs = plan_outline(1 << 16, &cfg).unwrap();
    assert_eq!(
        specs,
        vec![
            LevelSpec { r: 44, lambda: 4, eta: 32, big_n: 1 << 12, beta: 4 },
            LevelSpec { r: 118, lambda: 3, eta: 22, big_n: 4, beta: 0 },
        ]
    );
}

#[test]
fn a_threshold_below_every_fixed_point_hits_the_depth_cap() {
    // 118^8+1 re-selects itself once its packed size (136 bits) stays at
    // or above the threshold, so the chain can never terminate.
    let cfg = PlanConfig {
        base_threshold_bits: 136,
        ..PlanConfig::default()
    };
    match plan_outline(1 << 16, &cfg) {
        Err(PlanError::PlanTooDeep { max_depth: 8 }) => {}
        other => panic!("expected the depth cap, got {other:?}"),
    }
}

#[test]
fn beta_selection_balances_width_against_the_next_field() {
    let params = gfp::make_params(44, 4).unwrap();
    // Next lambda 3, identity gamma: budget 48 bits. beta = 4 needs
    // 8 log2(44) + 4 - 2 = 45.67 bits; beta = 8 would need 88.35.
    assert_eq!(choose_beta(&params, 3, GammaShape::Identity).unwrap(), 4);
}

// ---------------------------------------------------------------------------
// End-to-end integer multiplication
// ---------------------------------------------------------------------------

#[test]
fn depth_one_multiplication_is_exact() {
    let cfg = PlanConfig::default();
    let plan = precompute(1 << 14, &cfg).unwrap();
    assert_eq!(plan.levels().len(), 1);
    let mut rng = rng(0x5eed_0001);
    for _ in 0..25 {
        let a = random_exact_bits(&mut rng, 1 << 14);
        let b = random_exact_bits(&mut rng, 1 << 14);
        assert_eq!(multiply(&a, &b, &plan).unwrap(), &a * &b);
    }
}

#[test]
fn adversarial_operands_keep_their_carries() {
    let cfg = PlanConfig::default();
    let plan = precompute(1 << 14, &cfg).unwrap();
    let all_ones = (BigUint::one() << (1 << 14)) - 1u32;
    // (2^n - 1)^2 makes every convolution coefficient maximal.
    assert_eq!(multiply(&all_ones, &all_ones, &plan).unwrap(), &all_ones * &all_ones);
    let one = BigUint::one();
    assert_eq!(multiply(&all_ones, &one, &plan).unwrap(), all_ones);
    let zero = BigUint::ZERO;
    assert_eq!(multiply(&all_ones, &zero, &plan).unwrap(), zero);
    // Powers of two exercise lone-bit chunks.
    let pow = BigUint::one() << 16383;
    assert_eq!(multiply(&pow, &pow, &plan).unwrap(), &pow * &pow);
}

#[test]
fn unbalanced_operands_share_the_capacity() {
    let cfg = PlanConfig::default();
    let plan = precompute(1 << 14, &cfg).unwrap();
    let mut rng = rng(0x5eed_0002);
    let a = random_exact_bits(&mut rng, 20_000);
    let b = random_exact_bits(&mut rng, 5_000);
    assert_eq!(multiply(&a, &b, &plan).unwrap(), &a * &b);
}

#[test]
fn oversized_operands_are_rejected() {
    let cfg = PlanConfig::default();
    let plan = precompute(1 << 14, &cfg).unwrap();
    let cap = plan.capacity_bits();
    let a = BigUint::one() << (cap / 2);
    let b = BigUint::one() << (cap / 2 + 1);
    match multiply(&a, &b, &plan) {
        Err(PlanError::Overflow { needed, capacity }) => {
            assert_eq!(needed, cap + 3);
            assert_eq!(capacity, cap);
        }
        other => panic!("expected overflow, got {other:?}"),
    }
}

#[test]
fn depth_two_multiplication_is_exact() {
    let cfg = PlanConfig {
        base_threshold_bits: 256,
        ..PlanConfig::default()
    };
    let plan = precompute(1 << 16, &cfg).unwrap();
    assert_eq!(plan.levels().len(), 2);
    let mut rng = rng(0x5eed_0003);
    for _ in 0..2 {
        let a = random_exact_bits(&mut rng, 1 << 16);
        let b = random_exact_bits(&mut rng, 1 << 16);
        assert_eq!(multiply(&a, &b, &plan).unwrap(), &a * &b);
    }
    let all_ones = (BigUint::one() << (1 << 16)) - 1u32;
    assert_eq!(multiply(&all_ones, &all_ones, &plan).unwrap(), &all_ones * &all_ones);
}

// ---------------------------------------------------------------------------
// Kronecker and grouping paths
// ---------------------------------------------------------------------------

#[test]
fn kronecker_products_match_schoolbook() {
    let inner = |x: &BigUint, y: &BigUint| x * y;
    let mut rng = rng(0x5eed_0004);
    for (r, lambda) in [(4, 2), (132, 3), (44, 4), (118, 3)] {
        let params = gfp::make_params(r, lambda).unwrap();
        for _ in 0..50 {
            let a = random_element(&mut rng, &params);
            let b = random_element(&mut rng, &params);
            let via_ks = kronecker_multiply(&a, &b, &params, &inner).unwrap();
            let via_school = gfp::mul_generic(&a, &b, &params, &MulStrategy::Schoolbook);
            assert_eq!(via_ks, via_school);
        }
        // The flagged residue and zero take the shortcut paths.
        let m1 = gfp::minus_one(&params);
        let x = random_element(&mut rng, &params);
        assert_eq!(
            kronecker_multiply(&m1, &x, &params, &inner).unwrap(),
            gfp::mul_generic(&m1, &x, &params, &MulStrategy::Schoolbook)
        );
        assert_eq!(
            kronecker_multiply(&m1, &m1, &params, &inner).unwrap(),
            gfp::one(&params)
        );
        let z = gfp::zero(&params);
        assert_eq!(kronecker_multiply(&z, &x, &params, &inner).unwrap(), z);
    }
}

#[test]
fn grouping_path_agrees_with_kronecker_path() {
    let cfg = PlanConfig {
        base_threshold_bits: 256,
        ..PlanConfig::default()
    };
    let plan = precompute(1 << 16, &cfg).unwrap();
    let params = plan.levels()[0].params();
    let inner = |x: &BigUint, y: &BigUint| x * y;
    let mut rng = rng(0x5eed_0005);
    for _ in 0..20 {
        let a = random_element(&mut rng, &params.clone());
        let b = random_element(&mut rng, &params.clone());
        let grouped = recursive_level_multiply(&a, &b, &plan, 1).unwrap();
        let direct = kronecker_multiply(&a, &b, params, &inner).unwrap();
        assert_eq!(grouped, direct);
    }
    let m1 = gfp::minus_one(params);
    let x = random_element(&mut rng, &params.clone());
    assert_eq!(
        recursive_level_multiply(&m1, &x, &plan, 1).unwrap(),
        kronecker_multiply(&m1, &x, params, &inner).unwrap()
    );
}

#[test]
fn grouping_splits_digits_in_base_r_chunks() {
    let params = gfp::make_params(4, 2).unwrap(); // p = 257, digits [d0..d3]
    let e = gfp::encode(&BigUint::from(123u32), &params).unwrap();
    // 123 = 3 + 2*4 + 3*16 + 1*64.
    assert_eq!(e.coeffs(), &[3, 2, 3, 1]);
    let chunks = group_coefficients(&e, 2, &params).unwrap();
    assert_eq!(chunks, vec![BigUint::from(11u32), BigUint::from(7u32)]);
    assert!(group_coefficients(&gfp::minus_one(&params), 2, &params).is_err());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[test]
fn serialized_plans_rebuild_and_still_multiply() {
    let cfg = PlanConfig {
        base_threshold_bits: 256,
        ..PlanConfig::default()
    };
    let plan = precompute(1 << 16, &cfg).unwrap();
    let text = textio::format_plan(&plan.specs());
    let parsed = textio::parse_plan(&text).unwrap();
    assert_eq!(parsed, plan.specs());
    let rebuilt = assemble(&parsed, &cfg).unwrap();
    assert_eq!(rebuilt.specs(), plan.specs());
    assert_eq!(rebuilt.capacity_bits(), plan.capacity_bits());
    let mut rng = rng(0x5eed_0006);
    let a = random_exact_bits(&mut rng, 1 << 16);
    let b = random_exact_bits(&mut rng, 1 << 16);
    assert_eq!(multiply(&a, &b, &rebuilt).unwrap(), &a * &b);
}

#[test]
fn assemble_rejects_inconsistent_specs() {
    // Capacity violation: N * (2^eta)^2 far beyond 132^8 + 1.
    let too_wide = vec![LevelSpec { r: 132, lambda: 3, eta: 40, big_n: 1 << 11, beta: 0 }];
    assert!(matches!(
        assemble(&too_wide, &PlanConfig::default()),
        Err(PlanError::BadLevel { .. })
    ));
    // Broken linkage: the second level's length must equal 16 / beta.
    let bad_link = vec![
        LevelSpec { r: 44, lambda: 4, eta: 32, big_n: 1 << 12, beta: 4 },
        LevelSpec { r: 118, lambda: 3, eta: 22, big_n: 8, beta: 0 },
    ];
    assert!(matches!(
        assemble(&bad_link, &PlanConfig::default()),
        Err(PlanError::BadLevel { .. })
    ));
    // A composite modulus is caught by parameter construction.
    let composite = vec![LevelSpec { r: 10, lambda: 2, eta: 4, big_n: 4, beta: 0 }];
    assert!(matches!(
        assemble(&composite, &PlanConfig::default()),
        Err(PlanError::Field(_))
    ));
}

// ---------------------------------------------------------------------------
// Capacity bookkeeping
// ---------------------------------------------------------------------------

#[test]
fn realized_plans_respect_the_bit_budget_everywhere() {
    for (n, threshold) in [(1u64 << 14, 4096u64), (1 << 16, 256), (1 << 17, 4096)] {
        let cfg = PlanConfig {
            base_threshold_bits: threshold,
            ..PlanConfig::default()
        };
        let plan = precompute(n, &cfg).unwrap();
        assert!(plan.capacity_bits() >= 2 * n);
        for lv in plan.levels() {
            let need = 2 * lv.eta() + u64::from(lv.big_n().trailing_zeros());
            assert!(need <= lv.params().floor_log2_p());
        }
    }
}
