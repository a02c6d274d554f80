//! Root construction, table layout, and every transform path against the
//! naive quadratic evaluations.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfpmul::gfp::{self, MulStrategy};
use gfpmul::reference;
use gfpmul::transform::{
    self, Direction, EvalVector, Phase, TransformError, TwiddleMode,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x0fff1)
}

fn random_element(rng: &mut ChaCha8Rng, params: &gfp::GfpParams) -> gfp::GfpElement {
    let p = params.modulus();
    let mut bytes = vec![0u8; (p.bits() as usize + 7) / 8 + 9];
    rng.fill(&mut bytes[..]);
    gfp::encode(&(BigUint::from_bytes_le(&bytes) % p), params).expect("reduced")
}

fn decode_all(v: &[gfp::GfpElement], params: &gfp::GfpParams) -> Vec<BigUint> {
    v.iter().map(|e| gfp::decode(e, params)).collect()
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

#[test]
fn principal_roots_satisfy_the_annihilation_sums() {
    // The defining property: sum_j omega^(ij) = 0 for every i in [1, N).
    // Primitivity alone does not give this over a ring, and the transform
    // correctness proofs lean on the stronger form.
    let params = gfp::make_params(4, 2).unwrap();
    let p = params.modulus().clone();
    for two_n in [2u64, 4, 8, 16, 32] {
        let root = transform::principal_root(two_n, &params).unwrap();
        let w = gfp::decode(&root, &params);
        for i in 1..two_n {
            let mut acc = BigUint::ZERO;
            for j in 0..two_n {
                acc += w.modpow(&BigUint::from(i * j), &p);
                acc %= &p;
            }
            assert!(acc.is_zero(), "i = {i} sum nonzero");
        }
    }
}

#[test]
fn the_root_ladder_passes_through_r() {
    // Alignment invariant: omega^(2N / 2^(lambda+1)) must equal r itself,
    // so that the bottom of the recursion sees cheap twiddles only.
    let params = gfp::make_params(44, 4).unwrap();
    let m = 2u64 << params.lambda(); // order of r
    for two_n in [64u64, 128, 256] {
        let table = transform::build_table(two_n, &params).unwrap();
        let idx = two_n / m;
        assert_eq!(
            gfp::decode(table.power(idx), &params),
            BigUint::from(44u32),
            "two_n = {two_n}"
        );
        // These tables are wider than the order of r, so the root itself
        // is not a shift.
        assert_eq!(table.r_exponent(), None);
    }
    // At or below the order of r the root collapses onto the shift ladder.
    for (two_n, expect) in [(32u64, 1u64), (16, 2), (8, 4)] {
        let table = transform::build_table(two_n, &params).unwrap();
        assert_eq!(table.r_exponent(), Some(expect), "two_n = {two_n}");
        assert_eq!(
            gfp::decode(table.root(), &params),
            BigUint::from(44u32).modpow(&BigUint::from(expect), params.modulus())
        );
    }
}

#[test]
fn requesting_an_unsupported_order_fails() {
    let params = gfp::make_params(4, 2).unwrap(); // p - 1 = 256 = 2^8
    assert!(transform::principal_root(256, &params).is_ok());
    assert!(matches!(
        transform::principal_root(512, &params),
        Err(TransformError::OrderUnavailable { .. })
    ));
}

#[test]
fn tables_store_the_full_power_ring_and_scaled_inverses() {
    let params = gfp::make_params(132, 3).unwrap();
    let p = params.modulus().clone();
    let two_n = 32u64;
    let n = two_n / 2;
    let table = transform::build_table(two_n, &params).unwrap();
    let w = gfp::decode(table.root(), &params);
    for j in 0..2 * two_n {
        // power() reduces exponents mod 2N.
        assert_eq!(
            gfp::decode(table.power(j), &params),
            w.modpow(&BigUint::from(j % two_n), &p)
        );
    }
    // inv_composition(k) = omega^-k / N: multiplying back by omega^k N
    // must give 1.
    let strat = MulStrategy::Schoolbook;
    let n_elem = gfp::encode(&BigUint::from(n), &params).unwrap();
    for k in 0..n {
        let ic = table.inv_composition(k);
        let wk = gfp::encode(&w.modpow(&BigUint::from(k), &p), &params).unwrap();
        let prod = gfp::mul_generic(ic, &wk, &params, &strat);
        let prod = gfp::mul_generic(&prod, &n_elem, &params, &strat);
        assert_eq!(prod, gfp::one(&params), "k = {k}");
    }
}

// ---------------------------------------------------------------------------
// Radix-2 and large-radix transforms vs the naive DFT
// ---------------------------------------------------------------------------

#[test]
fn radix2_cheap_and_generic_modes_agree() {
    let params = gfp::make_params(44, 4).unwrap();
    let p = params.modulus().clone();
    let mut rng = rng();
    // r has order 32, so cheap twiddles exist exactly for lengths <= 32.
    let root = transform::principal_root(64, &params).unwrap();
    let w = gfp::decode(&root, &params);
    for len_log in 1..=5 {
        let len = 1usize << len_log;
        let omega =
            gfp::encode(&w.modpow(&BigUint::from(64 / len as u64), &p), &params).unwrap();
        let values: Vec<gfp::GfpElement> =
            (0..len).map(|_| random_element(&mut rng, &params)).collect();
        let mut cheap = values.clone();
        transform::radix2_fft(&mut cheap, &omega, &params, TwiddleMode::CheapOnly).unwrap();
        let mut generic = values.clone();
        transform::radix2_fft(&mut generic, &omega, &params, TwiddleMode::Generic).unwrap();
        assert_eq!(cheap, generic, "len = {len}");
        let naive = reference::naive_dft(&decode_all(&values, &params), &gfp::decode(&omega, &params), &p);
        assert_eq!(decode_all(&cheap, &params), naive, "len = {len}");
    }
}

#[test]
fn cheap_mode_refuses_roots_off_the_shift_ladder() {
    let params = gfp::make_params(4, 2).unwrap();
    // A principal 64th root cannot be a power of r (r has order 16), so
    // cheap mode must refuse rather than silently go generic.
    let root = transform::principal_root(64, &params).unwrap();
    let mut v: Vec<gfp::GfpElement> = (0..64).map(|_| gfp::one(&params)).collect();
    assert!(matches!(
        transform::radix2_fft(&mut v, &root, &params, TwiddleMode::CheapOnly),
        Err(TransformError::CheapModeViolation { .. })
    ));
    assert!(transform::radix2_fft(&mut v, &root, &params, TwiddleMode::Generic).is_ok());
}

#[test]
fn large_radix_transform_matches_naive_dft_across_lengths() {
    let mut rng = rng();
    for (r, lambda, two_n) in [(4u64, 2u32, 16u64), (132, 3, 64), (44, 4, 64)] {
        let params = gfp::make_params(r, lambda).unwrap();
        let p = params.modulus().clone();
        let table = transform::build_table(two_n, &params).unwrap();
        let w = gfp::decode(table.root(), &params);
        let mut len = 2u64;
        while len <= two_n {
            let values: Vec<gfp::GfpElement> = (0..len)
                .map(|_| random_element(&mut rng, &params))
                .collect();
            let mut fast = values.clone();
            transform::large_radix_fft(&mut fast, &table, &params).unwrap();
            let omega = w.modpow(&BigUint::from(two_n / len), &p);
            let naive = reference::naive_dft(&decode_all(&values, &params), &omega, &p);
            assert_eq!(
                decode_all(&fast, &params),
                naive,
                "r = {r}, len = {len}"
            );
            len *= 2;
        }
    }
}

// ---------------------------------------------------------------------------
// Half transform: roundtrip and the convolution theorem
// ---------------------------------------------------------------------------

#[test]
fn half_dft_roundtrips_to_the_identity() {
    let mut rng = rng();
    for (r, lambda, n) in [(4u64, 2u32, 8usize), (132, 3, 16), (44, 4, 32)] {
        let params = gfp::make_params(r, lambda).unwrap();
        let table = transform::build_table(2 * n as u64, &params).unwrap();
        for _ in 0..5 {
            let values: Vec<gfp::GfpElement> =
                (0..n).map(|_| random_element(&mut rng, &params)).collect();
            let v = EvalVector::coefficients(values.clone());
            let fwd = transform::half_dft(v, &table, &params, Direction::Forward).unwrap();
            assert_eq!(fwd.phase, Phase::Evaluation);
            let back = transform::half_dft(fwd, &table, &params, Direction::Inverse).unwrap();
            assert_eq!(back.phase, Phase::Coefficient);
            assert_eq!(back.values, values, "r = {r}");
        }
    }
}

#[test]
fn evaluation_products_realize_negacyclic_convolution() {
    let mut rng = rng();
    for (r, lambda, n) in [(4u64, 2u32, 8usize), (132, 3, 8), (44, 4, 16)] {
        let params = gfp::make_params(r, lambda).unwrap();
        let p = params.modulus().clone();
        let table = transform::build_table(2 * n as u64, &params).unwrap();
        for _ in 0..5 {
            let a: Vec<gfp::GfpElement> =
                (0..n).map(|_| random_element(&mut rng, &params)).collect();
            let b: Vec<gfp::GfpElement> =
                (0..n).map(|_| random_element(&mut rng, &params)).collect();
            let fa = transform::half_dft(
                EvalVector::coefficients(a.clone()),
                &table,
                &params,
                Direction::Forward,
            )
            .unwrap();
            let fb = transform::half_dft(
                EvalVector::coefficients(b.clone()),
                &table,
                &params,
                Direction::Forward,
            )
            .unwrap();
            let prod = transform::pointwise_product(&fa, &fb, &params).unwrap();
            let back =
                transform::half_dft(prod, &table, &params, Direction::Inverse).unwrap();
            let naive = reference::naive_negacyclic(
                &decode_all(&a, &params),
                &decode_all(&b, &params),
                &p,
            );
            assert_eq!(decode_all(&back.values, &params), naive, "r = {r}");
        }
    }
}

#[test]
fn phase_tags_are_enforced() {
    let params = gfp::make_params(44, 4).unwrap();
    let table = transform::build_table(32, &params).unwrap();
    let values: Vec<gfp::GfpElement> = (0..16).map(|_| gfp::one(&params)).collect();
    let coeffs = EvalVector::coefficients(values);
    // Inverse of a coefficient vector is a phase error.
    assert!(matches!(
        transform::half_dft(coeffs.clone(), &table, &params, Direction::Inverse),
        Err(TransformError::PhaseMismatch { .. })
    ));
    // Pointwise products require evaluation phase on both sides.
    let fwd = transform::half_dft(coeffs.clone(), &table, &params, Direction::Forward).unwrap();
    assert!(matches!(
        transform::pointwise_product(&fwd, &coeffs, &params),
        Err(TransformError::PhaseMismatch { .. })
    ));
    // Length must be half the table order.
    let short = EvalVector::coefficients(vec![gfp::one(&params); 8]);
    assert!(matches!(
        transform::half_dft(short, &table, &params, Direction::Forward),
        Err(TransformError::TableTooSmall { .. })
    ));
}

#[test]
fn flagged_entries_flow_through_whole_transforms() {
    // The exceptional p-1 representation must survive transform, product,
    // and inverse without corrupting neighbors.
    let params = gfp::make_params(132, 3).unwrap();
    let p = params.modulus().clone();
    let n = 8usize;
    let table = transform::build_table(16, &params).unwrap();
    let mut rng = rng();
    let mut a: Vec<gfp::GfpElement> =
        (0..n).map(|_| random_element(&mut rng, &params)).collect();
    a[0] = gfp::minus_one(&params);
    a[5] = gfp::minus_one(&params);
    let b: Vec<gfp::GfpElement> = (0..n)
        .map(|i| {
            if i == 3 {
                gfp::minus_one(&params)
            } else {
                random_element(&mut rng, &params)
            }
        })
        .collect();
    let fa = transform::half_dft(
        EvalVector::coefficients(a.clone()),
        &table,
        &params,
        Direction::Forward,
    )
    .unwrap();
    let fb = transform::half_dft(
        EvalVector::coefficients(b.clone()),
        &table,
        &params,
        Direction::Forward,
    )
    .unwrap();
    let prod = transform::pointwise_product(&fa, &fb, &params).unwrap();
    let back = transform::half_dft(prod, &table, &params, Direction::Inverse).unwrap();
    let naive =
        reference::naive_negacyclic(&decode_all(&a, &params), &decode_all(&b, &params), &p);
    assert_eq!(decode_all(&back.values, &params), naive);
}
