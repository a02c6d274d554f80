//! Prime search, counting, and density estimation against independently
//! computed values.

use gfpmul::primes::{
    self, DensityParams, GammaShape, SearchDirection, SearchWindow,
};

#[test]
fn the_u64_primality_test_survives_known_strong_pseudoprimes() {
    // Composites that fool small Miller-Rabin base sets.
    for n in [
        2047u64,
        1373653,
        25326001,
        3215031751,
        2152302898747,
        3474749660383,
        341550071728321,
        3825123056546413051,
    ] {
        assert!(!primes::is_prime_u64(n), "{n} is composite");
    }
    for n in [2u64, 3, 5, 65537, 4294967291, 18446744073709551557] {
        assert!(primes::is_prime_u64(n), "{n} is prime");
    }
    assert!(!primes::is_prime_u64(0));
    assert!(!primes::is_prime_u64(1));
}

#[test]
fn small_exponent_prime_bases_match_the_recorded_list() {
    // lambda = 1: bases r <= 100 with r^2 + 1 prime.
    let found = primes::list_gfp(&SearchWindow { lambda: 1, lo: 2, hi: 100 });
    assert_eq!(
        found,
        vec![2, 4, 6, 10, 14, 16, 20, 24, 26, 36, 40, 54, 56, 66, 74, 84, 90, 94]
    );
}

#[test]
fn window_counts_match_the_recorded_tables() {
    // First window [2^lambda, 2^lambda (1 + lambda^2)] per exponent log.
    let cases = [
        (2u32, 4u64, 20u64, vec![4u64, 6, 16, 20]),
        (3, 8, 80, vec![]),
        (4, 16, 272, vec![44, 74, 76, 94, 156, 158, 176, 188, 198, 248]),
        (
            5,
            32,
            832,
            vec![
                54, 96, 112, 114, 132, 156, 332, 342, 360, 376, 428, 430, 432, 448, 562,
                588, 726, 738, 804,
            ],
        ),
    ];
    for (lambda, lo, hi, expect) in cases {
        let window = SearchWindow { lambda, lo, hi };
        assert_eq!(primes::list_gfp(&window), expect, "lambda = {lambda}");
        assert_eq!(primes::count_gfp(&window), expect.len() as u64);
    }
    // Second window [2^(2 lambda), ...] heads, counted and spot-listed.
    let second = [
        (2u32, 16u64, 80u64, 11u64, vec![16u64, 20, 24, 28, 34]),
        (3, 64, 640, 22, vec![118, 132, 140, 152, 208]),
        (4, 256, 4352, 139, vec![288, 306, 318, 330, 348]),
    ];
    for (lambda, lo, hi, count, head) in second {
        let window = SearchWindow { lambda, lo, hi };
        assert_eq!(primes::count_gfp(&window), count, "lambda = {lambda}");
        let listed = primes::list_gfp(&window);
        assert_eq!(&listed[..head.len()], &head[..], "lambda = {lambda}");
    }
}

#[test]
fn the_large_table_entries_are_prime_and_neighbors_are_not() {
    for (r, lambda) in [(74u64, 4u32), (884, 5), (1084, 6)] {
        assert!(primes::is_gfp_prime(r, lambda), "{r}^(2^{lambda})+1");
    }
    for (r, lambda) in [(2097208u64, 3u32), (2, 5), (10, 2), (72, 4), (76, 5)] {
        assert!(!primes::is_gfp_prime(r, lambda), "{r}^(2^{lambda})+1");
    }
    // 2^16 + 1: the classic case sits on the boundary of both forms.
    assert!(primes::is_gfp_prime(2, 4));
}

#[test]
fn directional_search_finds_nearest_bases() {
    assert_eq!(primes::next_gfp(50, 4, SearchDirection::Up).unwrap(), 74);
    assert_eq!(primes::next_gfp(74, 4, SearchDirection::Up).unwrap(), 74);
    assert_eq!(primes::next_gfp(76, 4, SearchDirection::Down).unwrap(), 76);
    assert_eq!(primes::next_gfp(75, 4, SearchDirection::Down).unwrap(), 74);
    assert_eq!(primes::next_gfp(43, 4, SearchDirection::Down).unwrap(), 2);
    // Below the first mid-size lambda = 3 base (118) sit only 2 and 4.
    assert_eq!(primes::next_gfp(100, 3, SearchDirection::Down).unwrap(), 4);
    // 30^32 + 1 is the lone lambda = 5 prime below the first window.
    assert_eq!(primes::next_gfp(50, 5, SearchDirection::Down).unwrap(), 30);
    // Downward exhaustion: nothing at all below it.
    assert!(matches!(
        primes::next_gfp(28, 5, SearchDirection::Down),
        Err(primes::SearchError::PrimeNotFound { .. })
    ));
}

#[test]
fn counts_are_stable_across_repeated_parallel_runs() {
    let window = SearchWindow { lambda: 4, lo: 2, hi: 2000 };
    let first = primes::count_gfp(&window);
    for _ in 0..3 {
        assert_eq!(primes::count_gfp(&window), first);
    }
}

#[test]
fn singular_series_constants_match_independent_computation() {
    // Values computed separately with a slow scripted Euler product at
    // K = 10^6 truncation.
    let expect = [
        (1u32, 2.745543031231534),
        (2, 5.357725708029449),
        (3, 4.185479761640836),
        (4, 7.3424076579921564),
    ];
    for (lambda, value) in expect {
        let est = primes::c_lambda(&DensityParams { lambda, k: 1_000_000 });
        let rel = ((est.value - value) / value).abs();
        assert!(rel < 1e-9, "lambda = {lambda}: {} vs {value}", est.value);
        assert!(est.stabilization < 1e-3, "lambda = {lambda} not stabilized");
    }
}

#[test]
fn batch_constants_agree_with_single_shots() {
    let lambdas = [2u32, 3, 4, 5];
    let batch = primes::c_lambda_batch(&lambdas, 10_000);
    for (&lambda, got) in lambdas.iter().zip(&batch) {
        let single = primes::c_lambda(&DensityParams { lambda, k: 10_000 });
        assert_eq!(got.value, single.value, "lambda = {lambda}");
        assert_eq!(got.refined, single.refined, "lambda = {lambda}");
    }
}

#[test]
fn windowed_expectancy_matches_the_closed_form() {
    // delta(R) should be C/2^(lambda+1) * (H/ln H - R/ln R), H = R(1+lambda^2).
    let lambda = 4u32;
    let c = primes::c_lambda(&DensityParams { lambda, k: 100_000 }).value;
    for r_bound in [16f64, 256.0, 1024.0] {
        let hi = r_bound * (1.0 + (lambda as f64).powi(2));
        let expect = c / 2f64.powi(lambda as i32 + 1) * (hi / hi.ln() - r_bound / r_bound.ln());
        let got = primes::delta_with_c(r_bound, lambda, c);
        assert!((got - expect).abs() < 1e-12 * expect.abs());
    }
    // And the DensityParams entry point agrees with the explicit-C one.
    let dp = DensityParams { lambda, k: 100_000 };
    let via_dp = primes::delta(256.0, &dp);
    let via_c = primes::delta_with_c(256.0, lambda, c);
    assert!((via_dp - via_c).abs() < 1e-12 * via_c.abs());
}

#[test]
fn estimates_track_actual_counts_at_small_scale() {
    // The estimate is heuristic; at these windows it should sit within a
    // factor well under 2 of the truth (the recorded tables agree to ~25%).
    let checks = [
        (2u32, 16u64, 80u64, 11u64),
        (3, 64, 640, 22),
        (4, 256, 4352, 139),
    ];
    for (lambda, lo, hi, actual) in checks {
        let c = primes::c_lambda(&DensityParams { lambda, k: 100_000 }).value;
        let est = primes::delta_with_c(lo as f64, lambda, c);
        let ratio = est / actual as f64;
        assert!(
            (0.5..2.0).contains(&ratio),
            "lambda = {lambda}: estimate {est} vs actual {actual}"
        );
        assert_eq!(
            primes::count_gfp(&SearchWindow { lambda, lo, hi }),
            actual
        );
    }
}

#[test]
fn growth_window_probes_report_hits_and_misses() {
    // gamma(lambda) = lambda: the canonical probes are X = 2^lambda and
    // X = 2^(2 lambda).
    for lambda in [2u32, 4, 5] {
        let samples = primes::hypothesis_window_check(lambda, GammaShape::Identity, &[]);
        assert_eq!(samples.len(), 2);
        for s in &samples {
            assert_eq!(s.hi, s.lo * (1 + u64::from(lambda) * u64::from(lambda)));
            assert!(
                s.found.is_some(),
                "lambda = {lambda}, X = {}: expected an inhabited window",
                s.x
            );
        }
    }
    // The lone desk-scale exception: lambda = 3 at X = 2^3.
    let l3 = primes::hypothesis_window_check(3, GammaShape::Identity, &[]);
    assert_eq!(l3[0].lo, 8);
    assert_eq!(l3[0].found, None);
    // Its second canonical window is inhabited again.
    assert_eq!(l3[1].lo, 64);
    assert_eq!(l3[1].found, Some(118));
}

#[test]
fn explicit_samples_join_the_canonical_probes() {
    let samples = primes::hypothesis_window_check(4, GammaShape::Identity, &[40, 1000]);
    let xs: Vec<u64> = samples.iter().map(|s| s.x).collect();
    assert_eq!(xs, vec![16, 40, 256, 1000]);
    // [40, 680] starts at the first base past 40, which is 44.
    assert_eq!(samples[1].found, Some(44));
}

#[test]
fn gamma_laws_scale_as_documented() {
    assert_eq!(GammaShape::Identity.gamma(5), 5);
    assert_eq!(GammaShape::Square.gamma(5), 25);
    assert_eq!(GammaShape::Exponential.gamma(5), 32);
}
