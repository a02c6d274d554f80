//! Command line front end: exact multiplication, prime search and counting,
//! density estimates, plan inspection, the cost model, and self checks.
//!
//! Exit codes: 0 on success, 1 on any operational error, 2 on usage errors
//! (the argument parser's own convention).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfpmul::costmodel;
use gfpmul::counters;
use gfpmul::gfp::{self, MulStrategy};
use gfpmul::multiplier::{self, MultiplyPlan, PlanConfig, PlanMode};
use gfpmul::primes::{self, GammaShape, SearchDirection, SearchWindow};
use gfpmul::reference;
use gfpmul::textio;
use gfpmul::transform;

#[derive(Parser)]
#[command(
    name = "gfpmul",
    version,
    about = "Integer multiplication over generalized Fermat prime fields"
)]
struct Cli {
    /// Output style for tabular verbs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for parallel candidate scans (default: GFPMUL_JOBS,
    /// then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-aligned columns.
    Table,
    /// One `key=value` record per line.
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Practical,
    Theoretical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GammaArg {
    Identity,
    Square,
    Exponential,
}

impl From<GammaArg> for GammaShape {
    fn from(g: GammaArg) -> GammaShape {
        match g {
            GammaArg::Identity => GammaShape::Identity,
            GammaArg::Square => GammaShape::Square,
            GammaArg::Exponential => GammaShape::Exponential,
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Multiply two hex integers read from files; print the hex product.
    Mul {
        /// File holding the first operand (big-endian hex, whitespace ok).
        a: PathBuf,
        /// File holding the second operand.
        b: PathBuf,
        /// Serialized plan to reuse instead of deriving one.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Re-multiply with the independent schoolbook oracle and refuse
        /// to print a product that disagrees.
        #[arg(long)]
        check: bool,
    },
    /// Find the smallest prime base whose field clears a bit floor.
    PrimesSearch {
        #[arg(long)]
        lambda: u32,
        /// Required floor(log2 p).
        #[arg(long = "min-bits")]
        min_bits: u64,
    },
    /// Count prime bases in an inclusive range.
    PrimesCount {
        #[arg(long)]
        lambda: u32,
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Density estimates (and counts) over the canonical growth windows.
    Density {
        /// Single exponent log to report. Required unless --table1.
        #[arg(long)]
        lambda: Option<u32>,
        /// Truncation index for the singular series.
        #[arg(long = "K", default_value_t = 1_000_000)]
        k: u64,
        /// Report every lambda in 2..=7, both windows.
        #[arg(long)]
        table1: bool,
        /// Also count the long windows that are skipped by default
        /// (lambda = 6 second window, lambda >= 7).
        #[arg(long = "full-counts")]
        full_counts: bool,
    },
    /// Evaluate the cost model at one input size for a list of fields.
    Cost {
        /// Input size in bits.
        #[arg(long)]
        n: u64,
        /// Field table file: `min_bits max_bits r lambda` per line.
        #[arg(long)]
        primes: PathBuf,
        /// Timing profile file: `bits=B seconds=S` per line.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Derive and print the multiplication plan for an input size.
    Plan {
        /// Input size in bits.
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
        mode: ModeArg,
        /// Force the top-level exponent log.
        #[arg(long)]
        lambda: Option<u32>,
        /// Packed size below which levels multiply directly.
        #[arg(long = "threshold-bits")]
        threshold_bits: Option<u64>,
        #[arg(long, value_enum, default_value_t = GammaArg::Identity)]
        gamma: GammaArg,
    },
    /// Run the oracle-equivalence suites; one line per suite.
    Selfcheck,
    /// Multiply `--reps` random pairs and print instrumented counters.
    Bench {
        /// Operand size in bits.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        reps: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_jobs(cli.jobs);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_jobs(flag: Option<usize>) {
    let jobs = flag.or_else(|| {
        std::env::var("GFPMUL_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(j) = jobs.filter(|&j| j > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.verb {
        Verb::Mul { a, b, plan, check } => mul_verb(a, b, plan.as_deref(), *check),
        Verb::PrimesSearch { lambda, min_bits } => primes_search_verb(*lambda, *min_bits),
        Verb::PrimesCount { lambda, lo, hi } => primes_count_verb(*lambda, *lo, *hi, cli.format),
        Verb::Density {
            lambda,
            k,
            table1,
            full_counts,
        } => density_verb(*lambda, *k, *table1, *full_counts, cli.format),
        Verb::Cost { n, primes, profile } => {
            cost_verb(*n, primes, profile.as_deref(), cli.format)
        }
        Verb::Plan {
            n,
            mode,
            lambda,
            threshold_bits,
            gamma,
        } => plan_verb(*n, *mode, *lambda, *threshold_bits, *gamma),
        Verb::Selfcheck => selfcheck_verb(),
        Verb::Bench { n, reps } => bench_verb(*n, *reps, cli.format),
    }
}

// ---------------------------------------------------------------------------
// mul
// ---------------------------------------------------------------------------

fn read_hex_file(path: &std::path::Path) -> Result<BigUint> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let x = textio::parse_hex(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(x)
}

fn oracle_product(a: &BigUint, b: &BigUint) -> BigUint {
    let na = reference::Nat::from_bytes_le(&a.to_bytes_le());
    let nb = reference::Nat::from_bytes_le(&b.to_bytes_le());
    BigUint::from_bytes_le(&reference::schoolbook_mul(&na, &nb).to_bytes_le())
}

fn plan_for(a: &BigUint, b: &BigUint, plan_path: Option<&std::path::Path>) -> Result<MultiplyPlan> {
    let config = PlanConfig::default();
    match plan_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let specs = textio::parse_plan(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            Ok(multiplier::assemble(&specs, &config)?)
        }
        None => {
            let n = a.bits().max(b.bits()).max(1);
            Ok(multiplier::precompute(n, &config)?)
        }
    }
}

fn mul_verb(
    a_path: &std::path::Path,
    b_path: &std::path::Path,
    plan_path: Option<&std::path::Path>,
    check: bool,
) -> Result<()> {
    let a = read_hex_file(a_path)?;
    let b = read_hex_file(b_path)?;
    let plan = plan_for(&a, &b, plan_path)?;
    let product = multiplier::multiply(&a, &b, &plan)?;
    if check && product != oracle_product(&a, &b) {
        bail!("product disagrees with the schoolbook oracle; nothing printed");
    }
    println!("{}", textio::format_hex(&product));
    Ok(())
}

// ---------------------------------------------------------------------------
// primes-search / primes-count
// ---------------------------------------------------------------------------

fn primes_search_verb(lambda: u32, min_bits: u64) -> Result<()> {
    if lambda >= 32 {
        bail!("lambda {lambda} is out of the supported range");
    }
    let digits = 1u64 << lambda;
    if min_bits.div_ceil(digits) >= 62 {
        bail!("min-bits {min_bits} needs a base beyond 2^62 at lambda {lambda}");
    }
    // The bit floor is monotone in r, so locate the first base that clears
    // it and scan for primality from there.
    let guess = 2f64.powf(min_bits as f64 / digits as f64).floor() as u64;
    let mut r0 = (guess.saturating_sub(4)).max(2) & !1;
    while costmodel::modulus_bit_budget(r0, lambda) < min_bits {
        r0 += 2;
    }
    let r = primes::next_gfp(r0, lambda, SearchDirection::Up)?;
    println!("r={r}");
    Ok(())
}

fn primes_count_verb(lambda: u32, lo: u64, hi: u64, format: Format) -> Result<()> {
    if lo > hi {
        bail!("empty range: lo {lo} > hi {hi}");
    }
    let count = primes::count_gfp(&SearchWindow { lambda, lo, hi });
    match format {
        Format::Records => println!("lambda={lambda} lo={lo} hi={hi} count={count}"),
        Format::Table => {
            let rows = vec![vec![
                lambda.to_string(),
                lo.to_string(),
                hi.to_string(),
                count.to_string(),
            ]];
            print!(
                "{}",
                textio::align_table(&["lambda", "lo", "hi", "count"], &rows)
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

struct DensityCell {
    lambda: u32,
    lo: u64,
    hi: u64,
    count: Option<u64>,
    estimate: f64,
    c_lambda: f64,
}

/// The two canonical windows per exponent log: `[X, X(1+lambda^2)]` at
/// `X = 2^lambda` and `X = 2^(2 lambda)`.
fn density_windows(lambda: u32) -> [(u64, u64); 2] {
    let lam2 = 1 + u64::from(lambda) * u64::from(lambda);
    let x1 = 1u64 << lambda;
    let x2 = 1u64 << (2 * lambda);
    [(x1, x1 * lam2), (x2, x2 * lam2)]
}

fn density_verb(
    lambda: Option<u32>,
    k: u64,
    table1: bool,
    full_counts: bool,
    format: Format,
) -> Result<()> {
    let lambdas: Vec<u32> = if table1 {
        (2..=7).collect()
    } else {
        vec![lambda.context("pass --lambda L or --table1")?]
    };
    let estimates = primes::c_lambda_batch(&lambdas, k);
    let mut cells = Vec::new();
    for (&lam, est) in lambdas.iter().zip(&estimates) {
        if lam >= 31 {
            bail!("lambda {lam} is out of the supported range");
        }
        for (idx, (lo, hi)) in density_windows(lam).into_iter().enumerate() {
            // Counting the second window beyond lambda = 5 (or anything at
            // lambda >= 7) means primality-testing thousands of multi-kilobit
            // candidates; those cells stay estimate-only unless forced.
            let cheap = lam <= 5 || (lam == 6 && idx == 0);
            let count = (cheap || full_counts)
                .then(|| primes::count_gfp(&SearchWindow { lambda: lam, lo, hi }));
            let estimate = primes::delta_with_c(lo as f64, lam, est.value);
            cells.push(DensityCell {
                lambda: lam,
                lo,
                hi,
                count,
                estimate,
                c_lambda: est.value,
            });
        }
    }
    match format {
        Format::Records => {
            for c in &cells {
                println!(
                    "{}",
                    textio::format_density_record(c.lambda, c.lo, c.hi, c.count, c.estimate)
                );
            }
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = cells
                .iter()
                .map(|c| {
                    vec![
                        c.lambda.to_string(),
                        c.lo.to_string(),
                        c.hi.to_string(),
                        c.count.map_or_else(|| "-".into(), |v| v.to_string()),
                        format!("{:.2}", c.estimate),
                        format!("{:.6}", c.c_lambda),
                    ]
                })
                .collect();
            print!(
                "{}",
                textio::align_table(
                    &["lambda", "lo", "hi", "count", "estimate", "C_lambda"],
                    &rows
                )
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

fn cost_verb(
    n: u64,
    primes_path: &std::path::Path,
    profile_path: Option<&std::path::Path>,
    format: Format,
) -> Result<()> {
    let text = fs::read_to_string(primes_path)
        .with_context(|| format!("reading {}", primes_path.display()))?;
    let rows = textio::parse_prime_table(&text)
        .with_context(|| format!("parsing {}", primes_path.display()))?;
    if rows.is_empty() {
        bail!("{} lists no fields", primes_path.display());
    }
    let fields: Vec<(u64, u32)> = rows.iter().map(|row| (row.r, row.lambda)).collect();
    let profile = match profile_path {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(
                textio::parse_profile(&text)
                    .with_context(|| format!("parsing {}", path.display()))?,
            )
        }
        None => None,
    };
    let report = costmodel::table_report(n, &fields, profile.as_ref())?;
    match format {
        Format::Records => {
            for row in &report {
                println!("{}", textio::format_cost_record(row));
            }
        }
        Format::Table => print!("{}", textio::format_cost_table(&report)),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

fn plan_verb(
    n: u64,
    mode: ModeArg,
    lambda: Option<u32>,
    threshold_bits: Option<u64>,
    gamma: GammaArg,
) -> Result<()> {
    let mut config = PlanConfig {
        mode: match mode {
            ModeArg::Practical => PlanMode::Practical,
            ModeArg::Theoretical => PlanMode::Theoretical,
        },
        lambda_override: lambda,
        gamma: gamma.into(),
        ..PlanConfig::default()
    };
    if let Some(t) = threshold_bits {
        config.base_threshold_bits = t;
    }
    let specs = multiplier::plan_outline(n, &config)?;
    if specs.is_empty() {
        println!(
            "# {n} bits is below the {}-bit threshold; multiply directly",
            config.base_threshold_bits
        );
    } else {
        print!("{}", textio::format_plan(&specs));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

fn selfcheck_verb() -> Result<()> {
    let suites: &[(&str, fn() -> Result<()>)] = &[
        ("field-axioms", check_field_axioms),
        ("shift-vs-generic", check_shift_vs_generic),
        ("fft-vs-naive-dft", check_fft_vs_naive),
        ("half-dft-roundtrip", check_half_dft_roundtrip),
        ("negacyclic-theorem", check_negacyclic),
        ("kronecker-vs-schoolbook", check_kronecker),
        ("multiply-vs-oracle", check_multiply),
    ];
    let mut failed = 0;
    for (name, suite) in suites {
        match suite() {
            Ok(()) => println!("{name} ok"),
            Err(e) => {
                println!("{name} FAIL: {e:#}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        bail!("{failed} suite(s) failed");
    }
    Ok(())
}

fn check_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6f70_7365)
}

fn random_element(rng: &mut ChaCha8Rng, params: &gfp::GfpParams) -> gfp::GfpElement {
    let p = params.modulus();
    let bytes_len = (p.bits() as usize + 7) / 8 + 8;
    let mut bytes = vec![0u8; bytes_len];
    rng.fill(&mut bytes[..]);
    gfp::encode(&(BigUint::from_bytes_le(&bytes) % p), params).expect("reduced")
}

fn check_field_axioms() -> Result<()> {
    let params = gfp::make_params(132, 3)?;
    let mut rng = check_rng();
    let strat = MulStrategy::Schoolbook;
    for _ in 0..200 {
        let a = random_element(&mut rng, &params);
        let b = random_element(&mut rng, &params);
        let c = random_element(&mut rng, &params);
        let ab = gfp::mul_generic(&a, &b, &params, &strat);
        let ba = gfp::mul_generic(&b, &a, &params, &strat);
        if ab != ba {
            bail!("commutativity violated");
        }
        let abc1 = gfp::mul_generic(&ab, &c, &params, &strat);
        let bc = gfp::mul_generic(&b, &c, &params, &strat);
        let abc2 = gfp::mul_generic(&a, &bc, &params, &strat);
        if abc1 != abc2 {
            bail!("associativity violated");
        }
        let lhs = gfp::mul_generic(&a, &gfp::add(&b, &c, &params), &params, &strat);
        let rhs = gfp::add(&ab, &gfp::mul_generic(&a, &c, &params, &strat), &params);
        if lhs != rhs {
            bail!("distributivity violated");
        }
        if gfp::mul_generic(&a, &gfp::one(&params), &params, &strat) != a {
            bail!("multiplicative identity violated");
        }
        if !gfp::mul_generic(&a, &gfp::zero(&params), &params, &strat).is_zero() {
            bail!("zero absorption violated");
        }
    }
    Ok(())
}

fn check_shift_vs_generic() -> Result<()> {
    let params = gfp::make_params(44, 4)?;
    let strat = MulStrategy::Schoolbook;
    let r_elem = gfp::encode(&BigUint::from(44u32), &params)?;
    let mut rng = check_rng();
    for _ in 0..8 {
        let a = random_element(&mut rng, &params);
        let mut power = gfp::one(&params);
        for j in 0..(2u64 << params.lambda()) {
            let shifted = gfp::mul_by_r_power(&a, j, &params)?;
            let generic = gfp::mul_generic(&a, &power, &params, &strat);
            if shifted != generic {
                bail!("shift by r^{j} disagrees with the generic product");
            }
            power = gfp::mul_generic(&power, &r_elem, &params, &strat);
        }
    }
    Ok(())
}

fn check_fft_vs_naive() -> Result<()> {
    let params = gfp::make_params(4, 2)?;
    let table = transform::build_table(16, &params)?;
    let p = params.modulus().clone();
    let mut rng = check_rng();
    for len in [2usize, 4, 8, 16] {
        let values: Vec<gfp::GfpElement> =
            (0..len).map(|_| random_element(&mut rng, &params)).collect();
        let mut fast = values.clone();
        transform::large_radix_fft(&mut fast, &table, &params)?;
        let stride = 16 / len as u64;
        let omega = gfp::decode(table.power(stride), &params);
        let plain: Vec<BigUint> = values.iter().map(|v| gfp::decode(v, &params)).collect();
        let naive = reference::naive_dft(&plain, &omega, &p);
        let fast_plain: Vec<BigUint> = fast.iter().map(|v| gfp::decode(v, &params)).collect();
        if fast_plain != naive {
            bail!("length-{len} transform disagrees with the naive evaluation");
        }
    }
    Ok(())
}

fn check_half_dft_roundtrip() -> Result<()> {
    let params = gfp::make_params(44, 4)?;
    let table = transform::build_table(32, &params)?;
    let mut rng = check_rng();
    for _ in 0..10 {
        let values: Vec<gfp::GfpElement> =
            (0..16).map(|_| random_element(&mut rng, &params)).collect();
        let v = transform::EvalVector::coefficients(values.clone());
        let fwd = transform::half_dft(v, &table, &params, transform::Direction::Forward)?;
        let back = transform::half_dft(fwd, &table, &params, transform::Direction::Inverse)?;
        if back.values != values {
            bail!("forward-inverse composition is not the identity");
        }
    }
    Ok(())
}

fn check_negacyclic() -> Result<()> {
    let params = gfp::make_params(132, 3)?;
    let table = transform::build_table(16, &params)?;
    let p = params.modulus().clone();
    let mut rng = check_rng();
    for _ in 0..10 {
        let a: Vec<gfp::GfpElement> =
            (0..8).map(|_| random_element(&mut rng, &params)).collect();
        let b: Vec<gfp::GfpElement> =
            (0..8).map(|_| random_element(&mut rng, &params)).collect();
        let fa = transform::half_dft(
            transform::EvalVector::coefficients(a.clone()),
            &table,
            &params,
            transform::Direction::Forward,
        )?;
        let fb = transform::half_dft(
            transform::EvalVector::coefficients(b.clone()),
            &table,
            &params,
            transform::Direction::Forward,
        )?;
        let prod = transform::pointwise_product(&fa, &fb, &params)?;
        let back = transform::half_dft(prod, &table, &params, transform::Direction::Inverse)?;
        let got: Vec<BigUint> = back.values.iter().map(|v| gfp::decode(v, &params)).collect();
        let pa: Vec<BigUint> = a.iter().map(|v| gfp::decode(v, &params)).collect();
        let pb: Vec<BigUint> = b.iter().map(|v| gfp::decode(v, &params)).collect();
        let naive = reference::naive_negacyclic(&pa, &pb, &p);
        if got != naive {
            bail!("evaluation-domain product disagrees with direct convolution");
        }
    }
    Ok(())
}

fn check_kronecker() -> Result<()> {
    let params = gfp::make_params(132, 3)?;
    let inner = |x: &BigUint, y: &BigUint| x * y;
    let strat = MulStrategy::Schoolbook;
    let mut rng = check_rng();
    for _ in 0..50 {
        let a = random_element(&mut rng, &params);
        let b = random_element(&mut rng, &params);
        let ks = multiplier::kronecker_multiply(&a, &b, &params, &inner)?;
        if ks != gfp::mul_generic(&a, &b, &params, &strat) {
            bail!("packed product disagrees with schoolbook");
        }
    }
    Ok(())
}

fn check_multiply() -> Result<()> {
    let plan = multiplier::precompute(1 << 14, &PlanConfig::default())?;
    let mut rng = check_rng();
    for _ in 0..3 {
        let mut bytes = vec![0u8; 2048];
        rng.fill(&mut bytes[..]);
        let a = BigUint::from_bytes_le(&bytes);
        rng.fill(&mut bytes[..]);
        let b = BigUint::from_bytes_le(&bytes);
        if multiplier::multiply(&a, &b, &plan)? != oracle_product(&a, &b) {
            bail!("transform product disagrees with the schoolbook oracle");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

fn bench_verb(n: u64, reps: u32, format: Format) -> Result<()> {
    if n == 0 {
        bail!("operand size must be positive");
    }
    if reps == 0 {
        bail!("reps must be positive");
    }
    let config = PlanConfig::default();
    let t0 = Instant::now();
    let plan = multiplier::precompute(n, &config)?;
    let build_s = t0.elapsed().as_secs_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe7c_4a11);
    let mut pairs = Vec::with_capacity(reps as usize);
    for _ in 0..reps {
        let mut bytes = vec![0u8; n.div_ceil(8) as usize];
        rng.fill(&mut bytes[..]);
        let a = BigUint::from_bytes_le(&bytes);
        rng.fill(&mut bytes[..]);
        let b = BigUint::from_bytes_le(&bytes);
        pairs.push((a, b));
    }
    counters::reset();
    let t1 = Instant::now();
    for (a, b) in &pairs {
        // Serial on purpose: the instrumentation is thread-local.
        let _ = multiplier::multiply(a, b, &plan)?;
    }
    let mul_s = t1.elapsed().as_secs_f64();
    let report = counters::report();
    match format {
        Format::Records => {
            for ((r, lambda), c) in &report {
                println!(
                    "n={n} reps={reps} r={r} lambda={lambda} expensive_muls={} \
                     cheap_shifts={} additions={}",
                    c.expensive_muls, c.cheap_shifts, c.additions
                );
            }
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .iter()
                .map(|((r, lambda), c)| {
                    vec![
                        r.to_string(),
                        lambda.to_string(),
                        c.expensive_muls.to_string(),
                        c.cheap_shifts.to_string(),
                        c.additions.to_string(),
                    ]
                })
                .collect();
            print!(
                "{}",
                textio::align_table(
                    &["r", "lambda", "expensive_muls", "cheap_shifts", "additions"],
                    &rows
                )
            );
        }
    }
    // Wall times live on comment lines so the data lines stay deterministic.
    println!("# plan_build_seconds={build_s:.6}");
    println!("# multiply_seconds={mul_s:.6} ({reps} rep(s))");
    Ok(())
}
