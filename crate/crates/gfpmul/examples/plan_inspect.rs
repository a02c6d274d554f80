//! Serialize a multiplication plan, parse it back, and reassemble it.
//!
//! The serialized form is the contract between planning and execution: a
//! plan computed once (or edited by hand) can be fed back to the
//! multiplier, and assembly re-validates every level against the field it
//! names, so a stale or hand-broken description fails loudly instead of
//! producing wrong products.

use gfpmul::multiplier::{self, PlanConfig, PlanMode};
use gfpmul::textio;
use num_bigint::BigUint;

fn main() {
    let cfg = PlanConfig {
        // A low direct-multiplication threshold forces a second level, so
        // the serialized form below shows grouping in action.
        base_threshold_bits: 256,
        ..PlanConfig::default()
    };
    let plan = multiplier::precompute(1 << 16, &cfg).expect("plan");
    let text = textio::format_plan(&plan.specs());
    println!("serialized plan for 2^16-bit operands:\n{text}");

    let specs = textio::parse_plan(&text).expect("parse");
    let rebuilt = multiplier::assemble(&specs, &cfg).expect("assemble");
    let a = BigUint::from(3u32).pow(20_000);
    let b = BigUint::from(7u32).pow(17_000);
    let product = multiplier::multiply(&a, &b, &rebuilt).expect("multiply");
    assert_eq!(product, &a * &b);
    println!("rebuilt plan verified on a 2^15-bit-scale product");

    // The theoretical mode ignores the practical prime tables and derives
    // level moduli from the growth-law windows instead.
    let theoretical = PlanConfig {
        mode: PlanMode::Theoretical,
        ..PlanConfig::default()
    };
    match multiplier::plan_outline(1 << 20, &theoretical) {
        Ok(outline) => println!(
            "theoretical outline at 2^20 bits:\n{}",
            textio::format_plan(&outline)
        ),
        Err(e) => println!("theoretical outline at 2^20 bits: {e}"),
    }
}
