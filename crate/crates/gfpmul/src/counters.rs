//! Per-thread operation tallies, keyed by field.
//!
//! Every field multiplication routed through [`crate::gfp::mul_generic`] or a
//! multiplication plan counts as one *expensive* product in the field it runs
//! in. Multiplications by powers of the base `r` count as *cheap shifts*, and
//! field additions, subtractions and negations count as *additions*. The cost
//! model's headline numbers are statements about the expensive counter only;
//! the other two exist so the claimed `3N` extra additions per transform stay
//! observable.
//!
//! Tallies are thread local. Code that wants exact counts must keep the work
//! it is measuring on one thread; the parallel entry points in this crate
//! fan out whole multiplications or whole search candidates, never pieces of
//! an instrumented transform.

use std::cell::RefCell;
use std::collections::BTreeMap;

/// Field identity used as a tally key: the base `r` and the exponent log
/// `lambda` of `p = r^(2^lambda) + 1`.
pub type FieldKey = (u64, u32);

/// Operation totals for one field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Generic modular products (schoolbook, grouped recursion, Kronecker).
    pub expensive_muls: u64,
    /// Multiplications by a power of `r`, realized as digit shifts.
    pub cheap_shifts: u64,
    /// Additions, subtractions and negations.
    pub additions: u64,
}

thread_local! {
    static TALLY: RefCell<BTreeMap<FieldKey, OpCounts>> = RefCell::new(BTreeMap::new());
}

pub(crate) fn tally_expensive(key: FieldKey) {
    TALLY.with(|t| t.borrow_mut().entry(key).or_default().expensive_muls += 1);
}

pub(crate) fn tally_shift(key: FieldKey) {
    TALLY.with(|t| t.borrow_mut().entry(key).or_default().cheap_shifts += 1);
}

pub(crate) fn tally_addition(key: FieldKey) {
    TALLY.with(|t| t.borrow_mut().entry(key).or_default().additions += 1);
}

/// Clears the calling thread's tallies.
pub fn reset() {
    TALLY.with(|t| t.borrow_mut().clear());
}

/// Returns the calling thread's totals for one field.
pub fn counts_for(r: u64, lambda: u32) -> OpCounts {
    TALLY.with(|t| t.borrow().get(&(r, lambda)).copied().unwrap_or_default())
}

/// Returns the calling thread's totals for every field touched since the
/// last [`reset`], ordered by key.
pub fn report() -> Vec<(FieldKey, OpCounts)> {
    TALLY.with(|t| t.borrow().iter().map(|(k, v)| (*k, *v)).collect())
}
