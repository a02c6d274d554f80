//! Slow reference implementations used as oracles by the test suite.
//!
//! Everything here is deliberately independent of the production paths:
//! [`Nat`] is a self-contained word-vector integer so that plan-based
//! multiplication is never checked against the same library that executes
//! it, and the DFT/convolution oracles work on plain `BigUint` residues
//! rather than the digit representation.

use num_bigint::BigUint;
use num_traits::Zero;

/// A non-negative integer as little-endian 64-bit words, no trailing zero
/// words. Only what the oracles need: construction, comparison, product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nat {
    words: Vec<u64>,
}

impl Nat {
    pub fn from_words(mut words: Vec<u64>) -> Nat {
        while words.last() == Some(&0) {
            words.pop();
        }
        Nat { words }
    }

    pub fn from_u64(x: u64) -> Nat {
        Nat::from_words(vec![x])
    }

    pub fn from_bytes_le(bytes: &[u8]) -> Nat {
        let mut words = Vec::with_capacity(bytes.len() / 8 + 1);
        for chunk in bytes.chunks(8) {
            let mut w = [0u8; 8];
            w[..chunk.len()].copy_from_slice(chunk);
            words.push(u64::from_le_bytes(w));
        }
        Nat::from_words(words)
    }

    pub fn to_bytes_le(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn bits(&self) -> u64 {
        match self.words.last() {
            None => 0,
            Some(&top) => self.words.len() as u64 * 64 - top.leading_zeros() as u64,
        }
    }
}

/// Quadratic word-by-word product with a running 128-bit accumulator.
pub fn schoolbook_mul(a: &Nat, b: &Nat) -> Nat {
    if a.is_zero() || b.is_zero() {
        return Nat::from_words(vec![]);
    }
    let mut out = vec![0u64; a.words.len() + b.words.len()];
    for (i, &aw) in a.words.iter().enumerate() {
        let mut carry = 0u128;
        for (j, &bw) in b.words.iter().enumerate() {
            let t = out[i + j] as u128 + aw as u128 * bw as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + b.words.len();
        while carry > 0 {
            let t = out[k] as u128 + carry;
            out[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
    Nat::from_words(out)
}

/// Direct `O(N^2)` discrete Fourier transform over `Z/pZ`:
/// `X[k] = sum_j v[j] omega^(j k) mod p`.
///
/// The caller picks `omega`; passing `omega^-1` and scaling by `N^-1`
/// afterwards gives the inverse transform.
pub fn naive_dft(values: &[BigUint], omega: &BigUint, p: &BigUint) -> Vec<BigUint> {
    let n = values.len();
    let mut powers = Vec::with_capacity(n);
    let mut acc = BigUint::from(1u32);
    for _ in 0..n {
        powers.push(acc.clone());
        acc = &acc * omega % p;
    }
    (0..n)
        .map(|k| {
            let mut sum = BigUint::zero();
            for (j, v) in values.iter().enumerate() {
                sum += v * &powers[j * k % n];
            }
            sum % p
        })
        .collect()
}

/// Negacyclic convolution of residue vectors modulo `p`:
/// `c[k] = sum_(i+j=k) a[i] b[j] - sum_(i+j=k+N) a[i] b[j] mod p`.
pub fn naive_negacyclic(a: &[BigUint], b: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut pos = vec![BigUint::zero(); n];
    let mut negv = vec![BigUint::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = i + j;
            let prod = ai * bj;
            if t < n {
                pos[t] += prod;
            } else {
                negv[t - n] += prod;
            }
        }
    }
    pos.iter()
        .zip(&negv)
        .map(|(s, m)| {
            let s = s % p;
            let m = m % p;
            if s >= m {
                (s - m) % p
            } else {
                (p + s - m) % p
            }
        })
        .collect()
}

#[cfg(test)]
mod nat_sanity {
    use super::*;

    #[test]
    fn multi_word_carry_propagates() {
        let a = Nat::from_words(vec![u64::MAX, u64::MAX]);
        let b = Nat::from_u64(2);
        // (2^128 - 1) * 2 = 2^129 - 2
        let c = schoolbook_mul(&a, &b);
        assert_eq!(c.words, vec![u64::MAX - 1, u64::MAX, 1]);
    }
}
