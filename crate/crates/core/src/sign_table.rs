//! Bit-packed amplitude signs of a phase state.
//!
//! Bit `x` of the table is `b(x)` with `s(x) = (-1)^{b(x)}`; the state is
//! `2^{-n/2} Σ_x s(x) |x⟩`. Bit `x` lives in word `x / 64` at position `x % 64`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Hypergraph, Result};

/// Hard ceiling on the table size regardless of the configured cap (2^30 bits = 128 MiB).
pub const ABSOLUTE_MAX_QUBITS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignTable {
    n: u32,
    words: Vec<u64>,
}

impl SignTable {
    /// The all-`+` table (the state `|+⟩^{⊗n}`).
    pub fn plus(n: u32, cap: u32) -> Result<Self> {
        let cap = cap.min(ABSOLUTE_MAX_QUBITS);
        if n == 0 {
            return Err(Error::QubitCount { n, max: cap });
        }
        if n > cap {
            return Err(Error::CapacityExceeded { n, cap });
        }
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
        })
    }

    /// Materializes `|G⟩` edge by edge.
    pub fn build(h: &Hypergraph, cap: u32) -> Result<Self> {
        let mut t = Self::plus(h.n_qubits(), cap)?;
        for e in h.edges() {
            t.toggle_edge(e.mask());
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> u64 {
        1u64 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bit(&self, x: u64) -> bool {
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, x: u64) -> i8 {
        if self.bit(x) {
            -1
        } else {
            1
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Applies the generalized CZ on the vertex set `mask`: flips every `x ⊇ mask`.
    pub fn toggle_edge(&mut self, mask: u64) {
        let pattern = low_word_pattern(mask & 63, self.n);
        let high = mask >> 6;
        let nw = self.words.len() as u64;
        // supersets of `high` inside the word index range
        let mut w = high;
        while w < nw {
            self.words[w as usize] ^= pattern;
            w = (w + 1) | high;
        }
    }

    /// Resets to the all-`+` table.
    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    /// XORs another table of the same size into this one.
    pub fn xor_with(&mut self, other: &SignTable) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

/// Bits `i` of a 64-bit word with `i ⊇ low`, restricted to `i < 2^n`.
fn low_word_pattern(low: u64, n: u32) -> u64 {
    let mut pattern = 0u64;
    for i in 0..64u64 {
        if i & low == low {
            pattern |= 1 << i;
        }
    }
    if n < 6 {
        pattern &= (1u64 << (1u32 << n)) - 1;
    }
    pattern
}
