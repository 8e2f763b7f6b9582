//! Counting pairwise-orthogonal tuples in F₂⁴.
//!
//! `#₄(m)` is the number of `m`-tuples `(v_1, .., v_m)` of vectors in F₂⁴ with
//! `v_i · v_j = 0 (mod 2)` for every `i ≠ j`. Self inner products are unconstrained.

use alloc::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// A subspace of F₂⁴ as a 16-bit membership mask (bit `v` set iff `v` is in it).
type Subspace = u16;

#[inline]
fn dot(u: u8, v: u8) -> bool {
    (u & v).count_ones() % 2 == 1
}

fn orthogonal_to(space: Subspace, v: u8) -> bool {
    (0..16u8).all(|s| space >> s & 1 == 0 || !dot(s, v))
}

fn extend(space: Subspace, v: u8) -> Subspace {
    let mut out = space;
    for s in 0..16u8 {
        if space >> s & 1 == 1 {
            out |= 1 << (s ^ v);
        }
    }
    out
}

/// Exact `#₄(m)` by dynamic programming over the subspace lattice: the state is the
/// span of the vectors placed so far, and the next vector must lie in its orthogonal
/// complement (orthogonal to each placed vector iff orthogonal to their span).
pub fn sharp4_oracle(m: u32) -> BigUint {
    let mut layer: BTreeMap<Subspace, BigUint> = BTreeMap::new();
    layer.insert(1, BigUint::one());
    for _ in 0..m {
        let mut next: BTreeMap<Subspace, BigUint> = BTreeMap::new();
        for (&space, count) in &layer {
            for v in 0..16u8 {
                if orthogonal_to(space, v) {
                    *next.entry(extend(space, v)).or_insert_with(BigUint::zero) += count;
                }
            }
        }
        layer = next;
    }
    layer.values().sum()
}

/// Direct enumeration of all `16^m` tuples. Exponential; meant for `m ≤ 6`.
pub fn sharp4_brute_force(m: u32) -> u64 {
    fn go(placed: &mut [u8; 16], depth: usize, m: usize) -> u64 {
        if depth == m {
            return 1;
        }
        let mut total = 0;
        for v in 0..16u8 {
            if placed[..depth].iter().all(|&u| !dot(u, v)) {
                placed[depth] = v;
                total += go(placed, depth + 1, m);
            }
        }
        total
    }
    assert!(m <= 16, "brute force limited to m <= 16");
    go(&mut [0; 16], 0, m as usize)
}

/// Falling factorial `m (m-1) .. (m-k+1)`, zero when `k > m`.
pub fn falling_factorial(m: u32, k: u32) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    (m - k + 1..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// `3·4^m + (6m² + 6m − 2)·2^m + 4A(m,2) + 8A(m,3) + 56A(m,4)`, the closed expression
/// for the count stated for large `m`. It overcounts at small `m` (192 vs 136 at
/// `m = 2`); use [`sharp4_oracle`] for exact values.
pub fn sharp4_paper_formula(m: u32) -> BigInt {
    let m_big = BigInt::from(m);
    let pow4 = BigInt::from(3) * (BigInt::one() << (2 * m as usize));
    let poly = BigInt::from(6) * &m_big * &m_big + BigInt::from(6) * &m_big - 2;
    let pow2 = poly * (BigInt::one() << m as usize);
    let ff = |k| BigInt::from(falling_factorial(m, k));
    pow4 + pow2 + 4 * ff(2) + 8 * ff(3) + 56 * ff(4)
}
