//! Bipartitions `A | Ā` of an `n`-qubit register.

use crate::{Error, Result, MAX_VERTICES};

/// Subsystem `A` is the set bits of `a_mask`; `Ā` is the rest of the `n` qubits.
///
/// Reduced-state indices follow bit extraction: for a basis index `x`, the `A` index is
/// the bits of `x` at the positions of `a_mask`, packed in increasing qubit order (the
/// lowest qubit of `A` is the least significant bit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    n: u32,
    a_mask: u64,
}

impl Bipartition {
    pub fn new(n: u32, a_mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::QubitCount {
                n,
                max: MAX_VERTICES,
            });
        }
        if n < 64 && a_mask >> n != 0 {
            return Err(Error::InvalidPartition("mask has bits beyond n"));
        }
        Ok(Self { n, a_mask })
    }

    /// `A = {0, .., n_a - 1}`.
    pub fn first(n: u32, n_a: u32) -> Result<Self> {
        if n_a > n {
            return Err(Error::InvalidPartition("n_a exceeds n"));
        }
        Self::new(n, low_mask(n_a))
    }

    /// Like [`Bipartition::new`] but also rejects an empty or full `A`.
    pub fn entangling(n: u32, a_mask: u64) -> Result<Self> {
        let p = Self::new(n, a_mask)?;
        p.require_entangling()?;
        Ok(p)
    }

    pub fn require_entangling(&self) -> Result<()> {
        if self.a_mask == 0 {
            Err(Error::InvalidPartition("subsystem A is empty"))
        } else if self.b_mask() == 0 {
            Err(Error::InvalidPartition("subsystem A is the whole register"))
        } else {
            Ok(())
        }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn a_mask(&self) -> u64 {
        self.a_mask
    }

    pub fn b_mask(&self) -> u64 {
        low_mask(self.n) & !self.a_mask
    }

    pub fn n_a(&self) -> u32 {
        self.a_mask.count_ones()
    }

    pub fn n_b(&self) -> u32 {
        self.n - self.n_a()
    }

    /// The same cut with the roles of `A` and `Ā` exchanged.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            a_mask: self.b_mask(),
        }
    }

    /// Edge mask meets both sides of the cut.
    #[inline]
    pub fn crosses(&self, edge_mask: u64) -> bool {
        edge_mask & self.a_mask != 0 && edge_mask & self.b_mask() != 0
    }

    pub fn a_vertices(&self) -> impl Iterator<Item = u32> {
        bits(self.a_mask)
    }

    pub fn b_vertices(&self) -> impl Iterator<Item = u32> {
        bits(self.b_mask())
    }
}

pub(crate) fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    core::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}
