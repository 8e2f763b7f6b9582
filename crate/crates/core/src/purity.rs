//! Subsystem purity and Rényi-2 entropy of phase states.
//!
//! With `s(x) = ±1`, the reduced state is `ρ_A[a, a'] = 2^{-N} Σ_b s(a,b) s(a',b)`, so
//! `P_A = Σ_{a,a'} ρ_A[a,a']^2` is an integer over `2^{2N}`. Rows `s(a, ·)` are packed
//! into words and the inner sums come from popcounts of XORed rows.

use alloc::vec;
use alloc::vec::Vec;

use crate::gf2::Gf2Matrix;
use crate::partition::bits;
use crate::{Bipartition, DyadicRational, Error, Hypergraph, Result, SignTable};

/// Exact purity `Tr ρ_A^2` of the phase state held in `t`.
pub fn reduced_purity(t: &SignTable, part: &Bipartition) -> Result<DyadicRational> {
    check_dims(t, part)?;
    let mut kernel = PurityKernel::new(part);
    Ok(kernel.purity(t))
}

/// `S_2 = -log2 P`.
pub fn renyi2(purity: &DyadicRational) -> Result<f64> {
    let l = purity.log2().ok_or(Error::NonPositivePurity)?;
    // exact zero for P = 1 instead of -0.0
    Ok(if l == 0.0 { 0.0 } else { -l })
}

/// Integer entries `Σ_b s(a,b) s(a',b)` of `2^N ρ_A`, row-major over `a, a'` in the
/// bit-extraction order documented on [`Bipartition`].
pub fn reduced_density_numerators(t: &SignTable, part: &Bipartition) -> Result<Vec<i64>> {
    check_dims(t, part)?;
    let a_off = subset_offsets(part.a_mask());
    let b_off = subset_offsets(part.b_mask());
    let da = a_off.len();
    let mut rho = vec![0i64; da * da];
    for (i, &xa) in a_off.iter().enumerate() {
        for (j, &xa2) in a_off.iter().enumerate() {
            rho[i * da + j] = b_off
                .iter()
                .map(|&xb| i64::from(t.sign(xa | xb)) * i64::from(t.sign(xa2 | xb)))
                .sum();
        }
    }
    Ok(rho)
}

fn check_dims(t: &SignTable, part: &Bipartition) -> Result<()> {
    if t.n_qubits() != part.n_qubits() {
        Err(Error::DimensionMismatch {
            state: t.n_qubits(),
            partition: part.n_qubits(),
        })
    } else {
        Ok(())
    }
}

/// Every subset of `mask` in increasing numeric order; entry `k` is the scatter of `k`
/// onto the bits of `mask`.
pub(crate) fn subset_offsets(mask: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(1usize << mask.count_ones());
    let mut sub = 0u64;
    loop {
        out.push(sub);
        sub = sub.wrapping_sub(mask) & mask;
        if sub == 0 {
            return out;
        }
    }
}

/// Reusable scratch for repeated purity evaluations on one bipartition.
///
/// Rows are indexed by the smaller side of the cut (purity is symmetric), which makes
/// the cost `O(d_small^2 · d_large / 64)` word operations.
#[derive(Debug, Clone)]
pub struct PurityKernel {
    n: u32,
    row_offsets: Vec<u64>,
    col_offsets: Vec<u64>,
    col_words: usize,
    rows: Vec<u64>,
}

impl PurityKernel {
    pub fn new(part: &Bipartition) -> Self {
        let (small, large) = if part.n_a() <= part.n_b() {
            (part.a_mask(), part.b_mask())
        } else {
            (part.b_mask(), part.a_mask())
        };
        let row_offsets = subset_offsets(small);
        let col_offsets = subset_offsets(large);
        let col_words = col_offsets.len().div_ceil(64);
        Self {
            n: part.n_qubits(),
            rows: vec![0; row_offsets.len() * col_words],
            row_offsets,
            col_offsets,
            col_words,
        }
    }

    /// `Σ_{a,a'} (Σ_b s(a,b) s(a',b))^2`, i.e. `2^{2N} P_A`.
    pub fn purity_numerator(&mut self, t: &SignTable) -> u128 {
        assert_eq!(t.n_qubits(), self.n, "sign table does not match the kernel");
        let cw = self.col_words;
        for (r, &xr) in self.row_offsets.iter().enumerate() {
            let row = &mut self.rows[r * cw..(r + 1) * cw];
            row.fill(0);
            for (c, &xc) in self.col_offsets.iter().enumerate() {
                if t.bit(xr | xc) {
                    row[c / 64] |= 1u64 << (c % 64);
                }
            }
        }
        let dr = self.row_offsets.len();
        let dc = self.col_offsets.len() as i64;
        let mut off_diag: u128 = 0;
        for r in 0..dr {
            let row_r = &self.rows[r * cw..(r + 1) * cw];
            for r2 in r + 1..dr {
                let row_r2 = &self.rows[r2 * cw..(r2 + 1) * cw];
                let diff: i64 = row_r
                    .iter()
                    .zip(row_r2)
                    .map(|(a, b)| i64::from((a ^ b).count_ones()))
                    .sum();
                let inner = dc - 2 * diff;
                off_diag += (inner * inner) as u128;
            }
        }
        let diag = dr as u128 * (dc as u128) * (dc as u128);
        diag + 2 * off_diag
    }

    pub fn purity(&mut self, t: &SignTable) -> DyadicRational {
        DyadicRational::new(self.purity_numerator(t), 2 * self.n)
    }
}

/// The `N_A × N_Ā` block of the adjacency matrix across the cut: rows are the `A`
/// vertices ascending, columns the `Ā` vertices ascending.
pub fn graph_cut_matrix(h: &Hypergraph, part: &Bipartition) -> Result<Gf2Matrix> {
    if h.n_qubits() != part.n_qubits() {
        return Err(Error::DimensionMismatch {
            state: h.n_qubits(),
            partition: part.n_qubits(),
        });
    }
    if let Some(e) = h.edges().iter().find(|e| e.arity() != 2) {
        return Err(Error::NotGraph(e.arity()));
    }
    let index = CutIndex::new(part);
    let mut m = Gf2Matrix::zeros(part.n_a() as usize, part.n_b() as usize);
    for e in h.edges() {
        if let Some((r, c)) = index.cell(e.mask()) {
            m.toggle(r, c);
        }
    }
    Ok(m)
}

/// `S_2` of a graph state as the GF(2) rank of its cut block.
pub fn graph_entropy_rank(h: &Hypergraph, part: &Bipartition) -> Result<u32> {
    Ok(graph_cut_matrix(h, part)?.rank() as u32)
}

/// Maps a cross edge `{i, j}` to its cell in the cut matrix.
#[derive(Debug, Clone)]
pub(crate) struct CutIndex {
    a_mask: u64,
    position: [u8; 64],
}

impl CutIndex {
    pub(crate) fn new(part: &Bipartition) -> Self {
        let mut position = [0u8; 64];
        for (i, v) in bits(part.a_mask()).enumerate() {
            position[v as usize] = i as u8;
        }
        for (i, v) in bits(part.b_mask()).enumerate() {
            position[v as usize] = i as u8;
        }
        Self {
            a_mask: part.a_mask(),
            position,
        }
    }

    /// `(row, col)` for a 2-edge crossing the cut, `None` otherwise.
    #[inline]
    pub(crate) fn cell(&self, edge_mask: u64) -> Option<(usize, usize)> {
        let in_a = edge_mask & self.a_mask;
        let in_b = edge_mask & !self.a_mask;
        if in_a == 0 || in_b == 0 {
            return None;
        }
        let a = in_a.trailing_zeros() as usize;
        let b = in_b.trailing_zeros() as usize;
        Some((self.position[a] as usize, self.position[b] as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use alloc::vec::Vec;

    fn purity_of(n: u32, edges: &[Vec<u32>], a_mask: u64) -> DyadicRational {
        let h = Hypergraph::new(n, edges).unwrap();
        let t = SignTable::build(&h, 26).unwrap();
        reduced_purity(&t, &Bipartition::new(n, a_mask).unwrap()).unwrap()
    }

    #[test]
    fn purity_examples() {
        assert_eq!(purity_of(3, &[], 0b001), DyadicRational::one());
        assert_eq!(
            purity_of(2, &[alloc::vec![0, 1]], 0b01),
            DyadicRational::new(1, 1)
        );
        assert_eq!(
            purity_of(3, &[alloc::vec![0, 1, 2]], 0b001),
            DyadicRational::new(5, 3)
        );
    }

    #[test]
    fn renyi2_examples() {
        assert_eq!(renyi2(&DyadicRational::one()).unwrap(), 0.0);
        assert_eq!(renyi2(&DyadicRational::new(1, 1)).unwrap(), 1.0);
        let s = renyi2(&DyadicRational::new(5, 3)).unwrap();
        assert!((s - 0.678_071_905_112_638).abs() < 1e-12);
        assert_eq!(
            renyi2(&DyadicRational::zero()),
            Err(Error::NonPositivePurity)
        );
        assert_eq!(
            renyi2(&DyadicRational::new(-1, 1)),
            Err(Error::NonPositivePurity)
        );
    }

    #[test]
    fn dimension_mismatch() {
        let t = SignTable::plus(3, 26).unwrap();
        let p = Bipartition::first(4, 2).unwrap();
        assert!(matches!(
            reduced_purity(&t, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cut_matrix_examples() {
        let bell = Hypergraph::new(2, &[[0u32, 1]]).unwrap();
        let m = graph_cut_matrix(&bell, &Bipartition::first(2, 1).unwrap()).unwrap();
        assert_eq!(m, Gf2Matrix::from_rows(&["1"]));

        let h = Hypergraph::new(4, &[[0u32, 1], [2, 3]]).unwrap();
        let m = graph_cut_matrix(&h, &Bipartition::first(4, 2).unwrap()).unwrap();
        assert_eq!(m, Gf2Matrix::zeros(2, 2));

        // A = {0,1}, Ā = {2,3}: cross edges (0,2), (0,3), (1,3)
        let h = Hypergraph::new(4, &[[0u32, 2], [1, 3], [0, 3]]).unwrap();
        let m = graph_cut_matrix(&h, &Bipartition::first(4, 2).unwrap()).unwrap();
        assert_eq!(m, Gf2Matrix::from_rows(&["11", "01"]));
        assert_eq!(m.rank(), 2);

        let ccz = Hypergraph::new(3, &[[0u32, 1, 2]]).unwrap();
        assert_eq!(
            graph_cut_matrix(&ccz, &Bipartition::first(3, 1).unwrap()),
            Err(Error::NotGraph(3))
        );
    }

    #[test]
    fn entropy_rank_examples() {
        let p = Bipartition::first(4, 2).unwrap();
        assert_eq!(
            graph_entropy_rank(&Hypergraph::empty(4).unwrap(), &p).unwrap(),
            0
        );
        let bell = Hypergraph::new(2, &[[0u32, 1]]).unwrap();
        assert_eq!(
            graph_entropy_rank(&bell, &Bipartition::first(2, 1).unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn kernel_orientation_is_irrelevant() {
        let mut rng = CounterRng::new(17);
        for _ in 0..40 {
            let n = 2 + (rng.next_u64() % 9) as u32;
            let mask = 1 + rng.next_u64() % ((1 << n) - 2);
            let mut raw = Vec::new();
            for _ in 0..rng.next_u64() % 20 {
                let e: Vec<u32> = (0..n)
                    .filter(|_| rng.next_u64().is_multiple_of(3))
                    .collect();
                if !e.is_empty() {
                    raw.push(e);
                }
            }
            let h = Hypergraph::new(n, &raw).unwrap();
            let t = SignTable::build(&h, 26).unwrap();
            let p = Bipartition::new(n, mask).unwrap();
            let direct = reduced_purity(&t, &p).unwrap();
            assert_eq!(direct, reduced_purity(&t, &p.complement()).unwrap());
            let rho = reduced_density_numerators(&t, &p).unwrap();
            let sum: i64 = rho.iter().map(|v| v * v).sum();
            assert_eq!(direct, DyadicRational::new(sum, 2 * n));
            assert!(direct.exponent() <= 2 * n);
        }
    }
}
