//! Hypergraphs with canonical mod-2 edge sets.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result, MAX_VERTICES};

/// A hyperedge: strictly increasing vertex indices plus the matching bit mask.
///
/// Ordering is lexicographic on the vertex tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    vertices: Vec<u32>,
    mask: u64,
}

impl Edge {
    /// Builds an edge from raw vertex indices in any order.
    pub fn new(raw: &[u32], n: u32) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyEdge);
        }
        let mut vertices = raw.to_vec();
        vertices.sort_unstable();
        let mut mask = 0u64;
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidArgument("repeated vertex in edge"));
            }
        }
        for &v in &vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            mask |= 1u64 << v;
        }
        Ok(Self { vertices, mask })
    }

    /// Builds an edge from a vertex mask.
    pub fn from_mask(mask: u64) -> Self {
        let mut vertices = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            vertices.push(m.trailing_zeros());
            m &= m - 1;
        }
        Self { vertices, mask }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.vertices.len()
    }

    /// Whether the monomial of this edge fires on basis index `x`.
    #[inline]
    pub fn fires(&self, x: u64) -> bool {
        x & self.mask == self.mask
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices.cmp(&other.vertices)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reduces a raw edge list to its canonical mod-2 form: each edge sorted, the list
/// sorted lexicographically, and every edge that occurs an even number of times dropped.
pub fn canonicalize_edges<E: AsRef<[u32]>>(raw_edges: &[E], n: u32) -> Result<Vec<Edge>> {
    let mut edges = raw_edges
        .iter()
        .map(|e| Edge::new(e.as_ref(), n))
        .collect::<Result<Vec<_>>>()?;
    edges.sort_unstable();
    let mut out = Vec::with_capacity(edges.len());
    let mut i = 0;
    while i < edges.len() {
        let mut j = i + 1;
        while j < edges.len() && edges[j] == edges[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(edges[i].clone());
        }
        i = j;
    }
    Ok(out)
}

/// All `C(n, k)` edges of arity `k` on `n` vertices, in lexicographic order.
pub fn all_k_edges(n: u32, k: u32) -> Result<Vec<Edge>> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::QubitCount {
            n,
            max: MAX_VERTICES,
        });
    }
    if k == 0 || k > n {
        return Err(Error::ArityOutOfRange { k, n });
    }
    let k = k as usize;
    let mut combo: Vec<u32> = (0..k as u32).collect();
    let mut out = Vec::new();
    loop {
        let mask = combo.iter().fold(0u64, |m, &v| m | 1u64 << v);
        out.push(Edge {
            vertices: combo.clone(),
            mask,
        });
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if combo[i] < n - (k - i) as u32 {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// A hypergraph on `n` vertices with a canonical edge set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: u32,
    edges: Vec<Edge>,
}

impl Hypergraph {
    pub fn new<E: AsRef<[u32]>>(n: u32, raw_edges: &[E]) -> Result<Self> {
        check_vertex_count(n)?;
        Ok(Self {
            n,
            edges: canonicalize_edges(raw_edges, n)?,
        })
    }

    pub fn empty(n: u32) -> Result<Self> {
        check_vertex_count(n)?;
        Ok(Self {
            n,
            edges: Vec::new(),
        })
    }

    /// Edges already sorted, distinct and in range.
    pub(crate) fn from_canonical(n: u32, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|e| n == 64 || e.mask >> n == 0));
        Self { n, edges }
    }

    pub fn n_qubits(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.arity() == k)
    }

    /// Sign `s(x) = (-1)^{#edges contained in the support of x}` of basis index `x`.
    pub fn sign_at(&self, x: u64) -> Result<i8> {
        if self.n < 64 && x >> self.n != 0 {
            return Err(Error::InvalidArgument("basis index out of range"));
        }
        let fired = self.edges.iter().filter(|e| e.fires(x)).count();
        Ok(if fired % 2 == 0 { 1 } else { -1 })
    }
}

fn check_vertex_count(n: u32) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        Err(Error::QubitCount {
            n,
            max: MAX_VERTICES,
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tuples(edges: &[Edge]) -> Vec<Vec<u32>> {
        edges.iter().map(|e| e.vertices().to_vec()).collect()
    }

    #[test]
    fn canonicalize_examples() {
        let e = canonicalize_edges(&[vec![1, 0], vec![0, 1]], 2).unwrap();
        assert!(e.is_empty());
        let e = canonicalize_edges(&[vec![2, 0, 1]], 3).unwrap();
        assert_eq!(tuples(&e), vec![vec![0, 1, 2]]);
        let e = canonicalize_edges(&[vec![0, 1], vec![0, 1], vec![0, 1]], 2).unwrap();
        assert_eq!(tuples(&e), vec![vec![0, 1]]);
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(
            canonicalize_edges(&[vec![0, 3]], 3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        );
        let empty: Vec<u32> = vec![];
        assert_eq!(canonicalize_edges(&[empty], 3), Err(Error::EmptyEdge));
        assert!(canonicalize_edges(&[vec![1, 1]], 3).is_err());
    }

    #[test]
    fn k_edge_counts() {
        assert_eq!(all_k_edges(4, 2).unwrap().len(), 6);
        assert_eq!(all_k_edges(5, 3).unwrap().len(), 10);
        assert_eq!(tuples(&all_k_edges(3, 3).unwrap()), vec![vec![0, 1, 2]]);
        assert_eq!(
            tuples(&all_k_edges(4, 2).unwrap()),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert!(all_k_edges(3, 0).is_err());
        assert!(all_k_edges(3, 4).is_err());
    }

    #[test]
    fn k_edges_sorted_and_complete() {
        for n in 1..=9 {
            for k in 1..=n {
                let edges = all_k_edges(n, k).unwrap();
                assert!(edges.windows(2).all(|w| w[0] < w[1]));
                let expected = (0u64..1 << n).filter(|m| m.count_ones() == k).count();
                assert_eq!(edges.len(), expected);
            }
        }
    }

    #[test]
    fn sign_examples() {
        let h = Hypergraph::new(2, &[[0u32, 1]]).unwrap();
        assert_eq!(h.sign_at(0b11).unwrap(), -1);
        assert_eq!(h.sign_at(0).unwrap(), 1);
        let h = Hypergraph::new(3, &[vec![0u32, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(h.sign_at(0b111).unwrap(), 1);
        assert_eq!(h.sign_at(0b011).unwrap(), -1);
        assert!(h.sign_at(8).is_err());
    }

    #[test]
    fn one_edges_are_accepted() {
        let h = Hypergraph::new(2, &[[1u32]]).unwrap();
        assert_eq!(h.sign_at(0b10).unwrap(), -1);
        assert_eq!(h.sign_at(0b01).unwrap(), 1);
    }

    #[test]
    fn vertex_count_bounds() {
        assert!(Hypergraph::empty(0).is_err());
        assert!(Hypergraph::empty(64).is_ok());
        assert!(Hypergraph::empty(65).is_err());
    }
}
