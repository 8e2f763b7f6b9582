//! Bit-packed matrices over GF(2) and random-rank statistics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::rng::CounterRng;

/// Dense binary matrix, one run of `u64` words per row. Bits past `cols` are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Rows written as `'0'`/`'1'` strings, column 0 first. Panics on other characters
    /// or ragged rows.
    pub fn from_rows(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |r, c| {
            let row = rows[r].as_bytes();
            assert_eq!(row.len(), cols, "ragged rows");
            match row[c] {
                b'0' => false,
                b'1' => true,
                other => panic!("bad matrix character {:?}", other as char),
            }
        })
    }

    /// I.i.d. uniform bits.
    pub fn random(rows: usize, cols: usize, rng: &mut CounterRng) -> Self {
        let mut m = Self::zeros(rows, cols);
        let tail = m.tail_mask();
        for r in 0..rows {
            let row = m.row_mut(r);
            for w in row.iter_mut() {
                *w = rng.next_u64();
            }
            if let Some(last) = row.last_mut() {
                *last &= tail;
            }
        }
        m
    }

    fn tail_mask(&self) -> u64 {
        match self.cols % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.stride {
                self.data.swap(a * self.stride + w, b * self.stride + w);
            }
        }
    }

    /// Row `dst` += row `src`.
    pub fn add_row(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        for w in 0..self.stride {
            let s = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= s;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Rank over GF(2). Works on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        rank_in_place(&mut scratch, self.rows, self.cols, self.stride)
    }

    /// [`Gf2Matrix::rank`] reusing a caller-owned scratch buffer.
    pub fn rank_with_scratch(&self, scratch: &mut Vec<u64>) -> usize {
        scratch.clear();
        scratch.extend_from_slice(&self.data);
        rank_in_place(scratch, self.rows, self.cols, self.stride)
    }

    pub fn clear(&mut self) {
        self.data.fill(0);
    }
}

/// Forward elimination with word-level row XORs; `data` is clobbered.
pub(crate) fn rank_in_place(data: &mut [u64], rows: usize, cols: usize, stride: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let w = c / 64;
        let bit = 1u64 << (c % 64);
        let Some(pivot) = (rank..rows).find(|&r| data[r * stride + w] & bit != 0) else {
            continue;
        };
        if pivot != rank {
            for k in w..stride {
                data.swap(pivot * stride + k, rank * stride + k);
            }
        }
        for r in rank + 1..rows {
            if data[r * stride + w] & bit != 0 {
                for k in w..stride {
                    let p = data[rank * stride + k];
                    data[r * stride + k] ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Counts of rank defect `s = n - rank` over random `n × n` matrices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankHistogram {
    pub n: usize,
    pub counts: BTreeMap<usize, u64>,
    pub samples: u64,
}

impl RankHistogram {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            counts: BTreeMap::new(),
            samples: 0,
        }
    }

    pub fn record(&mut self, defect: usize) {
        debug_assert!(defect <= self.n);
        *self.counts.entry(defect).or_insert(0) += 1;
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &RankHistogram) {
        assert_eq!(self.n, other.n, "merging histograms of different sizes");
        for (&s, &c) in &other.counts {
            *self.counts.entry(s).or_insert(0) += c;
        }
        self.samples += other.samples;
    }

    pub fn count(&self, defect: usize) -> u64 {
        self.counts.get(&defect).copied().unwrap_or(0)
    }

    pub fn frequency(&self, defect: usize) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.count(defect) as f64 / self.samples as f64
        }
    }

    pub fn max_defect(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// Histogram of rank defects of `samples` uniform `n × n` matrices drawn from `rng`.
pub fn empirical_rank_distribution(n: usize, samples: u64, rng: &mut CounterRng) -> RankHistogram {
    let mut h = RankHistogram::new(n);
    for _ in 0..samples {
        let m = Gf2Matrix::random(n, n, rng);
        h.record(n - m.rank());
    }
    h
}

/// Same statistic, but sample `i` uses its own stream `(seed, i)`, so disjoint index
/// ranges can be processed independently and merged.
pub fn rank_histogram_streams(n: usize, seed: u64, range: Range<u64>) -> RankHistogram {
    let mut h = RankHistogram::new(n);
    for i in range {
        let mut rng = CounterRng::for_stream(seed, i);
        let m = Gf2Matrix::random(n, n, &mut rng);
        h.record(n - m.rank());
    }
    h
}
