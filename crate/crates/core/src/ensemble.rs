//! Random hypergraph ensembles: edge universes, sampling, exhaustive enumeration and
//! moment estimation for purity and Rényi-2 entropy.
//!
//! Every member of an ensemble is a subset of a fixed, lexicographically ordered edge
//! universe; each universe edge is present independently with probability `p`.
//!
//! Monte Carlo sample `i` always draws from stream `(seed, i)` of [`CounterRng`], and
//! samples are reduced in fixed blocks of [`MC_BLOCK`] indices that are merged in block
//! order. The result therefore does not depend on how blocks are spread over workers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::gf2::Gf2Matrix;
use crate::hypergraph::{all_k_edges, Edge};
use crate::purity::{CutIndex, PurityKernel};
use crate::stats::{MomentEstimate, RunningMoments};
use crate::{
    Bipartition, CounterRng, DyadicRational, Error, Hypergraph, Result, SignTable,
    DEFAULT_MAX_QUBITS,
};

/// Default cap on exhaustive enumeration: `2^26` ensemble members.
pub const DEFAULT_ENUMERATION_CAP_LOG2: u32 = 26;

/// Monte Carlo reduction block size.
pub const MC_BLOCK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Random CZ gates (2-uniform).
    Cz,
    /// Random CCZ gates (3-uniform).
    Ccz,
    /// CCZ gates restricted to edges with one vertex in `A` and two in `Ā`.
    CczHalf,
    KUniform(u32),
}

impl Family {
    pub fn arity(&self) -> u32 {
        match self {
            Family::Cz => 2,
            Family::Ccz | Family::CczHalf => 3,
            Family::KUniform(k) => *k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Cz => "cz",
            Family::Ccz => "ccz",
            Family::CczHalf => "ccz-half",
            Family::KUniform(_) => "k-uniform",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::KUniform(k) => write!(f, "k-uniform({k})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    AllEdges,
    /// Only edges meeting both sides of the cut. Purity statistics are identical to
    /// `AllEdges` because gates inside one side do not change `P_A`.
    CrossOnly,
}

impl Scope {
    pub fn name(&self) -> &'static str {
        match self {
            Scope::AllEdges => "all",
            Scope::CrossOnly => "cross",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Rank for 2-uniform families, state vector otherwise.
    Auto,
    StateVector,
    /// GF(2) rank of the cut block; graph states only.
    Rank,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::StateVector => "statevector",
            Method::Rank => "rank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub family: Family,
    pub edge_probability: f64,
    pub scope: Scope,
    pub n_qubits: u32,
}

impl EnsembleSpec {
    /// `p = 1/2`, cross-cut scope.
    pub fn new(family: Family, n_qubits: u32) -> Self {
        Self {
            family,
            edge_probability: 0.5,
            scope: Scope::CrossOnly,
            n_qubits,
        }
    }

    pub fn with_probability(mut self, p: f64) -> Self {
        self.edge_probability = p;
        self
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn validate(&self, part: &Bipartition) -> Result<()> {
        if part.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                state: self.n_qubits,
                partition: part.n_qubits(),
            });
        }
        let p = self.edge_probability;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(
                "edge probability must lie in [0, 1]",
            ));
        }
        let k = self.family.arity();
        if k == 0 || k > self.n_qubits {
            return Err(Error::ArityOutOfRange {
                k,
                n: self.n_qubits,
            });
        }
        if self.family == Family::CczHalf {
            if part.n_a() < 1 || part.n_b() < 2 {
                return Err(Error::InconsistentEnsemble(
                    "the half-CCZ ensemble needs N_A >= 1 and N_Ā >= 2",
                ));
            }
        } else if self.scope == Scope::CrossOnly {
            part.require_entangling()?;
        }
        Ok(())
    }
}

/// The edges an ensemble member may contain, in lexicographic order.
pub fn edge_universe(spec: &EnsembleSpec, part: &Bipartition) -> Result<Vec<Edge>> {
    spec.validate(part)?;
    let all = all_k_edges(spec.n_qubits, spec.family.arity())?;
    Ok(match (spec.family, spec.scope) {
        (Family::CczHalf, _) => all
            .into_iter()
            .filter(|e| (e.mask() & part.a_mask()).count_ones() == 1)
            .collect(),
        (_, Scope::CrossOnly) => all.into_iter().filter(|e| part.crosses(e.mask())).collect(),
        (_, Scope::AllEdges) => all,
    })
}

pub fn sample_hypergraph(
    spec: &EnsembleSpec,
    part: &Bipartition,
    rng: &mut CounterRng,
) -> Result<Hypergraph> {
    Ok(Ensemble::new(*spec, *part)?.sample(rng))
}

/// Every ensemble member with its probability weight.
pub fn enumerate_ensemble(spec: &EnsembleSpec, part: &Bipartition) -> Result<Enumeration> {
    Ensemble::new(*spec, *part)?.enumerate(DEFAULT_ENUMERATION_CAP_LOG2)
}

/// Exhaustive purity moments; see [`Ensemble::exact_moments`].
pub fn exact_moments(spec: &EnsembleSpec, part: &Bipartition) -> Result<MomentEstimate> {
    Ok(Ensemble::new(*spec, *part)?
        .exact_moments(Method::Auto, DEFAULT_ENUMERATION_CAP_LOG2)?
        .purity)
}

/// Sampled purity moments; see [`Ensemble::mc_moments`].
pub fn mc_moments(
    spec: &EnsembleSpec,
    part: &Bipartition,
    samples: u64,
    seed: u64,
    method: Method,
) -> Result<MomentEstimate> {
    Ok(Ensemble::new(*spec, *part)?
        .mc_moments(samples, seed, method)?
        .purity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Samples(u64),
}

/// Moments of `S_2` over the ensemble next to `-log2 ⟨P_A⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyStats {
    pub entropy: MomentEstimate,
    pub purity: MomentEstimate,
    pub neg_log2_mean_purity: f64,
}

pub fn entropy_stats(
    spec: &EnsembleSpec,
    part: &Bipartition,
    sampling: Sampling,
    seed: u64,
    method: Method,
) -> Result<EntropyStats> {
    let ens = Ensemble::new(*spec, *part)?;
    let report = match sampling {
        Sampling::Exhaustive => ens.exact_moments(method, DEFAULT_ENUMERATION_CAP_LOG2)?,
        Sampling::Samples(n) => ens.mc_moments(n, seed, method)?,
    };
    Ok(report.entropy_stats())
}

/// Purity and entropy moments from one pass over the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub purity: MomentEstimate,
    pub entropy: MomentEstimate,
}

impl EnsembleReport {
    pub fn entropy_stats(self) -> EntropyStats {
        let m = self.purity.mean.to_f64();
        EntropyStats {
            neg_log2_mean_purity: if m > 0.0 {
                -libm::log2(m)
            } else {
                f64::INFINITY
            },
            entropy: self.entropy,
            purity: self.purity,
        }
    }
}

/// An ensemble bound to a bipartition, with its edge universe materialized.
#[derive(Debug, Clone)]
pub struct Ensemble {
    spec: EnsembleSpec,
    part: Bipartition,
    universe: Vec<Edge>,
    max_qubits: u32,
}

impl Ensemble {
    pub fn new(spec: EnsembleSpec, part: Bipartition) -> Result<Self> {
        let universe = edge_universe(&spec, &part)?;
        Ok(Self {
            spec,
            part,
            universe,
            max_qubits: DEFAULT_MAX_QUBITS,
        })
    }

    /// Sign-table capacity used by the state-vector method.
    pub fn with_max_qubits(mut self, cap: u32) -> Self {
        self.max_qubits = cap;
        self
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn partition(&self) -> &Bipartition {
        &self.part
    }

    pub fn universe(&self) -> &[Edge] {
        &self.universe
    }

    /// Replaces [`Method::Auto`] and checks the method against the family and capacity.
    pub fn resolve_method(&self, method: Method) -> Result<Method> {
        let graph = self.spec.family.arity() == 2;
        match method {
            Method::Auto if graph => Ok(Method::Rank),
            Method::Auto | Method::StateVector => {
                let cap = self.max_qubits.min(crate::sign_table::ABSOLUTE_MAX_QUBITS);
                if self.spec.n_qubits > cap {
                    Err(Error::CapacityExceeded {
                        n: self.spec.n_qubits,
                        cap,
                    })
                } else {
                    Ok(Method::StateVector)
                }
            }
            Method::Rank if graph => Ok(Method::Rank),
            Method::Rank => Err(Error::MethodMismatch {
                method: "rank",
                family: self.spec.family.name(),
            }),
        }
    }

    fn select(&self, rng: &mut CounterRng, out: &mut Vec<usize>) {
        out.clear();
        let p = self.spec.edge_probability;
        for i in 0..self.universe.len() {
            if rng.bernoulli(p) {
                out.push(i);
            }
        }
    }

    fn hypergraph_of(&self, selected: impl Iterator<Item = usize>) -> Hypergraph {
        Hypergraph::from_canonical(
            self.spec.n_qubits,
            selected.map(|i| self.universe[i].clone()).collect(),
        )
    }

    pub fn sample(&self, rng: &mut CounterRng) -> Hypergraph {
        let mut selected = Vec::new();
        self.select(rng, &mut selected);
        self.hypergraph_of(selected.into_iter())
    }

    /// Monte Carlo sample `index` of `seed`.
    pub fn sample_at(&self, seed: u64, index: u64) -> Hypergraph {
        self.sample(&mut CounterRng::for_stream(seed, index))
    }

    fn check_enumerable(&self, cap_log2: u32) -> Result<usize> {
        let u = self.universe.len();
        if u > cap_log2 as usize || u >= 64 {
            Err(Error::EnumerationCap {
                universe: u,
                cap_log2,
            })
        } else {
            Ok(u)
        }
    }

    fn dyadic_probability(&self) -> DyadicRational {
        DyadicRational::from_f64(self.spec.edge_probability).expect("validated probability")
    }

    /// Every subset of the universe, member `i` containing universe edge `j` iff bit `j`
    /// of `i` is set.
    pub fn enumerate(&self, cap_log2: u32) -> Result<Enumeration> {
        let u = self.check_enumerable(cap_log2)?;
        let p = self.dyadic_probability();
        let q = &DyadicRational::one() - &p;
        let p_pows = (0..=u as u32).map(|k| p.pow(k)).collect();
        let q_pows = (0..=u as u32).map(|k| q.pow(k)).collect();
        Ok(Enumeration {
            ensemble: self.clone(),
            next: 0,
            end: 1u64 << u,
            p_pows,
            q_pows,
        })
    }

    /// Exact accumulation over members `range` (indices in Gray-code order).
    pub fn exact_accumulate(&self, method: Method, range: Range<u64>) -> Result<ExactAccumulator> {
        let method = self.resolve_method(method)?;
        let u = self.universe.len();
        let mut eval = Evaluator::new(self, method)?;
        let mut acc = ExactAccumulator::new(eval.denominator_log2(), u);
        if range.is_empty() {
            return Ok(acc);
        }
        let gray = |i: u64| i ^ (i >> 1);
        let mut subset = gray(range.start);
        eval.reset();
        for j in 0..u {
            if subset >> j & 1 == 1 {
                eval.toggle(j);
            }
        }
        let mut i = range.start;
        loop {
            let (num, entropy) = eval.evaluate();
            acc.record(subset.count_ones() as usize, num, entropy);
            i += 1;
            if i >= range.end {
                break;
            }
            let flip = i.trailing_zeros() as usize;
            subset ^= 1 << flip;
            eval.toggle(flip);
        }
        Ok(acc)
    }

    /// Exhaustive purity and entropy moments. Purity moments are exact dyadic rationals
    /// (every `f64` probability is itself dyadic); entropy moments are floating point.
    pub fn exact_moments(&self, method: Method, cap_log2: u32) -> Result<EnsembleReport> {
        let u = self.check_enumerable(cap_log2)?;
        let acc = self.exact_accumulate(method, 0..1u64 << u)?;
        Ok(acc.finish(self.spec.edge_probability))
    }

    /// Accumulates Monte Carlo block `block` of a run of `total` samples.
    pub fn mc_block(
        &self,
        method: Method,
        seed: u64,
        block: u64,
        total: u64,
    ) -> Result<McAccumulator> {
        let method = self.resolve_method(method)?;
        let mut eval = Evaluator::new(self, method)?;
        let start = block * MC_BLOCK;
        let end = (start + MC_BLOCK).min(total);
        let mut acc = McAccumulator::default();
        let mut selected = Vec::with_capacity(self.universe.len());
        for i in start..end {
            self.select(&mut CounterRng::for_stream(seed, i), &mut selected);
            eval.reset();
            for &j in &selected {
                eval.toggle(j);
            }
            let (num, entropy) = eval.evaluate();
            acc.purity.push(ldexp_u128(num, eval.denominator_log2()));
            acc.entropy.push(entropy);
        }
        Ok(acc)
    }

    pub fn mc_blocks(samples: u64) -> u64 {
        samples.div_ceil(MC_BLOCK)
    }

    /// Sample mean and unbiased variance of purity and entropy over `samples` draws.
    pub fn mc_moments(&self, samples: u64, seed: u64, method: Method) -> Result<EnsembleReport> {
        if samples < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: samples,
            });
        }
        let mut acc = McAccumulator::default();
        for b in 0..Self::mc_blocks(samples) {
            acc.merge(&self.mc_block(method, seed, b, samples)?);
        }
        Ok(acc.finish())
    }

    /// Exact purity of Monte Carlo samples `range`, for cross-method checks.
    pub fn sample_purities(
        &self,
        method: Method,
        seed: u64,
        range: Range<u64>,
    ) -> Result<Vec<DyadicRational>> {
        let method = self.resolve_method(method)?;
        let mut eval = Evaluator::new(self, method)?;
        let mut selected = Vec::new();
        Ok(range
            .map(|i| {
                self.select(&mut CounterRng::for_stream(seed, i), &mut selected);
                eval.reset();
                for &j in &selected {
                    eval.toggle(j);
                }
                DyadicRational::new(eval.evaluate().0, eval.denominator_log2())
            })
            .collect())
    }
}

fn ldexp_u128(num: u128, denom_log2: u32) -> f64 {
    libm::ldexp(num as f64, -(denom_log2 as i32))
}

/// Iterator over `(member, weight)`; weights are `p^{|E|} (1-p)^{U-|E|}`.
#[derive(Debug, Clone)]
pub struct Enumeration {
    ensemble: Ensemble,
    next: u64,
    end: u64,
    p_pows: Vec<DyadicRational>,
    q_pows: Vec<DyadicRational>,
}

impl Iterator for Enumeration {
    type Item = (Hypergraph, DyadicRational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let subset = self.next;
        self.next += 1;
        let u = self.ensemble.universe.len();
        let k = subset.count_ones() as usize;
        let h = self
            .ensemble
            .hypergraph_of((0..u).filter(|j| subset >> j & 1 == 1));
        Some((h, &self.p_pows[k] * &self.q_pows[u - k]))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

/// Per-worker evaluation state for one method.
enum Evaluator {
    StateVector {
        table: SignTable,
        kernel: PurityKernel,
        masks: Vec<u64>,
        n: u32,
    },
    Rank {
        matrix: Gf2Matrix,
        cells: Vec<Option<(usize, usize)>>,
        scratch: Vec<u64>,
        /// `2 min(N_A, N_Ā)`: every graph-state purity is a multiple of `2^{-this}`.
        denom_log2: u32,
    },
}

impl Evaluator {
    fn new(ens: &Ensemble, method: Method) -> Result<Self> {
        let part = &ens.part;
        Ok(match method {
            Method::Rank => {
                let index = CutIndex::new(part);
                Evaluator::Rank {
                    matrix: Gf2Matrix::zeros(part.n_a() as usize, part.n_b() as usize),
                    cells: ens.universe.iter().map(|e| index.cell(e.mask())).collect(),
                    scratch: Vec::new(),
                    denom_log2: 2 * part.n_a().min(part.n_b()),
                }
            }
            _ => Evaluator::StateVector {
                table: SignTable::plus(ens.spec.n_qubits, ens.max_qubits)?,
                kernel: PurityKernel::new(part),
                masks: ens.universe.iter().map(Edge::mask).collect(),
                n: ens.spec.n_qubits,
            },
        })
    }

    fn denominator_log2(&self) -> u32 {
        match self {
            Evaluator::StateVector { n, .. } => 2 * n,
            Evaluator::Rank { denom_log2, .. } => *denom_log2,
        }
    }

    fn reset(&mut self) {
        match self {
            Evaluator::StateVector { table, .. } => table.clear(),
            Evaluator::Rank { matrix, .. } => matrix.clear(),
        }
    }

    #[inline]
    fn toggle(&mut self, edge: usize) {
        match self {
            Evaluator::StateVector { table, masks, .. } => table.toggle_edge(masks[edge]),
            Evaluator::Rank { matrix, cells, .. } => {
                if let Some((r, c)) = cells[edge] {
                    matrix.toggle(r, c);
                }
            }
        }
    }

    /// `(purity numerator over 2^denominator_log2, S_2)`.
    fn evaluate(&mut self) -> (u128, f64) {
        match self {
            Evaluator::StateVector {
                table, kernel, n, ..
            } => {
                let num = kernel.purity_numerator(table);
                (num, entropy_from_numerator(num, 2 * *n))
            }
            Evaluator::Rank {
                matrix,
                scratch,
                denom_log2,
                ..
            } => {
                let r = matrix.rank_with_scratch(scratch) as u32;
                (1u128 << (*denom_log2 - r), f64::from(r))
            }
        }
    }
}

fn entropy_from_numerator(num: u128, denom_log2: u32) -> f64 {
    if num.is_power_of_two() {
        f64::from(denom_log2 - num.trailing_zeros())
    } else {
        f64::from(denom_log2) - libm::log2(num as f64)
    }
}

/// Sum of `u128` terms that spills into a big integer instead of overflowing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct WideSum {
    low: u128,
    high: BigUint,
}

impl WideSum {
    #[inline]
    fn add(&mut self, x: u128) {
        match self.low.checked_add(x) {
            Some(s) => self.low = s,
            None => {
                self.high += self.low;
                self.low = x;
            }
        }
    }

    #[inline]
    fn add_square(&mut self, x: u128) {
        match x.checked_mul(x) {
            Some(sq) => self.add(sq),
            None => self.high += BigUint::from(x) * x,
        }
    }

    fn merge(&mut self, other: &WideSum) {
        self.high += &other.high;
        self.add(other.low);
    }

    fn total(&self) -> BigUint {
        &self.high + self.low
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct SizeBucket {
    count: u64,
    sum: WideSum,
    sum_sq: WideSum,
    entropy_sum: f64,
    entropy_sq: f64,
}

/// Exact purity sums, bucketed by member edge count so any `p` can be applied at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAccumulator {
    denom_log2: u32,
    buckets: Vec<SizeBucket>,
}

impl ExactAccumulator {
    fn new(denom_log2: u32, universe: usize) -> Self {
        Self {
            denom_log2,
            buckets: vec![SizeBucket::default(); universe + 1],
        }
    }

    #[inline]
    fn record(&mut self, size: usize, num: u128, entropy: f64) {
        let b = &mut self.buckets[size];
        b.count += 1;
        b.sum.add(num);
        b.sum_sq.add_square(num);
        b.entropy_sum += entropy;
        b.entropy_sq += entropy * entropy;
    }

    pub fn members(&self) -> u64 {
        self.buckets.iter().map(|b| b.count).sum()
    }

    pub fn merge(&mut self, other: &ExactAccumulator) {
        assert_eq!(self.denom_log2, other.denom_log2);
        assert_eq!(self.buckets.len(), other.buckets.len());
        for (a, b) in self.buckets.iter_mut().zip(&other.buckets) {
            a.count += b.count;
            a.sum.merge(&b.sum);
            a.sum_sq.merge(&b.sum_sq);
            a.entropy_sum += b.entropy_sum;
            a.entropy_sq += b.entropy_sq;
        }
    }

    /// Weights the buckets by `p^k (1-p)^{U-k}`. Only meaningful once every member has
    /// been recorded.
    pub fn finish(&self, p: f64) -> EnsembleReport {
        let u = self.buckets.len() - 1;
        let pd = DyadicRational::from_f64(p).expect("finite probability");
        let e = pd.exponent();
        let a = pd.numerator().clone();
        let b = (BigInt::one() << e as usize) - &a;
        let mut mean_num = BigInt::zero();
        let mut second_num = BigInt::zero();
        let mut ent = 0.0;
        let mut ent_sq = 0.0;
        for (k, bucket) in self.buckets.iter().enumerate() {
            if bucket.count == 0 {
                continue;
            }
            let w = num_traits::pow(a.clone(), k) * num_traits::pow(b.clone(), u - k);
            mean_num += &w * BigInt::from(bucket.sum.total());
            second_num += &w * BigInt::from(bucket.sum_sq.total());
            let wf = libm::pow(p, k as f64) * libm::pow(1.0 - p, (u - k) as f64);
            ent += wf * bucket.entropy_sum;
            ent_sq += wf * bucket.entropy_sq;
        }
        let weight_exp = e * u as u32;
        let members = self.members();
        EnsembleReport {
            purity: MomentEstimate::from_exact(
                DyadicRational::new(mean_num, weight_exp + self.denom_log2),
                DyadicRational::new(second_num, weight_exp + 2 * self.denom_log2),
                members,
            ),
            entropy: MomentEstimate::from_weighted(ent, ent_sq, members),
        }
    }
}

/// Running purity and entropy moments of a block of Monte Carlo samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct McAccumulator {
    pub purity: RunningMoments,
    pub entropy: RunningMoments,
}

impl McAccumulator {
    pub fn merge(&mut self, other: &McAccumulator) {
        self.purity.merge(&other.purity);
        self.entropy.merge(&other.entropy);
    }

    pub fn finish(&self) -> EnsembleReport {
        EnsembleReport {
            purity: self.purity.estimate(),
            entropy: self.entropy.estimate(),
        }
    }
}
