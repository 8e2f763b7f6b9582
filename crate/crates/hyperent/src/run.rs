//! Parallel execution of exhaustive and Monte Carlo runs.
//!
//! Work is cut into pieces whose boundaries depend only on the problem size, never on
//! the worker count, and partial results are merged in piece order. Output is therefore
//! byte-identical for any `--workers` value.

use std::ops::Range;

use hyperent_core::ensemble::{
    Ensemble, EnsembleReport, ExactAccumulator, McAccumulator, MC_BLOCK,
};
use hyperent_core::{CounterRng, Error, Gf2Matrix, Method, RankHistogram};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Members per exhaustive work piece.
const EXACT_PIECE_LOG2: u32 = 12;

pub type RankFn = fn(&Gf2Matrix) -> usize;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `None` uses one worker per available core.
    pub fn new(workers: Option<usize>) -> CliResult<Self> {
        let workers = match workers {
            Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn exact(
        &self,
        ens: &Ensemble,
        method: Method,
        cap_log2: u32,
    ) -> CliResult<EnsembleReport> {
        let u = ens.universe().len();
        if u > cap_log2 as usize || u >= 64 {
            return Err(Error::EnumerationCap {
                universe: u,
                cap_log2,
            }
            .into());
        }
        let total = 1u64 << u;
        let piece = 1u64 << EXACT_PIECE_LOG2.min(u as u32);
        let ranges: Vec<Range<u64>> = (0..total / piece)
            .map(|i| i * piece..(i + 1) * piece)
            .collect();
        let parts: Vec<ExactAccumulator> = self.pool.install(|| {
            ranges
                .into_par_iter()
                .map(|r| ens.exact_accumulate(method, r))
                .collect::<Result<_, _>>()
        })?;
        let mut parts = parts.into_iter();
        let mut acc = parts.next().expect("at least one piece");
        for p in parts {
            acc.merge(&p);
        }
        Ok(acc.finish(ens.spec().edge_probability))
    }

    pub fn monte_carlo(
        &self,
        ens: &Ensemble,
        samples: u64,
        seed: u64,
        method: Method,
    ) -> CliResult<EnsembleReport> {
        if samples < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: samples,
            }
            .into());
        }
        let blocks: Vec<McAccumulator> = self.pool.install(|| {
            (0..Ensemble::mc_blocks(samples))
                .into_par_iter()
                .map(|b| ens.mc_block(method, seed, b, samples))
                .collect::<Result<_, _>>()
        })?;
        let mut acc = McAccumulator::default();
        for b in &blocks {
            acc.merge(b);
        }
        Ok(acc.finish())
    }

    /// Rank defects of `samples` uniform `n × n` matrices; matrix `i` comes from stream
    /// `(seed, i)`.
    pub fn rank_histogram(&self, n: usize, samples: u64, seed: u64, rank: RankFn) -> RankHistogram {
        let blocks = samples.div_ceil(MC_BLOCK);
        let parts: Vec<RankHistogram> = self.pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut h = RankHistogram::new(n);
                    for i in b * MC_BLOCK..((b + 1) * MC_BLOCK).min(samples) {
                        let m = Gf2Matrix::random(n, n, &mut CounterRng::for_stream(seed, i));
                        h.record(n - rank(&m));
                    }
                    h
                })
                .collect()
        });
        let mut h = RankHistogram::new(n);
        for p in &parts {
            h.merge(p);
        }
        h
    }

    /// Runs `f` on the pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}
