//! Exact simulation and ensemble statistics for random quantum hypergraph states.
//!
//! A hypergraph state on `n` qubits is `2^{-n/2} Σ_x (-1)^{f(x)} |x⟩` where `f` is the
//! mod-2 sum of one monomial per hyperedge. This crate builds those states as bit-packed
//! sign tables, computes subsystem purity exactly (as a dyadic rational), evaluates the
//! Rényi-2 entropy, and samples or enumerates the random CZ / CCZ / half-CCZ ensembles.
//! Graph (2-uniform) states additionally get the GF(2) rank shortcut for the entropy.
//!
//! The crate is `no_std` and only needs `alloc`. Threading, IO and file formats live in
//! the `hyperent` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod closed_forms;
pub mod dyadic;
pub mod ensemble;
mod error;
pub mod gf2;
pub mod hypergraph;
pub mod partition;
pub mod purity;
pub mod rng;
pub mod sharp4;
pub mod sign_table;
pub mod stats;

pub use dyadic::DyadicRational;
pub use ensemble::{EnsembleSpec, Family, Method, Scope};
pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, RankHistogram};
pub use hypergraph::{Edge, Hypergraph};
pub use partition::Bipartition;
pub use rng::CounterRng;
pub use sign_table::SignTable;
pub use stats::{MomentEstimate, RunningMoments};

/// Default upper bound on the qubit count of a materialized sign table.
pub const DEFAULT_MAX_QUBITS: u32 = 26;

/// Largest vertex count a [`Hypergraph`] can carry (vertex sets are `u64` masks).
pub const MAX_VERTICES: u32 = 64;
