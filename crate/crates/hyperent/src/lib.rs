//! Command-line laboratory for random hypergraph state entanglement: single-state
//! queries, ensemble sweeps with closed-form overlays, GF(2) rank statistics and a
//! verification suite. Numerics live in `hyperent-core`.

pub mod cli;
pub mod error;
pub mod graph_file;
pub mod report;
pub mod run;
pub mod verify;
