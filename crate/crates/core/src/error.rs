use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for {n} qubits")]
    VertexOutOfRange { vertex: u32, n: u32 },
    #[error("empty edge")]
    EmptyEdge,
    #[error("edge arity {k} out of range 1..={n}")]
    ArityOutOfRange { k: u32, n: u32 },
    #[error("qubit count {n} out of range 1..={max}")]
    QubitCount { n: u32, max: u32 },
    #[error("{n} qubits exceeds the sign-table capacity of {cap}")]
    CapacityExceeded { n: u32, cap: u32 },
    #[error("dimension mismatch: state has {state} qubits, partition has {partition}")]
    DimensionMismatch { state: u32, partition: u32 },
    #[error("invalid bipartition: {0}")]
    InvalidPartition(&'static str),
    #[error("hypergraph is not 2-uniform (found an edge of arity {0})")]
    NotGraph(usize),
    #[error("purity must be positive")]
    NonPositivePurity,
    #[error("inconsistent ensemble: {0}")]
    InconsistentEnsemble(&'static str),
    #[error("enumeration of 2^{universe} subsets exceeds the cap of 2^{cap_log2}")]
    EnumerationCap { universe: usize, cap_log2: u32 },
    #[error("method {method} is not valid for family {family}")]
    MethodMismatch {
        method: &'static str,
        family: &'static str,
    },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: u64, got: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
