//! State backends and the randomized-measurement sampler.
//!
//! A shot draws one table Clifford per scrambled qubit, applies the block
//! basis-change circuits and reads out every qubit in the computational
//! basis. Clifford campaigns on stabilizer states run on a tableau; anything
//! else falls back to a dense state vector.

pub mod circuit;
mod dataset;
mod sampling;
mod state;
pub mod statevector;
pub mod tableau;

pub use circuit::{block_circuit, Gate};
pub use dataset::{DatasetHeader, SnapshotDataset, DATASET_FORMAT};
pub use sampling::{
    born_oracle, sample_dataset, sample_snapshot, shot_seed, Backend, Sampler, Snapshot,
    BORN_ORACLE_MAX_QUBITS,
};
pub use state::{prepare_preset, QuantumState, StabilizerState, StatePreset};
pub use statevector::{StateVector, DENSE_MAX_QUBITS};
pub use tableau::Tableau;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("circuit is not Clifford")]
    NonClifford,
    #[error("{n} qubits exceed the limit of {limit} for this backend")]
    TooManyQubits { n: usize, limit: usize },
    #[error("unknown state preset {0:?}")]
    UnknownPreset(String),
    #[error("at least one shot is required")]
    ZeroShots,
    #[error("state has {state} qubits but the protocol has {protocol}")]
    DimensionMismatch { state: usize, protocol: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}
