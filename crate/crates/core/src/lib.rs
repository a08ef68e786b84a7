//! Classical shadows from locally-entangled randomized measurements.
//!
//! The crate covers the full pipeline for Pauli-expectation estimation with
//! random single-qubit Clifford scrambling followed by joint measurements on
//! blocks of qubits (single-qubit Pauli, Bell, tunable two-qubit and GHZ bases):
//!
//! * [`operators`]: Pauli strings and qubit coverings.
//! * [`channels`]: analytic shadow-channel eigenvalues, shadow norms, sample
//!   budgets and a brute-force Clifford-average oracle.
//! * [`simulator`]: stabilizer and dense state backends and the snapshot
//!   sampler.
//! * [`estimation`]: single-shot estimators and their aggregation.
//! * [`harness`]: campaign configs, presets, sweeps and the validation suite.

pub mod channels;
pub mod clifford;
pub mod dense;
pub mod estimation;
pub mod harness;
pub mod operators;
pub mod simulator;

pub use channels::{BasisFamily, ChannelEigenvalues, ProtocolSpec, ScrambleMode, ShadowNorm};
pub use operators::{Covering, OperatorSet, Pauli, PauliString};
pub use simulator::{QuantumState, Snapshot, SnapshotDataset};
