//! Shadow-channel analytics.
//!
//! Every protocol here is locally scrambled, so its channel is diagonal in
//! the Pauli basis and factorizes over the blocks of the covering. Each block
//! is summarized by one eigenvalue per identity/non-identity site pattern;
//! shadow norms and sample budgets follow from those tables.

mod eigen;
mod norm;
pub mod oracle;
mod protocol;

pub use eigen::{
    bell_block_eigs, ef_to_eigs, ghz_block_eigs, ghz_entanglement_feature,
    ghz_full_pattern_closed_form, parse_pattern, pattern_string, pauli_block_eigs,
    rational_annotation, scaling_factor, stabilizer_bound_check, tunable_block_eigs,
    BlockEigenvalues, ChannelEigenvalues, EigenEntry, EntanglementFeature, ZERO_THRESHOLD,
};
pub use norm::{
    budget_prefactor, norm_from_eigenvalues, sample_budget, sample_budget_split, shadow_norm_sq,
    NormValue, ShadowNorm,
};
pub(crate) use norm::budget_from_values;
pub use oracle::{delta_from_phi, oracle_block_eig, phi_from_delta};
pub use protocol::{BasisFamily, ProtocolSpec, ScrambleMode};

use crate::operators::OperatorError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("basis family {family} does not fit a block of {size} qubits")]
    FamilyMismatch { family: String, size: usize },
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("invalid eigenvalue table: {0}")]
    InvalidTable(String),
    #[error("invalid entanglement feature: {0}")]
    InvalidFeature(String),
    #[error("invalid pattern character {0:?}")]
    InvalidPattern(String),
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("oracle limited to blocks of at most 3 qubits, got {0}")]
    OracleTooLarge(usize),
    #[error("sample budget needs every operator to be learnable")]
    UnlearnableInBudget,
    #[error("sample budget of an empty operator list")]
    EmptyNormList,
}
