//! Pauli-string algebra and qubit coverings.

mod covering;
mod pauli;

pub use covering::{honeycomb, Boundary, Covering, Honeycomb, Parity};
pub use pauli::{OperatorSet, Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("operators act on {left} and {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("product carries an imaginary phase i^{exponent}")]
    ImaginaryPhase { exponent: u8 },
    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),
    #[error("empty Pauli string")]
    EmptyString,
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("invalid covering: {0}")]
    InvalidCovering(String),
    #[error("need at least {need} qubits, got {got}")]
    TooFewQubits { need: usize, got: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("{operators} operators but {labels} labels")]
    LabelCount { operators: usize, labels: usize },
}

/// Contiguous string with `letters` starting at `start` on a chain of `n`
/// sites; wraps around when `periodic`.
pub fn contiguous_string(
    n: usize,
    start: usize,
    letters: &[Pauli],
    periodic: bool,
) -> Result<PauliString, OperatorError> {
    if letters.len() > n || (!periodic && start + letters.len() > n) {
        return Err(OperatorError::TooFewQubits {
            need: start + letters.len(),
            got: n,
        });
    }
    let sites: Vec<(usize, Pauli)> = letters
        .iter()
        .enumerate()
        .map(|(j, &l)| ((start + j) % n, l))
        .collect();
    PauliString::from_sites(n, &sites)
}
