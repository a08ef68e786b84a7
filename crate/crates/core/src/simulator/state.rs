use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::circuit::{clifford_word, Gate};
use super::statevector::{StateVector, DENSE_MAX_QUBITS};
use super::tableau::Tableau;
use super::SimError;
use crate::clifford::CLIFFORD_COUNT;
use crate::dense::C64;
use crate::operators::PauliString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    ComputationalZero,
    ProductPlus,
    Ghz,
    #[serde(rename = "cluster-1d")]
    Cluster1d,
    RandomStabilizer,
    RandomDense,
    MaximallyMixed,
}

impl StatePreset {
    pub const ALL: [StatePreset; 7] = [
        StatePreset::ComputationalZero,
        StatePreset::ProductPlus,
        StatePreset::Ghz,
        StatePreset::Cluster1d,
        StatePreset::RandomStabilizer,
        StatePreset::RandomDense,
        StatePreset::MaximallyMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatePreset::ComputationalZero => "computational-zero",
            StatePreset::ProductPlus => "product-plus",
            StatePreset::Ghz => "ghz",
            StatePreset::Cluster1d => "cluster-1d",
            StatePreset::RandomStabilizer => "random-stabilizer",
            StatePreset::RandomDense => "random-dense",
            StatePreset::MaximallyMixed => "maximally-mixed",
        }
    }
}

impl fmt::Display for StatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatePreset {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SimError::UnknownPreset(s.to_string()))
    }
}

/// Stabilizer state together with the Clifford circuit that prepared it from
/// `|0…0⟩`, kept so the state can be expanded to amplitudes on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerState {
    tableau: Tableau,
    prep: Vec<Gate>,
}

impl StabilizerState {
    pub fn from_circuit(n: usize, prep: Vec<Gate>) -> Result<Self, SimError> {
        let mut tableau = Tableau::new(n);
        for g in &prep {
            apply_to_tableau(&mut tableau, g)?;
        }
        Ok(StabilizerState { tableau, prep })
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn preparation(&self) -> &[Gate] {
        &self.prep
    }
}

pub(crate) fn apply_to_tableau(t: &mut Tableau, g: &Gate) -> Result<(), SimError> {
    match *g {
        Gate::H(q) => t.h(q),
        Gate::S(q) => t.s(q),
        Gate::Clifford(q, c) => {
            for w in clifford_word(q, c) {
                apply_to_tableau(t, &w)?;
            }
        }
        Gate::Cz(a, b) => t.cz(a, b),
        Gate::Cx(a, b) => t.cx(a, b),
        Gate::CPhase(a, b, phi) => match super::circuit::phase_as_clifford(phi) {
            Some(true) => t.cz(a, b),
            Some(false) => {}
            None => return Err(SimError::NonClifford),
        },
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Stabilizer(StabilizerState),
    Dense(StateVector),
    MaximallyMixed { num_qubits: usize },
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Stabilizer(s) => s.tableau.num_qubits(),
            QuantumState::Dense(v) => v.num_qubits(),
            QuantumState::MaximallyMixed { num_qubits } => *num_qubits,
        }
    }

    pub fn backend_name(&self) -> &'static str {
        match self {
            QuantumState::Stabilizer(_) => "stabilizer",
            QuantumState::Dense(_) => "dense",
            QuantumState::MaximallyMixed { .. } => "maximally-mixed",
        }
    }

    /// Amplitudes of a pure state; the maximally mixed state has none.
    pub fn to_dense(&self) -> Result<StateVector, SimError> {
        match self {
            QuantumState::Stabilizer(s) => {
                let mut v = StateVector::zero(s.tableau.num_qubits())?;
                v.apply_all(&s.prep);
                Ok(v)
            }
            QuantumState::Dense(v) => Ok(v.clone()),
            QuantumState::MaximallyMixed { .. } => Err(SimError::InvalidState(
                "the maximally mixed state has no state vector".into(),
            )),
        }
    }

    /// Exact `⟨P⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64, SimError> {
        if p.num_qubits() != self.num_qubits() {
            return Err(SimError::DimensionMismatch {
                state: self.num_qubits(),
                protocol: p.num_qubits(),
            });
        }
        Ok(match self {
            QuantumState::Stabilizer(s) => s.tableau.expectation(p),
            QuantumState::Dense(v) => v.expectation(p),
            QuantumState::MaximallyMixed { .. } => {
                if p.is_identity() {
                    p.sign()
                } else {
                    0.0
                }
            }
        })
    }
}

fn preset_rng(n: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(super::sampling::mix64(seed ^ (n as u64).rotate_left(32)))
}

/// Random Clifford circuit: `2n` layers of random table Cliffords followed by
/// CZ on a random pairing of the qubits.
fn random_stabilizer_circuit(n: usize, seed: u64) -> Vec<Gate> {
    let mut rng = preset_rng(n, seed);
    let mut gates = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..2 * n.max(1) {
        for q in 0..n {
            gates.push(Gate::Clifford(q, rng.gen_range(0..CLIFFORD_COUNT as u8)));
        }
        order.shuffle(&mut rng);
        for pair in order.chunks_exact(2) {
            gates.push(Gate::Cz(pair[0], pair[1]));
        }
    }
    for q in 0..n {
        gates.push(Gate::Clifford(q, rng.gen_range(0..CLIFFORD_COUNT as u8)));
    }
    gates
}

/// Builds a named test state on `n` qubits. Seeded presets are deterministic
/// in `(n, seed)`; the others ignore the seed.
pub fn prepare_preset(preset: StatePreset, n: usize, seed: u64) -> Result<QuantumState, SimError> {
    if n == 0 {
        return Err(SimError::InvalidState("zero qubits".into()));
    }
    let stab = |prep: Vec<Gate>| StabilizerState::from_circuit(n, prep).map(QuantumState::Stabilizer);
    match preset {
        StatePreset::ComputationalZero => stab(Vec::new()),
        StatePreset::ProductPlus => stab((0..n).map(Gate::H).collect()),
        StatePreset::Ghz => {
            let mut prep = vec![Gate::H(0)];
            prep.extend((0..n - 1).map(|q| Gate::Cx(q, q + 1)));
            stab(prep)
        }
        StatePreset::Cluster1d => {
            let mut prep: Vec<Gate> = (0..n).map(Gate::H).collect();
            prep.extend((0..n - 1).map(|q| Gate::Cz(q, q + 1)));
            stab(prep)
        }
        StatePreset::RandomStabilizer => stab(random_stabilizer_circuit(n, seed)),
        StatePreset::RandomDense => {
            super::statevector::guard(n, DENSE_MAX_QUBITS)?;
            let mut rng = preset_rng(n, seed);
            let mut amps: Vec<C64> = (0..1usize << n)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            Ok(QuantumState::Dense(StateVector::from_amplitudes(amps)?))
        }
        StatePreset::MaximallyMixed => Ok(QuantumState::MaximallyMixed { num_qubits: n }),
    }
}
