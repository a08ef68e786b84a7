use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::circuit::{block_circuit, Gate};
use super::dataset::{DatasetHeader, SnapshotDataset};
use super::state::{apply_to_tableau, QuantumState};
use super::statevector::{guard, StateVector};
use super::tableau::Tableau;
use super::SimError;
use crate::channels::ProtocolSpec;
use crate::clifford::CLIFFORD_COUNT;

/// Largest register [`born_oracle`] accepts.
pub const BORN_ORACLE_MAX_QUBITS: usize = 12;

/// SplitMix64 finalizer.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of shot `index`: the index is pushed through the SplitMix64 finalizer
/// (after a golden-ratio increment), added to the master seed and mixed again.
pub fn shot_seed(master_seed: u64, index: u64) -> u64 {
    let salted = mix64(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    mix64(master_seed.wrapping_add(salted))
}

/// One randomized measurement: the Clifford drawn for every qubit (table
/// index, 0 when the qubit was not scrambled) and the readout bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SnapshotLine", into = "SnapshotLine")]
pub struct Snapshot {
    pub shot_index: u64,
    pub scramblers: SmallVec<[u8; 32]>,
    /// Bit `q` of the packed words is the outcome of qubit `q`.
    pub outcome: SmallVec<[u64; 1]>,
}

impl Snapshot {
    pub fn num_qubits(&self) -> usize {
        self.scramblers.len()
    }

    #[inline]
    pub fn bit(&self, q: usize) -> bool {
        self.outcome[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.num_qubits()).map(|q| self.bit(q)).collect()
    }

    /// Outcome bits of the given sites packed little-endian.
    pub fn local_outcome(&self, sites: &[usize]) -> usize {
        sites
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | (self.bit(q) as usize) << j)
    }

    /// `Σ b_q 2^q` in hexadecimal, most significant digit first, padded to
    /// `ceil(N/4)` digits.
    pub fn outcome_hex(&self) -> String {
        let digits = self.num_qubits().div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (self.outcome[d / 16] >> (4 * (d % 16))) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap()
            })
            .collect()
    }

    fn parse_hex(hex: &str, n: usize) -> Result<SmallVec<[u64; 1]>, SimError> {
        let digits = n.div_ceil(4).max(1);
        if hex.len() != digits {
            return Err(SimError::InvalidDataset(format!(
                "outcome {hex:?} should have {digits} hex digits for {n} qubits"
            )));
        }
        let mut words: SmallVec<[u64; 1]> = SmallVec::from_elem(0, n.div_ceil(64).max(1));
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| SimError::InvalidDataset(format!("bad hex digit {c:?}")))?
                as u64;
            words[d / 16] |= nibble << (4 * (d % 16));
        }
        let high = if n % 64 != 0 { words[n / 64] >> (n % 64) } else { 0 };
        if high != 0 || words.len() > n.div_ceil(64).max(1) {
            return Err(SimError::InvalidDataset(format!("outcome {hex:?} sets bits beyond qubit {n}")));
        }
        Ok(words)
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotLine {
    shot_index: u64,
    scramblers: Vec<u8>,
    outcome: String,
}

impl From<Snapshot> for SnapshotLine {
    fn from(s: Snapshot) -> Self {
        SnapshotLine {
            shot_index: s.shot_index,
            outcome: s.outcome_hex(),
            scramblers: s.scramblers.into_vec(),
        }
    }
}

impl TryFrom<SnapshotLine> for Snapshot {
    type Error = SimError;

    fn try_from(l: SnapshotLine) -> Result<Self, SimError> {
        if l.scramblers.is_empty() {
            return Err(SimError::InvalidDataset("snapshot without qubits".into()));
        }
        if let Some(bad) = l.scramblers.iter().find(|&&c| c as usize >= CLIFFORD_COUNT) {
            return Err(SimError::InvalidDataset(format!("scrambler index {bad}")));
        }
        let outcome = Snapshot::parse_hex(&l.outcome, l.scramblers.len())?;
        Ok(Snapshot {
            shot_index: l.shot_index,
            scramblers: SmallVec::from_vec(l.scramblers),
            outcome,
        })
    }
}

/// Which simulator a [`Sampler`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Tableau when the state and every block circuit are Clifford, else dense.
    #[default]
    Auto,
    Stabilizer,
    Dense,
}

#[derive(Clone, Debug)]
enum Engine {
    Tableau(Tableau),
    Dense(StateVector),
    Uniform,
}

/// Read-only sampling context shared by every shot of a dataset.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    engine: Engine,
    circuit: Vec<Gate>,
    scrambled: Vec<bool>,
}

impl Sampler {
    pub fn new(state: &QuantumState, spec: &ProtocolSpec) -> Result<Self, SimError> {
        Self::with_backend(state, spec, Backend::Auto)
    }

    pub fn with_backend(
        state: &QuantumState,
        spec: &ProtocolSpec,
        backend: Backend,
    ) -> Result<Self, SimError> {
        let n = spec.num_qubits();
        if state.num_qubits() != n {
            return Err(SimError::DimensionMismatch {
                state: state.num_qubits(),
                protocol: n,
            });
        }
        let mut circuit = Vec::new();
        let mut scrambled = vec![false; n];
        for (b, (block, family)) in spec.covering().blocks().iter().zip(spec.families()).enumerate() {
            circuit.extend(block_circuit(family).iter().map(|g| g.relabel(block)));
            for (&q, s) in block.iter().zip(spec.scrambled_in_block(b)) {
                scrambled[q] = s;
            }
        }
        let clifford = spec.is_clifford();
        let engine = match (state, backend) {
            (QuantumState::MaximallyMixed { .. }, _) => Engine::Uniform,
            (_, Backend::Stabilizer) if !clifford => return Err(SimError::NonClifford),
            (QuantumState::Stabilizer(s), Backend::Auto | Backend::Stabilizer) if clifford => {
                Engine::Tableau(s.tableau().clone())
            }
            (QuantumState::Dense(_), Backend::Stabilizer) => {
                return Err(SimError::InvalidState(
                    "dense states cannot run on the stabilizer backend".into(),
                ))
            }
            (s, _) => Engine::Dense(s.to_dense()?),
        };
        Ok(Sampler {
            n,
            engine,
            circuit,
            scrambled,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn backend_name(&self) -> &'static str {
        match self.engine {
            Engine::Tableau(_) => "stabilizer",
            Engine::Dense(_) => "dense",
            Engine::Uniform => "uniform",
        }
    }

    /// Draws scramblers in qubit order and then the readout, all from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, shot_index: u64, seed: u64) -> Snapshot {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scramblers: SmallVec<[u8; 32]> = self
            .scrambled
            .iter()
            .map(|&s| if s { rng.gen_range(0..CLIFFORD_COUNT as u8) } else { 0 })
            .collect();
        let mut outcome: SmallVec<[u64; 1]> = SmallVec::from_elem(0, self.n.div_ceil(64).max(1));
        match &self.engine {
            Engine::Uniform => {
                for q in 0..self.n {
                    if rng.gen::<bool>() {
                        outcome[q / 64] |= 1 << (q % 64);
                    }
                }
            }
            Engine::Tableau(t) => {
                let mut t = t.clone();
                for (q, &c) in scramblers.iter().enumerate() {
                    if c != 0 {
                        apply_to_tableau(&mut t, &Gate::Clifford(q, c)).expect("table Clifford");
                    }
                }
                for g in &self.circuit {
                    apply_to_tableau(&mut t, g).expect("Clifford circuit checked at construction");
                }
                for q in 0..self.n {
                    if t.measure(q, &mut rng) {
                        outcome[q / 64] |= 1 << (q % 64);
                    }
                }
            }
            Engine::Dense(v) => {
                let mut v = v.clone();
                for (q, &c) in scramblers.iter().enumerate() {
                    if c != 0 {
                        v.apply(&Gate::Clifford(q, c));
                    }
                }
                v.apply_all(&self.circuit);
                outcome[0] = v.sample_index(&mut rng) as u64;
            }
        }
        Snapshot {
            shot_index,
            scramblers,
            outcome,
        }
    }
}

/// A single snapshot with shot index 0.
pub fn sample_snapshot(
    state: &QuantumState,
    spec: &ProtocolSpec,
    shot_seed: u64,
) -> Result<Snapshot, SimError> {
    Ok(Sampler::new(state, spec)?.sample(0, shot_seed))
}

/// `shots` snapshots with shot `i` seeded by [`shot_seed`]`(master_seed, i)`,
/// sampled on `workers` threads. The result does not depend on `workers`.
pub fn sample_dataset(
    state: &QuantumState,
    spec: &ProtocolSpec,
    shots: u64,
    master_seed: u64,
    workers: usize,
) -> Result<SnapshotDataset, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let sampler = Sampler::new(state, spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let snapshots: Vec<Snapshot> = pool.install(|| {
        (0..shots)
            .into_par_iter()
            .map(|i| sampler.sample(i, shot_seed(master_seed, i)))
            .collect()
    });
    let header = DatasetHeader::new(spec.clone(), master_seed);
    SnapshotDataset::new(header, snapshots)
}

/// Exact probability of `outcome` (bit `q` for qubit `q`) after running
/// `circuit` on `state`.
pub fn born_oracle(state: &StateVector, circuit: &[Gate], outcome: &[bool]) -> Result<f64, SimError> {
    let n = state.num_qubits();
    guard(n, BORN_ORACLE_MAX_QUBITS)?;
    if outcome.len() != n {
        return Err(SimError::DimensionMismatch {
            state: n,
            protocol: outcome.len(),
        });
    }
    let mut v = state.clone();
    v.apply_all(circuit);
    let index = outcome
        .iter()
        .enumerate()
        .fold(0usize, |acc, (q, &b)| acc | (b as usize) << q);
    Ok(v.probability(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{BasisFamily, ScrambleMode};
    use crate::operators::{Boundary, Covering, Parity};
    use crate::simulator::state::{prepare_preset, StatePreset};

    fn bell_spec(n: usize, scramble: ScrambleMode) -> ProtocolSpec {
        ProtocolSpec::bell(Covering::dimer_chain(n, Parity::Even, Boundary::Open).unwrap(), scramble).unwrap()
    }

    /// Outcome distribution averaged over every scrambler assignment.
    fn exact_distribution(state: &StateVector, spec: &ProtocolSpec) -> Vec<f64> {
        let n = state.num_qubits();
        let sampler = Sampler::new(&QuantumState::Dense(state.clone()), spec).unwrap();
        let choices: Vec<usize> = sampler
            .scrambled
            .iter()
            .map(|&s| if s { CLIFFORD_COUNT } else { 1 })
            .collect();
        let total: usize = choices.iter().product();
        let mut dist = vec![0.0; 1 << n];
        for mut t in 0..total {
            let mut circuit = Vec::new();
            for (q, &k) in choices.iter().enumerate() {
                circuit.push(Gate::Clifford(q, (t % k) as u8));
                t /= k;
            }
            circuit.extend_from_slice(&sampler.circuit);
            for (b, d) in dist.iter_mut().enumerate() {
                let bits: Vec<bool> = (0..n).map(|q| b >> q & 1 == 1).collect();
                *d += born_oracle(state, &circuit, &bits).unwrap();
            }
        }
        dist.iter().map(|d| d / total as f64).collect()
    }

    fn frequencies(state: &QuantumState, spec: &ProtocolSpec, backend: Backend, shots: u64, seed: u64) -> Vec<u64> {
        let sampler = Sampler::with_backend(state, spec, backend).unwrap();
        let mut counts = vec![0u64; 1 << spec.num_qubits()];
        for i in 0..shots {
            counts[sampler.sample(i, shot_seed(seed, i)).outcome[0] as usize] += 1;
        }
        counts
    }

    fn assert_within_3_sigma(counts: &[u64], probs: &[f64], shots: u64) {
        for (b, (&c, &p)) in counts.iter().zip(probs).enumerate() {
            let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
            let dev = (c as f64 - shots as f64 * p).abs();
            assert!(dev <= 3.0 * sigma.max(1e-9), "outcome {b}: {c} vs {}", shots as f64 * p);
        }
    }

    #[test]
    fn sampler_matches_born_oracle() {
        let shots = 100_000;
        let covering2 = Covering::new(2, vec![vec![0, 1]]).unwrap();
        let cases = vec![
            (StatePreset::RandomDense, ProtocolSpec::pauli(2)),
            (StatePreset::RandomDense, bell_spec(2, ScrambleMode::AllQubits)),
            (StatePreset::RandomStabilizer, bell_spec(2, ScrambleMode::OnePerBlock)),
            (StatePreset::RandomDense, ProtocolSpec::tunable(covering2, 1.3).unwrap()),
            (StatePreset::Ghz, ProtocolSpec::ghz(Covering::new(3, vec![vec![0, 1, 2]]).unwrap()).unwrap()),
        ];
        for (k, (preset, spec)) in cases.into_iter().enumerate() {
            let state = prepare_preset(preset, spec.num_qubits(), 5 + k as u64).unwrap();
            let probs = exact_distribution(&state.to_dense().unwrap(), &spec);
            let counts = frequencies(&state, &spec, Backend::Auto, shots, 100 + k as u64);
            assert_within_3_sigma(&counts, &probs, shots);
        }
    }

    #[test]
    fn bell_state_with_identity_scramblers_is_deterministic() {
        // the measured pair is stabilized by XZ and ZX, i.e. the two-qubit cluster state
        let state = prepare_preset(StatePreset::Cluster1d, 2, 0).unwrap().to_dense().unwrap();
        let circuit = block_circuit(&BasisFamily::Bell);
        let probs: Vec<f64> = (0..4)
            .map(|b| born_oracle(&state, &circuit, &[b & 1 == 1, b & 2 == 2]).unwrap())
            .collect();
        assert_eq!(probs.iter().filter(|&&p| p > 1e-12).count(), 1);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_oracle_basics() {
        let zero = StateVector::zero(3).unwrap();
        assert_eq!(born_oracle(&zero, &[], &[false; 3]).unwrap(), 1.0);
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply(&Gate::H(0));
        assert!((born_oracle(&plus, &[Gate::H(0)], &[false]).unwrap() - 1.0).abs() < 1e-12);
        let big = StateVector::zero(13).unwrap();
        assert!(matches!(
            born_oracle(&big, &[], &[false; 13]),
            Err(SimError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn stabilizer_and_dense_backends_agree() {
        let shots = 40_000;
        for (n, spec) in [
            (4, bell_spec(4, ScrambleMode::AllQubits)),
            (6, ProtocolSpec::ghz(Covering::n_mer_chain(6, 3, 0).unwrap()).unwrap()),
        ] {
            let state = prepare_preset(StatePreset::RandomStabilizer, n, 21).unwrap();
            let a = frequencies(&state, &spec, Backend::Stabilizer, shots, 1);
            let b = frequencies(&state, &spec, Backend::Dense, shots, 2);
            // two-sample Kolmogorov–Smirnov on the outcome index
            let (mut ca, mut cb, mut d) = (0.0, 0.0, 0.0f64);
            for (x, y) in a.iter().zip(&b) {
                ca += *x as f64 / shots as f64;
                cb += *y as f64 / shots as f64;
                d = d.max((ca - cb).abs());
            }
            let critical = 1.95 * (2.0 / shots as f64).sqrt();
            assert!(d < critical, "N={n}: KS distance {d} vs {critical}");
        }
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let n = 4;
        let shots = 160_000u64;
        let state = prepare_preset(StatePreset::MaximallyMixed, n, 0).unwrap();
        let counts = frequencies(&state, &bell_spec(n, ScrambleMode::AllQubits), Backend::Auto, shots, 9);
        let expected = shots as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 15 degrees of freedom
        assert!(chi2 < 37.70, "chi2 = {chi2}");
    }

    #[test]
    fn one_per_block_pins_second_qubit() {
        let state = prepare_preset(StatePreset::ProductPlus, 4, 0).unwrap();
        let sampler = Sampler::new(&state, &bell_spec(4, ScrambleMode::OnePerBlock)).unwrap();
        for i in 0..200 {
            let s = sampler.sample(i, shot_seed(3, i));
            assert_eq!(s.scramblers[1], 0);
            assert_eq!(s.scramblers[3], 0);
        }
    }

    #[test]
    fn backend_dispatch() {
        let stab = prepare_preset(StatePreset::Ghz, 2, 0).unwrap();
        let c = Covering::new(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(Sampler::new(&stab, &bell_spec(2, ScrambleMode::AllQubits)).unwrap().backend_name(), "stabilizer");
        let tunable = ProtocolSpec::tunable(c, 1.0).unwrap();
        assert_eq!(Sampler::new(&stab, &tunable).unwrap().backend_name(), "dense");
        assert!(matches!(
            Sampler::with_backend(&stab, &tunable, Backend::Stabilizer),
            Err(SimError::NonClifford)
        ));
        assert!(matches!(
            Sampler::new(&stab, &ProtocolSpec::pauli(3)),
            Err(SimError::DimensionMismatch { .. })
        ));
        let big = prepare_preset(StatePreset::Ghz, 26, 0).unwrap();
        let cover = Covering::dimer_chain(26, Parity::Even, Boundary::Open).unwrap();
        let spec = ProtocolSpec::tunable(cover, 1.0).unwrap();
        assert!(matches!(Sampler::new(&big, &spec), Err(SimError::TooManyQubits { .. })));
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let state = prepare_preset(StatePreset::Cluster1d, 6, 0).unwrap();
        let spec = bell_spec(6, ScrambleMode::AllQubits);
        let a = sample_dataset(&state, &spec, 1000, 42, 1).unwrap();
        let b = sample_dataset(&state, &spec, 1000, 42, 8).unwrap();
        assert_eq!(a.to_jsonl_string().unwrap(), b.to_jsonl_string().unwrap());
        assert_eq!(sample_snapshot(&state, &spec, 77).unwrap(), sample_snapshot(&state, &spec, 77).unwrap());
        assert!(matches!(sample_dataset(&state, &spec, 0, 1, 1), Err(SimError::ZeroShots)));
    }

    #[test]
    fn hex_layout() {
        let s = Snapshot {
            shot_index: 0,
            scramblers: SmallVec::from_vec(vec![0; 6]),
            outcome: SmallVec::from_vec(vec![0b100011]),
        };
        assert_eq!(s.outcome_hex(), "23");
        assert_eq!(Snapshot::parse_hex("23", 6).unwrap()[0], 0b100011);
        assert!(Snapshot::parse_hex("43", 6).is_err());
        assert!(Snapshot::parse_hex("023", 6).is_err());
    }

    #[test]
    fn shot_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| shot_seed(0, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(shot_seed(1, 0), shot_seed(0, 1));
    }
}
