//! Single-shot estimator `ô = λ_P^{-1} Π_blocks ⟨b| V C P C† V† |b⟩`.
//!
//! The scramblers `C` are table Cliffords, so `C P C†` is a signed Pauli `Q`
//! on each block. A block therefore only needs `⟨b| V Q V† |b⟩` for its `4^n`
//! Paulis `Q` and `2^n` outcomes `b`, which is tabulated once per operator.

use super::EstimationError;
use crate::channels::{BasisFamily, ChannelEigenvalues, ProtocolSpec, ZERO_THRESHOLD};
use crate::clifford::{conjugate_site, CLIFFORD_COUNT};
use crate::dense::CMatrix;
use crate::operators::{Pauli, PauliString};
use crate::simulator::circuit::{block_circuit, circuit_unitary, conjugate_pauli, Gate};
use crate::simulator::Snapshot;

/// Blocks up to this size are tabulated with dense matrices.
pub const DENSE_BLOCK_MAX: usize = 3;
/// Clifford blocks up to this size are tabulated symplectically; larger ones
/// are evaluated per shot.
const TABLE_BLOCK_MAX: usize = 6;

/// How block matrix elements are computed for Clifford blocks that the dense
/// path could also handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BlockPath {
    #[default]
    Dense,
    Symplectic,
}

fn code(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

fn letters_of(q: usize, n: usize) -> Vec<Pauli> {
    (0..n).map(|j| Pauli::ALL[(q >> (2 * j)) & 3]).collect()
}

#[derive(Clone, Debug)]
enum BlockKind {
    /// `table[q · 2^n + b] = ⟨b| V Q_q V† |b⟩`.
    Table(Vec<f64>),
    OnTheFly(Vec<Gate>),
}

#[derive(Clone, Debug)]
struct BlockEval {
    sites: Vec<usize>,
    /// Per site and scrambler: image letter code and sign flip.
    images: Vec<[(u8, bool); CLIFFORD_COUNT]>,
    kind: BlockKind,
}

impl BlockEval {
    fn element(&self, snap: &Snapshot) -> f64 {
        let mut q = 0usize;
        let mut negative = false;
        for (j, (&site, images)) in self.sites.iter().zip(&self.images).enumerate() {
            let (c, neg) = images[snap.scramblers[site] as usize];
            q |= (c as usize) << (2 * j);
            negative ^= neg;
        }
        let b = snap.local_outcome(&self.sites);
        let n = self.sites.len();
        let value = match &self.kind {
            BlockKind::Table(t) => t[(q << n) | b],
            BlockKind::OnTheFly(circuit) => symplectic_element(&letters_of(q, n), circuit, b),
        };
        if negative {
            -value
        } else {
            value
        }
    }
}

fn symplectic_element(letters: &[Pauli], circuit: &[Gate], b: usize) -> f64 {
    let mut p = PauliString::from_letters(letters);
    conjugate_pauli(&mut p, circuit).expect("Clifford block circuit");
    if (0..letters.len()).any(|j| p.x_bit(j)) {
        return 0.0;
    }
    let parity = (0..letters.len()).filter(|&j| p.z_bit(j) && b >> j & 1 == 1).count();
    if parity % 2 == 1 {
        -p.sign()
    } else {
        p.sign()
    }
}

fn dense_table(family: &BasisFamily) -> Vec<f64> {
    let n = family.block_size();
    let v = circuit_unitary(&block_circuit(family), n);
    let mut table = Vec::with_capacity(1 << (3 * n));
    for q in 0..1usize << (2 * n) {
        let m = v.conjugate(&CMatrix::pauli_string(&letters_of(q, n)));
        table.extend(m.diagonal().iter().map(|d| d.re));
    }
    if family.is_clifford() {
        // Clifford elements are exactly 0 or ±1
        for t in &mut table {
            *t = t.round();
        }
    }
    table
}

fn symplectic_table(family: &BasisFamily) -> Vec<f64> {
    let n = family.block_size();
    let circuit = block_circuit(family);
    let mut table = Vec::with_capacity(1 << (3 * n));
    for q in 0..1usize << (2 * n) {
        let letters = letters_of(q, n);
        table.extend((0..1usize << n).map(|b| symplectic_element(&letters, &circuit, b)));
    }
    table
}

fn site_images(letter: Pauli) -> [(u8, bool); CLIFFORD_COUNT] {
    let mut out = [(0u8, false); CLIFFORD_COUNT];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut p = PauliString::from_letters(&[letter]);
        conjugate_site(&mut p, 0, c as u8);
        *slot = (code(p.letter(0)) as u8, p.is_negative());
    }
    out
}

/// Precomputed per-operator evaluator shared read-only across shots.
#[derive(Clone, Debug)]
pub struct ShotEvaluator {
    num_qubits: usize,
    scale: f64,
    blocks: Vec<BlockEval>,
}

impl ShotEvaluator {
    pub fn new(
        p: &PauliString,
        spec: &ProtocolSpec,
        eigs: &ChannelEigenvalues,
    ) -> Result<Self, EstimationError> {
        Self::with_path(p, spec, eigs, BlockPath::Dense)
    }

    pub fn with_path(
        p: &PauliString,
        spec: &ProtocolSpec,
        eigs: &ChannelEigenvalues,
        path: BlockPath,
    ) -> Result<Self, EstimationError> {
        let n = spec.num_qubits();
        if p.num_qubits() != n {
            return Err(EstimationError::DimensionMismatch {
                operator: p.num_qubits(),
                protocol: n,
            });
        }
        check_eigs(spec, eigs)?;
        let patterns = spec.covering().patterns(p).map_err(crate::channels::ChannelError::from)?;
        let mut scale = p.sign();
        let mut blocks = Vec::new();
        for (b, (&pattern, block)) in patterns.iter().zip(spec.covering().blocks()).enumerate() {
            if pattern == 0 {
                continue;
            }
            let lambda = eigs.blocks()[b].get(pattern);
            if lambda < ZERO_THRESHOLD {
                return Err(EstimationError::Unlearnable {
                    operator: p.to_string(),
                });
            }
            scale /= lambda;
            let family = &spec.families()[b];
            let size = block.len();
            let kind = if size <= DENSE_BLOCK_MAX && !(path == BlockPath::Symplectic && family.is_clifford()) {
                BlockKind::Table(dense_table(family))
            } else if size <= TABLE_BLOCK_MAX {
                BlockKind::Table(symplectic_table(family))
            } else {
                BlockKind::OnTheFly(block_circuit(family))
            };
            blocks.push(BlockEval {
                sites: block.clone(),
                images: block.iter().map(|&q| site_images(p.letter(q))).collect(),
                kind,
            });
        }
        Ok(ShotEvaluator {
            num_qubits: n,
            scale,
            blocks,
        })
    }

    /// `sign(P) · Π λ^{-1}` over the blocks the support touches.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Product of block matrix elements, without the eigenvalue factor.
    pub fn matrix_element(&self, snap: &Snapshot) -> f64 {
        debug_assert_eq!(snap.num_qubits(), self.num_qubits);
        let mut acc = 1.0;
        for b in &self.blocks {
            acc *= b.element(snap);
            if acc == 0.0 {
                break;
            }
        }
        acc
    }

    pub fn value(&self, snap: &Snapshot) -> f64 {
        self.scale * self.matrix_element(snap)
    }

    pub fn hit(&self, snap: &Snapshot) -> bool {
        self.matrix_element(snap).abs() > ZERO_THRESHOLD
    }
}

pub(crate) fn check_eigs(spec: &ProtocolSpec, eigs: &ChannelEigenvalues) -> Result<(), EstimationError> {
    let blocks = spec.covering().blocks();
    if eigs.blocks().len() != blocks.len()
        || eigs.blocks().iter().zip(blocks).any(|(e, b)| e.size() != b.len())
    {
        return Err(EstimationError::EigenvalueShape);
    }
    Ok(())
}

/// Single-shot estimate of `⟨P⟩` from one snapshot.
pub fn shot_value(
    p: &PauliString,
    snap: &Snapshot,
    spec: &ProtocolSpec,
    eigs: &ChannelEigenvalues,
) -> Result<f64, EstimationError> {
    if snap.num_qubits() != spec.num_qubits() {
        return Err(EstimationError::DimensionMismatch {
            operator: snap.num_qubits(),
            protocol: spec.num_qubits(),
        });
    }
    Ok(ShotEvaluator::new(p, spec, eigs)?.value(snap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ScrambleMode;
    use crate::operators::{Boundary, Covering, Parity};
    use crate::simulator::{prepare_preset, shot_seed, Sampler, StatePreset};
    use proptest::prelude::*;
    use smallvec::SmallVec;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn snap(scramblers: &[u8], outcome: u64) -> Snapshot {
        Snapshot {
            shot_index: 0,
            scramblers: SmallVec::from_slice(scramblers),
            outcome: SmallVec::from_elem(outcome, 1),
        }
    }

    fn bell(n: usize) -> ProtocolSpec {
        ProtocolSpec::bell(Covering::dimer_chain(n, Parity::Even, Boundary::Open).unwrap(), ScrambleMode::AllQubits).unwrap()
    }

    /// Direct dense evaluation of `⟨b| V C P C† V† |b⟩` for a whole block.
    fn brute_element(family: &BasisFamily, letters: &[Pauli], scramblers: &[u8], b: usize) -> f64 {
        let n = letters.len();
        let mut gates: Vec<Gate> = scramblers.iter().enumerate().map(|(q, &c)| Gate::Clifford(q, c)).collect();
        gates.extend(block_circuit(family));
        let u = circuit_unitary(&gates, n);
        let m = u.conjugate(&CMatrix::pauli_string(letters));
        m[(b, b)].re
    }

    #[test]
    fn dense_and_symplectic_tables_agree() {
        for family in [BasisFamily::PauliLocal, BasisFamily::Bell, BasisFamily::Ghz { n: 3 }] {
            assert_eq!(dense_table(&family), symplectic_table(&family), "{family:?}");
        }
        let t = symplectic_table(&BasisFamily::Ghz { n: 4 });
        let dense = dense_table(&BasisFamily::Ghz { n: 4 });
        for (a, b) in t.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluator_matches_brute_force() {
        let families = [
            BasisFamily::Bell,
            BasisFamily::TunablePhase { phi: 1.1 },
            BasisFamily::Ghz { n: 3 },
        ];
        let mut rng_state = 12345u64;
        for family in families {
            let n = family.block_size();
            let spec = ProtocolSpec::new(Covering::new(n, vec![(0..n).collect()]).unwrap(), vec![family], ScrambleMode::AllQubits).unwrap();
            let eigs = spec.eigenvalues().unwrap();
            for _ in 0..40 {
                rng_state = shot_seed(rng_state, 1);
                let letters: Vec<Pauli> = (0..n).map(|j| Pauli::NON_IDENTITY[(rng_state >> (2 * j)) as usize % 3]).collect();
                let scr: Vec<u8> = (0..n).map(|j| ((rng_state >> (10 + 5 * j)) % 24) as u8).collect();
                let b = (rng_state >> 40) as usize % (1 << n);
                let op = PauliString::from_letters(&letters);
                let ev = ShotEvaluator::new(&op, &spec, &eigs).unwrap();
                let got = ev.matrix_element(&snap(&scr, b as u64));
                let want = brute_element(&family, &letters, &scr, b);
                assert!((got - want).abs() < 1e-12, "{family:?} {op} {scr:?} {b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn bell_zz_values() {
        let spec = bell(2);
        let eigs = spec.eigenvalues().unwrap();
        let ev = ShotEvaluator::new(&p("ZZ"), &spec, &eigs).unwrap();
        for c0 in 0..24u8 {
            for c1 in 0..24u8 {
                for b in 0..4 {
                    let v = ev.value(&snap(&[c0, c1], b));
                    assert!([0.0, 3.0, -3.0].iter().any(|t| (v - t).abs() < 1e-12), "{v}");
                }
            }
        }
    }

    #[test]
    fn identity_is_one_and_incompatible_is_unlearnable() {
        let spec = bell(2);
        let eigs = spec.eigenvalues().unwrap();
        assert_eq!(shot_value(&p("II"), &snap(&[5, 7], 2), &spec, &eigs).unwrap(), 1.0);
        assert!(matches!(
            ShotEvaluator::new(&p("XI"), &spec, &eigs),
            Err(EstimationError::Unlearnable { .. })
        ));
        assert!(matches!(
            ShotEvaluator::new(&p("XII"), &spec, &eigs),
            Err(EstimationError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_ghz_block_on_the_fly() {
        let spec = ProtocolSpec::ghz(Covering::new(8, vec![(0..8).collect()]).unwrap()).unwrap();
        let eigs = spec.eigenvalues().unwrap();
        let state = prepare_preset(StatePreset::Ghz, 8, 0).unwrap();
        let sampler = Sampler::new(&state, &spec).unwrap();
        let ev = ShotEvaluator::new(&p("ZZIIIIII"), &spec, &eigs).unwrap();
        let forced = ShotEvaluator::with_path(&p("ZZIIIIII"), &spec, &eigs, BlockPath::Symplectic).unwrap();
        for i in 0..200 {
            let s = sampler.sample(i, shot_seed(1, i));
            assert_eq!(ev.value(&s), forced.value(&s));
        }
    }

    proptest! {
        #[test]
        fn shot_values_factorize(seed in any::<u64>(), shot in any::<u64>()) {
            // disjoint compatible operators on a 6-qubit Bell chain
            let spec = bell(6);
            let eigs = spec.eigenvalues().unwrap();
            let state = prepare_preset(StatePreset::RandomStabilizer, 6, seed % 50).unwrap();
            let s = Sampler::new(&state, &spec).unwrap().sample(0, shot);
            let a = p("XYIIII");
            let b = p("IIZZXZ");
            let prod = a.multiply(&b).unwrap();
            let va = ShotEvaluator::new(&a, &spec, &eigs).unwrap().value(&s);
            let vb = ShotEvaluator::new(&b, &spec, &eigs).unwrap().value(&s);
            let vp = ShotEvaluator::new(&prod, &spec, &eigs).unwrap().value(&s);
            prop_assert!((va * vb - vp).abs() < 1e-9);
        }
    }
}
