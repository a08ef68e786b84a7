//! Gate-level circuits: block basis changes and state preparations.

use serde::{Deserialize, Serialize};

use crate::channels::BasisFamily;
use crate::clifford::{self, Gate1};
use crate::dense::{CMatrix, C64, ONE, ZERO};
use crate::operators::PauliString;

use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    /// Element of the canonical single-qubit Clifford table.
    Clifford(usize, u8),
    Cz(usize, usize),
    /// Control, target.
    Cx(usize, usize),
    /// `diag(1, 1, 1, e^{iφ})` on the two qubits.
    CPhase(usize, usize, f64),
}

impl Gate {
    pub fn is_clifford(&self) -> bool {
        match *self {
            Gate::CPhase(_, _, phi) => phase_as_clifford(phi).is_some(),
            _ => true,
        }
    }

    /// Same gate acting on `map[q]` instead of `q`.
    pub fn relabel(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(map[q]),
            Gate::S(q) => Gate::S(map[q]),
            Gate::Clifford(q, c) => Gate::Clifford(map[q], c),
            Gate::Cz(a, b) => Gate::Cz(map[a], map[b]),
            Gate::Cx(a, b) => Gate::Cx(map[a], map[b]),
            Gate::CPhase(a, b, phi) => Gate::CPhase(map[a], map[b], phi),
        }
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Clifford(q, _) => q,
            Gate::Cz(a, b) | Gate::Cx(a, b) | Gate::CPhase(a, b, _) => a.max(b),
        }
    }
}

/// `Some(false)` for φ = 0 (identity), `Some(true)` for φ = π (CZ).
pub(crate) fn phase_as_clifford(phi: f64) -> Option<bool> {
    const TOL: f64 = 1e-12;
    if phi.abs() < TOL {
        Some(false)
    } else if (phi - std::f64::consts::PI).abs() < TOL {
        Some(true)
    } else {
        None
    }
}

/// Basis-change circuit applied before computational readout, on local
/// qubits `0..block_size`.
///
/// * Pauli: nothing.
/// * Bell: CZ then H on both qubits.
/// * Tunable: CPhase(φ) then H on both qubits.
/// * GHZ-n: the inverse of the GHZ preparation `H(0), CX(0,1), ..., CX(n-2,n-1)`.
pub fn block_circuit(family: &BasisFamily) -> Vec<Gate> {
    match *family {
        BasisFamily::PauliLocal => Vec::new(),
        BasisFamily::Bell => vec![Gate::Cz(0, 1), Gate::H(0), Gate::H(1)],
        BasisFamily::TunablePhase { phi } => vec![Gate::CPhase(0, 1, phi), Gate::H(0), Gate::H(1)],
        BasisFamily::Ghz { n } => {
            let mut gates: Vec<Gate> = (0..n.saturating_sub(1)).rev().map(|q| Gate::Cx(q, q + 1)).collect();
            gates.push(Gate::H(0));
            gates
        }
    }
}

/// Dense unitary of a circuit on `n` local qubits (gates applied in order).
pub fn circuit_unitary(gates: &[Gate], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut u = CMatrix::identity(dim);
    for g in gates {
        assert!(g.max_qubit() < n, "gate outside the circuit width");
        let step = gate_unitary(g, n);
        u = &step * &u;
    }
    u
}

fn embed_single(m: &CMatrix, q: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for j in 0..n {
        let factor = if j == q { m.clone() } else { CMatrix::identity(2) };
        out = out.kron_high(&factor);
    }
    out
}

fn gate_unitary(g: &Gate, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let diag = |f: &dyn Fn(usize) -> C64| {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = f(i);
        }
        m
    };
    match *g {
        Gate::H(q) => embed_single(&clifford::hadamard(), q, n),
        Gate::S(q) => embed_single(&clifford::phase_s(), q, n),
        Gate::Clifford(q, c) => embed_single(clifford::clifford(c).matrix(), q, n),
        Gate::Cz(a, b) => diag(&|i| if (i >> a) & (i >> b) & 1 == 1 { -ONE } else { ONE }),
        Gate::CPhase(a, b, phi) => diag(&|i| {
            if (i >> a) & (i >> b) & 1 == 1 {
                C64::from_polar(1.0, phi)
            } else {
                ONE
            }
        }),
        Gate::Cx(c, t) => {
            let mut m = CMatrix::zeros(dim);
            for i in 0..dim {
                let j = if (i >> c) & 1 == 1 { i ^ (1 << t) } else { i };
                m[(j, i)] = ONE;
            }
            m
        }
    }
}

/// Conjugates a Pauli string through a Clifford circuit: `P -> U P U†`.
pub fn conjugate_pauli(p: &mut PauliString, gates: &[Gate]) -> Result<(), SimError> {
    for g in gates {
        match *g {
            Gate::H(q) => p.conj_h(q),
            Gate::S(q) => p.conj_s(q),
            Gate::Clifford(q, c) => clifford::conjugate_site(p, q, c),
            Gate::Cz(a, b) => p.conj_cz(a, b),
            Gate::Cx(a, b) => p.conj_cx(a, b),
            Gate::CPhase(a, b, phi) => match phase_as_clifford(phi) {
                Some(true) => p.conj_cz(a, b),
                Some(false) => {}
                None => return Err(SimError::NonClifford),
            },
        }
    }
    Ok(())
}

/// Expands table Cliffords into their `H`/`S` words.
pub(crate) fn clifford_word(q: usize, index: u8) -> impl Iterator<Item = Gate> {
    clifford::clifford(index).word().iter().map(move |g| match g {
        Gate1::H => Gate::H(q),
        Gate1::S => Gate::S(q),
    })
}

/// Basis states `V† |b⟩` measured by a block circuit `V`, indexed by outcome `b`.
pub fn measured_basis(family: &BasisFamily) -> Vec<Vec<C64>> {
    let n = family.block_size();
    let v = circuit_unitary(&block_circuit(family), n);
    let vd = v.adjoint();
    (0..1usize << n)
        .map(|b| {
            let mut e = vec![ZERO; 1 << n];
            e[b] = ONE;
            vd.apply(&e)
        })
        .collect()
}

/// Generators of the stabilizer group measured by a Clifford block circuit:
/// the pull-backs `V† Z_j V` of the single-qubit readouts.
pub fn measured_stabilizers(family: &BasisFamily) -> Result<Vec<PauliString>, SimError> {
    let n = family.block_size();
    let gates = block_circuit(family);
    let inverse = invert_clifford(&gates)?;
    (0..n)
        .map(|j| {
            let mut z = PauliString::identity(n);
            z.set(j, crate::operators::Pauli::Z);
            conjugate_pauli(&mut z, &inverse)?;
            Ok(z)
        })
        .collect()
}

/// Inverse of a Clifford circuit built from self-inverse gates and S.
fn invert_clifford(gates: &[Gate]) -> Result<Vec<Gate>, SimError> {
    let mut out = Vec::new();
    for g in gates.iter().rev() {
        match *g {
            Gate::S(q) => out.extend([Gate::S(q); 3]),
            Gate::Clifford(..) => return Err(SimError::NonClifford),
            Gate::CPhase(a, b, phi) => match phase_as_clifford(phi) {
                Some(true) => out.push(Gate::Cz(a, b)),
                Some(false) => {}
                None => return Err(SimError::NonClifford),
            },
            other => out.push(other),
        }
    }
    Ok(out)
}
