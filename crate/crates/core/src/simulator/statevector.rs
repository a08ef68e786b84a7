use rand::Rng;

use super::circuit::Gate;
use super::SimError;
use crate::clifford;
use crate::dense::{CMatrix, C64, ONE, ZERO};
use crate::operators::PauliString;

/// Largest register the dense backend will allocate.
pub const DENSE_MAX_QUBITS: usize = 24;

/// Amplitudes over `2^n` basis states; qubit `q` is bit `q` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self, SimError> {
        guard(n, DENSE_MAX_QUBITS)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, SimError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(SimError::InvalidState(format!("{} amplitudes", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        guard(n, DENSE_MAX_QUBITS)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimError::InvalidState(format!("norm {norm}")));
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    fn apply_1q(&mut self, q: usize, m: &CMatrix) {
        let bit = 1usize << q;
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (u, v) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a * u + b * v;
                self.amps[i | bit] = c * u + d * v;
            }
        }
    }

    fn apply_phase_on_11(&mut self, a: usize, b: usize, phase: C64) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp *= phase;
            }
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::H(q) => self.apply_1q(q, &clifford::hadamard()),
            Gate::S(q) => self.apply_1q(q, &clifford::phase_s()),
            Gate::Clifford(q, c) => self.apply_1q(q, clifford::clifford(c).matrix()),
            Gate::Cz(a, b) => self.apply_phase_on_11(a, b, -ONE),
            Gate::CPhase(a, b, phi) => self.apply_phase_on_11(a, b, C64::from_polar(1.0, phi)),
            Gate::Cx(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
        }
    }

    pub fn apply_all(&mut self, gates: &[Gate]) {
        for g in gates {
            self.apply(g);
        }
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Draws a basis index from the Born distribution.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if u < acc {
                return i;
            }
        }
        last_nonzero
    }

    /// `⟨ψ|P|ψ⟩`, using `P|i⟩ = sign · i^{#Y} · (−1)^{|z ∧ i|} |i ⊕ x⟩`.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        assert_eq!(p.num_qubits(), self.n);
        let xmask = p.x_words().first().copied().unwrap_or(0) as usize;
        let zmask = p.z_words().first().copied().unwrap_or(0) as usize;
        let y_count = (xmask & zmask).count_ones();
        let y_phase = match y_count % 4 {
            0 => ONE,
            1 => crate::dense::I,
            2 => -ONE,
            _ => -crate::dense::I,
        };
        let mut acc = ZERO;
        for (i, amp) in self.amps.iter().enumerate() {
            let parity = if (zmask & i).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.amps[i ^ xmask].conj() * amp * parity;
        }
        (acc * y_phase).re * p.sign()
    }
}

pub(crate) fn guard(n: usize, limit: usize) -> Result<(), SimError> {
    if n > limit {
        return Err(SimError::TooManyQubits { n, limit });
    }
    Ok(())
}
