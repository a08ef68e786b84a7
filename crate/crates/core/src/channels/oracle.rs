//! Brute-force reference values by dense linear algebra.
//!
//! [`oracle_block_eig`] averages `2^{-n} Σ_b ⟨b| U P U† |b⟩²` over every
//! assignment of table Cliffords to the scrambled qubits of a block. It never
//! touches the analytic formulas, which is what makes it useful as a check.

use std::f64::consts::{LN_2, PI};

use super::eigen::EntanglementFeature;
use super::ChannelError;
use crate::clifford::cliffords;
use crate::dense::{inner, subsystem_purity, CMatrix, C64, ONE, ZERO};
use crate::operators::Pauli;
use crate::simulator::circuit::{circuit_unitary, Gate};

const ORTHONORMAL_TOL: f64 = 1e-10;

fn check_basis(basis: &[Vec<C64>]) -> Result<usize, ChannelError> {
    let dim = basis.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(ChannelError::InvalidBasis(format!("{dim} states")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > 3 {
        return Err(ChannelError::OracleTooLarge(n));
    }
    for (i, a) in basis.iter().enumerate() {
        if a.len() != dim {
            return Err(ChannelError::InvalidBasis(format!(
                "state {i} has {} amplitudes",
                a.len()
            )));
        }
        for (j, b) in basis.iter().enumerate().take(i + 1) {
            let expected = if i == j { ONE } else { ZERO };
            if (inner(a, b) - expected).norm() > ORTHONORMAL_TOL {
                return Err(ChannelError::InvalidBasis(format!(
                    "states {i} and {j} are not orthonormal"
                )));
            }
        }
    }
    Ok(n)
}

/// Channel eigenvalue of a block for a Pauli with the given letters, averaged
/// over table Cliffords on the sites flagged in `scrambled`.
pub fn oracle_block_eig_letters(
    basis: &[Vec<C64>],
    letters: &[Pauli],
    scrambled: &[bool],
) -> Result<f64, ChannelError> {
    let n = check_basis(basis)?;
    if letters.len() != n || scrambled.len() != n {
        return Err(ChannelError::InvalidBasis(format!(
            "{} letters and {} scramble flags for {n} sites",
            letters.len(),
            scrambled.len()
        )));
    }
    // conjugated single-site operators c σ c† for every choice per site
    let choices: Vec<Vec<CMatrix>> = (0..n)
        .map(|j| {
            let sigma = CMatrix::pauli(letters[j]);
            if scrambled[j] {
                cliffords().iter().map(|c| c.matrix().conjugate(&sigma)).collect()
            } else {
                vec![sigma]
            }
        })
        .collect();
    let total: usize = choices.iter().map(Vec::len).product();
    let dim = 1usize << n;
    let mut acc = 0.0;
    for mut t in 0..total {
        let mut op = CMatrix::identity(1);
        for site in &choices {
            let k = t % site.len();
            t /= site.len();
            op = op.kron_high(&site[k]);
        }
        let mut shot = 0.0;
        for b in basis {
            shot += op.expectation(b).norm_sqr();
        }
        acc += shot / dim as f64;
    }
    Ok(acc / total as f64)
}

/// Channel eigenvalue for a site pattern, realized with `Z` on every
/// non-identity site and all sites scrambled.
pub fn oracle_block_eig(basis: &[Vec<C64>], pattern: u32) -> Result<f64, ChannelError> {
    let n = check_basis(basis)?;
    let letters: Vec<Pauli> = (0..n)
        .map(|j| if pattern >> j & 1 == 1 { Pauli::Z } else { Pauli::I })
        .collect();
    oracle_block_eig_letters(basis, &letters, &vec![true; n])
}

pub fn computational_basis(n: usize) -> Vec<Vec<C64>> {
    let dim = 1usize << n;
    (0..dim)
        .map(|b| {
            let mut v = vec![ZERO; dim];
            v[b] = ONE;
            v
        })
        .collect()
}

/// `|Φ^α⟩ = (σ^α ⊗ I)|Φ⁰⟩` with `|Φ⁰⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_basis() -> Vec<Vec<C64>> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phi0 = vec![h, ZERO, ZERO, h];
    Pauli::ALL
        .iter()
        .map(|&a| CMatrix::pauli_string(&[a, Pauli::I]).apply(&phi0))
        .collect()
}

/// The `2^n` states `(|x⟩ ± |x̄⟩)/√2` stabilized by `±X^{⊗n}` and `±Z_j Z_{j+1}`.
pub fn ghz_basis(n: usize) -> Vec<Vec<C64>> {
    let dim = 1usize << n;
    let all = dim - 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(dim);
    for x in (0..dim).filter(|x| x & 1 == 0) {
        for sign in [1.0, -1.0] {
            let mut v = vec![ZERO; dim];
            v[x] = C64::new(h, 0.0);
            v[x ^ all] = C64::new(sign * h, 0.0);
            out.push(v);
        }
    }
    out
}

/// The four states `CPhase(φ)|±±⟩`.
pub fn cphase_states(phi: f64) -> Vec<Vec<C64>> {
    let gates = [Gate::CPhase(0, 1, phi)];
    let u = circuit_unitary(&gates, 2);
    let half = C64::new(0.5, 0.0);
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(s0, s1)| {
            // |s0 s1⟩ in the X basis, qubit 0 on the low bit
            let v: Vec<C64> = (0..4)
                .map(|i| {
                    let a = if i & 1 == 1 { s0 } else { 1.0 };
                    let b = if i & 2 == 2 { s1 } else { 1.0 };
                    half * (a * b)
                })
                .collect();
            u.apply(&v)
        })
        .collect()
}

/// Averages subsystem purities over the states of a basis.
pub fn entanglement_feature_of(basis: &[Vec<C64>]) -> Result<EntanglementFeature, ChannelError> {
    let n = check_basis(basis)?;
    let purities = (0..1usize << n)
        .map(|mask| {
            basis.iter().map(|s| subsystem_purity(s, mask)).sum::<f64>() / basis.len() as f64
        })
        .collect();
    EntanglementFeature::new(n, purities)
}

/// Average single-qubit purity of the CPhase(φ) basis, from reduced density matrices.
pub fn cphase_single_site_purity(phi: f64) -> f64 {
    let states = cphase_states(phi);
    let total: f64 = states
        .iter()
        .map(|s| subsystem_purity(s, 0b01) + subsystem_purity(s, 0b10))
        .sum();
    total / (2 * states.len()) as f64
}

/// `δ = ln 2 − S₂` of the CPhase(φ) basis, with `S₂` the single-qubit Rényi-2
/// entropy averaged over the basis.
pub fn delta_from_phi(phi: f64) -> Result<f64, ChannelError> {
    if !(0.0..=PI).contains(&phi) {
        return Err(ChannelError::OutOfRange { name: "phi", value: phi });
    }
    let delta = LN_2 + cphase_single_site_purity(phi).ln();
    Ok(delta.clamp(0.0, LN_2))
}

/// Inverse of [`delta_from_phi`] using the single-site purity `(3 + cos φ)/4`.
pub fn phi_from_delta(delta: f64) -> Result<f64, ChannelError> {
    if !(0.0..=LN_2 + 1e-12).contains(&delta) {
        return Err(ChannelError::OutOfRange {
            name: "delta",
            value: delta,
        });
    }
    Ok((2.0 * delta.exp() - 3.0).clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::eigen::{bell_block_eigs, ef_to_eigs, ghz_block_eigs};
    use crate::channels::BasisFamily;
    use crate::simulator::circuit::measured_basis;
    use approx::assert_relative_eq;

    #[test]
    fn bell_oracle_matches_table() {
        let basis = bell_basis();
        let b = bell_block_eigs();
        for m in 0..4 {
            assert!((oracle_block_eig(&basis, m).unwrap() - b.get(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn product_basis_oracle() {
        let basis = computational_basis(1);
        assert_relative_eq!(oracle_block_eig(&basis, 1).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let two = computational_basis(2);
        assert_relative_eq!(oracle_block_eig(&two, 0b11).unwrap(), 1.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn cphase_pi_cuts_are_zero() {
        let basis = measured_basis(&BasisFamily::TunablePhase { phi: PI });
        assert!(oracle_block_eig(&basis, 0b01).unwrap().abs() < 1e-12);
    }

    #[test]
    fn letters_do_not_matter() {
        let basis = ghz_basis(3);
        let reference = oracle_block_eig(&basis, 0b111).unwrap();
        for letters in [[Pauli::X, Pauli::Y, Pauli::Z], [Pauli::Y, Pauli::Y, Pauli::X]] {
            let v = oracle_block_eig_letters(&basis, &letters, &[true; 3]).unwrap();
            assert!((v - reference).abs() < 1e-12);
        }
        assert_relative_eq!(reference, ghz_block_eigs(3).unwrap().get(0b111), epsilon = 1e-12);
    }

    #[test]
    fn one_scrambler_per_bell_pair_suffices() {
        let basis = measured_basis(&BasisFamily::Bell);
        for m in 0..4u32 {
            let letters: Vec<Pauli> = (0..2)
                .map(|j| if m >> j & 1 == 1 { Pauli::X } else { Pauli::I })
                .collect();
            let both = oracle_block_eig_letters(&basis, &letters, &[true, true]).unwrap();
            let one = oracle_block_eig_letters(&basis, &letters, &[true, false]).unwrap();
            assert!((both - one).abs() < 1e-12, "pattern {m}");
        }
    }

    #[test]
    fn rejects_bad_bases() {
        let mut basis = computational_basis(2);
        basis[1] = basis[0].clone();
        assert!(oracle_block_eig(&basis, 1).is_err());
        assert!(matches!(
            oracle_block_eig(&computational_basis(4), 1),
            Err(ChannelError::OracleTooLarge(4))
        ));
    }

    #[test]
    fn ghz_circuit_basis_matches_direct_basis_feature() {
        let from_circuit = entanglement_feature_of(&measured_basis(&BasisFamily::Ghz { n: 3 })).unwrap();
        let direct = entanglement_feature_of(&ghz_basis(3)).unwrap();
        for a in 0..8 {
            assert!((from_circuit.purity(a) - direct.purity(a)).abs() < 1e-12);
        }
        let eigs = ef_to_eigs(&direct);
        assert_relative_eq!(eigs.get(0b111), 4.0 / 27.0, epsilon = 1e-12);
    }

    #[test]
    fn cphase_calibration_points() {
        assert!(delta_from_phi(PI).unwrap().abs() < 1e-12);
        assert!((delta_from_phi(0.0).unwrap() - LN_2).abs() < 1e-12);
        let phi = (-0.25f64).acos();
        assert!((delta_from_phi(phi).unwrap() - (11.0f64 / 8.0).ln()).abs() < 1e-12);
        assert!(delta_from_phi(-0.1).is_err());
        for delta in [0.0, 0.1, 0.3, LN_2] {
            let phi = phi_from_delta(delta).unwrap();
            assert!((delta_from_phi(phi).unwrap() - delta).abs() < 1e-12);
        }
    }
}
