//! Small dense complex matrices (block-sized, at most a few qubits).
//!
//! Qubit `j` of a `k`-qubit operator corresponds to bit `j` of the basis
//! index, so `kron` places its first factor on the least significant bit.

use std::ops::Mul;

use num_complex::Complex64;

use crate::operators::Pauli;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "square matrix expected");
        CMatrix {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn pauli(p: Pauli) -> Self {
        match p {
            Pauli::I => CMatrix::identity(2),
            Pauli::X => CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            Pauli::Y => CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            Pauli::Z => CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
        }
    }

    /// Dense form of a Pauli string given site by site (site 0 on bit 0).
    pub fn pauli_string(letters: &[Pauli]) -> Self {
        letters
            .iter()
            .fold(CMatrix::identity(1), |acc, &l| acc.kron_high(&CMatrix::pauli(l)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `self ⊗ high` with `self` on the low bits and `high` on the new high bits.
    pub fn kron_high(&self, high: &CMatrix) -> Self {
        let (a, b) = (self.dim, high.dim);
        let mut out = CMatrix::zeros(a * b);
        for hi in 0..b {
            for hj in 0..b {
                let h = high[(hi, hj)];
                if h == ZERO {
                    continue;
                }
                for li in 0..a {
                    for lj in 0..a {
                        out[(hi * a + li, hj * a + lj)] = h * self[(li, lj)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `self · m · self†`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        &(self * m) * &self.adjoint()
    }

    /// `⟨v| self |v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let w = self.apply(v);
        v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Equality up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &CMatrix, tol: f64) -> bool {
        let Some(k) = self.data.iter().position(|z| z.norm() > 0.25) else {
            return other.data.iter().all(|z| z.norm() < tol);
        };
        if other.data[k].norm() < tol {
            return false;
        }
        let phase = other.data[k] / self.data[k];
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a * phase - b).norm() < tol)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Purity `Tr ρ_A²` of the reduced state on the qubits in `mask`.
pub fn subsystem_purity(state: &[C64], mask: usize) -> f64 {
    let dim = state.len();
    let n = dim.trailing_zeros() as usize;
    let keep: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
    let rest: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 0).collect();
    let scatter = |bits: usize, qubits: &[usize]| {
        qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | ((bits >> j & 1) << q))
    };
    let da = 1usize << keep.len();
    let db = 1usize << rest.len();
    let mut rho = vec![ZERO; da * da];
    for a in 0..da {
        let ia = scatter(a, &keep);
        for a2 in 0..da {
            let ia2 = scatter(a2, &keep);
            let mut acc = ZERO;
            for b in 0..db {
                let ib = scatter(b, &rest);
                acc += state[ia | ib] * state[ia2 | ib].conj();
            }
            rho[a * da + a2] = acc;
        }
    }
    rho.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_products_follow_y_convention() {
        let x = CMatrix::pauli(Pauli::X);
        let z = CMatrix::pauli(Pauli::Z);
        let y = CMatrix::pauli(Pauli::Y);
        let xz = &x * &z;
        // Y = i X Z
        let mut ixz = xz.clone();
        for i in 0..2 {
            for j in 0..2 {
                ixz[(i, j)] *= I;
            }
        }
        assert!(ixz.max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn kron_places_first_site_on_low_bit() {
        // X on site 0 of two qubits flips bit 0
        let xi = CMatrix::pauli_string(&[Pauli::X, Pauli::I]);
        assert_eq!(xi[(1, 0)], ONE);
        assert_eq!(xi[(2, 0)], ZERO);
    }

    #[test]
    fn purity_of_bell_and_product_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        assert!((subsystem_purity(&bell, 0b01) - 0.5).abs() < 1e-15);
        assert!((subsystem_purity(&bell, 0b11) - 1.0).abs() < 1e-15);
        assert!((subsystem_purity(&bell, 0b00) - 1.0).abs() < 1e-15);
        let product = vec![ONE, ZERO, ZERO, ZERO];
        assert!((subsystem_purity(&product, 0b10) - 1.0).abs() < 1e-15);
    }
}
