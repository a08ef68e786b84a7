//! The 24-element single-qubit Clifford group in a fixed canonical order.
//!
//! Elements are enumerated breadth-first over gate words in `{H, S}`: words
//! are explored shortest first, extending each word by `H` before `S`, and a
//! word is kept when its unitary (modulo global phase) has not been seen.
//! Index 0 is the identity. Words list gates in application order, so the
//! word `[H, S]` is the unitary `S·H`.
//!
//! Snapshots store indices into this table, which makes the ordering part of
//! the dataset format.

use std::sync::OnceLock;

use crate::dense::{CMatrix, C64, I, ONE, ZERO};
use crate::operators::{Pauli, PauliString};

pub const CLIFFORD_COUNT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate1 {
    H,
    S,
}

#[derive(Clone, Debug)]
pub struct Clifford1 {
    word: Vec<Gate1>,
    matrix: CMatrix,
    /// Images of X and Z under `U · U†` as (letter, negative).
    x_image: (Pauli, bool),
    z_image: (Pauli, bool),
}

impl Clifford1 {
    pub fn word(&self) -> &[Gate1] {
        &self.word
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn x_image(&self) -> (Pauli, bool) {
        self.x_image
    }

    pub fn z_image(&self) -> (Pauli, bool) {
        self.z_image
    }
}

pub fn hadamard() -> CMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_rows(&[&[h, h], &[h, -h]])
}

pub fn phase_s() -> CMatrix {
    CMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, I]])
}

fn gate_matrix(g: Gate1) -> CMatrix {
    match g {
        Gate1::H => hadamard(),
        Gate1::S => phase_s(),
    }
}

fn signed_image(u: &CMatrix, p: Pauli) -> (Pauli, bool) {
    let image = u.conjugate(&CMatrix::pauli(p));
    for q in Pauli::NON_IDENTITY {
        let m = CMatrix::pauli(q);
        if image.max_abs_diff(&m) < 1e-9 {
            return (q, false);
        }
        let mut neg = m.clone();
        for i in 0..2 {
            for j in 0..2 {
                neg[(i, j)] = -neg[(i, j)];
            }
        }
        if image.max_abs_diff(&neg) < 1e-9 {
            return (q, true);
        }
    }
    unreachable!("Clifford conjugation maps Paulis to signed Paulis")
}

fn build_table() -> Vec<Clifford1> {
    let mut table: Vec<Clifford1> = Vec::with_capacity(CLIFFORD_COUNT);
    let mut queue: std::collections::VecDeque<(Vec<Gate1>, CMatrix)> =
        std::collections::VecDeque::from([(Vec::new(), CMatrix::identity(2))]);
    while let Some((word, matrix)) = queue.pop_front() {
        if table
            .iter()
            .any(|c| c.matrix.approx_eq_up_to_phase(&matrix, 1e-9))
        {
            continue;
        }
        for g in [Gate1::H, Gate1::S] {
            let mut next = word.clone();
            next.push(g);
            let m = &gate_matrix(g) * &matrix;
            queue.push_back((next, m));
        }
        table.push(Clifford1 {
            x_image: signed_image(&matrix, Pauli::X),
            z_image: signed_image(&matrix, Pauli::Z),
            word,
            matrix,
        });
        if table.len() == CLIFFORD_COUNT {
            break;
        }
    }
    table
}

/// The canonical table.
pub fn cliffords() -> &'static [Clifford1] {
    static TABLE: OnceLock<Vec<Clifford1>> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

pub fn clifford(index: u8) -> &'static Clifford1 {
    &cliffords()[index as usize]
}

/// Conjugates site `q` of `p` by Clifford `index`: `p -> U p U†`.
pub(crate) fn conjugate_site(p: &mut PauliString, q: usize, index: u8) {
    let c = clifford(index);
    let (x, z) = (p.x_bit(q), p.z_bit(q));
    if !x && !z {
        return;
    }
    let (xl, xn) = c.x_image;
    let (zl, zn) = c.z_image;
    // Y = i X Z maps to i U X U† U Z U†.
    let (letter, negative) = match (x, z) {
        (true, false) => (xl, xn),
        (false, true) => (zl, zn),
        _ => {
            let img_x = PauliString::from_letters(&[xl]).with_sign(xn);
            let img_z = PauliString::from_letters(&[zl]).with_sign(zn);
            let (prod, e) = img_x.mul_with_phase(&img_z).expect("same size");
            // i · i^e must be real: e is odd for anticommuting images
            let total = (e + 1) % 4;
            (prod.letter(0), total == 2)
        }
    };
    p.set(q, letter);
    if negative {
        p.flip_sign();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_24_distinct_elements() {
        let t = cliffords();
        assert_eq!(t.len(), 24);
        assert!(t[0].word.is_empty());
        for i in 0..24 {
            for j in 0..i {
                assert!(!t[i].matrix.approx_eq_up_to_phase(&t[j].matrix, 1e-9));
            }
        }
    }

    #[test]
    fn canonical_prefix_order() {
        let t = cliffords();
        assert_eq!(t[1].word, vec![Gate1::H]);
        assert_eq!(t[2].word, vec![Gate1::S]);
        assert_eq!(t[3].word, vec![Gate1::H, Gate1::S]);
        assert_eq!(t[4].word, vec![Gate1::S, Gate1::H]);
        assert_eq!(t[5].word, vec![Gate1::S, Gate1::S]);
    }

    #[test]
    fn images_permute_axes() {
        // each element sends {X, Y, Z} to a signed permutation; X and Z images differ
        for c in cliffords() {
            assert_ne!(c.x_image.0, c.z_image.0);
        }
        // every ordered pair of distinct axes appears with both signs: 6 * 4 = 24
        let mut seen: Vec<_> = cliffords().iter().map(|c| (c.x_image, c.z_image)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn symplectic_conjugation_matches_matrices() {
        for (idx, c) in cliffords().iter().enumerate() {
            for l in Pauli::NON_IDENTITY {
                let mut p = PauliString::from_letters(&[l]);
                conjugate_site(&mut p, 0, idx as u8);
                let expected = c.matrix.conjugate(&CMatrix::pauli(l));
                let mut got = CMatrix::pauli(p.letter(0));
                if p.is_negative() {
                    for i in 0..2 {
                        for j in 0..2 {
                            got[(i, j)] = -got[(i, j)];
                        }
                    }
                }
                assert!(expected.max_abs_diff(&got) < 1e-12, "clifford {idx} letter {l:?}");
            }
        }
    }
}
