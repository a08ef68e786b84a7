//! Stabilizer tableau with destabilizers (Aaronson–Gottesman).
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers and row `2n` is
//! scratch space for deterministic measurements and expectation values.

use rand::Rng;

use crate::operators::PauliString;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

#[inline]
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

impl Tableau {
    /// `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = Tableau {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            r: vec![false; rows],
        };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn xb(&self, row: usize, q: usize) -> bool {
        self.x[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn zb(&self, row: usize, q: usize) -> bool {
        self.z[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    pub fn h(&mut self, a: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, a), self.zb(row, a));
            self.r[row] ^= x && z;
            self.set_x(row, a, z);
            self.set_z(row, a, x);
        }
    }

    pub fn s(&mut self, a: usize) {
        for row in 0..2 * self.n {
            let (x, z) = (self.xb(row, a), self.zb(row, a));
            self.r[row] ^= x && z;
            self.set_z(row, a, z ^ x);
        }
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        for row in 0..2 * self.n {
            let (xa, za, xb, zb) = (self.xb(row, a), self.zb(row, a), self.xb(row, b), self.zb(row, b));
            self.r[row] ^= xa && zb && (xb == za);
            self.set_x(row, b, xb ^ xa);
            self.set_z(row, a, za ^ zb);
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    /// Row `h` ← row `i` · row `h`, with the phase tracked.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut e = 2 * (self.r[h] as i32 + self.r[i] as i32);
        for w in 0..self.words {
            let mut active = self.x[i * self.words + w] | self.z[i * self.words + w];
            while active != 0 {
                let b = active.trailing_zeros() as usize;
                active &= active - 1;
                let q = w * 64 + b;
                e += g(self.xb(i, q), self.zb(i, q), self.xb(h, q), self.zb(h, q));
            }
        }
        self.r[h] = e.rem_euclid(4) == 2;
        for w in 0..self.words {
            self.x[h * self.words + w] ^= self.x[i * self.words + w];
            self.z[h * self.words + w] ^= self.z[i * self.words + w];
        }
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            self.x[dst * self.words + w] = self.x[src * self.words + w];
            self.z[dst * self.words + w] = self.z[src * self.words + w];
        }
        self.r[dst] = self.r[src];
    }

    fn clear_row(&mut self, row: usize) {
        for w in 0..self.words {
            self.x[row * self.words + w] = 0;
            self.z[row * self.words + w] = 0;
        }
        self.r[row] = false;
    }

    /// Computational-basis measurement of qubit `a`; `true` means outcome 1.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.xb(row, a)) {
            for row in 0..2 * n {
                if row != p && self.xb(row, a) {
                    self.rowsum(row, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.set_z(p, a, true);
            let outcome = rng.gen::<bool>();
            self.r[p] = outcome;
            outcome
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for i in 0..n {
                if self.xb(i, a) {
                    self.rowsum(scratch, i + n);
                }
            }
            self.r[scratch]
        }
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|row| self.row_pauli(row)).collect()
    }

    fn row_pauli(&self, row: usize) -> PauliString {
        let letters: Vec<_> = (0..self.n)
            .map(|q| crate::operators::Pauli::from_bits(self.xb(row, q), self.zb(row, q)))
            .collect();
        PauliString::from_letters(&letters).with_sign(self.r[row])
    }

    fn anticommutes_with_row(&self, p: &PauliString, row: usize) -> bool {
        let px = p.x_words();
        let pz = p.z_words();
        let mut parity = 0u32;
        for w in 0..px.len() {
            let rx = self.x[row * self.words + w];
            let rz = self.z[row * self.words + w];
            parity ^= ((px[w] & rz) ^ (pz[w] & rx)).count_ones() & 1;
        }
        parity == 1
    }

    /// `⟨P⟩ ∈ {−1, 0, +1}` for the stabilizer state.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        assert_eq!(p.num_qubits(), self.n);
        let n = self.n;
        if (n..2 * n).any(|row| self.anticommutes_with_row(p, row)) {
            return 0.0;
        }
        let mut work = self.clone();
        let scratch = 2 * n;
        work.clear_row(scratch);
        for i in 0..n {
            if self.anticommutes_with_row(p, i) {
                work.rowsum(scratch, i + n);
            }
        }
        let found = work.row_pauli(scratch);
        debug_assert_eq!(found.clone().with_sign(false), p.clone().with_sign(false));
        let stab_sign = if found.is_negative() { -1.0 } else { 1.0 };
        stab_sign * p.sign()
    }
}
