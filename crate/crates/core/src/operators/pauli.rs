//! N-qubit Pauli strings in symplectic (x, z) bit form.
//!
//! A site with bits `(x, z)` holds `I` for `(0, 0)`, `X` for `(1, 0)`, `Z` for
//! `(0, 1)` and `Y` for `(1, 1)`, where `Y = iXZ`. Only Hermitian strings
//! (sign ±1) cross the public boundary; products that would carry a phase of
//! ±i are reported as errors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OperatorError;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Exponent `g` such that the site product `P1 · P2 = i^g · P3`.
fn site_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

/// Hermitian Pauli operator on `num_qubits` qubits with an overall sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        let words = word_count(num_qubits);
        PauliString {
            num_qubits,
            x: vec![0; words],
            z: vec![0; words],
            negative: false,
        }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p
    }

    /// Builds a string that is the identity except at the listed sites.
    pub fn from_sites(num_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self, OperatorError> {
        let mut p = PauliString::identity(num_qubits);
        for &(q, l) in sites {
            if q >= num_qubits {
                return Err(OperatorError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            p.set(q, l);
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub(crate) fn flip_sign(&mut self) {
        self.negative = !self.negative;
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.num_qubits).map(|q| self.letter(q)).collect()
    }

    pub fn set(&mut self, q: usize, letter: Pauli) {
        let (x, z) = letter.bits();
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Number of sites acting non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Sorted list of sites acting non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    /// Support as a membership mask indexed by qubit.
    pub fn support_mask(&self) -> Vec<bool> {
        (0..self.num_qubits)
            .map(|q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    fn check_dims(&self, other: &PauliString) -> Result<(), OperatorError> {
        if self.num_qubits != other.num_qubits {
            return Err(OperatorError::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// True iff the symplectic form of the two strings vanishes mod 2.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, OperatorError> {
        self.check_dims(other)?;
        let parity = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum::<u32>();
        Ok(parity % 2 == 0)
    }

    /// Product `self · other` as an unsigned string and the total phase
    /// exponent `e` in `i^e`, signs included.
    pub(crate) fn mul_with_phase(&self, other: &PauliString) -> Result<(PauliString, u8), OperatorError> {
        self.check_dims(other)?;
        let mut exponent: i32 = 2 * (self.negative as i32 + other.negative as i32);
        for q in 0..self.num_qubits {
            exponent += site_phase(self.x_bit(q), self.z_bit(q), other.x_bit(q), other.z_bit(q));
        }
        let product = PauliString {
            num_qubits: self.num_qubits,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            negative: false,
        };
        Ok((product, exponent.rem_euclid(4) as u8))
    }

    /// Hermitian product `self · other`. Anticommuting pairs produce a phase
    /// of ±i and are rejected with [`OperatorError::ImaginaryPhase`].
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, OperatorError> {
        let (product, exponent) = self.mul_with_phase(other)?;
        match exponent {
            0 => Ok(product),
            2 => Ok(product.with_sign(true)),
            odd => Err(OperatorError::ImaginaryPhase {
                exponent: odd,
            }),
        }
    }

    /// Restriction of the string to the listed sites (in the given order), unsigned.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        let letters: Vec<Pauli> = sites.iter().map(|&q| self.letter(q)).collect();
        PauliString::from_letters(&letters)
    }

    // Conjugation P -> G P G^dagger by Clifford generators.

    pub(crate) fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.negative = !self.negative;
        }
        self.set(q, Pauli::from_bits(z, x));
    }

    pub(crate) fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.negative = !self.negative;
        }
        self.set(q, Pauli::from_bits(x, z ^ x));
    }

    pub(crate) fn conj_cx(&mut self, control: usize, target: usize) {
        let (xc, zc) = (self.x_bit(control), self.z_bit(control));
        let (xt, zt) = (self.x_bit(target), self.z_bit(target));
        if xc && zt && (xt == zc) {
            self.negative = !self.negative;
        }
        self.set(target, Pauli::from_bits(xt ^ xc, zt));
        self.set(control, Pauli::from_bits(xc, zc ^ zt));
    }

    pub(crate) fn conj_cz(&mut self, a: usize, b: usize) {
        self.conj_h(b);
        self.conj_cx(a, b);
        self.conj_h(b);
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for q in 0..self.num_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = OperatorError;

    /// Per-site letters `I/X/Y/Z`, site 0 leftmost, with an optional leading `+` or `-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let letters = body
            .chars()
            .map(|c| Pauli::from_char(c).ok_or(OperatorError::InvalidLetter(c)))
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(OperatorError::EmptyString);
        }
        Ok(PauliString::from_letters(&letters).with_sign(negative))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Operators to estimate, with parallel text labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSet {
    operators: Vec<PauliString>,
    labels: Vec<String>,
}

impl OperatorSet {
    pub fn new(operators: Vec<PauliString>, labels: Vec<String>) -> Result<Self, OperatorError> {
        if operators.len() != labels.len() {
            return Err(OperatorError::LabelCount {
                operators: operators.len(),
                labels: labels.len(),
            });
        }
        if let Some(first) = operators.first() {
            let n = first.num_qubits();
            if let Some(bad) = operators.iter().find(|p| p.num_qubits() != n) {
                return Err(OperatorError::DimensionMismatch {
                    left: n,
                    right: bad.num_qubits(),
                });
            }
        }
        Ok(OperatorSet { operators, labels })
    }

    /// Labels each operator by its text form.
    pub fn from_operators(operators: Vec<PauliString>) -> Result<Self, OperatorError> {
        let labels = operators.iter().map(|p| p.to_string()).collect();
        OperatorSet::new(operators, labels)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PauliString)> {
        self.labels.iter().map(String::as_str).zip(&self.operators)
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.operators.first().map(PauliString::num_qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliString::identity(4).weight(), 0);
        assert_eq!(p("XIZY").weight(), 3);
        assert_eq!(p("ZZ").weight(), 2);
    }

    #[test]
    fn support_examples() {
        assert!(PauliString::identity(3).support().is_empty());
        assert_eq!(p("XIZ").support(), vec![0, 2]);
    }

    #[test]
    fn multiply_examples() {
        let xx = p("X").multiply(&p("X")).unwrap();
        assert!(xx.is_identity());
        assert!(!xx.is_negative());
        assert!(p("Z").multiply(&p("Z")).unwrap().is_identity());
        // XX · YZ = (XY)(XZ) = (iZ)(-iY) = ZY
        assert_eq!(p("XX").multiply(&p("YZ")).unwrap(), p("ZY"));
        // YY · XX = (YX)(YX) = (-iZ)(-iZ) = -ZZ
        assert_eq!(p("YY").multiply(&p("XX")).unwrap(), p("-ZZ"));
    }

    #[test]
    fn anticommuting_product_is_flagged() {
        assert!(matches!(
            p("X").multiply(&p("Z")),
            Err(OperatorError::ImaginaryPhase { .. })
        ));
        assert!(matches!(
            p("XX").multiply(&p("ZZZ")),
            Err(OperatorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutes_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        assert!(!p("IX").commutes(&p("XZ")).unwrap());
    }

    #[test]
    fn text_round_trip() {
        for s in ["XIZY", "-ZZ", "I", "-YYXXZI"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+xz").to_string(), "XZ");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn wide_strings_span_words() {
        let mut s = PauliString::identity(130);
        s.set(0, Pauli::X);
        s.set(64, Pauli::Y);
        s.set(129, Pauli::Z);
        assert_eq!(s.weight(), 3);
        assert_eq!(s.support(), vec![0, 64, 129]);
        let t = s.multiply(&s).unwrap();
        assert!(t.is_identity() && !t.is_negative());
    }

    #[test]
    fn conjugation_rules() {
        let mut x = p("X");
        x.conj_h(0);
        assert_eq!(x, p("Z"));
        let mut y = p("Y");
        y.conj_h(0);
        assert_eq!(y, p("-Y"));
        let mut x = p("X");
        x.conj_s(0);
        assert_eq!(x, p("Y"));
        let mut y = p("Y");
        y.conj_s(0);
        assert_eq!(y, p("-X"));
        let mut xi = p("XI");
        xi.conj_cx(0, 1);
        assert_eq!(xi, p("XX"));
        let mut iz = p("IZ");
        iz.conj_cx(0, 1);
        assert_eq!(iz, p("ZZ"));
        let mut xi = p("XI");
        xi.conj_cz(0, 1);
        assert_eq!(xi, p("XZ"));
    }
}
