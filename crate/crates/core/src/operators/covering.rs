//! Partitions of the qubits into jointly measured blocks, plus the chain and
//! honeycomb constructors used by the preset campaigns.

use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::{OperatorError, OperatorSet};

/// Which bonds of a chain are paired into dimers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// Pairs (0,1), (2,3), ...
    Even,
    /// Pairs (1,2), (3,4), ...
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Disjoint blocks covering every qubit exactly once.
///
/// Serializes as a plain list of index lists; the qubit count is the total
/// number of indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Covering {
    num_qubits: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Covering {
    pub fn new(num_qubits: usize, blocks: Vec<Vec<usize>>) -> Result<Self, OperatorError> {
        let mut block_of = vec![usize::MAX; num_qubits];
        let mut sorted_blocks = Vec::with_capacity(blocks.len());
        for (b, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(OperatorError::InvalidCovering(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &q in &block {
                if q >= num_qubits {
                    return Err(OperatorError::QubitOutOfRange { qubit: q, num_qubits });
                }
                if block_of[q] != usize::MAX {
                    return Err(OperatorError::InvalidCovering(format!(
                        "qubit {q} appears in more than one block"
                    )));
                }
                block_of[q] = b;
            }
            sorted_blocks.push(block);
        }
        if let Some(q) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(OperatorError::InvalidCovering(format!("qubit {q} is not covered")));
        }
        Ok(Covering {
            num_qubits,
            blocks: sorted_blocks,
            block_of,
        })
    }

    /// Every qubit on its own: the random-Pauli layout.
    pub fn singletons(num_qubits: usize) -> Self {
        Covering::new(num_qubits, (0..num_qubits).map(|q| vec![q]).collect())
            .expect("singletons always partition")
    }

    /// Nearest-neighbour dimers on a chain. Qubits left without a partner
    /// become singleton blocks; on a periodic chain with even `n` the odd
    /// covering closes with the wrap-around dimer `{0, n-1}`.
    pub fn dimer_chain(n: usize, parity: Parity, boundary: Boundary) -> Result<Self, OperatorError> {
        if n < 2 {
            return Err(OperatorError::TooFewQubits { need: 2, got: n });
        }
        let mut blocks = Vec::new();
        let start = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let wrap = parity == Parity::Odd && boundary == Boundary::Periodic && n % 2 == 0;
        if start == 1 && !wrap {
            blocks.push(vec![0]);
        }
        let mut q = start;
        while q + 1 < n {
            blocks.push(vec![q, q + 1]);
            q += 2;
        }
        if wrap {
            blocks.push(vec![n - 1, 0]);
        } else if q < n {
            blocks.push(vec![q]);
        }
        Covering::new(n, blocks)
    }

    /// Consecutive blocks of `size` qubits starting at `offset`; qubits before
    /// the offset and any remainder become singletons.
    pub fn n_mer_chain(n: usize, size: usize, offset: usize) -> Result<Self, OperatorError> {
        if size == 0 || offset >= size {
            return Err(OperatorError::InvalidCovering(format!(
                "block size {size} with offset {offset}"
            )));
        }
        if size > n {
            return Err(OperatorError::TooFewQubits { need: size, got: n });
        }
        let mut blocks: Vec<Vec<usize>> = (0..offset.min(n)).map(|q| vec![q]).collect();
        let mut q = offset;
        while q + size <= n {
            blocks.push((q..q + size).collect());
            q += size;
        }
        blocks.extend((q..n).map(|r| vec![r]));
        Covering::new(n, blocks)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block holding qubit `q`.
    pub fn block_of(&self, q: usize) -> usize {
        self.block_of[q]
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check(&self, p: &PauliString) -> Result<(), OperatorError> {
        if p.num_qubits() != self.num_qubits {
            return Err(OperatorError::DimensionMismatch {
                left: p.num_qubits(),
                right: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Per block, the mask of block sites where `p` acts non-trivially
    /// (bit `j` set for the block's `j`-th qubit).
    pub fn patterns(&self, p: &PauliString) -> Result<Vec<u32>, OperatorError> {
        self.check(p)?;
        Ok(self
            .blocks
            .iter()
            .map(|block| {
                block
                    .iter()
                    .enumerate()
                    .filter(|&(_, &q)| p.x_bit(q) || p.z_bit(q))
                    .fold(0u32, |m, (j, _)| m | (1 << j))
            })
            .collect())
    }

    /// Number of blocks that the support of `p` meets partially.
    pub fn cut_count(&self, p: &PauliString) -> Result<usize, OperatorError> {
        let patterns = self.patterns(p)?;
        Ok(patterns
            .iter()
            .zip(&self.blocks)
            .filter(|&(&m, block)| m != 0 && m != (1u32 << block.len()) - 1)
            .count())
    }

    pub fn is_compatible(&self, p: &PauliString) -> Result<bool, OperatorError> {
        Ok(self.cut_count(p)? == 0)
    }

    /// The block structure with every index listed, block by block.
    pub fn to_index_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.clone()
    }
}

impl TryFrom<Vec<Vec<usize>>> for Covering {
    type Error = OperatorError;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        let n = blocks.iter().map(Vec::len).sum();
        Covering::new(n, blocks)
    }
}

impl From<Covering> for Vec<Vec<usize>> {
    fn from(c: Covering) -> Self {
        c.blocks
    }
}

/// Honeycomb torus of `l × l` unit cells.
///
/// Cell `(r, c)` holds qubit `2(rl + c)` on sublattice A and `2(rl + c) + 1` on
/// sublattice B. Site `A(r, c)` bonds to `B(r, c)`, `B(r, c-1)` and `B(r-1, c)`
/// (indices mod `l`). Hexagon `(r, c)` visits, in cycle order,
/// `A(r,c) B(r,c) A(r,c+1) B(r-1,c+1) A(r-1,c+1) B(r-1,c)`.
///
/// Hexagons are three-coloured by `(r - c) mod 3`, which is why `l` must be a
/// multiple of 3. Orientation `t` selects the dimers lying on edges between
/// hexagons of the two colours other than `t`: every hexagon not of colour `t`
/// then contains three dimers and is compatible, and translating by one lattice
/// vector advances `t` by one.
#[derive(Clone, Debug)]
pub struct Honeycomb {
    l: usize,
}

impl Honeycomb {
    pub fn new(l: usize) -> Result<Self, OperatorError> {
        if l < 3 || l % 3 != 0 {
            return Err(OperatorError::InvalidLattice(format!(
                "honeycomb torus needs a side length that is a positive multiple of 3, got {l}"
            )));
        }
        Ok(Honeycomb { l })
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.l * self.l
    }

    fn wrap(&self, v: isize) -> usize {
        v.rem_euclid(self.l as isize) as usize
    }

    pub fn a(&self, r: isize, c: isize) -> usize {
        2 * (self.wrap(r) * self.l + self.wrap(c))
    }

    pub fn b(&self, r: isize, c: isize) -> usize {
        self.a(r, c) + 1
    }

    fn colour(&self, r: isize, c: isize) -> usize {
        (self.wrap(r) + 3 * self.l - self.wrap(c)) % 3
    }

    /// The six sites of hexagon `(r, c)` in cycle order.
    pub fn hexagon(&self, r: usize, c: usize) -> [usize; 6] {
        let (r, c) = (r as isize, c as isize);
        [
            self.a(r, c),
            self.b(r, c),
            self.a(r, c + 1),
            self.b(r - 1, c + 1),
            self.a(r - 1, c + 1),
            self.b(r - 1, c),
        ]
    }

    pub fn hexagon_colour(&self, r: usize, c: usize) -> usize {
        self.colour(r as isize, c as isize)
    }

    /// All edges as `(site, site, face colour, face colour)`.
    fn edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut edges = Vec::with_capacity(3 * self.l * self.l);
        for r in 0..self.l as isize {
            for c in 0..self.l as isize {
                edges.push((self.a(r, c), self.b(r, c), self.colour(r, c), self.colour(r + 1, c - 1)));
                edges.push((self.b(r, c), self.a(r, c + 1), self.colour(r, c), self.colour(r + 1, c)));
                edges.push((self.a(r, c), self.b(r - 1, c), self.colour(r, c - 1), self.colour(r, c)));
            }
        }
        edges
    }

    pub fn covering(&self, orientation: usize) -> Result<Covering, OperatorError> {
        if orientation > 2 {
            return Err(OperatorError::InvalidLattice(format!(
                "orientation must be 0, 1 or 2, got {orientation}"
            )));
        }
        let blocks = self
            .edges()
            .into_iter()
            .filter(|&(_, _, f, g)| f != orientation && g != orientation)
            .map(|(u, v, _, _)| vec![u, v])
            .collect();
        Covering::new(self.num_qubits(), blocks)
    }

    /// All `l²` hexagon operators with `letters` placed in cycle order.
    pub fn plaquettes(&self, letters: [Pauli; 6]) -> OperatorSet {
        let mut operators = Vec::with_capacity(self.l * self.l);
        let mut labels = Vec::with_capacity(self.l * self.l);
        for r in 0..self.l {
            for c in 0..self.l {
                let sites: Vec<(usize, Pauli)> =
                    self.hexagon(r, c).into_iter().zip(letters).collect();
                operators.push(
                    PauliString::from_sites(self.num_qubits(), &sites)
                        .expect("hexagon sites lie on the torus"),
                );
                labels.push(format!("hex({r},{c})"));
            }
        }
        OperatorSet::new(operators, labels).expect("parallel lists")
    }
}

/// Covering plus plaquette set for a honeycomb torus.
pub fn honeycomb(
    l: usize,
    orientation: usize,
    letters: Option<[Pauli; 6]>,
) -> Result<(Covering, OperatorSet), OperatorError> {
    let lattice = Honeycomb::new(l)?;
    let covering = lattice.covering(orientation)?;
    Ok((covering, lattice.plaquettes(letters.unwrap_or([Pauli::Z; 6]))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn assert_partition(c: &Covering) {
        let mut all: Vec<usize> = c.blocks().iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..c.num_qubits()).collect::<Vec<_>>());
    }

    #[test]
    fn cut_count_examples() {
        let dimer = Covering::dimer_chain(2, Parity::Even, Boundary::Open).unwrap();
        assert_eq!(dimer.cut_count(&p("XX")).unwrap(), 0);
        assert_eq!(dimer.cut_count(&p("XI")).unwrap(), 1);
        let chain = Covering::dimer_chain(8, Parity::Even, Boundary::Open).unwrap();
        assert_eq!(chain.cut_count(&p("IIXYZIII")).unwrap(), 1);
        assert_eq!(chain.cut_count(&p("XYZIIIII")).unwrap(), 1);
    }

    #[test]
    fn compatibility_examples() {
        let c = Covering::dimer_chain(4, Parity::Even, Boundary::Open).unwrap();
        assert!(c.is_compatible(&p("XXII")).unwrap());
        assert!(!c.is_compatible(&p("XIII")).unwrap());
        assert!(c.is_compatible(&p("ZZ")).is_err());
    }

    #[test]
    fn dimer_chain_examples() {
        let even = Covering::dimer_chain(4, Parity::Even, Boundary::Open).unwrap();
        assert_eq!(even.blocks(), &[vec![0, 1], vec![2, 3]]);
        let odd = Covering::dimer_chain(4, Parity::Odd, Boundary::Open).unwrap();
        assert_eq!(odd.blocks(), &[vec![0], vec![1, 2], vec![3]]);
        let ring = Covering::dimer_chain(6, Parity::Odd, Boundary::Periodic).unwrap();
        assert_eq!(ring.blocks(), &[vec![1, 2], vec![3, 4], vec![0, 5]]);
        let odd_n = Covering::dimer_chain(5, Parity::Even, Boundary::Open).unwrap();
        assert_eq!(odd_n.blocks(), &[vec![0, 1], vec![2, 3], vec![4]]);
        assert!(Covering::dimer_chain(1, Parity::Even, Boundary::Open).is_err());
        for c in [even, odd, ring, odd_n] {
            assert_partition(&c);
        }
    }

    #[test]
    fn n_mer_chain_examples() {
        let c = Covering::n_mer_chain(6, 3, 0).unwrap();
        assert_eq!(c.blocks(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(
            Covering::n_mer_chain(6, 2, 0).unwrap(),
            Covering::dimer_chain(6, Parity::Even, Boundary::Open).unwrap()
        );
        let c = Covering::n_mer_chain(7, 3, 1).unwrap();
        assert_eq!(c.blocks(), &[vec![0], vec![1, 2, 3], vec![4, 5, 6]]);
        assert!(Covering::n_mer_chain(2, 3, 0).is_err());
        assert!(Covering::n_mer_chain(6, 3, 3).is_err());
    }

    #[test]
    fn rejects_bad_partitions() {
        assert!(Covering::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Covering::new(3, vec![vec![0, 1]]).is_err());
        assert!(Covering::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(Covering::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn covering_json_is_index_lists() {
        let c = Covering::dimer_chain(4, Parity::Odd, Boundary::Open).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, "[[0],[1,2],[3]]");
        let back: Covering = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Covering>("[[0,1],[1]]").is_err());
    }

    #[test]
    fn honeycomb_hexagons_have_six_distinct_sites() {
        let lattice = Honeycomb::new(3).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let mut h = lattice.hexagon(r, c).to_vec();
                h.sort_unstable();
                h.dedup();
                assert_eq!(h.len(), 6);
            }
        }
        // every site sits on exactly three hexagons
        let mut count = vec![0; lattice.num_qubits()];
        for r in 0..3 {
            for c in 0..3 {
                for q in lattice.hexagon(r, c) {
                    count[q] += 1;
                }
            }
        }
        assert!(count.iter().all(|&k| k == 3));
    }

    #[test]
    fn honeycomb_support_matches_hexagon() {
        let (_, plaquettes) = honeycomb(3, 0, None).unwrap();
        let lattice = Honeycomb::new(3).unwrap();
        let mut expected = lattice.hexagon(1, 2).to_vec();
        expected.sort_unstable();
        assert_eq!(plaquettes.operators()[5].support(), expected);
        assert_eq!(plaquettes.labels()[5], "hex(1,2)");
    }

    #[test]
    fn honeycomb_rejects_sizes_without_three_colouring() {
        assert!(Honeycomb::new(2).is_err());
        assert!(Honeycomb::new(4).is_err());
        assert!(honeycomb(3, 3, None).is_err());
    }

    #[test]
    fn honeycomb_orientations_cover_two_thirds() {
        for l in [3, 6] {
            let lattice = Honeycomb::new(l).unwrap();
            let plaquettes = lattice.plaquettes([Pauli::Z; 6]);
            let mut covered = vec![false; plaquettes.len()];
            for t in 0..3 {
                let c = lattice.covering(t).unwrap();
                assert_partition(&c);
                assert_eq!(c.num_blocks(), l * l);
                let compatible: Vec<bool> = plaquettes
                    .operators()
                    .iter()
                    .map(|h| c.is_compatible(h).unwrap())
                    .collect();
                assert_eq!(3 * compatible.iter().filter(|&&b| b).count(), 2 * l * l);
                if t < 2 {
                    for (seen, now) in covered.iter_mut().zip(&compatible) {
                        *seen |= now;
                    }
                }
            }
            assert!(covered.iter().all(|&b| b));
        }
    }

    #[test]
    fn honeycomb_orientation_is_translation() {
        // shifting every cell by one row maps orientation t onto t + 1
        let lattice = Honeycomb::new(3).unwrap();
        let shift = |q: usize| {
            let cell = q / 2;
            let (r, c) = ((cell / 3) as isize, (cell % 3) as isize);
            if q % 2 == 0 {
                lattice.a(r + 1, c)
            } else {
                lattice.b(r + 1, c)
            }
        };
        for t in 0..3 {
            let c = lattice.covering(t).unwrap();
            let moved: Vec<Vec<usize>> = c
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&q| shift(q)).collect())
                .collect();
            let moved = Covering::new(c.num_qubits(), moved).unwrap();
            let mut lhs = moved.to_index_lists();
            let mut rhs = lattice.covering((t + 1) % 3).unwrap().to_index_lists();
            lhs.sort();
            rhs.sort();
            assert_eq!(lhs, rhs);
        }
    }
}
