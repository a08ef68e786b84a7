//! Operator-set generators usable from campaign configs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::operators::{contiguous_string, Honeycomb, OperatorSet, Parity, Pauli, PauliString};

fn default_letters() -> String {
    "Z".into()
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorConfig {
    Explicit {
        operators: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    /// Strings on `k` consecutive sites for each `k` in `weights`, at every
    /// start site. `letters` is one letter repeated, an explicit sequence of
    /// length `k`, or `"all"` for every non-identity sequence.
    Contiguous {
        weights: Vec<usize>,
        #[serde(default = "default_letters")]
        letters: String,
        #[serde(default = "default_true")]
        periodic: bool,
    },
    /// Hexagon plaquettes of a honeycomb torus.
    Plaquettes {
        l: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        letters: Option<String>,
    },
    /// Every Pauli term of products of `p` bond energies
    /// `X_iX_{i+1} + Y_iY_{i+1} + Z_iZ_{i+1}` on disjoint bonds whose left
    /// site has the given parity.
    BondCorrelators {
        p: usize,
        #[serde(default = "default_parity")]
        parity: Parity,
        #[serde(default)]
        periodic: bool,
    },
}

fn default_parity() -> Parity {
    Parity::Even
}

fn parse_letters(s: &str) -> Result<Vec<Pauli>, HarnessError> {
    s.chars()
        .map(|c| Pauli::from_char(c).ok_or_else(|| HarnessError::Config(format!("bad Pauli letter {c:?}"))))
        .collect()
}

/// Every sequence of `k` non-identity letters, in lexicographic X < Y < Z order.
pub fn all_sequences(k: usize) -> Vec<Vec<Pauli>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                Pauli::NON_IDENTITY.into_iter().map(move |l| {
                    let mut next = prefix.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    out
}

fn starts(n: usize, k: usize, periodic: bool) -> Vec<usize> {
    if periodic && k < n {
        (0..n).collect()
    } else if k <= n {
        (0..=n - k).collect()
    } else {
        Vec::new()
    }
}

fn letters_text(ls: &[Pauli]) -> String {
    ls.iter().map(|l| l.as_char()).collect()
}

impl OperatorConfig {
    pub fn generate(&self, n: usize) -> Result<OperatorSet, HarnessError> {
        let mut ops = Vec::new();
        let mut labels = Vec::new();
        match self {
            OperatorConfig::Explicit { operators, labels: given } => {
                for s in operators {
                    ops.push(s.parse::<PauliString>()?);
                }
                labels = given.clone().unwrap_or_else(|| operators.clone());
            }
            OperatorConfig::Contiguous { weights, letters, periodic } => {
                for &k in weights {
                    if k == 0 || k > n {
                        return Err(HarnessError::Config(format!("weight {k} on {n} sites")));
                    }
                    let sequences = match letters.as_str() {
                        "all" => all_sequences(k),
                        s if s.chars().count() == 1 => vec![parse_letters(&s.repeat(k))?],
                        s if s.chars().count() == k => vec![parse_letters(s)?],
                        s => {
                            return Err(HarnessError::Config(format!(
                                "letters {s:?} do not fit weight {k}"
                            )))
                        }
                    };
                    for start in starts(n, k, *periodic) {
                        for seq in &sequences {
                            ops.push(contiguous_string(n, start, seq, *periodic)?);
                            labels.push(format!("{}@{start}", letters_text(seq)));
                        }
                    }
                }
            }
            OperatorConfig::Plaquettes { l, letters } => {
                let lattice = Honeycomb::new(*l)?;
                if lattice.num_qubits() != n {
                    return Err(HarnessError::Config(format!(
                        "honeycomb with l = {l} has {} qubits, state has {n}",
                        lattice.num_qubits()
                    )));
                }
                let letters = match letters {
                    None => [Pauli::Z; 6],
                    Some(s) => parse_letters(s)?
                        .try_into()
                        .map_err(|_| HarnessError::Config("plaquettes need six letters".into()))?,
                };
                return Ok(lattice.plaquettes(letters));
            }
            OperatorConfig::BondCorrelators { p, parity, periodic } => {
                let first = match parity {
                    Parity::Even => 0,
                    Parity::Odd => 1,
                };
                let last = if *periodic { n } else { n - 1 };
                let bonds: Vec<usize> = (first..last).step_by(2).collect();
                if *p == 0 {
                    return Err(HarnessError::Config("p must be at least 1".into()));
                }
                for combo in combinations(bonds.len(), *p) {
                    let chosen: Vec<usize> = combo.iter().map(|&i| bonds[i]).collect();
                    for letters in (0..3usize.pow(*p as u32)).map(|t| term_letters(t, *p)) {
                        let mut sites = Vec::new();
                        for (&b, &l) in chosen.iter().zip(&letters) {
                            sites.push((b, l));
                            sites.push(((b + 1) % n, l));
                        }
                        let op = PauliString::from_sites(n, &sites)?;
                        let bonds_text: Vec<String> = chosen.iter().map(|b| format!("b{b}")).collect();
                        labels.push(format!("{}:{}", bonds_text.join("-"), letters_text(&letters)));
                        ops.push(op);
                    }
                }
            }
        }
        dedupe(ops, labels)
    }
}

fn term_letters(mut t: usize, p: usize) -> Vec<Pauli> {
    (0..p)
        .map(|_| {
            let l = Pauli::NON_IDENTITY[t % 3];
            t /= 3;
            l
        })
        .collect()
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn dedupe(ops: Vec<PauliString>, labels: Vec<String>) -> Result<OperatorSet, HarnessError> {
    let mut seen = HashSet::new();
    let mut keep_ops = Vec::new();
    let mut keep_labels = Vec::new();
    if ops.len() != labels.len() {
        return Ok(OperatorSet::new(ops, labels)?);
    }
    for (op, label) in ops.into_iter().zip(labels) {
        if seen.insert(op.to_string()) {
            keep_ops.push(op);
            keep_labels.push(label);
        }
    }
    Ok(OperatorSet::new(keep_ops, keep_labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_counts() {
        let gen = OperatorConfig::Contiguous {
            weights: vec![2, 4],
            letters: "all".into(),
            periodic: true,
        };
        assert_eq!(gen.generate(12).unwrap().len(), 12 * 9 + 12 * 81);
        let open = OperatorConfig::Contiguous {
            weights: vec![3],
            letters: "Z".into(),
            periodic: false,
        };
        let set = open.generate(5).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.labels()[2], "ZZZ@2");
        assert_eq!(set.operators()[2].to_string(), "IIZZZ");
    }

    #[test]
    fn bond_correlators() {
        let gen = OperatorConfig::BondCorrelators {
            p: 2,
            parity: Parity::Even,
            periodic: false,
        };
        let set = gen.generate(12).unwrap();
        // 6 even bonds, 15 pairs, 9 terms each
        assert_eq!(set.len(), 15 * 9);
        assert_eq!(set.operators()[0].to_string(), "XXXXIIIIIIII");
        assert_eq!(set.labels()[1], "b0-b2:YX");
        assert!(set.operators().iter().all(|o| o.weight() == 4));
    }

    #[test]
    fn plaquettes_and_explicit() {
        let set = OperatorConfig::Plaquettes { l: 3, letters: None }.generate(18).unwrap();
        assert_eq!(set.len(), 9);
        assert!(OperatorConfig::Plaquettes { l: 3, letters: None }.generate(16).is_err());
        let ex = OperatorConfig::Explicit {
            operators: vec!["XX".into(), "-ZZ".into()],
            labels: None,
        };
        assert_eq!(ex.generate(2).unwrap().labels()[1], "-ZZ");
    }

    #[test]
    fn sequence_enumeration() {
        assert_eq!(all_sequences(3).len(), 27);
        assert_eq!(combinations(4, 2).len(), 6);
    }
}
