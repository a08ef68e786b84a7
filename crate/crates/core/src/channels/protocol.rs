use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::eigen::{
    bell_block_eigs, ghz_block_eigs, pauli_block_eigs, tunable_block_eigs, BlockEigenvalues,
    ChannelEigenvalues,
};
use super::oracle::{delta_from_phi, phi_from_delta};
use super::ChannelError;
use crate::operators::Covering;
use crate::simulator::circuit::phase_as_clifford;

/// Measurement basis used on one block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisFamily {
    /// Single qubit, random Pauli basis.
    PauliLocal,
    /// Two qubits, Bell basis via CZ and Hadamards.
    Bell,
    /// Two qubits, CPhase(φ) basis; φ = π is the Bell point, φ = 0 a product basis.
    TunablePhase { phi: f64 },
    /// `n` qubits, GHZ basis.
    Ghz { n: usize },
}

impl BasisFamily {
    pub fn block_size(&self) -> usize {
        match *self {
            BasisFamily::PauliLocal => 1,
            BasisFamily::Bell | BasisFamily::TunablePhase { .. } => 2,
            BasisFamily::Ghz { n } => n,
        }
    }

    /// Tunable family with deformation `δ`.
    pub fn tunable_from_delta(delta: f64) -> Result<Self, ChannelError> {
        Ok(BasisFamily::TunablePhase {
            phi: phi_from_delta(delta)?,
        })
    }

    pub fn is_clifford(&self) -> bool {
        match *self {
            BasisFamily::TunablePhase { phi } => phase_as_clifford(phi).is_some(),
            _ => true,
        }
    }

    pub fn eigenvalues(&self) -> Result<BlockEigenvalues, ChannelError> {
        match *self {
            BasisFamily::PauliLocal => Ok(pauli_block_eigs()),
            BasisFamily::Bell => Ok(bell_block_eigs()),
            BasisFamily::TunablePhase { phi } => tunable_block_eigs(delta_from_phi(phi)?),
            BasisFamily::Ghz { n } => ghz_block_eigs(n),
        }
    }

    /// Short name used in labels and reports.
    pub fn name(&self) -> String {
        match *self {
            BasisFamily::PauliLocal => "pauli".into(),
            BasisFamily::Bell => "bell".into(),
            BasisFamily::TunablePhase { phi } => format!("tunable(phi={phi:.6})"),
            BasisFamily::Ghz { n } => format!("ghz{n}"),
        }
    }

    fn validate(&self, size: usize) -> Result<(), ChannelError> {
        if let BasisFamily::TunablePhase { phi } = *self {
            if !(0.0..=PI).contains(&phi) {
                return Err(ChannelError::OutOfRange { name: "phi", value: phi });
            }
        }
        if let BasisFamily::Ghz { n } = *self {
            if n < 2 {
                return Err(ChannelError::OutOfRange {
                    name: "ghz size",
                    value: n as f64,
                });
            }
        }
        if self.block_size() != size {
            return Err(ChannelError::FamilyMismatch {
                family: self.name(),
                size,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScrambleMode {
    /// Every qubit gets a random Clifford.
    #[default]
    AllQubits,
    /// Bell dimers scramble only their first qubit; other blocks scramble all.
    OnePerBlock,
}

/// Covering plus one basis family per block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProtocolRepr", into = "ProtocolRepr")]
pub struct ProtocolSpec {
    covering: Covering,
    families: Vec<BasisFamily>,
    scramble: ScrambleMode,
}

#[derive(Serialize, Deserialize)]
struct ProtocolRepr {
    blocks: Covering,
    families: Vec<BasisFamily>,
    #[serde(default)]
    scramble: ScrambleMode,
}

impl TryFrom<ProtocolRepr> for ProtocolSpec {
    type Error = ChannelError;

    fn try_from(r: ProtocolRepr) -> Result<Self, Self::Error> {
        ProtocolSpec::new(r.blocks, r.families, r.scramble)
    }
}

impl From<ProtocolSpec> for ProtocolRepr {
    fn from(p: ProtocolSpec) -> Self {
        ProtocolRepr {
            blocks: p.covering,
            families: p.families,
            scramble: p.scramble,
        }
    }
}

impl ProtocolSpec {
    pub fn new(
        covering: Covering,
        families: Vec<BasisFamily>,
        scramble: ScrambleMode,
    ) -> Result<Self, ChannelError> {
        if families.len() != covering.num_blocks() {
            return Err(ChannelError::InvalidProtocol(format!(
                "{} families for {} blocks",
                families.len(),
                covering.num_blocks()
            )));
        }
        for (family, block) in families.iter().zip(covering.blocks()) {
            family.validate(block.len())?;
        }
        Ok(ProtocolSpec {
            covering,
            families,
            scramble,
        })
    }

    /// Picks the family for each block from its size.
    pub fn from_sizes(
        covering: Covering,
        scramble: ScrambleMode,
        family_for_size: impl Fn(usize) -> Result<BasisFamily, ChannelError>,
    ) -> Result<Self, ChannelError> {
        let families = covering
            .blocks()
            .iter()
            .map(|b| family_for_size(b.len()))
            .collect::<Result<Vec<_>, _>>()?;
        ProtocolSpec::new(covering, families, scramble)
    }

    /// Random Pauli measurements on `n` qubits.
    pub fn pauli(n: usize) -> Self {
        let covering = Covering::singletons(n);
        let families = vec![BasisFamily::PauliLocal; n];
        ProtocolSpec::new(covering, families, ScrambleMode::AllQubits).expect("singletons")
    }

    /// Bell pairs on dimers, Pauli measurements on singletons.
    pub fn bell(covering: Covering, scramble: ScrambleMode) -> Result<Self, ChannelError> {
        ProtocolSpec::from_sizes(covering, scramble, |size| match size {
            1 => Ok(BasisFamily::PauliLocal),
            2 => Ok(BasisFamily::Bell),
            _ => Err(ChannelError::FamilyMismatch {
                family: "bell".into(),
                size,
            }),
        })
    }

    /// CPhase(φ) bases on dimers, Pauli measurements on singletons.
    pub fn tunable(covering: Covering, phi: f64) -> Result<Self, ChannelError> {
        ProtocolSpec::from_sizes(covering, ScrambleMode::AllQubits, |size| match size {
            1 => Ok(BasisFamily::PauliLocal),
            2 => Ok(BasisFamily::TunablePhase { phi }),
            _ => Err(ChannelError::FamilyMismatch {
                family: "tunable".into(),
                size,
            }),
        })
    }

    /// GHZ bases on every block of two or more qubits.
    pub fn ghz(covering: Covering) -> Result<Self, ChannelError> {
        ProtocolSpec::from_sizes(covering, ScrambleMode::AllQubits, |size| {
            Ok(if size == 1 {
                BasisFamily::PauliLocal
            } else {
                BasisFamily::Ghz { n: size }
            })
        })
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn families(&self) -> &[BasisFamily] {
        &self.families
    }

    pub fn scramble(&self) -> ScrambleMode {
        self.scramble
    }

    pub fn num_qubits(&self) -> usize {
        self.covering.num_qubits()
    }

    pub fn is_clifford(&self) -> bool {
        self.families.iter().all(BasisFamily::is_clifford)
    }

    /// Which qubits of block `b` receive a random Clifford.
    pub fn scrambled_in_block(&self, b: usize) -> Vec<bool> {
        let size = self.covering.blocks()[b].len();
        match (self.scramble, self.families[b]) {
            (ScrambleMode::OnePerBlock, BasisFamily::Bell) => {
                let mut mask = vec![false; size];
                mask[0] = true;
                mask
            }
            _ => vec![true; size],
        }
    }

    pub fn eigenvalues(&self) -> Result<ChannelEigenvalues, ChannelError> {
        Ok(ChannelEigenvalues::new(
            self.families
                .iter()
                .map(BasisFamily::eigenvalues)
                .collect::<Result<Vec<_>, _>>()?,
        ))
    }

    /// Compact description: distinct family names and the scramble mode.
    pub fn label(&self) -> String {
        let mut names: Vec<String> = Vec::new();
        for f in &self.families {
            let name = f.name();
            if !names.contains(&name) {
                names.push(name);
            }
        }
        let mut label = names.join("+");
        if self.scramble == ScrambleMode::OnePerBlock {
            label.push_str("/one-per-block");
        }
        label
    }
}
