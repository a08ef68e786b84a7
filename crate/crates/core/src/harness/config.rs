//! Campaign configuration documents and their resolution into concrete
//! states, protocols and operator sets.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::generators::OperatorConfig;
use super::HarnessError;
use crate::channels::{BasisFamily, ProtocolSpec, ScrambleMode};
use crate::operators::{Boundary, Covering, Honeycomb, OperatorSet, Parity};
use crate::simulator::{prepare_preset, QuantumState, StatePreset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub preset: StatePreset,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoveringConfig {
    Singletons,
    DimerChain {
        parity: Parity,
        boundary: Boundary,
    },
    NMerChain {
        size: usize,
        #[serde(default)]
        offset: usize,
    },
    Honeycomb {
        l: usize,
        orientation: usize,
    },
    Explicit {
        blocks: Vec<Vec<usize>>,
    },
}

impl CoveringConfig {
    pub fn build(&self, n: usize) -> Result<Covering, HarnessError> {
        let covering = match self {
            CoveringConfig::Singletons => Covering::singletons(n),
            CoveringConfig::DimerChain { parity, boundary } => Covering::dimer_chain(n, *parity, *boundary)?,
            CoveringConfig::NMerChain { size, offset } => Covering::n_mer_chain(n, *size, *offset)?,
            CoveringConfig::Honeycomb { l, orientation } => {
                let lattice = Honeycomb::new(*l)?;
                if lattice.num_qubits() != n {
                    return Err(HarnessError::Config(format!(
                        "honeycomb with l = {l} has {} qubits, state has {n}",
                        lattice.num_qubits()
                    )));
                }
                lattice.covering(*orientation)?
            }
            CoveringConfig::Explicit { blocks } => Covering::new(n, blocks.clone())?,
        };
        Ok(covering)
    }
}

/// Basis family for the multi-qubit blocks; single-qubit blocks always use
/// Pauli measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    PauliLocal,
    Bell,
    TunablePhase { phi: f64 },
    TunableDelta { delta: f64 },
    Ghz,
}

impl FamilyConfig {
    fn for_block(&self, size: usize) -> Result<BasisFamily, HarnessError> {
        if size == 1 {
            return Ok(BasisFamily::PauliLocal);
        }
        let family = match *self {
            FamilyConfig::PauliLocal => {
                return Err(HarnessError::Config(format!(
                    "pauli-local family on a block of {size} qubits"
                )))
            }
            FamilyConfig::Bell => BasisFamily::Bell,
            FamilyConfig::TunablePhase { phi } => BasisFamily::TunablePhase { phi },
            FamilyConfig::TunableDelta { delta } => BasisFamily::tunable_from_delta(delta)?,
            FamilyConfig::Ghz => BasisFamily::Ghz { n: size },
        };
        Ok(family)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub covering: CoveringConfig,
    pub family: FamilyConfig,
    #[serde(default)]
    pub scramble: ScrambleMode,
}

impl ProtocolConfig {
    pub fn build(&self, n: usize) -> Result<ProtocolSpec, HarnessError> {
        let covering = self.covering.build(n)?;
        let families = covering
            .blocks()
            .iter()
            .map(|b| self.family.for_block(b.len()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProtocolSpec::new(covering, families, self.scramble)?)
    }

    pub fn pauli() -> Self {
        ProtocolConfig {
            name: Some("pauli".into()),
            covering: CoveringConfig::Singletons,
            family: FamilyConfig::PauliLocal,
            scramble: ScrambleMode::AllQubits,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Directory for the sampled JSON-lines datasets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datasets: Option<PathBuf>,
}

fn default_shots() -> u64 {
    10_000
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_groups() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub state: StateConfig,
    pub protocols: Vec<ProtocolConfig>,
    /// Protocol the budgets are compared against, typically Pauli measurements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ProtocolConfig>,
    pub operators: Vec<OperatorConfig>,
    /// Shots per protocol.
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub master_seed: u64,
    /// Median-of-means groups.
    #[serde(default = "default_groups")]
    pub groups: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: CampaignConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        if self.state.n == 0 {
            return Err(HarnessError::Config("state.n must be positive".into()));
        }
        if self.shots == 0 {
            return Err(HarnessError::Config("shots must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(HarnessError::Config("epsilon must be positive".into()));
        }
        if self.groups == 0 {
            return Err(HarnessError::Config("groups must be at least 1".into()));
        }
        if self.protocols.is_empty() {
            return Err(HarnessError::Config("at least one protocol is required".into()));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Campaign, HarnessError> {
        self.check()?;
        let n = self.state.n;
        let named = |i: usize, p: &ProtocolConfig| -> Result<NamedProtocol, HarnessError> {
            Ok(NamedProtocol {
                name: p.name.clone().unwrap_or_else(|| format!("protocol{i}")),
                spec: p.build(n)?,
            })
        };
        let protocols = self
            .protocols
            .iter()
            .enumerate()
            .map(|(i, p)| named(i, p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut names: Vec<&str> = protocols.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::Config("protocol names must be distinct".into()));
        }
        let reference = self
            .reference
            .as_ref()
            .map(|p| named(self.protocols.len(), p))
            .transpose()?;
        let mut operators = Vec::new();
        let mut labels = Vec::new();
        for gen in &self.operators {
            let set = gen.generate(n)?;
            operators.extend(set.operators().iter().cloned());
            labels.extend(set.labels().iter().cloned());
        }
        let operators = OperatorSet::new(operators, labels)?;
        if operators.is_empty() {
            return Err(HarnessError::Config("the operator set is empty".into()));
        }
        Ok(Campaign {
            config: self.clone(),
            protocols,
            reference,
            operators,
        })
    }

    pub fn prepare_state(&self) -> Result<QuantumState, HarnessError> {
        Ok(prepare_preset(self.state.preset, self.state.n, self.state.seed)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedProtocol {
    pub name: String,
    pub spec: ProtocolSpec,
}

/// A checked configuration with everything but the state built.
#[derive(Clone, Debug, PartialEq)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub protocols: Vec<NamedProtocol>,
    pub reference: Option<NamedProtocol>,
    pub operators: OperatorSet,
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "state": {"preset": "cluster-1d", "n": 6},
        "protocols": [
            {"name": "even", "covering": {"kind": "dimer-chain", "parity": "even", "boundary": "periodic"}, "family": {"kind": "bell"}},
            {"name": "odd", "covering": {"kind": "dimer-chain", "parity": "odd", "boundary": "periodic"}, "family": {"kind": "tunable-delta", "delta": 0.2}}
        ],
        "reference": {"covering": {"kind": "singletons"}, "family": {"kind": "pauli-local"}},
        "operators": [{"kind": "explicit", "operators": ["ZZIIII", "IXXIII"]}],
        "shots": 100
    }"#;

    #[test]
    fn parses_and_resolves() {
        let config = CampaignConfig::from_json(EXAMPLE).unwrap();
        assert_eq!(config.epsilon, 0.1);
        let campaign = config.resolve().unwrap();
        assert_eq!(campaign.protocols.len(), 2);
        assert_eq!(campaign.protocols[1].spec.families()[0].name(), campaign.protocols[1].spec.families()[1].name());
        assert_eq!(campaign.operators.len(), 2);
        assert!(campaign.reference.is_some());
    }

    #[test]
    fn round_trips_through_json() {
        let config = CampaignConfig::from_json(EXAMPLE).unwrap();
        let again = CampaignConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(again, config);
        assert_eq!(again.resolve().unwrap(), config.resolve().unwrap());
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let bad_shots = EXAMPLE.replace("\"shots\": 100", "\"shots\": 0");
        assert!(CampaignConfig::from_json(&bad_shots).is_err());
        let bad_field = EXAMPLE.replace("\"shots\"", "\"shotz\"");
        assert!(CampaignConfig::from_json(&bad_field).is_err());
        let wrong_n = EXAMPLE.replace("\"ZZIIII\"", "\"ZZIII\"");
        assert!(CampaignConfig::from_json(&wrong_n).unwrap().resolve().is_err());
        let ghz_on_pairs = EXAMPLE.replace("{\"kind\": \"bell\"}", "{\"kind\": \"pauli-local\"}");
        assert!(CampaignConfig::from_json(&ghz_on_pairs).unwrap().resolve().is_err());
    }
}
