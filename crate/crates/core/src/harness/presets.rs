//! Named campaigns and their budget analyses.

use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, CoveringConfig, FamilyConfig, ProtocolConfig, StateConfig};
use super::generators::{all_sequences, OperatorConfig};
use super::norm::{budget_summary, BudgetSummary};
use super::HarnessError;
use crate::channels::ScrambleMode;
use crate::operators::{contiguous_string, Boundary, OperatorSet, Parity};
use crate::simulator::StatePreset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: [PresetInfo; 3] = [
    PresetInfo {
        name: "string-1d",
        description: "12-site cluster chain, Bell dimers on both dimer coverings, contiguous Z strings of weight 2, 4, 6",
    },
    PresetInfo {
        name: "honeycomb",
        description: "18-site honeycomb torus in |0...0>, Bell dimers in two orientations, all-Z hexagon plaquettes",
    },
    PresetInfo {
        name: "multipoint",
        description: "12-site open cluster chain, Bell dimers on even bonds, two-bond energy correlators",
    },
];

pub fn list() -> &'static [PresetInfo] {
    &PRESETS
}

const SHOTS: u64 = 20_000;
const STRING_N: usize = 12;
const HONEYCOMB_L: usize = 3;

fn bell_dimers(name: &str, parity: Parity, boundary: Boundary) -> ProtocolConfig {
    ProtocolConfig {
        name: Some(name.into()),
        covering: CoveringConfig::DimerChain { parity, boundary },
        family: FamilyConfig::Bell,
        scramble: ScrambleMode::AllQubits,
    }
}

fn campaign(
    state: StateConfig,
    protocols: Vec<ProtocolConfig>,
    operators: Vec<OperatorConfig>,
) -> CampaignConfig {
    CampaignConfig {
        state,
        protocols,
        reference: Some(ProtocolConfig::pauli()),
        operators,
        shots: SHOTS,
        epsilon: 0.1,
        master_seed: 0,
        groups: 1,
        output: None,
    }
}

pub fn config(name: &str) -> Result<CampaignConfig, HarnessError> {
    let config = match name {
        "string-1d" => campaign(
            StateConfig {
                preset: StatePreset::Cluster1d,
                n: STRING_N,
                seed: 0,
            },
            vec![
                bell_dimers("even", Parity::Even, Boundary::Periodic),
                bell_dimers("odd", Parity::Odd, Boundary::Periodic),
            ],
            vec![OperatorConfig::Contiguous {
                weights: vec![2, 4, 6],
                letters: "Z".into(),
                periodic: true,
            }],
        ),
        "honeycomb" => {
            let honeycomb = |t: usize| ProtocolConfig {
                name: Some(format!("orientation{t}")),
                covering: CoveringConfig::Honeycomb {
                    l: HONEYCOMB_L,
                    orientation: t,
                },
                family: FamilyConfig::Bell,
                scramble: ScrambleMode::AllQubits,
            };
            campaign(
                StateConfig {
                    preset: StatePreset::ComputationalZero,
                    n: 2 * HONEYCOMB_L * HONEYCOMB_L,
                    seed: 0,
                },
                vec![honeycomb(0), honeycomb(1)],
                vec![OperatorConfig::Plaquettes {
                    l: HONEYCOMB_L,
                    letters: None,
                }],
            )
        }
        "multipoint" => campaign(
            StateConfig {
                preset: StatePreset::Cluster1d,
                n: STRING_N,
                seed: 0,
            },
            vec![bell_dimers("even", Parity::Even, Boundary::Open)],
            vec![OperatorConfig::BondCorrelators {
                p: 2,
                parity: Parity::Even,
                periodic: false,
            }],
        ),
        other => return Err(HarnessError::Config(format!("unknown preset {other:?}"))),
    };
    Ok(config)
}

/// Budget of the full weight-`k` contiguous set (every letter sequence at
/// every start) split over the two periodic dimer coverings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringBudget {
    pub k: usize,
    pub operators: usize,
    pub split_budget: u64,
    /// `2 ln(M/2) 3^{k/2} / ε²`.
    pub closed_form: f64,
    pub unlearnable: usize,
}

pub fn string_budgets(n: usize, ks: &[usize], epsilon: f64) -> Result<Vec<StringBudget>, HarnessError> {
    let base = config("string-1d")?;
    let mut base = CampaignConfig {
        state: StateConfig { n, ..base.state },
        ..base
    };
    base.epsilon = epsilon;
    let campaign = base.resolve()?;
    let mut out = Vec::new();
    for &k in ks {
        if k % 2 == 1 || k == 0 || k > n {
            return Err(HarnessError::Config(format!("weight {k} is not an even weight up to {n}")));
        }
        let mut ops = Vec::new();
        for start in 0..n {
            for seq in all_sequences(k) {
                ops.push(contiguous_string(n, start, &seq, true)?);
            }
        }
        let set = OperatorSet::from_operators(ops)?;
        let summary = budget_summary(&set, &campaign.protocols, None, epsilon)?;
        let m = set.len() as f64;
        out.push(StringBudget {
            k,
            operators: set.len(),
            split_budget: summary.split_budget.unwrap_or(0),
            closed_form: 2.0 * (m / 2.0).ln() * 3f64.powi(k as i32 / 2) / (epsilon * epsilon),
            unlearnable: summary.unlearnable,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoneycombAnalysis {
    pub plaquettes: usize,
    /// Fraction of plaquettes compatible with each orientation.
    pub compatible_fraction: Vec<f64>,
    pub summary: BudgetSummary,
}

pub fn honeycomb_analysis() -> Result<HoneycombAnalysis, HarnessError> {
    let campaign = config("honeycomb")?.resolve()?;
    let ops = &campaign.operators;
    let mut compatible_fraction = Vec::new();
    for p in &campaign.protocols {
        let mut hits = 0;
        for op in ops.operators() {
            if p.spec.covering().is_compatible(op)? {
                hits += 1;
            }
        }
        compatible_fraction.push(hits as f64 / ops.len() as f64);
    }
    let summary = budget_summary(ops, &campaign.protocols, campaign.reference.as_ref(), campaign.config.epsilon)?;
    Ok(HoneycombAnalysis {
        plaquettes: ops.len(),
        compatible_fraction,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipointAnalysis {
    pub p: usize,
    pub operators: usize,
    pub bell_prefactor: f64,
    pub pauli_prefactor: f64,
    pub prefactor_ratio: f64,
    pub bell_budget: u64,
    pub pauli_budget: u64,
}

pub fn multipoint_analysis(p: usize) -> Result<MultipointAnalysis, HarnessError> {
    let mut cfg = config("multipoint")?;
    cfg.operators = vec![OperatorConfig::BondCorrelators {
        p,
        parity: Parity::Even,
        periodic: false,
    }];
    let campaign = cfg.resolve()?;
    let summary = budget_summary(
        &campaign.operators,
        &campaign.protocols,
        campaign.reference.as_ref(),
        cfg.epsilon,
    )?;
    let missing = || HarnessError::Validation("multipoint set has unlearnable operators".into());
    let reference = summary.reference.as_ref().ok_or_else(missing)?;
    let bell_prefactor = summary.prefactor.filter(|_| summary.unlearnable == 0).ok_or_else(missing)?;
    let pauli_prefactor = reference.prefactor.ok_or_else(missing)?;
    Ok(MultipointAnalysis {
        p,
        operators: campaign.operators.len(),
        bell_prefactor,
        pauli_prefactor,
        prefactor_ratio: pauli_prefactor / bell_prefactor,
        bell_budget: summary.split_budget.ok_or_else(missing)?,
        pauli_budget: reference.budget.ok_or_else(missing)?,
    })
}

/// The preset's analysis as JSON, for `preset show`.
pub fn analysis(name: &str) -> Result<serde_json::Value, HarnessError> {
    Ok(match name {
        "string-1d" => serde_json::to_value(string_budgets(STRING_N, &[2, 4, 6], 0.1)?)?,
        "honeycomb" => serde_json::to_value(honeycomb_analysis()?)?,
        "multipoint" => serde_json::to_value(multipoint_analysis(2)?)?,
        other => return Err(HarnessError::Config(format!("unknown preset {other:?}"))),
    })
}
