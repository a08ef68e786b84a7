use std::fmt;

use serde::{Deserialize, Serialize};

use super::eigen::{ChannelEigenvalues, ZERO_THRESHOLD};
use super::protocol::ProtocolSpec;
use super::ChannelError;
use crate::operators::PauliString;

/// Squared shadow norm, or the marker for operators the protocol cannot learn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormValue {
    Finite(f64),
    Unlearnable,
}

impl NormValue {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            NormValue::Finite(v) => Some(v),
            NormValue::Unlearnable => None,
        }
    }

    pub fn is_learnable(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{v}"),
            NormValue::Unlearnable => f.write_str("UNLEARNABLE"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowNorm {
    pub value: NormValue,
    pub operator: String,
    pub protocol: String,
}

impl ShadowNorm {
    pub fn finite(&self) -> Option<f64> {
        self.value.finite()
    }
}

/// `Π_blocks λ(pattern)^{-1}` from a precomputed table; `Unlearnable` when a
/// block pattern in the support has a zero eigenvalue.
pub fn norm_from_eigenvalues(
    p: &PauliString,
    spec: &ProtocolSpec,
    eigs: &ChannelEigenvalues,
) -> Result<NormValue, ChannelError> {
    let patterns = spec.covering().patterns(p)?;
    let mut norm = 1.0;
    for (pattern, table) in patterns.iter().zip(eigs.blocks()) {
        let lambda = table.get(*pattern);
        if lambda < ZERO_THRESHOLD {
            return Ok(NormValue::Unlearnable);
        }
        norm /= lambda;
    }
    Ok(NormValue::Finite(norm))
}

/// Squared shadow norm of a Pauli string under a protocol.
pub fn shadow_norm_sq(p: &PauliString, spec: &ProtocolSpec) -> Result<ShadowNorm, ChannelError> {
    let eigs = spec.eigenvalues()?;
    Ok(ShadowNorm {
        value: norm_from_eigenvalues(p, spec, &eigs)?,
        operator: p.to_string(),
        protocol: spec.label(),
    })
}

/// Shots needed to estimate `M` operators to accuracy `epsilon`:
/// `ceil(ln(M) · max ‖O‖² / ε²)`, at least 1.
pub fn sample_budget(norms: &[ShadowNorm], epsilon: f64) -> Result<u64, ChannelError> {
    let values: Vec<NormValue> = norms.iter().map(|n| n.value).collect();
    budget_from_values(&values, epsilon)
}

pub(crate) fn budget_from_values(values: &[NormValue], epsilon: f64) -> Result<u64, ChannelError> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(ChannelError::OutOfRange {
            name: "epsilon",
            value: epsilon,
        });
    }
    if values.is_empty() {
        return Err(ChannelError::EmptyNormList);
    }
    let mut max: f64 = 0.0;
    for v in values {
        max = max.max(v.finite().ok_or(ChannelError::UnlearnableInBudget)?);
    }
    let m = values.len() as f64;
    let shots = (m.ln() * max / (epsilon * epsilon)).ceil();
    Ok((shots as u64).max(1))
}

/// Total shots when the operators are split across several coverings, each
/// measured with its own budget.
pub fn sample_budget_split(groups: &[Vec<ShadowNorm>], epsilon: f64) -> Result<u64, ChannelError> {
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| sample_budget(g, epsilon))
        .sum()
}

/// Sum over coverings of the largest squared norm assigned to each.
pub fn budget_prefactor(groups: &[Vec<ShadowNorm>]) -> Result<f64, ChannelError> {
    groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            g.iter()
                .map(|n| n.finite().ok_or(ChannelError::UnlearnableInBudget))
                .try_fold(0.0f64, |m, v| Ok(m.max(v?)))
        })
        .sum()
}
