//! Analytic norm tables and sample budgets (no simulation).

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::{Campaign, NamedProtocol};
use super::HarnessError;
use crate::channels::{
    budget_from_values, norm_from_eigenvalues, rational_annotation, ChannelEigenvalues, NormValue,
};
use crate::estimation::assign_min_norm;
use crate::operators::OperatorSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub label: String,
    pub operator: String,
    pub weight: usize,
    pub protocol: String,
    pub norm_sq: NormValue,
    /// Rational form of the norm when it has a small denominator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_exact: Option<String>,
    /// Whether this protocol is the one the operator is assigned to.
    pub assigned: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolBudget {
    pub protocol: String,
    pub assigned: usize,
    pub max_norm_sq: Option<f64>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBudget {
    pub protocol: String,
    /// `None` when the reference cannot learn every operator.
    pub prefactor: Option<f64>,
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetSummary {
    pub epsilon: f64,
    pub operators: usize,
    pub unlearnable: usize,
    pub per_protocol: Vec<ProtocolBudget>,
    /// Sum of per-protocol budgets over learnable operators.
    pub split_budget: Option<u64>,
    /// Sum over protocols of the largest assigned squared norm.
    pub prefactor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceBudget>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub rows: Vec<NormRow>,
    pub summary: BudgetSummary,
}

fn eigenvalues(protocols: &[NamedProtocol]) -> Result<Vec<ChannelEigenvalues>, HarnessError> {
    Ok(protocols
        .iter()
        .map(|p| p.spec.eigenvalues())
        .collect::<Result<Vec<_>, _>>()?)
}

/// Budget summary for an operator set split over protocols by smallest norm.
pub fn budget_summary(
    ops: &OperatorSet,
    protocols: &[NamedProtocol],
    reference: Option<&NamedProtocol>,
    epsilon: f64,
) -> Result<BudgetSummary, HarnessError> {
    let eigs = eigenvalues(protocols)?;
    let pairs: Vec<_> = protocols.iter().map(|p| &p.spec).zip(&eigs).collect();
    let assignment = assign_min_norm(ops, &pairs)?;
    let mut groups: Vec<Vec<NormValue>> = vec![Vec::new(); protocols.len()];
    let mut unlearnable = 0;
    for choice in &assignment {
        match choice {
            Some((i, v)) => groups[*i].push(NormValue::Finite(*v)),
            None => unlearnable += 1,
        }
    }
    let mut per_protocol = Vec::new();
    let mut split = 0u64;
    let mut prefactor = 0.0;
    for (p, g) in protocols.iter().zip(&groups) {
        let max = g.iter().filter_map(NormValue::finite).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
        let budget = if g.is_empty() { None } else { Some(budget_from_values(g, epsilon)?) };
        split += budget.unwrap_or(0);
        prefactor += max.unwrap_or(0.0);
        per_protocol.push(ProtocolBudget {
            protocol: p.name.clone(),
            assigned: g.len(),
            max_norm_sq: max,
            budget,
        });
    }
    let any = unlearnable < ops.len();
    let reference = match reference {
        None => None,
        Some(r) => {
            let e = r.spec.eigenvalues()?;
            let values = ops
                .operators()
                .iter()
                .map(|p| norm_from_eigenvalues(p, &r.spec, &e))
                .collect::<Result<Vec<_>, _>>()?;
            let all = values.iter().all(NormValue::is_learnable);
            Some(ReferenceBudget {
                protocol: r.name.clone(),
                prefactor: all.then(|| values.iter().filter_map(NormValue::finite).fold(0.0, f64::max)),
                budget: if all { Some(budget_from_values(&values, epsilon)?) } else { None },
            })
        }
    };
    Ok(BudgetSummary {
        epsilon,
        operators: ops.len(),
        unlearnable,
        per_protocol,
        split_budget: any.then_some(split),
        prefactor: any.then_some(prefactor),
        reference,
    })
}

pub fn cmd_norm(campaign: &Campaign) -> Result<NormReport, HarnessError> {
    let eigs = eigenvalues(&campaign.protocols)?;
    let pairs: Vec<_> = campaign.protocols.iter().map(|p| &p.spec).zip(&eigs).collect();
    let assignment = assign_min_norm(&campaign.operators, &pairs)?;
    let mut rows = Vec::new();
    for ((label, op), choice) in campaign.operators.iter().zip(&assignment) {
        for (i, (p, e)) in campaign.protocols.iter().zip(&eigs).enumerate() {
            let norm_sq = norm_from_eigenvalues(op, &p.spec, e)?;
            rows.push(NormRow {
                label: label.to_string(),
                operator: op.to_string(),
                weight: op.weight(),
                protocol: p.name.clone(),
                norm_exact: norm_sq.finite().and_then(rational_annotation),
                norm_sq,
                assigned: choice.map(|(j, _)| j) == Some(i),
            });
        }
    }
    let summary = budget_summary(
        &campaign.operators,
        &campaign.protocols,
        campaign.reference.as_ref(),
        campaign.config.epsilon,
    )?;
    Ok(NormReport { rows, summary })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "UNLEARNABLE".into())
}

impl NormReport {
    /// One row per (operator, protocol); the campaign-level budget columns
    /// repeat on every row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "label",
            "operator",
            "weight",
            "protocol",
            "norm_sq",
            "norm_exact",
            "assigned",
            "split_budget",
            "budget_prefactor",
            "reference_prefactor",
        ])?;
        let reference = self.summary.reference.as_ref();
        for r in &self.rows {
            out.write_record([
                r.label.clone(),
                r.operator.clone(),
                r.weight.to_string(),
                r.protocol.clone(),
                r.norm_sq.to_string(),
                r.norm_exact.clone().unwrap_or_default(),
                r.assigned.to_string(),
                opt(self.summary.split_budget),
                opt(self.summary.prefactor),
                reference.map(|x| opt(x.prefactor)).unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), HarnessError> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}
