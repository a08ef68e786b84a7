//! Full estimation runs: sample one dataset per protocol, then estimate every
//! operator from the dataset with the smallest shadow norm.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Campaign, OutputFormat};
use super::norm::{budget_summary, BudgetSummary};
use super::HarnessError;
use crate::estimation::{estimate_set, write_csv, ReportRow, Source};
use crate::simulator::{sample_dataset, shot_seed, SnapshotDataset};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EstimateOptions {
    /// Sampling threads; 0 lets the pool pick.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub rows: Vec<ReportRow>,
    pub summary: BudgetSummary,
    #[serde(skip)]
    pub datasets: Vec<(String, SnapshotDataset)>,
}

impl EstimateReport {
    pub fn write<W: Write>(&self, format: OutputFormat, mut w: W) -> Result<(), HarnessError> {
        match format {
            OutputFormat::Csv => write_csv(&self.rows, w)?,
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut w, self)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Writes each dataset to `<dir>/<protocol name>.jsonl`.
    pub fn save_datasets(&self, dir: &Path) -> Result<(), HarnessError> {
        std::fs::create_dir_all(dir)?;
        for (name, ds) in &self.datasets {
            ds.save(&dir.join(format!("{name}.jsonl")))?;
        }
        Ok(())
    }
}

pub fn cmd_estimate(campaign: &Campaign, options: EstimateOptions) -> Result<EstimateReport, HarnessError> {
    let config = &campaign.config;
    let state = config.prepare_state()?;
    let mut datasets = Vec::with_capacity(campaign.protocols.len());
    for (i, p) in campaign.protocols.iter().enumerate() {
        let seed = shot_seed(config.master_seed, i as u64);
        let ds = sample_dataset(&state, &p.spec, config.shots, seed, options.workers)?
            .with_preset(config.state.preset.name(), config.state.seed);
        datasets.push((p.name.clone(), ds));
    }
    let eigs = campaign
        .protocols
        .iter()
        .map(|p| p.spec.eigenvalues())
        .collect::<Result<Vec<_>, _>>()?;
    let sources: Vec<Source<'_>> = datasets
        .iter()
        .zip(&eigs)
        .map(|((_, dataset), eigenvalues)| Source { dataset, eigenvalues })
        .collect();
    let set = estimate_set(&campaign.operators, &sources, config.groups)?;
    let summary = budget_summary(
        &campaign.operators,
        &campaign.protocols,
        campaign.reference.as_ref(),
        config.epsilon,
    )?;
    let names: Vec<String> = datasets.iter().map(|(n, _)| n.clone()).collect();
    let mut rows = Vec::with_capacity(set.len());
    for (row, op) in set.iter().zip(campaign.operators.operators()) {
        let mut r = ReportRow::from_set_estimate(row, &names);
        r.exact = state.expectation(op).ok();
        r.budget_prefactor = summary.prefactor;
        rows.push(r);
    }
    Ok(EstimateReport {
        rows,
        summary,
        datasets,
    })
}
