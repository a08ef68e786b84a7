//! Expectation-value estimation from snapshot datasets.
//!
//! Shot values are computed in parallel and then reduced serially with
//! compensated summation, so results do not depend on the worker count.

mod evaluator;
mod report;

pub use evaluator::{shot_value, BlockPath, ShotEvaluator, DENSE_BLOCK_MAX};
pub use report::{write_csv, write_json, ReportRow, Status};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{norm_from_eigenvalues, ChannelEigenvalues, ChannelError, NormValue, ProtocolSpec};
use crate::operators::{OperatorSet, PauliString};
use crate::simulator::SnapshotDataset;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimationError {
    #[error("operator {operator} is not learnable under this protocol")]
    Unlearnable { operator: String },
    #[error("operator acts on {operator} qubits but the protocol has {protocol}")]
    DimensionMismatch { operator: usize, protocol: usize },
    #[error("eigenvalue table does not match the covering")]
    EigenvalueShape,
    #[error("dataset has no snapshots")]
    EmptyDataset,
    #[error("{groups} groups requested for {shots} shots")]
    InvalidGroups { groups: usize, shots: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn mean_of(values: &[f64]) -> f64 {
    let mut s = CompensatedSum::default();
    values.iter().for_each(|&v| s.add(v));
    s.total() / values.len() as f64
}

/// Mean and standard error of the mean (sample standard deviation over √n).
fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let mean = mean_of(values);
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let mut s = CompensatedSum::default();
    values.iter().for_each(|&v| s.add((v - mean) * (v - mean)));
    let var = s.total() / (values.len() - 1) as f64;
    (mean, (var / values.len() as f64).sqrt())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub median_of_means: f64,
    pub group_count: usize,
    pub shots_used: usize,
    /// Trailing shots left out of the median of means so groups are equal.
    pub dropped: usize,
}

impl Estimate {
    /// Aggregates shot values: mean and standard error over every shot,
    /// median of `groups` equal consecutive group means.
    pub fn from_values(values: &[f64], groups: usize) -> Result<Self, EstimationError> {
        if values.is_empty() {
            return Err(EstimationError::EmptyDataset);
        }
        if groups == 0 || groups > values.len() {
            return Err(EstimationError::InvalidGroups {
                groups,
                shots: values.len(),
            });
        }
        let (mean, std_error) = mean_and_error(values);
        let size = values.len() / groups;
        let means: Vec<f64> = values.chunks_exact(size).take(groups).map(mean_of).collect();
        Ok(Estimate {
            mean,
            std_error,
            median_of_means: median(means),
            group_count: groups,
            shots_used: values.len(),
            dropped: values.len() - groups * size,
        })
    }
}

/// Empirical `E[ô²]` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub mean: f64,
    pub std_error: f64,
}

pub fn shot_values(
    p: &PauliString,
    ds: &SnapshotDataset,
    eigs: &ChannelEigenvalues,
) -> Result<Vec<f64>, EstimationError> {
    if ds.is_empty() {
        return Err(EstimationError::EmptyDataset);
    }
    let ev = ShotEvaluator::new(p, ds.protocol(), eigs)?;
    Ok(ds.snapshots().par_iter().map(|s| ev.value(s)).collect())
}

pub fn estimate(
    p: &PauliString,
    ds: &SnapshotDataset,
    eigs: &ChannelEigenvalues,
    groups: usize,
) -> Result<Estimate, EstimationError> {
    Estimate::from_values(&shot_values(p, ds, eigs)?, groups)
}

pub fn second_moment(
    p: &PauliString,
    ds: &SnapshotDataset,
    eigs: &ChannelEigenvalues,
) -> Result<Moment, EstimationError> {
    let squares: Vec<f64> = shot_values(p, ds, eigs)?.into_iter().map(|v| v * v).collect();
    let (mean, std_error) = mean_and_error(&squares);
    Ok(Moment { mean, std_error })
}

/// Fraction of shots whose block matrix-element product is nonzero.
pub fn hit_frequency(
    p: &PauliString,
    ds: &SnapshotDataset,
    eigs: &ChannelEigenvalues,
) -> Result<f64, EstimationError> {
    if ds.is_empty() {
        return Err(EstimationError::EmptyDataset);
    }
    let ev = ShotEvaluator::new(p, ds.protocol(), eigs)?;
    let hits = ds.snapshots().par_iter().filter(|s| ev.hit(s)).count();
    Ok(hits as f64 / ds.len() as f64)
}

/// One dataset and the eigenvalues used to invert its channel.
#[derive(Clone, Copy, Debug)]
pub struct Source<'a> {
    pub dataset: &'a SnapshotDataset,
    pub eigenvalues: &'a ChannelEigenvalues,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetEstimate {
    pub label: String,
    pub operator: String,
    /// Index of the source used, `None` when no source can learn the operator.
    pub source: Option<usize>,
    pub norm_sq: NormValue,
    pub estimate: Option<Estimate>,
}

impl SetEstimate {
    pub fn status(&self) -> Status {
        if self.estimate.is_some() {
            Status::Estimated
        } else {
            Status::Unlearnable
        }
    }
}

/// For each operator, the protocol with the smallest finite squared shadow
/// norm and that norm; ties go to the lower index.
pub fn assign_min_norm(
    ops: &OperatorSet,
    protocols: &[(&ProtocolSpec, &ChannelEigenvalues)],
) -> Result<Vec<Option<(usize, f64)>>, EstimationError> {
    ops.operators()
        .iter()
        .map(|p| {
            let mut best: Option<(usize, f64)> = None;
            for (i, &(spec, eigs)) in protocols.iter().enumerate() {
                if p.num_qubits() != spec.num_qubits() {
                    return Err(EstimationError::DimensionMismatch {
                        operator: p.num_qubits(),
                        protocol: spec.num_qubits(),
                    });
                }
                evaluator::check_eigs(spec, eigs)?;
                if let NormValue::Finite(v) = norm_from_eigenvalues(p, spec, eigs)? {
                    if best.is_none_or(|(_, b)| v < b) {
                        best = Some((i, v));
                    }
                }
            }
            Ok(best)
        })
        .collect()
}

/// Estimates every operator from the source with the smallest squared shadow
/// norm. Operators no source can learn are reported with status UNLEARNABLE.
pub fn estimate_set(
    ops: &OperatorSet,
    sources: &[Source<'_>],
    groups: usize,
) -> Result<Vec<SetEstimate>, EstimationError> {
    let protocols: Vec<_> = sources.iter().map(|s| (s.dataset.protocol(), s.eigenvalues)).collect();
    let assignment = assign_min_norm(ops, &protocols)?;
    let mut out = Vec::with_capacity(ops.len());
    for ((label, p), choice) in ops.iter().zip(assignment) {
        let row = match choice {
            Some((i, norm)) => {
                let src = sources[i];
                SetEstimate {
                    label: label.to_string(),
                    operator: p.to_string(),
                    source: Some(i),
                    norm_sq: NormValue::Finite(norm),
                    estimate: Some(estimate(p, src.dataset, src.eigenvalues, groups)?),
                }
            }
            None => SetEstimate {
                label: label.to_string(),
                operator: p.to_string(),
                source: None,
                norm_sq: NormValue::Unlearnable,
                estimate: None,
            },
        };
        out.push(row);
    }
    Ok(out)
}
