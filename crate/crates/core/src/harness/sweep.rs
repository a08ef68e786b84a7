//! Norm sweeps over operator weight, basis deformation and GHZ block size.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, CoveringConfig, FamilyConfig, ProtocolConfig, StateConfig};
use super::generators::OperatorConfig;
use super::norm::cmd_norm;
use super::HarnessError;
use crate::channels::{ScrambleMode, NormValue};
use crate::estimation::{hit_frequency, second_moment};
use crate::operators::{Boundary, Parity};
use crate::simulator::{prepare_preset, sample_dataset, shot_seed, StatePreset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    K,
    Delta,
    N,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::K => "k",
            SweepAxis::Delta => "delta",
            SweepAxis::N => "n",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "k" => Ok(SweepAxis::K),
            "delta" => Ok(SweepAxis::Delta),
            "n" => Ok(SweepAxis::N),
            _ => Err(HarnessError::Config(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// Shots for the optional Monte Carlo columns, sampled on the maximally
/// mixed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub shots: u64,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub axis: SweepAxis,
    /// Weights for the `k` axis.
    pub ks: Vec<usize>,
    /// Deformations: one curve each on the `k` axis, the grid on the `delta` axis.
    pub deltas: Vec<f64>,
    /// Weight used on the `delta` axis.
    pub k_fixed: usize,
    /// GHZ block sizes for the `n` axis.
    pub ns: Vec<usize>,
    pub epsilon: f64,
    pub empirical: Option<Empirical>,
}

impl SweepOptions {
    pub fn new(axis: SweepAxis) -> Self {
        let ln2 = std::f64::consts::LN_2;
        let deltas = match axis {
            SweepAxis::Delta => (0..=10).map(|i| ln2 * i as f64 / 10.0).collect(),
            _ => vec![0.0, 0.1, (11.0f64 / 8.0).ln(), ln2],
        };
        SweepOptions {
            axis,
            ks: (1..=8).collect(),
            deltas,
            k_fixed: 2,
            ns: (1..=8).collect(),
            epsilon: 0.1,
            empirical: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub block_size: usize,
    pub norm_sq: NormValue,
    /// `norm_sq^{1/k}`: the per-site norm base.
    pub per_site: Option<f64>,
    /// Shots for accuracy `epsilon` on this one operator, `ceil(‖P‖²/ε²)`.
    pub budget: Option<u64>,
    pub second_moment: Option<f64>,
    pub second_moment_se: Option<f64>,
    pub hit_frequency: Option<f64>,
}

/// The single-operator campaign behind one sweep row: a weight-`k` Z string
/// starting at site 0 of an open chain.
fn row_config(family: FamilyConfig, block: usize, k: usize, epsilon: f64) -> CampaignConfig {
    let n = if block == 1 { k } else { block * k.div_ceil(block) };
    let covering = match block {
        1 => CoveringConfig::Singletons,
        2 => CoveringConfig::DimerChain {
            parity: Parity::Even,
            boundary: Boundary::Open,
        },
        _ => CoveringConfig::NMerChain { size: block, offset: 0 },
    };
    let op: String = (0..n).map(|q| if q < k { 'Z' } else { 'I' }).collect();
    CampaignConfig {
        state: StateConfig {
            preset: StatePreset::MaximallyMixed,
            n,
            seed: 0,
        },
        protocols: vec![ProtocolConfig {
            name: Some("sweep".into()),
            covering,
            family,
            scramble: ScrambleMode::AllQubits,
        }],
        reference: None,
        operators: vec![OperatorConfig::Explicit {
            operators: vec![op],
            labels: None,
        }],
        shots: 1,
        epsilon,
        master_seed: 0,
        groups: 1,
        output: None,
    }
}

fn row(
    options: &SweepOptions,
    index: usize,
    value: f64,
    family: FamilyConfig,
    delta: Option<f64>,
    block: usize,
    k: usize,
) -> Result<SweepRow, HarnessError> {
    let config = row_config(family, block, k, options.epsilon);
    let campaign = config.resolve()?;
    let norm_sq = cmd_norm(&campaign)?.rows[0].norm_sq;
    let mut out = SweepRow {
        axis: options.axis,
        value,
        k,
        delta,
        block_size: block,
        norm_sq,
        per_site: norm_sq.finite().map(|v| v.powf(1.0 / k as f64)),
        budget: norm_sq
            .finite()
            .map(|v| ((v / (options.epsilon * options.epsilon)).ceil() as u64).max(1)),
        second_moment: None,
        second_moment_se: None,
        hit_frequency: None,
    };
    if let (Some(emp), true) = (options.empirical, norm_sq.is_learnable()) {
        let spec = &campaign.protocols[0].spec;
        let state = prepare_preset(StatePreset::MaximallyMixed, config.state.n, 0)?;
        let ds = sample_dataset(&state, spec, emp.shots, shot_seed(emp.seed, index as u64), emp.workers)?;
        let eigs = spec.eigenvalues()?;
        let op = &campaign.operators.operators()[0];
        let m = second_moment(op, &ds, &eigs)?;
        out.second_moment = Some(m.mean);
        out.second_moment_se = Some(m.std_error);
        out.hit_frequency = Some(hit_frequency(op, &ds, &eigs)?);
    }
    Ok(out)
}

fn delta_family(delta: f64) -> FamilyConfig {
    FamilyConfig::TunableDelta { delta }
}

pub fn cmd_sweep(options: &SweepOptions) -> Result<Vec<SweepRow>, HarnessError> {
    if !(options.epsilon > 0.0) {
        return Err(HarnessError::Config("epsilon must be positive".into()));
    }
    let mut rows = Vec::new();
    match options.axis {
        SweepAxis::K => {
            for &delta in &options.deltas {
                for &k in &options.ks {
                    if k == 0 {
                        return Err(HarnessError::Config("k must be positive".into()));
                    }
                    let i = rows.len();
                    rows.push(row(options, i, k as f64, delta_family(delta), Some(delta), 2, k)?);
                }
            }
        }
        SweepAxis::Delta => {
            if options.k_fixed == 0 {
                return Err(HarnessError::Config("k must be positive".into()));
            }
            for &delta in &options.deltas {
                let i = rows.len();
                rows.push(row(options, i, delta, delta_family(delta), Some(delta), 2, options.k_fixed)?);
            }
        }
        SweepAxis::N => {
            for &n in &options.ns {
                if n == 0 {
                    return Err(HarnessError::Config("block size must be positive".into()));
                }
                let family = if n == 1 { FamilyConfig::PauliLocal } else { FamilyConfig::Ghz };
                let i = rows.len();
                rows.push(row(options, i, n as f64, family, None, n, n)?);
            }
        }
    }
    Ok(rows)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "axis",
        "value",
        "k",
        "delta",
        "block_size",
        "norm_sq",
        "per_site",
        "budget",
        "second_moment",
        "second_moment_se",
        "hit_frequency",
    ])?;
    for r in rows {
        let unlearnable = || "UNLEARNABLE".to_string();
        out.write_record([
            r.axis.to_string(),
            r.value.to_string(),
            r.k.to_string(),
            cell(r.delta),
            r.block_size.to_string(),
            r.norm_sq.to_string(),
            r.per_site.map(|x| x.to_string()).unwrap_or_else(unlearnable),
            r.budget.map(|x| x.to_string()).unwrap_or_else(unlearnable),
            cell(r.second_moment),
            cell(r.second_moment_se),
            cell(r.hit_frequency),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_json<W: Write>(rows: &[SweepRow], mut w: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{scaling_factor, shadow_norm_sq, ProtocolSpec};
    use crate::operators::{Covering, PauliString};

    fn finite(r: &SweepRow) -> f64 {
        r.norm_sq.finite().unwrap()
    }

    #[test]
    fn k_axis_curves() {
        let rows = cmd_sweep(&SweepOptions::new(SweepAxis::K)).unwrap();
        assert_eq!(rows.len(), 32);
        for r in &rows[..8] {
            if r.k % 2 == 1 {
                assert_eq!(r.norm_sq, NormValue::Unlearnable);
            } else {
                assert!((finite(r) - 3f64.powi(r.k as i32 / 2)).abs() < 1e-9 * finite(r));
            }
        }
        for r in &rows[16..24] {
            let want = 4f64.powi(r.k as i32 % 2) * 2f64.powi(r.k as i32);
            assert!((finite(r) - want).abs() < 1e-9 * want, "k = {}", r.k);
        }
        for r in &rows[24..] {
            assert!((finite(r) - 3f64.powi(r.k as i32)).abs() < 1e-9 * finite(r));
        }
    }

    #[test]
    fn delta_axis_is_monotone() {
        let rows = cmd_sweep(&SweepOptions::new(SweepAxis::Delta)).unwrap();
        assert!(rows.windows(2).all(|w| finite(&w[1]) > finite(&w[0])));
        assert!((finite(&rows[0]) - 3.0).abs() < 1e-12);
        assert!((finite(&rows[10]) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn n_axis_scaling_factors() {
        let rows = cmd_sweep(&SweepOptions::new(SweepAxis::N)).unwrap();
        for r in &rows {
            let f = scaling_factor(r.block_size);
            assert!((r.per_site.unwrap() - f).abs() < 1e-9, "n = {}", r.block_size);
        }
        assert!(rows[2..].windows(2).all(|w| w[1].per_site < w[0].per_site.map(|x| x + 0.05)));
        assert!(rows.iter().all(|r| r.per_site.unwrap() >= 1.5));
    }

    #[test]
    fn sweep_matches_norm_path() {
        // The analytic column equals a direct channel-module evaluation.
        let rows = cmd_sweep(&SweepOptions::new(SweepAxis::K)).unwrap();
        for r in rows.iter().filter(|r| r.delta == Some(0.1)) {
            let n = 2 * r.k.div_ceil(2);
            let cov = Covering::dimer_chain(n, Parity::Even, Boundary::Open).unwrap();
            let spec = ProtocolSpec::tunable(cov, crate::channels::phi_from_delta(0.1).unwrap()).unwrap();
            let mut text = "Z".repeat(r.k);
            text.push_str(&"I".repeat(n - r.k));
            let direct = shadow_norm_sq(&text.parse::<PauliString>().unwrap(), &spec).unwrap();
            let a = direct.finite().unwrap();
            assert!((a - finite(r)).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn empirical_columns() {
        let mut options = SweepOptions::new(SweepAxis::K);
        options.deltas = vec![0.0];
        options.ks = vec![1, 2];
        options.empirical = Some(Empirical {
            shots: 20_000,
            seed: 3,
            workers: 2,
        });
        let rows = cmd_sweep(&options).unwrap();
        assert!(rows[0].second_moment.is_none());
        let m = rows[1].second_moment.unwrap();
        assert!((m - 3.0).abs() < 5.0 * rows[1].second_moment_se.unwrap());
        assert!((rows[1].hit_frequency.unwrap() - 1.0 / 3.0).abs() < 0.02);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("UNLEARNABLE"));
    }
}
