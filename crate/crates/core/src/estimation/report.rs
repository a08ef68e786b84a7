//! CSV and JSON estimate reports.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Estimate, SetEstimate};
use crate::channels::NormValue;

const UNLEARNABLE: &str = "UNLEARNABLE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Estimated,
    Unlearnable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Estimated => "OK",
            Status::Unlearnable => UNLEARNABLE,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub operator: String,
    pub status: Status,
    pub estimate: Option<Estimate>,
    pub norm_sq: NormValue,
    /// Name of the dataset the estimate came from.
    pub dataset: Option<String>,
    /// Exact expectation value, when the state allows computing it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    /// Campaign-level sum over protocols of the largest assigned squared norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_prefactor: Option<f64>,
}

impl ReportRow {
    pub fn from_set_estimate(row: &SetEstimate, dataset_names: &[String]) -> Self {
        ReportRow {
            label: row.label.clone(),
            operator: row.operator.clone(),
            status: row.status(),
            estimate: row.estimate.clone(),
            norm_sq: row.norm_sq,
            dataset: row.source.map(|i| dataset_names[i].clone()),
            exact: None,
            budget_prefactor: None,
        }
    }
}

pub fn write_csv<W: Write>(rows: &[ReportRow], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "label",
        "operator",
        "mean",
        "std_error",
        "median_of_means",
        "shots",
        "status",
        "norm_sq",
        "dataset",
        "exact",
        "budget_prefactor",
    ])?;
    for r in rows {
        let (mean, se, mom, shots) = match &r.estimate {
            Some(e) => (
                e.mean.to_string(),
                e.std_error.to_string(),
                e.median_of_means.to_string(),
                e.shots_used.to_string(),
            ),
            None => (UNLEARNABLE.into(), UNLEARNABLE.into(), UNLEARNABLE.into(), "0".into()),
        };
        out.write_record([
            r.label.clone(),
            r.operator.clone(),
            mean,
            se,
            mom,
            shots,
            r.status.to_string(),
            r.norm_sq.to_string(),
            r.dataset.clone().unwrap_or_default(),
            r.exact.map(|x| x.to_string()).unwrap_or_default(),
            r.budget_prefactor.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut w: W) -> Result<(), serde_json::Error> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n").map_err(serde_json::Error::io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unlearnable_is_spelled_out() {
        let rows = vec![
            ReportRow {
                label: "hex(0,1)".into(),
                operator: "ZZ".into(),
                status: Status::Estimated,
                estimate: Some(Estimate::from_values(&[1.0, 0.5], 1).unwrap()),
                norm_sq: NormValue::Finite(3.0),
                dataset: Some("even".into()),
                exact: Some(0.75),
                budget_prefactor: Some(54.0),
            },
            ReportRow {
                label: "odd".into(),
                operator: "ZI".into(),
                status: Status::Unlearnable,
                estimate: None,
                norm_sq: NormValue::Unlearnable,
                dataset: None,
                exact: None,
                budget_prefactor: Some(54.0),
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label,operator,mean,std_error,median_of_means,shots,status,norm_sq,dataset,exact,budget_prefactor");
        assert_eq!(lines[1], "\"hex(0,1)\",ZZ,0.75,0.25,0.75,2,OK,3,even,0.75,54");
        assert_eq!(lines[2], "odd,ZI,UNLEARNABLE,UNLEARNABLE,UNLEARNABLE,0,UNLEARNABLE,UNLEARNABLE,,,54");
        let mut json = Vec::new();
        write_json(&rows, &mut json).unwrap();
        let back: Vec<ReportRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, rows);
    }
}
