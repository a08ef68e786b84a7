//! JSON-lines dataset files: a header line followed by one line per shot.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sampling::Snapshot;
use super::SimError;
use crate::channels::ProtocolSpec;

pub const DATASET_FORMAT: &str = "shadows-snapshots/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format: String,
    pub num_qubits: usize,
    pub protocol_id: String,
    pub protocol: ProtocolSpec,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_seed: Option<u64>,
    /// Left out unless set explicitly so that reruns stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl DatasetHeader {
    pub fn new(protocol: ProtocolSpec, master_seed: u64) -> Self {
        DatasetHeader {
            format: DATASET_FORMAT.to_string(),
            num_qubits: protocol.num_qubits(),
            protocol_id: protocol.label(),
            protocol,
            master_seed,
            preset: None,
            state_seed: None,
            timestamp: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotDataset {
    header: DatasetHeader,
    snapshots: Vec<Snapshot>,
}

impl SnapshotDataset {
    pub fn new(header: DatasetHeader, snapshots: Vec<Snapshot>) -> Result<Self, SimError> {
        if header.num_qubits != header.protocol.num_qubits() {
            return Err(SimError::InvalidDataset(format!(
                "header declares {} qubits but the protocol has {}",
                header.num_qubits,
                header.protocol.num_qubits()
            )));
        }
        if let Some(s) = snapshots.iter().find(|s| s.num_qubits() != header.num_qubits) {
            return Err(SimError::InvalidDataset(format!(
                "shot {} has {} qubits, expected {}",
                s.shot_index,
                s.num_qubits(),
                header.num_qubits
            )));
        }
        Ok(SnapshotDataset { header, snapshots })
    }

    pub fn header(&self) -> &DatasetHeader {
        &self.header
    }

    pub fn header_mut(&mut self) -> &mut DatasetHeader {
        &mut self.header
    }

    pub fn protocol(&self) -> &ProtocolSpec {
        &self.header.protocol
    }

    pub fn num_qubits(&self) -> usize {
        self.header.num_qubits
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn with_preset(mut self, preset: &str, seed: u64) -> Self {
        self.header.preset = Some(preset.to_string());
        self.header.state_seed = Some(seed);
        self
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for s in &self.snapshots {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> Result<String, SimError> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    pub fn read_jsonl<R: Read>(r: R) -> Result<Self, SimError> {
        let mut lines = BufReader::new(r).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| SimError::InvalidDataset("empty file".into()))??;
        let header: DatasetHeader = serde_json::from_str(&header_line)?;
        let mut snapshots = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            snapshots.push(serde_json::from_str::<Snapshot>(&line)?);
        }
        SnapshotDataset::new(header, snapshots)
    }

    pub fn save(&self, path: &Path) -> Result<(), SimError> {
        self.write_jsonl(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        Self::read_jsonl(File::open(path)?)
    }
}
