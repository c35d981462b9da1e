//! Line-delimited run records and the instance metadata sidecar format.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use apqaoa_core::models::{GenerationResult, ModelKind, ModelSpec};
use apqaoa_core::strategies::{RunReport, StrategyKind};

pub const RESULTS_SCHEMA_VERSION: u32 = 1;
pub const SIDECAR_SCHEMA_VERSION: u32 = 1;

/// Interpretation lists longer than this are dropped from sidecars (the
/// count is always kept).
const SIDECAR_MAX_LISTED: usize = 1024;

/// One strategy run on one instance, as serialized to the results file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config_hash: String,
    pub instance_id: String,
    pub strategy: StrategyKind,
    /// Present on success.
    pub report: Option<RunReport>,
    /// Present on failure.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn sort_key(&self) -> (String, &'static str) {
        (self.instance_id.clone(), self.strategy.name())
    }
}

pub fn write_records<W: Write>(mut out: W, records: &[RunRecord]) -> Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line)
            .with_context(|| format!("parsing results line {}", i + 1))?;
        if record.schema_version != RESULTS_SCHEMA_VERSION {
            bail!(
                "results schema version {} unsupported (expected {RESULTS_SCHEMA_VERSION})",
                record.schema_version
            );
        }
        records.push(record);
    }
    Ok(records)
}

/// Metadata stored next to each generated DIMACS file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub schema_version: u32,
    pub id: String,
    pub model: ModelKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub satisfiable: bool,
    pub interpretation_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretations: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_t0: Option<u64>,
}

impl InstanceSidecar {
    pub fn new(id: String, spec: &ModelSpec, gen: &GenerationResult) -> Self {
        let count = gen.interpretation_count();
        let interpretations = if count > 0 && count <= SIDECAR_MAX_LISTED {
            Some(gen.interpretations.iter().collect())
        } else {
            None
        };
        InstanceSidecar {
            schema_version: SIDECAR_SCHEMA_VERSION,
            id,
            model: spec.kind,
            n: spec.n,
            m: gen.formula.m(),
            k: spec.k,
            seed: spec.seed,
            satisfiable: gen.satisfiable(),
            interpretation_count: count,
            interpretations,
            hidden_t0: gen.hidden_t0.map(|a| a.index()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading sidecar {}", path.display()))?;
        let sidecar: InstanceSidecar = toml::from_str(&text)
            .with_context(|| format!("parsing sidecar {}", path.display()))?;
        Ok(sidecar)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use apqaoa_core::models::generate;

    #[test]
    fn sidecar_roundtrip() {
        let spec = ModelSpec {
            kind: ModelKind::Ff,
            n: 6,
            m: 20,
            k: 3,
            seed: 99,
        };
        let gen = generate(&spec).unwrap();
        let sidecar = InstanceSidecar::new("ff_n06_0000".into(), &spec, &gen);
        let text = toml::to_string_pretty(&sidecar).unwrap();
        let back: InstanceSidecar = toml::from_str(&text).unwrap();
        assert_eq!(back, sidecar);
        assert!(back.hidden_t0.is_some());
        assert!(back.satisfiable);
    }

    #[test]
    fn records_roundtrip() {
        let record = RunRecord {
            schema_version: RESULTS_SCHEMA_VERSION,
            artifact_version: "0.0.0".into(),
            config_hash: "deadbeef".into(),
            instance_id: "fs_n04_0001".into(),
            strategy: StrategyKind::QaaInit,
            report: None,
            error: Some("boom".into()),
        };
        let mut buf = Vec::new();
        write_records(&mut buf, std::slice::from_ref(&record)).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].instance_id, record.instance_id);
        assert_eq!(back[0].error.as_deref(), Some("boom"));
    }
}
