//! Experiment configuration: one human-editable TOML document whose
//! defaults are printable via `config --dump`; CLI flags override file
//! values field by field.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use apqaoa_core::models::{m_star, ModelKind};
use apqaoa_core::optimize::OptimizerConfig;
use apqaoa_core::spectrum::NormalizationMode;
use apqaoa_core::strategies::StrategyKind;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "APQAOA_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSection,
    pub suite: SuiteSection,
    pub run: RunSection,
    pub tqa: TqaSection,
    pub optimizer: OptimizerConfig,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// f | fs | ff
    pub kind: ModelKind,
    pub k: usize,
    pub n_values: Vec<usize>,
    /// "m-star" for the experimental clause-count schedule, or a fixed count.
    pub m_rule: MRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MRule {
    Named(MStarRule),
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MStarRule {
    #[serde(rename = "m-star")]
    MStar,
}

impl MRule {
    pub fn clause_count(&self, n: usize) -> usize {
        match self {
            MRule::Named(MStarRule::MStar) => m_star(n),
            MRule::Fixed(m) => *m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    /// Instances per n value.
    pub size: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub strategies: Vec<StrategyKind>,
    /// "n" for depth = variable count, or a fixed depth.
    pub depth: DepthRule,
    /// estimated | exact | raw
    pub normalization: NormalizationChoice,
    pub c0: f64,
    pub ap_rescale_2pi: bool,
    /// Worker threads for suite execution; 0 = all available cores.
    pub parallelism: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthRule {
    Named(DepthEqualsN),
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DepthEqualsN {
    #[serde(rename = "n")]
    N,
}

impl DepthRule {
    pub fn depth(&self, n: usize) -> usize {
        match self {
            DepthRule::Named(DepthEqualsN::N) => n,
            DepthRule::Fixed(p) => *p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationChoice {
    Estimated,
    Exact,
    Raw,
}

impl NormalizationChoice {
    pub fn mode(&self, c0: f64) -> NormalizationMode {
        match self {
            NormalizationChoice::Estimated => NormalizationMode::Estimated { c0 },
            NormalizationChoice::Exact => NormalizationMode::Exact,
            NormalizationChoice::Raw => NormalizationMode::Raw,
        }
    }
}

impl std::str::FromStr for NormalizationChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "estimated" => Ok(NormalizationChoice::Estimated),
            "exact" => Ok(NormalizationChoice::Exact),
            "raw" => Ok(NormalizationChoice::Raw),
            other => bail!("unknown normalization {other:?} (expected estimated|exact|raw)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TqaSection {
    /// Sample instances averaged in the pre-computation pass.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; falls back to $APQAOA_OUT_DIR, then "apqaoa-out".
    pub dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            model: ModelSection {
                kind: ModelKind::Fs,
                k: 3,
                n_values: vec![10, 12, 14],
                m_rule: MRule::Named(MStarRule::MStar),
            },
            suite: SuiteSection {
                size: 50,
                base_seed: 42,
            },
            run: RunSection {
                strategies: vec![StrategyKind::QaaSetting, StrategyKind::ApBased],
                depth: DepthRule::Named(DepthEqualsN::N),
                normalization: NormalizationChoice::Estimated,
                c0: 3.0,
                ap_rescale_2pi: true,
                parallelism: 0,
            },
            tqa: TqaSection { samples: 20 },
            optimizer: OptimizerConfig::default(),
            output: OutputSection { dir: None },
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if config.schema_version != CONFIG_SCHEMA_VERSION {
            bail!(
                "config schema version {} unsupported (expected {CONFIG_SCHEMA_VERSION})",
                config.schema_version
            );
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.suite.size == 0 {
            bail!("suite.size must be at least 1");
        }
        if self.model.n_values.is_empty() {
            bail!("model.n_values must not be empty");
        }
        for &n in &self.model.n_values {
            if n < self.model.k {
                bail!("n = {n} below k = {}", self.model.k);
            }
            if n > apqaoa_core::MAX_VARS {
                bail!("n = {n} exceeds the simulator cap {}", apqaoa_core::MAX_VARS);
            }
        }
        if self.run.strategies.is_empty() {
            bail!("run.strategies must not be empty");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Hash of the effective configuration, stamped into every record.
    pub fn hash(&self) -> String {
        let canonical = self.to_toml();
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Resolved output directory: flag > config > environment > default.
    pub fn output_dir(&self, flag: Option<&str>) -> std::path::PathBuf {
        if let Some(dir) = flag {
            return dir.into();
        }
        if let Some(dir) = &self.output.dir {
            return dir.into();
        }
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return dir.into();
            }
        }
        "apqaoa-out".into()
    }
}
