//! Suite enumeration and execution: deterministic per-instance seeds, DIMACS
//! plus sidecar persistence, parallel strategy runs, canonical ordering.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use apqaoa_core::models::{generate, mix_seed, ModelSpec};
use apqaoa_core::sat::{dimacs_string, parse_dimacs, CnfFormula};
use apqaoa_core::spectrum::{build_spectrum, normalize};
use apqaoa_core::strategies::{
    run_strategy, tqa_precompute, InstanceMeta, StrategyContext, StrategyKind, TqaPrior,
};

use crate::config::ExperimentConfig;
use crate::records::{InstanceSidecar, RunRecord, RESULTS_SCHEMA_VERSION};

/// Seed stream tag separating tqa pre-computation draws from suite draws.
const TQA_STREAM_TAG: u64 = 0x7141;

/// One planned instance of the suite.
#[derive(Debug, Clone)]
pub struct InstanceJob {
    pub id: String,
    pub spec: ModelSpec,
}

/// Enumerates the suite deterministically from the base seed.
pub fn plan_suite(config: &ExperimentConfig) -> Vec<InstanceJob> {
    let mut jobs = Vec::new();
    for &n in &config.model.n_values {
        let m = config.model.m_rule.clause_count(n);
        for index in 0..config.suite.size {
            let stream = ((n as u64) << 32) | index as u64;
            let spec = ModelSpec {
                kind: config.model.kind,
                n,
                m,
                k: config.model.k,
                seed: mix_seed(config.suite.base_seed, stream),
            };
            jobs.push(InstanceJob {
                id: format!("{}_n{:02}_{:04}", config.model.kind, n, index),
                spec,
            });
        }
    }
    jobs
}

/// Writes DIMACS + sidecar files for the whole suite. Returns the paths of
/// the generated `.cnf` files.
pub fn generate_suite(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let instances_dir = dir.join("instances");
    fs::create_dir_all(&instances_dir)?;
    let mut paths = Vec::new();
    for job in plan_suite(config) {
        let gen = generate(&job.spec)?;
        let cnf_path = instances_dir.join(format!("{}.cnf", job.id));
        fs::write(&cnf_path, dimacs_string(&gen.formula))
            .with_context(|| format!("writing {}", cnf_path.display()))?;
        let sidecar = InstanceSidecar::new(job.id.clone(), &job.spec, &gen);
        sidecar.save(&instances_dir.join(format!("{}.meta.toml", job.id)))?;
        paths.push(cnf_path);
    }
    Ok(paths)
}

/// Per-n priors produced by the tqa pre-computation pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TqaPriorFile {
    pub schema_version: u32,
    pub base_seed: u64,
    pub priors: Vec<TqaPriorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TqaPriorEntry {
    pub n: usize,
    pub m: usize,
    pub theta_bar: f64,
    pub rho_bar: f64,
    pub samples_used: usize,
    pub precompute_evals: u64,
}

impl TqaPriorEntry {
    pub fn prior(&self) -> TqaPrior {
        TqaPrior {
            theta_bar: self.theta_bar,
            rho_bar: self.rho_bar,
            samples_used: self.samples_used,
            precompute_evals: self.precompute_evals,
        }
    }
}

/// Runs the pre-computation pass for every `n` in the config. Pre-computation
/// instances use a seed stream disjoint from the suite's.
pub fn precompute_tqa_priors(config: &ExperimentConfig) -> Result<TqaPriorFile> {
    let mut priors = Vec::new();
    for &n in &config.model.n_values {
        let m = config.model.m_rule.clause_count(n);
        let template = ModelSpec {
            kind: config.model.kind,
            n,
            m,
            k: config.model.k,
            seed: mix_seed(config.suite.base_seed, TQA_STREAM_TAG ^ ((n as u64) << 16)),
        };
        let depth = config.run.depth.depth(n);
        let prior = tqa_precompute(
            &template,
            config.tqa.samples,
            config.run.normalization.mode(config.run.c0),
            &config.optimizer,
            Some(depth),
        )?;
        priors.push(TqaPriorEntry {
            n,
            m,
            theta_bar: prior.theta_bar,
            rho_bar: prior.rho_bar,
            samples_used: prior.samples_used,
            precompute_evals: prior.precompute_evals,
        });
    }
    Ok(TqaPriorFile {
        schema_version: 1,
        base_seed: config.suite.base_seed,
        priors,
    })
}

/// Source of instances for a run: regenerated from seeds, or loaded from a
/// directory produced by `gen`.
pub enum InstanceSource {
    Generate,
    Directory(PathBuf),
}

struct LoadedInstance {
    id: String,
    formula: CnfFormula,
    meta: InstanceMeta,
    seed: u64,
}

fn load_instances(config: &ExperimentConfig, source: &InstanceSource) -> Result<Vec<LoadedInstance>> {
    match source {
        InstanceSource::Generate => plan_suite(config)
            .into_iter()
            .map(|job| {
                let gen = generate(&job.spec)?;
                let meta = InstanceMeta::from_generation(&job.spec, &gen);
                Ok(LoadedInstance {
                    id: job.id,
                    formula: gen.formula,
                    meta,
                    seed: job.spec.seed,
                })
            })
            .collect(),
        InstanceSource::Directory(dir) => {
            let mut entries: Vec<PathBuf> = fs::read_dir(dir)
                .with_context(|| format!("reading instance dir {}", dir.display()))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|ext| ext == "cnf"))
                .collect();
            entries.sort();
            if entries.is_empty() {
                bail!("no .cnf instances found in {}", dir.display());
            }
            entries
                .into_iter()
                .map(|cnf_path| {
                    let text = fs::read(&cnf_path)
                        .with_context(|| format!("reading {}", cnf_path.display()))?;
                    let formula = parse_dimacs(text.as_slice(), Some(config.model.k))?;
                    let sidecar_path = cnf_path.with_extension("meta.toml");
                    let sidecar = InstanceSidecar::load(&sidecar_path)?;
                    let meta = InstanceMeta {
                        model: Some(sidecar.model),
                        seed: Some(sidecar.seed),
                        n: sidecar.n,
                        m: sidecar.m,
                        k: sidecar.k,
                        interpretation_count: sidecar.interpretation_count,
                        satisfiable: sidecar.satisfiable,
                    };
                    Ok(LoadedInstance {
                        id: sidecar.id,
                        formula,
                        meta,
                        seed: sidecar.seed,
                    })
                })
                .collect()
        }
    }
}

/// Outcome of a suite run.
pub struct SuiteOutcome {
    pub records: Vec<RunRecord>,
    pub failures: usize,
}

/// Executes every (instance, strategy) pair, in parallel up to the
/// configured degree, and returns records canonically sorted by
/// (instance id, strategy name). Per-run failures become records with an
/// error field; the suite continues.
pub fn run_suite(
    config: &ExperimentConfig,
    source: &InstanceSource,
    priors: Option<&TqaPriorFile>,
) -> Result<SuiteOutcome> {
    let instances = load_instances(config, source)?;

    // resolve tqa priors up front, computing them when absent
    let needs_tqa = config.run.strategies.contains(&StrategyKind::Tqa);
    let computed;
    let prior_file = if needs_tqa {
        match priors {
            Some(p) => Some(p),
            None => {
                computed = precompute_tqa_priors(config)?;
                Some(&computed)
            }
        }
    } else {
        None
    };
    let prior_by_n: BTreeMap<usize, TqaPrior> = prior_file
        .map(|f| f.priors.iter().map(|e| (e.n, e.prior())).collect())
        .unwrap_or_default();

    let config_hash = config.hash();
    let mut pairs = Vec::new();
    for instance in &instances {
        for &strategy in &config.run.strategies {
            pairs.push((instance, strategy));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.parallelism)
        .build()
        .context("building worker pool")?;
    let mut records: Vec<RunRecord> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(instance, strategy)| {
                let outcome = execute_one(config, instance, *strategy, &prior_by_n);
                let (report, error) = match outcome {
                    Ok(report) => (Some(report), None),
                    Err(e) => (None, Some(format!("{e:#}"))),
                };
                RunRecord {
                    schema_version: RESULTS_SCHEMA_VERSION,
                    artifact_version: env!("CARGO_PKG_VERSION").to_string(),
                    config_hash: config_hash.clone(),
                    instance_id: instance.id.clone(),
                    strategy: *strategy,
                    report,
                    error,
                }
            })
            .collect()
    });
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    Ok(SuiteOutcome { records, failures })
}

fn execute_one(
    config: &ExperimentConfig,
    instance: &LoadedInstance,
    strategy: StrategyKind,
    priors: &BTreeMap<usize, TqaPrior>,
) -> Result<apqaoa_core::strategies::RunReport> {
    let table = build_spectrum(&instance.formula)?;
    let norm = normalize(&table, config.run.normalization.mode(config.run.c0))?;
    let mut ctx = StrategyContext::new(
        &table,
        &norm,
        &instance.meta,
        config.run.depth.depth(instance.meta.n),
    );
    ctx.optimizer = config.optimizer;
    ctx.ap_rescale_two_pi = config.run.ap_rescale_2pi;
    let prior = match strategy {
        StrategyKind::Tqa => Some(priors.get(&instance.meta.n).copied().ok_or_else(|| {
            anyhow::anyhow!("no tqa prior for n = {}", instance.meta.n)
        })?),
        _ => None,
    };
    let report = run_strategy(strategy, &ctx, instance.seed, prior.as_ref())?;
    Ok(report)
}
