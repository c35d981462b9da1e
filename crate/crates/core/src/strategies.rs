//! The five parameter-setting procedures compared by the benchmark harness.
//!
//! All of them maximize the normalized expectation (the objectives below
//! minimize its negative) and account every expectation evaluation through
//! one [`EvalCounter`] per run:
//!
//! * **qaa-init** — the analytic linear-ramp initialization at
//!   `(theta, rho) = (pi/4, sqrt(2))`; zero evaluations;
//! * **qaa-setting** — optimizes the two linear-schedule parameters at full
//!   depth, starting from the analytic point;
//! * **tqa** — like qaa-setting but starts from a statistical optimum
//!   obtained by a pre-computation over sample instances, then optimizes
//!   all `2p` raw angles directly;
//! * **interp** — grows the depth one layer at a time, re-optimizing the
//!   two ramp endpoints at each depth;
//! * **fourier** — grows the depth one layer at a time, optimizing sin/cos
//!   transform coefficients that are zero-padded on each increment;
//! * **ap-based** — optimizes the per-layer `(theta, tau)` passage space,
//!   doubling its length each outer iteration and carrying the previous
//!   optimum across by spline interpolation. After its linear stage the
//!   optimal scale is folded into evolution copies of the Hamiltonian
//!   scales, so the passage parameters start at `theta = pi/4, tau = 1`
//!   reproducing the stage-0 circuit exactly. The `2 pi` factor in that
//!   fold reconciles the linear-ramp convention with the passage map; it
//!   can be disabled for comparison runs via
//!   [`StrategyContext::ap_rescale_two_pi`].
//!
//! The reported expectation is always measured against the *base*
//! normalization of the instance, so values are comparable across
//! strategies regardless of any evolution-scale folding.

use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{generate, mix_seed, GenerationResult, ModelKind, ModelSpec};
use crate::optimize::{minimize, OptimizationReport, OptimizerConfig};
use crate::schedules::{
    fourier_to_gamma_beta, interp_resize, linear_angles, thetatau_slices_to_gamma_beta,
    FourierParams,
};
use crate::simulator::{
    expectation, run_circuit, target_probability, EvalCounter, GammaBetaParams, StateVector,
};
use crate::spectrum::{build_spectrum, normalize, NormalizationInfo, NormalizationMode, SpectrumTable};

/// Which parameter-setting procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    QaaInit,
    QaaSetting,
    Tqa,
    Interp,
    Fourier,
    ApBased,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::QaaInit,
        StrategyKind::QaaSetting,
        StrategyKind::Tqa,
        StrategyKind::Interp,
        StrategyKind::Fourier,
        StrategyKind::ApBased,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::QaaInit => "qaa-init",
            StrategyKind::QaaSetting => "qaa-setting",
            StrategyKind::Tqa => "tqa",
            StrategyKind::Interp => "interp",
            StrategyKind::Fourier => "fourier",
            StrategyKind::ApBased => "ap-based",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown strategy {s:?}")))
    }
}

/// What the run knows about the instance it operates on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub model: Option<ModelKind>,
    pub seed: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub interpretation_count: usize,
    pub satisfiable: bool,
}

impl InstanceMeta {
    pub fn from_generation(spec: &ModelSpec, gen: &GenerationResult) -> Self {
        InstanceMeta {
            model: Some(spec.kind),
            seed: Some(spec.seed),
            n: spec.n,
            m: gen.formula.m(),
            k: spec.k,
            interpretation_count: gen.interpretation_count(),
            satisfiable: gen.satisfiable(),
        }
    }
}

/// One optimization stage inside a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub label: String,
    pub evals: u64,
    /// Minimization objective at the stage's starting point.
    pub initial_value: f64,
    /// Minimization objective at the stage's final point.
    pub best_value: f64,
    pub converged: bool,
}

/// Outcome of one strategy run on one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub strategy: StrategyKind,
    pub instance: InstanceMeta,
    pub p: usize,
    pub final_gamma: Vec<f64>,
    pub final_beta: Vec<f64>,
    /// Final expectation under the instance's base normalization.
    pub expectation: f64,
    pub target_prob: f64,
    pub cost_evals: u64,
    pub wall_ms: f64,
    pub stages: Vec<StageReport>,
    pub converged: bool,
    /// Optimal linear-schedule point for strategies that compute one.
    pub linear_opt: Option<(f64, f64)>,
    /// Final per-layer passage parameters (ap-based only).
    pub theta_star: Option<Vec<f64>>,
    pub tau_star: Option<Vec<f64>>,
}

/// Everything a strategy needs to run on one instance.
#[derive(Debug, Clone, Copy)]
pub struct StrategyContext<'a> {
    pub table: &'a SpectrumTable,
    pub norm: &'a NormalizationInfo,
    pub meta: &'a InstanceMeta,
    /// Circuit depth; the experiment default is `p = n`.
    pub depth: usize,
    pub optimizer: OptimizerConfig,
    /// Include the `2 pi` factor in the ap-based evolution-scale fold.
    pub ap_rescale_two_pi: bool,
}

impl<'a> StrategyContext<'a> {
    pub fn new(
        table: &'a SpectrumTable,
        norm: &'a NormalizationInfo,
        meta: &'a InstanceMeta,
        depth: usize,
    ) -> Self {
        assert!(depth >= 1);
        StrategyContext {
            table,
            norm,
            meta,
            depth,
            optimizer: OptimizerConfig::default(),
            ap_rescale_two_pi: true,
        }
    }
}

/// Statistical optimum of the linear schedule, averaged over sample
/// instances in a pre-computation pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TqaPrior {
    pub theta_bar: f64,
    pub rho_bar: f64,
    pub samples_used: usize,
    /// Expectation evaluations spent in pre-computation, recorded separately
    /// from any per-instance run cost.
    pub precompute_evals: u64,
}

fn evolve(table: &SpectrumTable, scales: &NormalizationInfo, gb: &GammaBetaParams) -> StateVector {
    run_circuit(table, scales, gb).expect("table width was validated at build time")
}

/// Counted minimization objective: negative expectation of the circuit,
/// evolved under `evo` scales and measured under the base `obs` scale.
fn objective_value(
    table: &SpectrumTable,
    evo: &NormalizationInfo,
    obs_scale: f64,
    gb: &GammaBetaParams,
    counter: &EvalCounter,
) -> f64 {
    let state = evolve(table, evo, gb);
    -expectation(&state, table, obs_scale, Some(counter))
}

fn stage_from(label: impl Into<String>, report: &OptimizationReport) -> StageReport {
    StageReport {
        label: label.into(),
        evals: report.evals,
        initial_value: report.f_initial,
        best_value: report.f_star,
        converged: report.converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    ctx: &StrategyContext,
    strategy: StrategyKind,
    gb: GammaBetaParams,
    counter: &EvalCounter,
    stages: Vec<StageReport>,
    started: Instant,
    linear_opt: Option<(f64, f64)>,
    passage: Option<(Vec<f64>, Vec<f64>)>,
) -> RunReport {
    // reporting evaluations are deliberately uncounted: the cost metric is
    // the number of objective calls spent finding the parameters
    let state = evolve(ctx.table, ctx.norm, &gb);
    let expectation_value = expectation(&state, ctx.table, ctx.norm.observable_scale, None);
    let target_prob = target_probability(&state, ctx.table);
    let cost_evals = counter.count();
    debug_assert_eq!(cost_evals, stages.iter().map(|s| s.evals).sum::<u64>());
    let converged = stages.iter().all(|s| s.converged);
    let (theta_star, tau_star) = match passage {
        Some((t, u)) => (Some(t), Some(u)),
        None => (None, None),
    };
    RunReport {
        strategy,
        instance: ctx.meta.clone(),
        p: ctx.depth,
        final_gamma: gb.gamma().to_vec(),
        final_beta: gb.beta().to_vec(),
        expectation: expectation_value,
        target_prob,
        cost_evals,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        stages,
        converged,
        linear_opt,
        theta_star,
        tau_star,
    }
}

/// The analytic initialization: the linear ramp at `theta = pi/4`,
/// `rho = sqrt(2)`, i.e. `gamma_d = 2 d pi / (p+1)`,
/// `beta_d = 2 (p+1-d) pi / (p+1)`. Costs nothing.
pub fn qaa_init(p: usize) -> GammaBetaParams {
    linear_angles(FRAC_PI_4, SQRT_2, p)
}

/// Runs the zero-cost initialization as a strategy of its own.
pub fn run_qaa_init(ctx: &StrategyContext) -> RunReport {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let gb = qaa_init(ctx.depth);
    finish_report(
        ctx,
        StrategyKind::QaaInit,
        gb,
        &counter,
        Vec::new(),
        started,
        Some((FRAC_PI_4, SQRT_2)),
        None,
    )
}

/// Optimizes the two linear-schedule parameters at full depth, starting
/// from the analytic point.
pub fn run_qaa_setting(ctx: &StrategyContext) -> Result<RunReport> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let p = ctx.depth;
    let report = minimize(
        |x| {
            let gb = linear_angles(x[0], x[1], p);
            objective_value(ctx.table, ctx.norm, ctx.norm.observable_scale, &gb, &counter)
        },
        &[FRAC_PI_4, SQRT_2],
        &ctx.optimizer,
    )?;
    let (theta, rho) = (report.x_star[0], report.x_star[1]);
    let stages = vec![stage_from("linear", &report)];
    let gb = linear_angles(theta, rho, p);
    Ok(finish_report(
        ctx,
        StrategyKind::QaaSetting,
        gb,
        &counter,
        stages,
        started,
        Some((theta, rho)),
        None,
    ))
}

/// Pre-computation pass: generates `samples` instances from the template
/// (seed stream `mix_seed(template.seed, i)`), runs the linear-schedule
/// optimization on each, and averages the optima component-wise.
pub fn tqa_precompute(
    template: &ModelSpec,
    samples: usize,
    normalization: NormalizationMode,
    optimizer: &OptimizerConfig,
    depth: Option<usize>,
) -> Result<TqaPrior> {
    if samples == 0 {
        return Err(Error::InvalidInput("tqa pre-computation needs at least one sample".into()));
    }
    let mut sum_theta = 0.0;
    let mut sum_rho = 0.0;
    let mut evals = 0u64;
    for i in 0..samples {
        let spec = ModelSpec {
            seed: mix_seed(template.seed, i as u64),
            ..*template
        };
        let gen = generate(&spec)?;
        let table = build_spectrum(&gen.formula)?;
        let norm = normalize(&table, normalization)?;
        let meta = InstanceMeta::from_generation(&spec, &gen);
        let mut ctx = StrategyContext::new(&table, &norm, &meta, depth.unwrap_or(spec.n));
        ctx.optimizer = *optimizer;
        let report = run_qaa_setting(&ctx)?;
        let (theta, rho) = report.linear_opt.expect("qaa-setting always reports its optimum");
        sum_theta += theta;
        sum_rho += rho;
        evals += report.cost_evals;
    }
    Ok(TqaPrior {
        theta_bar: sum_theta / samples as f64,
        rho_bar: sum_rho / samples as f64,
        samples_used: samples,
        precompute_evals: evals,
    })
}

/// Expands the prior into full-depth angles and optimizes all `2p` of them
/// directly.
pub fn run_tqa(ctx: &StrategyContext, prior: &TqaPrior) -> Result<RunReport> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let p = ctx.depth;
    let init = linear_angles(prior.theta_bar, prior.rho_bar, p);
    let mut x0 = Vec::with_capacity(2 * p);
    x0.extend_from_slice(init.gamma());
    x0.extend_from_slice(init.beta());
    let report = minimize(
        |x| {
            let (gamma, beta) = x.split_at(p);
            let gb = GammaBetaParams::new(gamma.to_vec(), beta.to_vec());
            objective_value(ctx.table, ctx.norm, ctx.norm.observable_scale, &gb, &counter)
        },
        &x0,
        &ctx.optimizer,
    )?;
    let (gamma, beta) = report.x_star.split_at(p);
    let gb = GammaBetaParams::new(gamma.to_vec(), beta.to_vec());
    let stages = vec![stage_from("full", &report)];
    Ok(finish_report(
        ctx,
        StrategyKind::Tqa,
        gb,
        &counter,
        stages,
        started,
        Some((prior.theta_bar, prior.rho_bar)),
        None,
    ))
}

fn interp_ramp(gamma0: f64, beta0: f64, q: usize) -> GammaBetaParams {
    let denom = (q + 1) as f64;
    let gamma = (1..=q).map(|d| d as f64 * gamma0 / denom).collect();
    let beta = (1..=q).map(|d| (q + 1 - d) as f64 * beta0 / denom).collect();
    GammaBetaParams::new(gamma, beta)
}

/// Depth-growing linear-ramp heuristic: at each depth `q` the two ramp
/// endpoints are re-optimized, seeded by the previous depth's optimum.
pub fn run_interp(ctx: &StrategyContext, rng: &mut ChaCha8Rng) -> Result<RunReport> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let p = ctx.depth;
    let mut gamma0 = rng.random_range(0.0..TAU);
    let mut beta0 = rng.random_range(0.0..TAU);
    let mut stages = Vec::with_capacity(p);
    for q in 1..=p {
        let report = minimize(
            |x| {
                let gb = interp_ramp(x[0], x[1], q);
                objective_value(ctx.table, ctx.norm, ctx.norm.observable_scale, &gb, &counter)
            },
            &[gamma0, beta0],
            &ctx.optimizer,
        )?;
        gamma0 = report.x_star[0];
        beta0 = report.x_star[1];
        stages.push(stage_from(format!("q={q}"), &report));
    }
    let gb = interp_ramp(gamma0, beta0, p);
    Ok(finish_report(
        ctx,
        StrategyKind::Interp,
        gb,
        &counter,
        stages,
        started,
        None,
        None,
    ))
}

/// Depth-growing sin/cos-coefficient heuristic: depth and coefficient count
/// rise together, the previous optimum zero-padded on each increment.
pub fn run_fourier(ctx: &StrategyContext, rng: &mut ChaCha8Rng) -> Result<RunReport> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let p = ctx.depth;
    let mut u = vec![rng.random_range(0.0..TAU)];
    let mut v = vec![rng.random_range(0.0..TAU)];
    let mut stages = Vec::with_capacity(p);
    for q in 1..=p {
        let mut x0 = Vec::with_capacity(2 * q);
        x0.extend_from_slice(&u);
        x0.extend_from_slice(&v);
        let report = minimize(
            |x| {
                let (cu, cv) = x.split_at(q);
                let gb = fourier_to_gamma_beta(
                    &FourierParams::new(cu.to_vec(), cv.to_vec()),
                    q,
                );
                objective_value(ctx.table, ctx.norm, ctx.norm.observable_scale, &gb, &counter)
            },
            &x0,
            &ctx.optimizer,
        )?;
        u = report.x_star[..q].to_vec();
        v = report.x_star[q..].to_vec();
        stages.push(stage_from(format!("q={q}"), &report));
        if q < p {
            u.push(0.0);
            v.push(0.0);
        }
    }
    let gb = fourier_to_gamma_beta(&FourierParams::new(u, v), p);
    Ok(finish_report(
        ctx,
        StrategyKind::Fourier,
        gb,
        &counter,
        stages,
        started,
        None,
        None,
    ))
}

/// Passage-space setting: a linear stage, an evolution-scale fold, then
/// length-doubling `(theta, tau)` optimizations carried across by spline
/// interpolation.
pub fn run_ap(ctx: &StrategyContext) -> Result<RunReport> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let p = ctx.depth;
    let mut stages = Vec::new();

    // stage 0: the linear schedule from the analytic point
    let stage0 = minimize(
        |x| {
            let gb = linear_angles(x[0], x[1], p);
            objective_value(ctx.table, ctx.norm, ctx.norm.observable_scale, &gb, &counter)
        },
        &[FRAC_PI_4, SQRT_2],
        &ctx.optimizer,
    )?;
    let (theta0, tau0) = (stage0.x_star[0], stage0.x_star[1]);
    stages.push(stage_from("stage0", &stage0));

    // fold the stage-0 optimum into evolution copies of the scales so that
    // theta = pi/4, tau = 1 reproduces the stage-0 circuit exactly; the 2 pi
    // reconciles the linear ramp's 2 d pi/(p+1) with the passage map's
    // d/(p+1)
    let fold = if ctx.ap_rescale_two_pi { TAU } else { 1.0 };
    let mut evo = *ctx.norm;
    evo.phase_scale = ctx.norm.phase_scale * fold * SQRT_2 * tau0 * theta0.sin();
    evo.mixer_scale = ctx.norm.mixer_scale * fold * SQRT_2 * tau0 * theta0.cos();

    let mut theta = vec![FRAC_PI_4];
    let mut tau = vec![1.0];
    let mut t_u = p.ilog2() as i64;
    while t_u > 0 {
        t_u -= 1;
        let len = p.div_ceil(1 << t_u);
        theta = interp_resize(&theta, len);
        tau = interp_resize(&tau, len);
        let mut x0 = Vec::with_capacity(2 * len);
        x0.extend_from_slice(&theta);
        x0.extend_from_slice(&tau);
        let report = minimize(
            |x| {
                let (th, ta) = x.split_at(len);
                let gb = thetatau_slices_to_gamma_beta(
                    &interp_resize(th, p),
                    &interp_resize(ta, p),
                );
                objective_value(ctx.table, &evo, ctx.norm.observable_scale, &gb, &counter)
            },
            &x0,
            &ctx.optimizer,
        )?;
        theta = report.x_star[..len].to_vec();
        tau = report.x_star[len..].to_vec();
        stages.push(stage_from(format!("len={len}"), &report));
    }

    // express the final circuit in base-normalization angles so the report
    // is comparable with every other strategy
    let gb_passage = thetatau_slices_to_gamma_beta(
        &interp_resize(&theta, p),
        &interp_resize(&tau, p),
    );
    let phase_ratio = evo.phase_scale / ctx.norm.phase_scale;
    let mixer_ratio = evo.mixer_scale / ctx.norm.mixer_scale;
    let gb = GammaBetaParams::new(
        gb_passage.gamma().iter().map(|g| g * phase_ratio).collect(),
        gb_passage.beta().iter().map(|b| b * mixer_ratio).collect(),
    );
    Ok(finish_report(
        ctx,
        StrategyKind::ApBased,
        gb,
        &counter,
        stages,
        started,
        Some((theta0, tau0)),
        Some((theta, tau)),
    ))
}

/// Dispatches a strategy run. Randomized strategies derive their stream
/// from `run_seed`; `tqa` requires a prior from [`tqa_precompute`].
pub fn run_strategy(
    kind: StrategyKind,
    ctx: &StrategyContext,
    run_seed: u64,
    tqa_prior: Option<&TqaPrior>,
) -> Result<RunReport> {
    match kind {
        StrategyKind::QaaInit => Ok(run_qaa_init(ctx)),
        StrategyKind::QaaSetting => run_qaa_setting(ctx),
        StrategyKind::Tqa => {
            let prior = tqa_prior.ok_or_else(|| {
                Error::InvalidInput("tqa strategy requires a pre-computed prior".into())
            })?;
            run_tqa(ctx, prior)
        }
        StrategyKind::Interp => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(run_seed, 1));
            run_interp(ctx, &mut rng)
        }
        StrategyKind::Fourier => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(run_seed, 2));
            run_fourier(ctx, &mut rng)
        }
        StrategyKind::ApBased => run_ap(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn instance(n: usize, m: usize, seed: u64) -> (SpectrumTable, NormalizationInfo, InstanceMeta) {
        let spec = ModelSpec {
            kind: ModelKind::Fs,
            n,
            m,
            k: 3,
            seed,
        };
        let gen = generate(&spec).unwrap();
        let table = build_spectrum(&gen.formula).unwrap();
        let norm = normalize(&table, NormalizationMode::default()).unwrap();
        let meta = InstanceMeta::from_generation(&spec, &gen);
        (table, norm, meta)
    }

    #[test]
    fn qaa_init_reference_values() {
        let gb = qaa_init(3);
        let expected_gamma = [PI / 2.0, PI, 3.0 * PI / 2.0];
        let expected_beta = [3.0 * PI / 2.0, PI, PI / 2.0];
        for d in 0..3 {
            assert_abs_diff_eq!(gb.gamma()[d], expected_gamma[d], epsilon = 1e-12);
            assert_abs_diff_eq!(gb.beta()[d], expected_beta[d], epsilon = 1e-12);
        }
        let gb1 = qaa_init(1);
        assert_abs_diff_eq!(gb1.gamma()[0], PI, epsilon = 1e-12);
        assert_abs_diff_eq!(gb1.beta()[0], PI, epsilon = 1e-12);
    }

    #[test]
    fn qaa_init_run_costs_nothing() {
        let (table, norm, meta) = instance(6, 24, 3);
        let ctx = StrategyContext::new(&table, &norm, &meta, 6);
        let report = run_qaa_init(&ctx);
        assert_eq!(report.cost_evals, 0);
        assert!(report.stages.is_empty());
        assert!(report.target_prob > 0.0);
    }

    #[test]
    fn qaa_setting_improves_and_accounts() {
        let (table, norm, meta) = instance(6, 24, 5);
        let ctx = StrategyContext::new(&table, &norm, &meta, 6);
        let report = run_qaa_setting(&ctx).unwrap();
        assert_eq!(report.cost_evals, report.stages[0].evals);
        assert!(report.stages[0].best_value <= report.stages[0].initial_value);
        let init = run_qaa_init(&ctx);
        assert!(report.expectation >= init.expectation - 1e-9);
    }

    #[test]
    fn interp_stage_count_and_cost_audit() {
        let (table, norm, meta) = instance(5, 20, 2);
        let ctx = StrategyContext::new(&table, &norm, &meta, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let report = run_interp(&ctx, &mut rng).unwrap();
        assert_eq!(report.stages.len(), 5);
        assert_eq!(
            report.cost_evals,
            report.stages.iter().map(|s| s.evals).sum::<u64>()
        );
        assert_eq!(report.final_gamma.len(), 5);
    }

    #[test]
    fn interp_depth_one_is_single_stage() {
        let (table, norm, meta) = instance(4, 16, 8);
        let ctx = StrategyContext::new(&table, &norm, &meta, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let report = run_interp(&ctx, &mut rng).unwrap();
        assert_eq!(report.stages.len(), 1);
    }

    #[test]
    fn fourier_stage_arities_grow() {
        let (table, norm, meta) = instance(4, 16, 4);
        let ctx = StrategyContext::new(&table, &norm, &meta, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let report = run_fourier(&ctx, &mut rng).unwrap();
        assert_eq!(report.stages.len(), 3);
        assert_eq!(report.final_gamma.len(), 3);
    }

    #[test]
    fn ap_stage_lengths_double_to_p() {
        let (table, norm, meta) = instance(4, 16, 6);
        let mut ctx = StrategyContext::new(&table, &norm, &meta, 16);
        // keep the unit test quick
        ctx.optimizer.max_iters = 3;
        let report = run_ap(&ctx).unwrap();
        let labels: Vec<&str> = report.stages.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, vec!["stage0", "len=2", "len=4", "len=8", "len=16"]);
        assert_eq!(report.theta_star.as_ref().unwrap().len(), 16);
    }

    #[test]
    fn ap_depth_one_degenerates_to_stage0() {
        let (table, norm, meta) = instance(4, 16, 7);
        let ctx = StrategyContext::new(&table, &norm, &meta, 1);
        let report = run_ap(&ctx).unwrap();
        assert_eq!(report.stages.len(), 1);
        assert_eq!(report.stages[0].label, "stage0");
    }

    #[test]
    fn ap_rescale_reproduces_stage0_exactly() {
        let (table, norm, meta) = instance(8, 47, 21);
        let ctx = StrategyContext::new(&table, &norm, &meta, 8);
        let report = run_ap(&ctx).unwrap();
        // the first passage stage starts exactly where stage 0 ended
        assert!((report.stages[0].best_value - report.stages[1].initial_value).abs() < 1e-10);
    }

    #[test]
    fn ap_without_two_pi_fold_breaks_continuity() {
        let (table, norm, meta) = instance(8, 47, 21);
        let mut ctx = StrategyContext::new(&table, &norm, &meta, 8);
        ctx.ap_rescale_two_pi = false;
        let report = run_ap(&ctx).unwrap();
        assert!((report.stages[0].best_value - report.stages[1].initial_value).abs() > 1e-6);
    }

    #[test]
    fn ap_stage_best_is_monotone() {
        let (table, norm, meta) = instance(8, 47, 33);
        let ctx = StrategyContext::new(&table, &norm, &meta, 8);
        let report = run_ap(&ctx).unwrap();
        let last = report.stages.last().unwrap().best_value;
        let first = report.stages[0].best_value;
        assert!(last <= first + ctx.optimizer.f_tol);
    }

    #[test]
    fn tqa_prior_single_sample_equals_that_instance() {
        let template = ModelSpec {
            kind: ModelKind::Fs,
            n: 6,
            m: 24,
            k: 3,
            seed: 50,
        };
        let prior = tqa_precompute(
            &template,
            1,
            NormalizationMode::default(),
            &OptimizerConfig::default(),
            None,
        )
        .unwrap();
        let spec = ModelSpec {
            seed: mix_seed(50, 0),
            ..template
        };
        let gen = generate(&spec).unwrap();
        let table = build_spectrum(&gen.formula).unwrap();
        let norm = normalize(&table, NormalizationMode::default()).unwrap();
        let meta = InstanceMeta::from_generation(&spec, &gen);
        let ctx = StrategyContext::new(&table, &norm, &meta, 6);
        let report = run_qaa_setting(&ctx).unwrap();
        let (theta, rho) = report.linear_opt.unwrap();
        assert_abs_diff_eq!(prior.theta_bar, theta, epsilon = 1e-12);
        assert_abs_diff_eq!(prior.rho_bar, rho, epsilon = 1e-12);
        assert_eq!(prior.precompute_evals, report.cost_evals);
    }

    #[test]
    fn tqa_run_from_prior() {
        let (table, norm, meta) = instance(6, 24, 60);
        let ctx = StrategyContext::new(&table, &norm, &meta, 6);
        let prior = TqaPrior {
            theta_bar: FRAC_PI_4,
            rho_bar: SQRT_2,
            samples_used: 1,
            precompute_evals: 0,
        };
        let report = run_tqa(&ctx, &prior).unwrap();
        assert_eq!(report.final_gamma.len(), 6);
        assert!(report.cost_evals > 0);
        assert!(report.stages[0].best_value <= report.stages[0].initial_value);
    }

    #[test]
    fn dispatcher_covers_all_kinds() {
        let (table, norm, meta) = instance(4, 16, 70);
        let mut ctx = StrategyContext::new(&table, &norm, &meta, 4);
        ctx.optimizer.max_iters = 5;
        let prior = TqaPrior {
            theta_bar: FRAC_PI_4,
            rho_bar: SQRT_2,
            samples_used: 1,
            precompute_evals: 10,
        };
        for kind in StrategyKind::ALL {
            let report = run_strategy(kind, &ctx, 123, Some(&prior)).unwrap();
            assert_eq!(report.strategy, kind);
            assert!(report.target_prob >= 0.0 && report.target_prob <= 1.0);
        }
        assert!(run_strategy(StrategyKind::Tqa, &ctx, 1, None).is_err());
    }

    #[test]
    fn deterministic_runs() {
        let (table, norm, meta) = instance(5, 20, 80);
        let ctx = StrategyContext::new(&table, &norm, &meta, 5);
        let a = run_strategy(StrategyKind::Interp, &ctx, 55, None).unwrap();
        let b = run_strategy(StrategyKind::Interp, &ctx, 55, None).unwrap();
        assert_eq!(a.cost_evals, b.cost_evals);
        assert_eq!(a.final_gamma, b.final_gamma);
        assert_eq!(a.expectation, b.expectation);
    }
}
