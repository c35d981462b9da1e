//! Exact state-vector simulation of the alternating phase/mixer circuit.
//!
//! The phase layer is diagonal: since the goal function takes integer values
//! in `[0, m]`, the per-assignment phase factor is a table lookup into at
//! most `m + 1` precomputed unit complex numbers. The mixer layer is a
//! product of identical single-qubit rotations applied as in-place
//! stride-2^q butterfly passes. One full layer costs `O((n + 1) * 2^n)`.
//!
//! Expectations are computed exactly from amplitudes (no shot noise); the
//! cost metric of the whole crate is the number of expectation evaluations,
//! tracked by [`EvalCounter`].

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{NormalizationInfo, SpectrumTable};
use crate::MAX_VARS;

/// 2^n complex amplitudes over the computational basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probability(&self, x: u64) -> f64 {
        self.amps[x as usize].norm_sqr()
    }

    /// Sum of squared amplitude magnitudes (1 up to roundoff).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The raw per-layer circuit angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaBetaParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl GammaBetaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Self {
        assert_eq!(gamma.len(), beta.len(), "gamma/beta length mismatch");
        assert!(
            gamma.iter().chain(beta.iter()).all(|v| v.is_finite()),
            "non-finite circuit angle"
        );
        GammaBetaParams { gamma, beta }
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Monotone counter of expectation evaluations.
#[derive(Debug, Default)]
pub struct EvalCounter(AtomicU64);

impl EvalCounter {
    pub fn new() -> Self {
        EvalCounter(AtomicU64::new(0))
    }

    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn count(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// The uniform superposition: every amplitude `2^(-n/2)`.
pub fn init_plus(n: usize) -> Result<StateVector> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::Capacity { n, max: MAX_VARS });
    }
    let size = 1usize << n;
    let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![amp; size],
    })
}

/// Applies the diagonal phase layer: `psi_x *= exp(-i * gamma * scale * C(x))`.
pub fn apply_phase(state: &mut StateVector, table: &SpectrumTable, phase_scale: f64, gamma: f64) {
    assert_eq!(state.n, table.n(), "state/table width mismatch");
    let scaled = gamma * phase_scale;
    let phases: Vec<Complex64> = (0..=table.m())
        .map(|c| Complex64::from_polar(1.0, -scaled * c as f64))
        .collect();
    for (amp, &c) in state.amps.iter_mut().zip(table.values()) {
        *amp *= phases[c as usize];
    }
}

/// Applies the mixer layer: per qubit, the rotation
/// `cos(theta) I - i sin(theta) X` with `theta = beta * mixer_scale`.
/// The single-qubit factors commute, so the product form is exact.
pub fn apply_mixer(state: &mut StateVector, mixer_scale: f64, beta: f64) {
    let theta = beta * mixer_scale;
    let (sin, cos) = theta.sin_cos();
    for q in 0..state.n {
        let stride = 1usize << q;
        for chunk in state.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (ar, ai) = (a.re, a.im);
                let (br, bi) = (b.re, b.im);
                a.re = cos * ar + sin * bi;
                a.im = cos * ai - sin * br;
                b.re = cos * br + sin * ai;
                b.im = cos * bi - sin * ar;
            }
        }
    }
}

/// Runs the full circuit: uniform start, then per layer a phase application
/// followed by a mixer application.
pub fn run_circuit(
    table: &SpectrumTable,
    norm: &NormalizationInfo,
    params: &GammaBetaParams,
) -> Result<StateVector> {
    let mut state = init_plus(table.n())?;
    for d in 0..params.depth() {
        apply_phase(&mut state, table, norm.phase_scale, params.gamma[d]);
        apply_mixer(&mut state, norm.mixer_scale, params.beta[d]);
    }
    Ok(state)
}

/// The scaled expectation `phase_scale * sum_x C(x) |psi_x|^2`.
///
/// Bumps `counter` by one when supplied; every optimization objective in the
/// crate routes its cost accounting through this.
pub fn expectation(
    state: &StateVector,
    table: &SpectrumTable,
    phase_scale: f64,
    counter: Option<&EvalCounter>,
) -> f64 {
    assert_eq!(state.n, table.n(), "state/table width mismatch");
    if let Some(c) = counter {
        c.bump();
    }
    // accumulate probability mass per goal value; the final weighted sum has
    // at most m + 1 terms, which keeps roundoff well below observable levels
    let mut mass = vec![0.0f64; table.m() + 1];
    for (amp, &c) in state.amps.iter().zip(table.values()) {
        mass[c as usize] += amp.norm_sqr();
    }
    let raw: f64 = mass
        .iter()
        .enumerate()
        .map(|(c, &p)| c as f64 * p)
        .sum();
    raw * phase_scale
}

/// Total probability of the maximizer set.
pub fn target_probability(state: &StateVector, table: &SpectrumTable) -> f64 {
    assert_eq!(state.n, table.n(), "state/table width mismatch");
    table
        .maximizers()
        .iter()
        .map(|&x| state.amps[x as usize].norm_sqr())
        .sum()
}
