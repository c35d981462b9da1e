//! The diagonal goal-function table and Hamiltonian normalization.
//!
//! `C(x)` (satisfied-clause count) is tabulated over all 2^n assignments by
//! sweeping each clause's falsifying pattern, giving the problem Hamiltonian
//! up to a dropped additive constant. The spectral spread `G_0 = c_max -
//! c_min` is either read off the table or estimated statistically from the
//! planted random model, and both feed the phase/mixer scale factors used by
//! the simulator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sat::CnfFormula;
use crate::MAX_VARS;

/// Default bound multiplier for the statistical spread estimate.
pub const DEFAULT_C0: f64 = 3.0;

/// Length-2^n table of satisfied-clause counts with its extremes.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    n: usize,
    k: usize,
    m: usize,
    values: Vec<u16>,
    c_max: u16,
    c_min: u16,
    maximizers: Vec<u64>,
}

impl SpectrumTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `C(x)` for every integer-encoded assignment.
    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn value(&self, x: u64) -> u16 {
        self.values[x as usize]
    }

    pub fn c_max(&self) -> usize {
        self.c_max as usize
    }

    pub fn c_min(&self) -> usize {
        self.c_min as usize
    }

    /// Assignments attaining `c_max`; the interpretation set when the
    /// formula is satisfiable.
    pub fn maximizers(&self) -> &[u64] {
        &self.maximizers
    }
}

/// Tabulates `C(x)` for all assignments.
///
/// Each clause is falsified on exactly the `2^(n-k)` assignments matching
/// its falsifying pattern, so the sweep costs `O(m * 2^(n-k))`.
pub fn build_spectrum(formula: &CnfFormula) -> Result<SpectrumTable> {
    let n = formula.n();
    let m = formula.m();
    if n > MAX_VARS {
        return Err(Error::Capacity { n, max: MAX_VARS });
    }
    if m >= usize::from(u16::MAX) {
        return Err(Error::InvalidModel(format!("m = {m} exceeds u16 table range")));
    }
    let size = 1usize << n;
    let full = (1u64 << n) - 1;
    let mut values = vec![m as u16; size];
    for clause in formula.clauses() {
        let (mask, pattern) = clause.falsifying_pattern();
        let free = !mask & full;
        let mut t = 0u64;
        loop {
            values[(pattern | t) as usize] -= 1;
            t = t.wrapping_sub(free) & free;
            if t == 0 {
                break;
            }
        }
    }
    let c_max = *values.iter().max().expect("non-empty table");
    let c_min = *values.iter().min().expect("non-empty table");
    let maximizers = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == c_max)
        .map(|(x, _)| x as u64)
        .collect();
    Ok(SpectrumTable {
        n,
        k: formula.k(),
        m,
        values,
        c_max,
        c_min,
        maximizers,
    })
}

/// Binomial coefficient in u64; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Mean satisfaction probability of one planted-model clause at an
/// assignment sharing `l = n - d_H(x, t)` variable values with the hidden
/// interpretation `t`.
pub fn planted_clause_mean(n: usize, k: usize, l: usize) -> f64 {
    assert!(l <= n, "l = {l} out of range for n = {n}");
    let pow = (1u64 << k) as f64;
    let c_l = binomial(l as u64, k as u64) as f64;
    let c_n = binomial(n as u64, k as u64) as f64;
    (pow - 2.0) / (pow - 1.0) + c_l / ((pow - 1.0) * c_n)
}

/// Variance companion of [`planted_clause_mean`].
pub fn planted_clause_variance(n: usize, k: usize, l: usize) -> f64 {
    assert!(l <= n, "l = {l} out of range for n = {n}");
    let pow = (1u64 << k) as f64;
    let c_l = binomial(l as u64, k as u64) as f64;
    let c_n = binomial(n as u64, k as u64) as f64;
    let mu = planted_clause_mean(n, k, l);
    (1.0 - mu) * (1.0 - mu) * mu + mu * mu * (c_n - c_l) / ((pow - 1.0) * c_n)
}

/// Statistical estimate of the spectral spread:
/// `G_E = m * (1/(2^k - 1) + c0 / sqrt(m * (2^k - 1)))`.
pub fn estimate_ge(k: usize, m: usize, c0: f64) -> f64 {
    debug_assert!(c0 >= 3.0, "the estimate assumes c0 >= 3");
    let denom = (1u64 << k) as f64 - 1.0;
    let m = m as f64;
    m * (1.0 / denom + c0 / (m * denom).sqrt())
}

/// Exact spectral spread `c_max - c_min` of a built table.
pub fn exact_g0(table: &SpectrumTable) -> f64 {
    (table.c_max() - table.c_min()) as f64
}

/// How the phase scale is derived from the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum NormalizationMode {
    /// Divide by the statistical estimate `G_E(c0)`.
    Estimated { c0: f64 },
    /// Divide by the exact `G_0` from the table.
    Exact,
    /// No rescaling at all (unit phase and mixer scales).
    Raw,
}

impl Default for NormalizationMode {
    fn default() -> Self {
        NormalizationMode::Estimated { c0: DEFAULT_C0 }
    }
}

/// Scale factors applied to the goal function and the mixer angle.
///
/// With the standard normalization `phase_scale = 1/G_E` (or `1/G_0`) and
/// `mixer_scale = 1/(2n)`; the adiabatic-passage strategy later folds extra
/// factors into evolution copies of these scales. `observable_scale` is the
/// factor applied when *measuring* expectations: it equals `phase_scale`
/// except in raw mode, where evolution runs unpreconditioned but objectives
/// and reports stay in normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationInfo {
    pub g_e: f64,
    pub g_0: Option<f64>,
    pub c0: f64,
    pub phase_scale: f64,
    pub mixer_scale: f64,
    pub observable_scale: f64,
}

/// Derives the scale factors for a built table.
pub fn normalize(table: &SpectrumTable, mode: NormalizationMode) -> Result<NormalizationInfo> {
    let g_0 = exact_g0(table);
    let mixer_scale = 1.0 / (2.0 * table.n() as f64);
    match mode {
        NormalizationMode::Estimated { c0 } => {
            let g_e = estimate_ge(table.k(), table.m(), c0);
            if !g_e.is_finite() || g_e <= 0.0 {
                return Err(Error::DegenerateSpectrum);
            }
            Ok(NormalizationInfo {
                g_e,
                g_0: Some(g_0),
                c0,
                phase_scale: 1.0 / g_e,
                mixer_scale,
                observable_scale: 1.0 / g_e,
            })
        }
        NormalizationMode::Exact => {
            if g_0 <= 0.0 {
                return Err(Error::DegenerateSpectrum);
            }
            Ok(NormalizationInfo {
                g_e: estimate_ge(table.k(), table.m(), DEFAULT_C0),
                g_0: Some(g_0),
                c0: DEFAULT_C0,
                phase_scale: 1.0 / g_0,
                mixer_scale,
                observable_scale: 1.0 / g_0,
            })
        }
        NormalizationMode::Raw => {
            let g_e = estimate_ge(table.k(), table.m(), DEFAULT_C0);
            if !g_e.is_finite() || g_e <= 0.0 {
                return Err(Error::DegenerateSpectrum);
            }
            Ok(NormalizationInfo {
                g_e,
                g_0: Some(g_0),
                c0: DEFAULT_C0,
                phase_scale: 1.0,
                mixer_scale: 1.0,
                observable_scale: 1.0 / g_e,
            })
        }
    }
}
