//! Shared test oracles, independent of the library's fast paths.
//!
//! The dense oracle builds explicit 2^n x 2^n layer matrices and multiplies
//! them into the state, so it shares no code with the stride-based kernels
//! it checks.

#![allow(dead_code)]

use num_complex::Complex64;

use apqaoa_core::sat::{count_satisfied, Assignment, CnfFormula};
use apqaoa_core::simulator::GammaBetaParams;

type Matrix = Vec<Vec<Complex64>>;

fn identity(size: usize) -> Matrix {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn mat_vec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Single-qubit rotation `cos(theta) I - i sin(theta) X` embedded on qubit
/// `q` of an `n`-qubit register (qubit 0 = least-significant bit).
fn embedded_x_rotation(n: usize, q: usize, theta: f64) -> Matrix {
    let size = 1usize << n;
    let cos = Complex64::new(theta.cos(), 0.0);
    let misin = Complex64::new(0.0, -theta.sin());
    let mut m = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for row in 0..size {
        m[row][row] = cos;
        m[row][row ^ (1 << q)] = misin;
    }
    m
}

/// Amplitudes after the full circuit, built from dense per-layer operators
/// and per-assignment goal recounts.
pub fn dense_circuit(
    formula: &CnfFormula,
    phase_scale: f64,
    mixer_scale: f64,
    params: &GammaBetaParams,
) -> Vec<Complex64> {
    let n = formula.n();
    let size = 1usize << n;
    let goal: Vec<f64> = (0..size as u64)
        .map(|x| count_satisfied(formula, &Assignment::from_index(x, n)) as f64)
        .collect();

    let amp = Complex64::new(1.0 / (size as f64).sqrt(), 0.0);
    let mut state = vec![amp; size];
    for d in 0..params.depth() {
        // diagonal phase operator
        let gamma = params.gamma()[d];
        for (x, a) in state.iter_mut().enumerate() {
            let angle = -gamma * phase_scale * goal[x];
            *a *= Complex64::new(angle.cos(), angle.sin());
        }
        // one dense matrix per qubit
        let theta = params.beta()[d] * mixer_scale;
        for q in 0..n {
            let m = embedded_x_rotation(n, q, theta);
            state = mat_vec(&m, &state);
        }
    }
    state
}

/// Max absolute componentwise difference between two amplitude vectors.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Pearson goodness-of-fit statistic against uniform expectation.
pub fn chi_square_uniform(observed: &[u64], total: u64) -> f64 {
    let expected = total as f64 / observed.len() as f64;
    observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Two-sample chi-square statistic over matched histogram cells with equal
/// sample sizes; cells where both counts are zero are skipped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, usize) {
    assert_eq!(a.len(), b.len());
    let mut stat = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        let d = x as f64 - y as f64;
        stat += d * d / (x + y) as f64;
        cells += 1;
    }
    (stat, cells)
}

/// Upper 0.999 quantiles of the chi-square distribution, indexed by degrees
/// of freedom actually used by the tests.
pub fn chi2_crit_999(df: usize) -> f64 {
    match df {
        27 => 55.476,
        31 => 61.098,
        _ => panic!("no frozen critical value for df = {df}"),
    }
}
