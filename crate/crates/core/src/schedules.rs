//! Parameter spaces for the circuit angles and the maps between them.
//!
//! Three reduced spaces are provided on top of the raw `(gamma, beta)`
//! arrays:
//!
//! * [`LinearSchedule`] — a two-parameter linearly ramped schedule
//!   `gamma_d = (2 d pi / (p+1)) rho sin(theta)`,
//!   `beta_d  = (2 (p+1-d) pi / (p+1)) rho cos(theta)`;
//! * [`ThetaTauParams`] — the per-layer space
//!   `gamma_d = (d / (p+1)) tau_d sin(theta_d)`,
//!   `beta_d  = ((p+1-d) / (p+1)) tau_d cos(theta_d)`,
//!   designed so adjacent layers vary smoothly along a good passage;
//! * [`FourierParams`] — sin/cos transform coefficients
//!   `gamma_j = sum_k u_k sin((k-1/2)(j-1/2) pi / q)` (cos for `beta_j`).
//!
//! [`interp_resize`] moves a per-layer vector between depths by natural
//! cubic spline interpolation, with nodes placed at `d / (L+1)` to mirror the
//! ramp factors above.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::simulator::GammaBetaParams;

/// Two-parameter linear schedule: intensity angle and per-layer time scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSchedule {
    pub theta: f64,
    pub rho: f64,
}

impl LinearSchedule {
    pub fn new(theta: f64, rho: f64) -> Self {
        assert!(rho > 0.0, "rho must be positive");
        LinearSchedule { theta, rho }
    }
}

#[inline]
fn ramp(d: usize, len: usize) -> f64 {
    d as f64 / (len + 1) as f64
}

/// Linear schedule expansion over raw `(theta, rho)` values; usable
/// mid-optimization where rho may transiently leave its domain.
pub fn linear_angles(theta: f64, rho: f64, p: usize) -> GammaBetaParams {
    assert!(p >= 1);
    let sin = theta.sin();
    let cos = theta.cos();
    let gamma = (1..=p).map(|d| TAU * (ramp(d, p) * rho * sin)).collect();
    let beta = (1..=p)
        .map(|d| TAU * (ramp(p + 1 - d, p) * rho * cos))
        .collect();
    GammaBetaParams::new(gamma, beta)
}

/// Expands a linear schedule to depth `p`.
pub fn linear_to_gamma_beta(sched: &LinearSchedule, p: usize) -> GammaBetaParams {
    linear_angles(sched.theta, sched.rho, p)
}

/// Per-layer intensity angles and time scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTauParams {
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
}

impl ThetaTauParams {
    pub fn new(theta: Vec<f64>, tau: Vec<f64>) -> Self {
        assert_eq!(theta.len(), tau.len(), "theta/tau length mismatch");
        assert!(!theta.is_empty());
        assert!(tau.iter().all(|&t| t > 0.0), "tau must be positive");
        ThetaTauParams { theta, tau }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Slice form of the per-layer map, usable mid-optimization where the
/// iterate is a flat vector and tau may transiently leave its domain.
pub fn thetatau_slices_to_gamma_beta(theta: &[f64], tau: &[f64]) -> GammaBetaParams {
    assert_eq!(theta.len(), tau.len());
    let p = theta.len();
    let gamma = (1..=p)
        .map(|d| ramp(d, p) * tau[d - 1] * theta[d - 1].sin())
        .collect();
    let beta = (1..=p)
        .map(|d| ramp(p + 1 - d, p) * tau[d - 1] * theta[d - 1].cos())
        .collect();
    GammaBetaParams::new(gamma, beta)
}

/// Expands per-layer `(theta, tau)` parameters of length `p` to circuit
/// angles of depth `p`.
pub fn thetatau_to_gamma_beta(params: &ThetaTauParams) -> GammaBetaParams {
    thetatau_slices_to_gamma_beta(&params.theta, &params.tau)
}

/// Sin/cos transform coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierParams {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FourierParams {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "u/v length mismatch");
        FourierParams { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Evaluates the sin/cos transform at circuit depth `depth`.
///
/// Coefficients beyond `params.len()` are implicitly zero, so appending a
/// zero coefficient never changes the produced angles.
pub fn fourier_to_gamma_beta(params: &FourierParams, depth: usize) -> GammaBetaParams {
    assert!(depth >= 1);
    assert!(params.len() <= depth, "more coefficients than layers");
    let q = depth as f64;
    let mut gamma = Vec::with_capacity(depth);
    let mut beta = Vec::with_capacity(depth);
    for j in 1..=depth {
        let jj = j as f64 - 0.5;
        let mut g = 0.0;
        let mut b = 0.0;
        for (k, (&u, &v)) in params.u.iter().zip(&params.v).enumerate() {
            let kk = k as f64 + 0.5;
            let arg = kk * jj * PI / q;
            g += u * arg.sin();
            b += v * arg.cos();
        }
        gamma.push(g);
        beta.push(b);
    }
    GammaBetaParams::new(gamma, beta)
}

/// Resamples a per-layer vector from length `L` to `new_len`.
///
/// Source nodes sit at `s_d = d / (L+1)` and targets at `d' / (new_len+1)`.
/// Natural cubic splines are used for `L >= 3`, straight-line interpolation
/// for `L == 2`, constant extension for `L == 1`; queries outside the source
/// span clamp to the nearest node value.
pub fn interp_resize(values: &[f64], new_len: usize) -> Vec<f64> {
    assert!(!values.is_empty());
    assert!(new_len >= 1);
    let src_len = values.len();
    if src_len == 1 {
        return vec![values[0]; new_len];
    }
    let xs: Vec<f64> = (1..=src_len).map(|d| ramp(d, src_len)).collect();
    let targets: Vec<f64> = (1..=new_len).map(|d| ramp(d, new_len)).collect();

    if src_len == 2 {
        let slope = (values[1] - values[0]) / (xs[1] - xs[0]);
        return targets
            .iter()
            .map(|&t| {
                let t = t.clamp(xs[0], xs[1]);
                values[0] + slope * (t - xs[0])
            })
            .collect();
    }

    let spline = NaturalCubicSpline::fit(&xs, values);
    targets.iter().map(|&t| spline.eval_clamped(t)).collect()
}

/// Natural cubic spline through given nodes (zero second derivative at both
/// ends), evaluated with boundary clamping.
struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        debug_assert!(n >= 3);
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        // tridiagonal system for the interior second derivatives
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        // Thomas algorithm on rows 1..n-1 with natural boundary rows fixed
        let mut second = vec![0.0; n];
        for i in 2..n - 1 {
            let lower = xs[i] - xs[i - 1];
            let factor = lower / diag[i - 1];
            diag[i] -= factor * upper[i - 1];
            rhs[i] -= factor * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
        }
        NaturalCubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        }
    }

    fn eval_clamped(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ys[0];
        }
        if t >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let seg = self
            .xs
            .partition_point(|&x| x <= t)
            .clamp(1, n - 1)
            - 1;
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (m0, m1) = (self.second[seg], self.second[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * y0
            + b * y1
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;
    use std::f64::consts::SQRT_2;

    #[test]
    fn linear_reference_point() {
        let gb = linear_to_gamma_beta(&LinearSchedule::new(FRAC_PI_4, SQRT_2), 3);
        let expected_gamma = [PI / 2.0, PI, 3.0 * PI / 2.0];
        let expected_beta = [3.0 * PI / 2.0, PI, PI / 2.0];
        for d in 0..3 {
            assert_abs_diff_eq!(gb.gamma()[d], expected_gamma[d], epsilon = 1e-12);
            assert_abs_diff_eq!(gb.beta()[d], expected_beta[d], epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_theta_half_pi_zeroes_beta() {
        let gb = linear_to_gamma_beta(&LinearSchedule::new(FRAC_PI_2, 1.3), 5);
        assert!(gb.beta().iter().all(|b| b.abs() < 1e-12));
    }

    #[test]
    fn linear_ramp_symmetry() {
        let sched = LinearSchedule::new(0.9, 1.7);
        let p = 7;
        let gb = linear_to_gamma_beta(&sched, p);
        let total = TAU * sched.rho * sched.theta.sin();
        for d in 0..p {
            assert_abs_diff_eq!(gb.gamma()[d] + gb.gamma()[p - 1 - d], total, epsilon = 1e-12);
        }
    }

    #[test]
    fn thetatau_reference_point() {
        let params = ThetaTauParams::new(vec![FRAC_PI_4; 3], vec![SQRT_2; 3]);
        let gb = thetatau_to_gamma_beta(&params);
        for (d, (&g, &b)) in gb.gamma().iter().zip(gb.beta()).enumerate() {
            assert_abs_diff_eq!(g, (d + 1) as f64 / 4.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b, (3 - d) as f64 / 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn thetatau_matches_linear_up_to_tau_factor() {
        // constant (theta, tau) reproduces the linear schedule divided by 2*pi,
        // bit-for-bit: both maps share the ramp and multiplication order
        let (theta, rho, p) = (1.1, 0.8, 6);
        let linear = linear_to_gamma_beta(&LinearSchedule::new(theta, rho), p);
        let ap = thetatau_slices_to_gamma_beta(&[theta; 6], &[rho; 6]);
        for d in 0..p {
            assert_eq!(linear.gamma()[d], TAU * ap.gamma()[d]);
            assert_eq!(linear.beta()[d], TAU * ap.beta()[d]);
        }
    }

    #[test]
    fn thetatau_roundtrip_inverse() {
        let p = 5;
        let theta: Vec<f64> = (0..p).map(|d| 0.3 + 0.17 * d as f64).collect();
        let tau: Vec<f64> = (0..p).map(|d| 0.9 + 0.1 * d as f64).collect();
        let gb = thetatau_slices_to_gamma_beta(&theta, &tau);
        // invert: theta_d = atan2(gamma_d (p+1)/d, beta_d (p+1)/(p+1-d))
        for d in 1..=p {
            let g_scaled = gb.gamma()[d - 1] * (p + 1) as f64 / d as f64;
            let b_scaled = gb.beta()[d - 1] * (p + 1) as f64 / (p + 1 - d) as f64;
            let th = g_scaled.atan2(b_scaled);
            let ta = (g_scaled * g_scaled + b_scaled * b_scaled).sqrt();
            assert_abs_diff_eq!(th, theta[d - 1], epsilon = 1e-12);
            assert_abs_diff_eq!(ta, tau[d - 1], epsilon = 1e-12);
        }
    }

    #[test]
    fn fourier_single_term() {
        let gb = fourier_to_gamma_beta(&FourierParams::new(vec![2.0], vec![3.0]), 1);
        assert_abs_diff_eq!(gb.gamma()[0], 2.0 * FRAC_PI_4.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(gb.beta()[0], 3.0 * FRAC_PI_4.cos(), epsilon = 1e-12);
    }

    #[test]
    fn fourier_first_mode_is_monotone_ramp() {
        let q = 6;
        let mut u = vec![0.0; q];
        u[0] = 1.0;
        let gb = fourier_to_gamma_beta(&FourierParams::new(u, vec![0.0; q]), q);
        for j in 1..=q {
            let expected = ((j as f64 - 0.5) * PI / (2.0 * q as f64)).sin();
            assert_abs_diff_eq!(gb.gamma()[j - 1], expected, epsilon = 1e-12);
        }
        assert!(gb.gamma().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fourier_is_linear() {
        let a = FourierParams::new(vec![0.4, -0.3], vec![1.0, 0.2]);
        let b = FourierParams::new(vec![-0.1, 0.8], vec![0.5, -0.6]);
        let sum = FourierParams::new(
            a.u.iter().zip(&b.u).map(|(x, y)| x + y).collect(),
            a.v.iter().zip(&b.v).map(|(x, y)| x + y).collect(),
        );
        let ga = fourier_to_gamma_beta(&a, 2);
        let gb = fourier_to_gamma_beta(&b, 2);
        let gsum = fourier_to_gamma_beta(&sum, 2);
        for j in 0..2 {
            assert_abs_diff_eq!(gsum.gamma()[j], ga.gamma()[j] + gb.gamma()[j], epsilon = 1e-12);
            assert_abs_diff_eq!(gsum.beta()[j], ga.beta()[j] + gb.beta()[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn fourier_zero_padding_is_identity() {
        let base = FourierParams::new(vec![0.7, -0.2], vec![0.1, 0.4]);
        let padded = FourierParams::new(vec![0.7, -0.2, 0.0], vec![0.1, 0.4, 0.0]);
        let a = fourier_to_gamma_beta(&base, 3);
        let b = fourier_to_gamma_beta(&padded, 3);
        assert_eq!(a.gamma(), b.gamma());
        assert_eq!(a.beta(), b.beta());
    }

    #[test]
    fn resize_constant() {
        for src in [1usize, 2, 3, 7] {
            for dst in [1usize, 2, 5, 9] {
                let out = interp_resize(&vec![0.42; src], dst);
                assert_eq!(out.len(), dst);
                assert!(out.iter().all(|&v| (v - 0.42).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn resize_affine_with_clamping() {
        // nodes d/5 carrying values d describe the line v(s) = 5 s;
        // targets d'/10 sample it inside [1/5, 4/5] and clamp outside
        let out = interp_resize(&[1.0, 2.0, 3.0, 4.0], 9);
        let expected = [1.0, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.0];
        for (got, want) in out.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn resize_single_value_extends() {
        let out = interp_resize(&[FRAC_PI_4], 4);
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|&v| (v - FRAC_PI_4).abs() < 1e-15));
    }

    #[test]
    fn resize_monotone_ramp_stays_bounded() {
        let src: Vec<f64> = (1..=6).map(|d| 0.5 + 0.25 * d as f64).collect();
        let out = interp_resize(&src, 17);
        let (lo, hi) = (src[0], src[5]);
        assert!(out.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    proptest! {
        #[test]
        fn resize_same_length_is_identity(values in proptest::collection::vec(-10.0f64..10.0, 1..12)) {
            let out = interp_resize(&values, values.len());
            for (got, want) in out.iter().zip(&values) {
                prop_assert!((got - want).abs() < 1e-12);
            }
        }
    }
}
