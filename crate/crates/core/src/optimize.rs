//! Quasi-Newton minimization with finite-difference gradients.
//!
//! The minimizer is a dense inverse-Hessian BFGS with a backtracking
//! sufficient-decrease line search. Gradients are forward differences by
//! default (`arity + 1` objective calls per gradient, the cheapest counted
//! option); when the line search stalls, the run escalates once to central
//! differences, whose truncation error is small enough to keep descending.
//! Central mode can also be forced from the config for accuracy studies.
//! Every objective call is counted and reported, because counted calls are
//! the cost metric the whole benchmark is built around.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and line-search knobs. Defaults are frozen so cost figures are
/// comparable across strategies and runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Relative forward-difference step: `h_i = fd_step * (1 + |x_i|)`.
    pub fd_step: f64,
    /// Stop when the max-norm of the gradient drops below this.
    pub grad_tol: f64,
    /// Stop when the per-step improvement falls below `f_tol * (1 + |f|)`.
    pub f_tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub ls_c1: f64,
    /// Step shrink factor per backtracking probe.
    pub ls_shrink: f64,
    pub ls_max_probes: usize,
    /// Doubling probes tried past an immediately accepted unit step.
    pub ls_max_expansions: usize,
    /// Use central differences (2 * arity calls per gradient) instead of
    /// forward differences.
    pub central_difference: bool,
}

impl Default for OptimizerConfig {
    // f_tol doubles as the flat-landscape exit: expectation landscapes are
    // shallow near quasi-optima and per-iteration gains below ~1e-4 relative
    // never move the measured target probability, they only inflate the
    // counted cost
    fn default() -> Self {
        OptimizerConfig {
            fd_step: 1e-6,
            grad_tol: 1e-5,
            f_tol: 5e-5,
            max_iters: 200,
            ls_c1: 1e-4,
            ls_shrink: 0.5,
            ls_max_probes: 40,
            ls_max_expansions: 16,
            central_difference: false,
        }
    }
}

/// Why the minimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradTol,
    FTol,
    MaxIters,
    LineSearchFailure,
}

/// Outcome of one minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// Objective at the starting point, before any step.
    pub f_initial: f64,
    /// Objective calls made by the minimizer (equals the attached counter
    /// delta when the objective counts itself).
    pub evals: u64,
    pub iterations: usize,
    pub converged: bool,
    pub reason: StopReason,
}

struct Counted<'a, F> {
    f: &'a mut F,
    evals: u64,
}

impl<F: FnMut(&[f64]) -> f64> Counted<'_, F> {
    fn call(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(x.to_vec()));
        }
        Ok(v)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn gradient<F: FnMut(&[f64]) -> f64>(
    counted: &mut Counted<'_, F>,
    x: &[f64],
    fx: f64,
    fd_step: f64,
    central: bool,
) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = fd_step * (1.0 + x[i].abs());
        if central {
            probe[i] = x[i] + h;
            let hi = counted.call(&probe)?;
            probe[i] = x[i] - h;
            let lo = counted.call(&probe)?;
            g[i] = (hi - lo) / (2.0 * h);
        } else {
            probe[i] = x[i] + h;
            let hi = counted.call(&probe)?;
            g[i] = (hi - fx) / h;
        }
        probe[i] = x[i];
    }
    Ok(g)
}

/// Standalone finite-difference gradient with the same stepping rule the
/// minimizer uses; handy for gradient-accuracy checks.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<f64>> {
    let mut counted = Counted { f: &mut f, evals: 0 };
    let fx = counted.call(x)?;
    gradient(&mut counted, x, fx, cfg.fd_step, cfg.central_difference)
}

/// Minimizes `f` from `x0` by BFGS. Returns an error only if the objective
/// produces a non-finite value; a failed line search returns the best point
/// found with `converged = false`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    assert!(!x0.is_empty(), "objective arity must be at least 1");
    let arity = x0.len();
    let mut counted = Counted { f: &mut f, evals: 0 };

    let mut x = x0.to_vec();
    let mut fx = counted.call(&x)?;
    let f_initial = fx;
    // forward differences until the line search stalls on gradient noise,
    // central differences from then on
    let mut central = cfg.central_difference;
    let mut g = gradient(&mut counted, &x, fx, cfg.fd_step, central)?;

    // dense inverse-Hessian approximation, row-major
    let mut h_inv = identity(arity);
    let mut h_unscaled = true;
    let mut iterations = 0;

    let finish = |x: Vec<f64>, fx, evals, iterations, converged, reason| {
        Ok(OptimizationReport {
            x_star: x,
            f_star: fx,
            f_initial,
            evals,
            iterations,
            converged,
            reason,
        })
    };

    loop {
        if inf_norm(&g) <= cfg.grad_tol {
            return finish(x, fx, counted.evals, iterations, true, StopReason::GradTol);
        }
        if iterations >= cfg.max_iters {
            return finish(x, fx, counted.evals, iterations, false, StopReason::MaxIters);
        }
        iterations += 1;

        let mut dir = neg_mat_vec(&h_inv, &g, arity);
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // curvature went bad; restart from steepest descent
            h_inv = identity(arity);
            h_unscaled = true;
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        // backtracking line search with Armijo sufficient decrease
        let mut t = 1.0;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for _ in 0..cfg.ls_max_probes {
            let x_new: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            let f_new = counted.call(&x_new)?;
            if f_new <= fx + cfg.ls_c1 * t * slope {
                accepted = Some((x_new, f_new));
                break;
            }
            t *= cfg.ls_shrink;
        }
        // a unit step accepted outright while the Hessian is still unscaled
        // means the step length carries no curvature information yet; expand
        // while the objective keeps falling to find the right regime
        if let Some((_, f_acc)) = &accepted {
            if t == 1.0 && h_unscaled {
                let mut best = *f_acc;
                let mut te = 2.0;
                for _ in 0..cfg.ls_max_expansions {
                    let x_try: Vec<f64> =
                        x.iter().zip(&dir).map(|(xi, di)| xi + te * di).collect();
                    let f_try = counted.call(&x_try)?;
                    if f_try < best && f_try <= fx + cfg.ls_c1 * te * slope {
                        best = f_try;
                        accepted = Some((x_try, f_try));
                        te *= 2.0;
                    } else {
                        break;
                    }
                }
            }
        }
        let Some((x_new, f_new)) = accepted else {
            if !central {
                // the forward-difference gradient is likely noise-dominated
                // here; refine it and try again from a fresh Hessian
                central = true;
                g = gradient(&mut counted, &x, fx, cfg.fd_step, true)?;
                h_inv = identity(arity);
                continue;
            }
            return finish(
                x,
                fx,
                counted.evals,
                iterations,
                false,
                StopReason::LineSearchFailure,
            );
        };

        let step: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let improvement = fx - f_new;
        let f_old = fx;
        x = x_new;
        fx = f_new;

        if improvement <= cfg.f_tol * (1.0 + f_old.abs()) {
            return finish(x, fx, counted.evals, iterations, true, StopReason::FTol);
        }

        let g_new = gradient(&mut counted, &x, fx, cfg.fd_step, central)?;
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &y);
        if sy > 1e-10 * norm(&step) * norm(&y) {
            if h_unscaled {
                // size the initial inverse Hessian from the first observed
                // curvature so step lengths start in the right regime
                let scale = sy / dot(&y, &y);
                for i in 0..arity {
                    h_inv[i * arity + i] = scale;
                }
                h_unscaled = false;
            }
            bfgs_update(&mut h_inv, &step, &y, sy, arity);
        }
        g = g_new;
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn neg_mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -dot(&m[i * n..(i + 1) * n], v))
        .collect()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T` with `rho = 1/sy`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Exhaustive evaluation over a 2-D parameter grid; `best` is the maximum.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub theta_axis: Vec<f64>,
    pub rho_axis: Vec<f64>,
    /// Row-major: `values[ti * rho_axis.len() + ri]`.
    pub values: Vec<f64>,
    pub best_indices: (usize, usize),
    pub best_point: (f64, f64),
    pub best_value: f64,
    pub evals: u64,
}

/// Evaluates `objective(theta, rho)` on the inclusive Cartesian grid and
/// returns the full surface plus the maximizing cell.
pub fn grid_scan<F: FnMut(f64, f64) -> f64>(
    mut objective: F,
    theta_range: (f64, f64),
    rho_range: (f64, f64),
    resolution: (usize, usize),
) -> GridScan {
    assert!(resolution.0 >= 2 && resolution.1 >= 2, "need at least 2 points per axis");
    let axis = |lo: f64, hi: f64, res: usize| -> Vec<f64> {
        (0..res)
            .map(|i| lo + (hi - lo) * i as f64 / (res - 1) as f64)
            .collect()
    };
    let theta_axis = axis(theta_range.0, theta_range.1, resolution.0);
    let rho_axis = axis(rho_range.0, rho_range.1, resolution.1);
    let mut values = Vec::with_capacity(resolution.0 * resolution.1);
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (ti, &theta) in theta_axis.iter().enumerate() {
        for (ri, &rho) in rho_axis.iter().enumerate() {
            let v = objective(theta, rho);
            if v > best.2 {
                best = (ti, ri, v);
            }
            values.push(v);
        }
    }
    let evals = values.len() as u64;
    GridScan {
        best_point: (theta_axis[best.0], rho_axis[best.1]),
        best_indices: (best.0, best.1),
        best_value: best.2,
        theta_axis,
        rho_axis,
        values,
        evals,
    }
}
