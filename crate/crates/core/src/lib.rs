//! QAOA parameter-setting workbench for random k-SAT.
//!
//! The crate provides the full pipeline used by the experiment harness:
//!
//! * [`sat`] — exactly-k-literal CNF formulas, evaluation, DIMACS I/O;
//! * [`models`] — seeded random instance models `F`, `F_s`, `F_f` and the
//!   clause-count schedule `m*_n`;
//! * [`spectrum`] — the diagonal goal-function table `C(x)`, the exact and
//!   estimated spectral spread `G_0` / `G_E`, and Hamiltonian normalization;
//! * [`simulator`] — exact state-vector evolution of the alternating
//!   phase/mixer circuit with expectation-call accounting;
//! * [`schedules`] — the linear, per-layer `(theta, tau)`, and Fourier
//!   parameter spaces plus cubic-spline resizing between depths;
//! * [`optimize`] — quasi-Newton minimization with finite-difference
//!   gradients and exhaustive grid scans;
//! * [`strategies`] — the five parameter-setting procedures compared by the
//!   benchmark harness.
//!
//! Everything is deterministic given a seed; the cost metric across the crate
//! is the number of expectation evaluations, never wall time.

pub mod bitset;
pub mod error;
pub mod models;
pub mod optimize;
pub mod sat;
pub mod schedules;
pub mod simulator;
pub mod spectrum;
pub mod strategies;

pub use error::{Error, Result};

/// Hard cap on variable count: every pipeline stage materializes a 2^n table.
pub const MAX_VARS: usize = 24;
