//! Seeded random k-SAT models.
//!
//! Three clause distributions are provided, all sampling with replacement:
//!
//! * `F(n, m, k)` — clauses uniform over the whole universe of
//!   `2^k * C(n, k)` clauses; instances may be unsatisfiable;
//! * `F_s(n, m, k)` — each clause uniform over clauses that keep the formula
//!   satisfiable (at least one current satisfying assignment survives);
//! * `F_f(n, m, k)` — a hidden assignment `t0` is drawn first and each
//!   clause is uniform over clauses satisfied by `t0`.
//!
//! Generation is deterministic per [`ModelSpec`]: one `ChaCha8Rng` seeded
//! from `spec.seed`, clause draws consuming first the k variable picks and
//! then the k sign bits, rejection redraws in document order. Suites derive
//! per-instance seeds from a base seed via [`mix_seed`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::sat::{Assignment, Clause, CnfFormula, Literal};
use crate::MAX_VARS;

/// Which clause distribution to sample from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Unconditional uniform model.
    #[serde(rename = "f")]
    F,
    /// Satisfiability-preserving model.
    #[serde(rename = "fs")]
    Fs,
    /// Hidden-interpretation (planted) model.
    #[serde(rename = "ff")]
    Ff,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::F => write!(f, "f"),
            ModelKind::Fs => write!(f, "fs"),
            ModelKind::Ff => write!(f, "ff"),
        }
    }
}

/// Full description of one random instance draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_VARS {
            return Err(Error::Capacity { n: self.n, max: MAX_VARS });
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidModel(format!(
                "k = {} must be in [1, n = {}]",
                self.k, self.n
            )));
        }
        Ok(())
    }
}

/// A generated instance plus everything the generator knows about it.
#[derive(Debug, Clone)]
pub struct GenerationResult {
    pub formula: CnfFormula,
    /// The planted assignment, present only for `F_f`.
    pub hidden_t0: Option<Assignment>,
    /// All assignments satisfying every clause (brute-force exact).
    pub interpretations: BitSet,
}

impl GenerationResult {
    pub fn interpretation_count(&self) -> usize {
        self.interpretations.count()
    }

    pub fn satisfiable(&self) -> bool {
        !self.interpretations.is_empty()
    }
}

/// Splitmix-style hash combining a base seed with a stream index, used to
/// derive independent per-instance seeds inside a suite.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Clause count schedule: `m*_n = round(mu_n * n)` with `mu_n` rising
/// linearly from 5.9 at n = 10 to 6.3 at n = 20, clamped outside that range.
pub fn m_star(n: usize) -> usize {
    assert!(n >= 2, "m_star needs n >= 2");
    let mu = (5.9 + 0.04 * (n as f64 - 10.0)).clamp(5.9, 6.3);
    (mu * n as f64).round() as usize
}

/// Draws one clause uniformly over all `2^k * C(n, k)` exactly-k clauses:
/// k distinct variables without replacement, then k independent fair signs.
pub fn sample_clause_uniform<R: Rng>(n: usize, k: usize, rng: &mut R) -> Clause {
    debug_assert!(k >= 1 && k <= n);
    // partial Fisher-Yates over the variable pool
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut vars = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
        vars.push(pool[i]);
    }
    let lits = vars
        .into_iter()
        .map(|v| Literal::new(v, rng.random::<bool>()))
        .collect();
    Clause::new(lits).expect("sampled variables are distinct")
}

/// Rejection-samples a uniform clause until it is satisfied by `t0`.
pub fn sample_clause_satisfied_by<R: Rng>(
    n: usize,
    k: usize,
    t0: &Assignment,
    rng: &mut R,
) -> Clause {
    loop {
        let c = sample_clause_uniform(n, k, rng);
        if crate::sat::eval_clause(&c, t0) {
            return c;
        }
    }
}

/// Rejection-samples a uniform clause until at least one member of `alive`
/// satisfies it. `alive` must be non-empty, which guarantees termination:
/// the acceptance probability is at least `1 - 2^-k`.
pub fn sample_clause_satisfiable<R: Rng>(
    n: usize,
    k: usize,
    alive: &BitSet,
    rng: &mut R,
) -> Clause {
    debug_assert!(!alive.is_empty());
    loop {
        let c = sample_clause_uniform(n, k, rng);
        let (mask, pattern) = c.falsifying_pattern();
        if alive.iter().any(|x| x & mask != pattern) {
            return c;
        }
    }
}

/// Removes from `alive` every assignment falsifying `clause`, enumerating
/// only the `2^(n-k)` indices that match the falsifying pattern.
fn intersect_with_clause(alive: &mut BitSet, clause: &Clause, n: usize) {
    let (mask, pattern) = clause.falsifying_pattern();
    let free = !mask & ((1u64 << n) - 1);
    let mut t = 0u64;
    loop {
        alive.remove(pattern | t);
        t = t.wrapping_sub(free) & free;
        if t == 0 {
            break;
        }
    }
}

/// Exact satisfying set of a formula, via falsifying-pattern sweeps.
pub fn satisfying_set(formula: &CnfFormula) -> BitSet {
    let mut alive = BitSet::full(1usize << formula.n());
    for clause in formula.clauses() {
        intersect_with_clause(&mut alive, clause, formula.n());
    }
    alive
}

/// Generates one instance according to `spec`.
pub fn generate(spec: &ModelSpec) -> Result<GenerationResult> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, m, k) = (spec.n, spec.m, spec.k);
    let size = 1usize << n;

    match spec.kind {
        ModelKind::F => {
            let clauses = (0..m).map(|_| sample_clause_uniform(n, k, &mut rng)).collect();
            let formula = CnfFormula::new(n, k, clauses)?;
            let interpretations = satisfying_set(&formula);
            Ok(GenerationResult {
                formula,
                hidden_t0: None,
                interpretations,
            })
        }
        ModelKind::Ff => {
            let t0 = Assignment::from_index(rng.random_range(0..size as u64), n);
            let clauses = (0..m)
                .map(|_| sample_clause_satisfied_by(n, k, &t0, &mut rng))
                .collect();
            let formula = CnfFormula::new(n, k, clauses)?;
            let interpretations = satisfying_set(&formula);
            debug_assert!(interpretations.contains(t0.index()));
            Ok(GenerationResult {
                formula,
                hidden_t0: Some(t0),
                interpretations,
            })
        }
        ModelKind::Fs => {
            let mut alive = BitSet::full(size);
            let mut clauses = Vec::with_capacity(m);
            for _ in 0..m {
                let c = sample_clause_satisfiable(n, k, &alive, &mut rng);
                intersect_with_clause(&mut alive, &c, n);
                clauses.push(c);
            }
            let formula = CnfFormula::new(n, k, clauses)?;
            debug_assert!(!alive.is_empty());
            Ok(GenerationResult {
                formula,
                hidden_t0: None,
                interpretations: alive,
            })
        }
    }
}
