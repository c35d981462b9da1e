//! Exactly-k-literal CNF formulas: representation, evaluation, DIMACS I/O.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * variables are 1-based; assignment bit `j` holds the value of variable
//!   `j + 1`, so variable 1 is the least-significant bit of the integer
//!   encoding `x in [0, 2^n)`;
//! * clause literals are stored sorted by variable index — literal order
//!   carries no meaning, and the canonical form makes structural equality
//!   and round-trip tests exact;
//! * duplicate clauses are kept as-is (the random models sample with
//!   replacement).

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_VARS;

/// A signed occurrence of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    /// `var` is 1-based.
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, negated }
    }

    /// Decode the signed-integer form `±var`.
    pub fn from_int(code: i32) -> Result<Self> {
        if code == 0 {
            return Err(Error::InvalidClause("literal code 0 is reserved".into()));
        }
        Ok(Literal {
            var: code.unsigned_abs(),
            negated: code < 0,
        })
    }

    pub fn to_int(self) -> i32 {
        let v = self.var as i32;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn negated(self) -> bool {
        self.negated
    }

    /// True iff the literal evaluates to true under `x`.
    pub fn satisfied_by(self, x: &Assignment) -> bool {
        x.get(self.var) != self.negated
    }
}

/// A disjunction of exactly `k` literals over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, sorting literals by variable index.
    /// Rejects repeated variables (including `x ∨ ¬x`).
    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::InvalidClause("empty clause".into()));
        }
        literals.sort_by_key(|l| l.var);
        for pair in literals.windows(2) {
            if pair[0].var == pair[1].var {
                return Err(Error::InvalidClause(format!(
                    "repeated variable {} in clause",
                    pair[0].var
                )));
            }
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        // literals are sorted
        self.literals.last().map_or(0, |l| l.var)
    }

    /// The unique bit pattern on this clause's variables that falsifies it,
    /// as `(mask, pattern)`: `x` falsifies the clause iff
    /// `x & mask == pattern`. A positive literal is falsified by bit 0, a
    /// negated one by bit 1.
    pub fn falsifying_pattern(&self) -> (u64, u64) {
        let mut mask = 0u64;
        let mut pattern = 0u64;
        for l in &self.literals {
            let bit = 1u64 << (l.var - 1);
            mask |= bit;
            if l.negated {
                pattern |= bit;
            }
        }
        (mask, pattern)
    }
}

/// A CNF formula over `n` variables with exactly `k` literals per clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::Capacity { n, max: MAX_VARS });
        }
        if k == 0 || k > n {
            return Err(Error::InvalidModel(format!("k = {k} must be in [1, n = {n}]")));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.len() != k {
                return Err(Error::InvalidClause(format!(
                    "clause {i} has {} literals, expected {k}",
                    c.len()
                )));
            }
            if c.max_var() as usize > n {
                return Err(Error::InvalidClause(format!(
                    "clause {i} mentions variable {} > n = {n}",
                    c.max_var()
                )));
            }
        }
        Ok(CnfFormula { n, k, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }
}

/// A total assignment of `n` variables, encoded little-endian in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    bits: u64,
    n: usize,
}

impl Assignment {
    /// From the integer encoding `x in [0, 2^n)`.
    pub fn from_index(x: u64, n: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&n));
        debug_assert!(n == 64 || x < (1u64 << n));
        Assignment { bits: x, n }
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value of `var` (1-based).
    pub fn get(&self, var: u32) -> bool {
        assert!(var >= 1 && var as usize <= self.n, "variable {var} out of range");
        (self.bits >> (var - 1)) & 1 == 1
    }

    pub fn hamming_distance(&self, other: &Assignment) -> u32 {
        debug_assert_eq!(self.n, other.n);
        (self.bits ^ other.bits).count_ones()
    }
}

/// True iff at least one literal of `clause` is satisfied by `x`.
pub fn eval_clause(clause: &Clause, x: &Assignment) -> bool {
    assert!(
        clause.max_var() as usize <= x.n(),
        "clause variable out of range for a width-{} assignment",
        x.n()
    );
    let (mask, pattern) = clause.falsifying_pattern();
    (x.index() & mask) != pattern
}

/// The goal function `C(x)`: the number of clauses satisfied by `x`.
pub fn count_satisfied(formula: &CnfFormula, x: &Assignment) -> usize {
    formula.clauses().iter().filter(|c| eval_clause(c, x)).count()
}

/// Parses DIMACS CNF text. Comment lines start with `c`; the header is
/// `p cnf <n> <m>`; clauses are whitespace-separated signed integers
/// terminated by `0` (line breaks inside a clause are permitted).
///
/// When `expect_k` is given, every clause must have exactly that many
/// literals; otherwise `k` is inferred from the first clause and uniformity
/// is enforced.
pub fn parse_dimacs<R: BufRead>(reader: R, expect_k: Option<usize>) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line_num = lineno + 1;
        let line = line.map_err(|e| Error::Dimacs {
            line: line_num,
            msg: format!("read failure: {e}"),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Dimacs {
                    line: line_num,
                    msg: "duplicate header".into(),
                });
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(Error::Dimacs {
                    line: line_num,
                    msg: format!("malformed header {trimmed:?}"),
                });
            }
            let n: usize = fields[2].parse().map_err(|_| Error::Dimacs {
                line: line_num,
                msg: format!("bad variable count {:?}", fields[2]),
            })?;
            let m: usize = fields[3].parse().map_err(|_| Error::Dimacs {
                line: line_num,
                msg: format!("bad clause count {:?}", fields[3]),
            })?;
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(Error::Dimacs {
                line: line_num,
                msg: "clause before header".into(),
            });
        }
        for tok in trimmed.split_whitespace() {
            let code: i32 = tok.parse().map_err(|_| Error::Dimacs {
                line: line_num,
                msg: format!("bad literal token {tok:?}"),
            })?;
            if code == 0 {
                let clause = Clause::new(std::mem::take(&mut current)).map_err(|e| Error::Dimacs {
                    line: line_num,
                    msg: e.to_string(),
                })?;
                clauses.push(clause);
            } else {
                current.push(Literal::from_int(code)?);
            }
        }
    }

    let (n, m) = header.ok_or(Error::Dimacs {
        line: 0,
        msg: "missing header".into(),
    })?;
    if !current.is_empty() {
        return Err(Error::Dimacs {
            line: 0,
            msg: "unterminated clause at end of input".into(),
        });
    }
    if clauses.len() != m {
        return Err(Error::Dimacs {
            line: 0,
            msg: format!("header declares {m} clauses, found {}", clauses.len()),
        });
    }
    let k = match (expect_k, clauses.first()) {
        (Some(k), _) => k,
        (None, Some(first)) => first.len(),
        // An empty formula carries no clause width; treat it as width n.
        (None, None) => n.clamp(1, MAX_VARS),
    };
    CnfFormula::new(n, k, clauses)
}

/// Renders the formula in DIMACS CNF text form.
pub fn write_dimacs<W: Write>(formula: &CnfFormula, mut out: W) -> std::io::Result<()> {
    let mut buf = String::new();
    let _ = writeln!(buf, "p cnf {} {}", formula.n(), formula.m());
    for clause in formula.clauses() {
        for lit in clause.literals() {
            let _ = write!(buf, "{} ", lit.to_int());
        }
        let _ = writeln!(buf, "0");
    }
    out.write_all(buf.as_bytes())
}

/// Convenience wrapper returning the DIMACS text as a string.
pub fn dimacs_string(formula: &CnfFormula) -> String {
    let mut bytes = Vec::new();
    write_dimacs(formula, &mut bytes).expect("writing to a Vec cannot fail");
    String::from_utf8(bytes).expect("dimacs output is ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(code: i32) -> Literal {
        Literal::from_int(code).unwrap()
    }

    fn clause(codes: &[i32]) -> Clause {
        Clause::new(codes.iter().map(|&c| lit(c)).collect()).unwrap()
    }

    #[test]
    fn literal_roundtrip_and_eval() {
        let a = Assignment::from_index(0b101, 3);
        assert!(lit(1).satisfied_by(&a));
        assert!(!lit(-1).satisfied_by(&a));
        assert!(!lit(2).satisfied_by(&a));
        assert!(lit(-2).satisfied_by(&a));
        assert_eq!(lit(-7).to_int(), -7);
    }

    #[test]
    fn fig2_clause_unique_falsifier() {
        // ¬x1 ∨ x2 ∨ ¬x4 is falsified only by x1=1, x2=0, x4=1.
        let c = clause(&[-1, 2, -4]);
        let falsifier = Assignment::from_index(0b1001, 4);
        assert!(!eval_clause(&c, &falsifier));
        for x in 0..16u64 {
            let a = Assignment::from_index(x, 4);
            if x & 0b1011 == 0b1001 {
                assert!(!eval_clause(&c, &a));
            } else {
                assert!(eval_clause(&c, &a));
            }
        }
        // all-zeros satisfies via ¬x1
        assert!(eval_clause(&c, &Assignment::from_index(0, 4)));
    }

    #[test]
    fn falsifying_pattern_matches_literal_eval() {
        let c = clause(&[-1, 2, -4]);
        let (mask, pattern) = c.falsifying_pattern();
        assert_eq!(mask, 0b1011);
        assert_eq!(pattern, 0b1001);
        for x in 0..16u64 {
            let a = Assignment::from_index(x, 4);
            let by_literals = c.literals().iter().any(|l| l.satisfied_by(&a));
            assert_eq!(eval_clause(&c, &a), by_literals);
        }
    }

    #[test]
    fn clause_rejects_repeated_variable() {
        assert!(Clause::new(vec![lit(1), lit(1), lit(2)]).is_err());
        assert!(Clause::new(vec![lit(1), lit(-1), lit(2)]).is_err());
    }

    #[test]
    fn count_satisfied_bounds() {
        let f = CnfFormula::new(3, 3, vec![]).unwrap();
        assert_eq!(count_satisfied(&f, &Assignment::from_index(5, 3)), 0);

        let f = CnfFormula::new(
            4,
            3,
            vec![clause(&[1, 2, 3]), clause(&[1, -2, 4]), clause(&[-1, 3, 4])],
        )
        .unwrap();
        // x = 0b0101 satisfies all three
        let t = Assignment::from_index(0b0101, 4);
        assert_eq!(count_satisfied(&f, &t), 3);
    }

    #[test]
    fn parse_basic() {
        let text = "c a comment\np cnf 3 1\n1 -2 3 0\n";
        let f = parse_dimacs(text.as_bytes(), None).unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.m(), 1);
        assert_eq!(f.k(), 3);
        assert_eq!(f.clauses()[0], clause(&[1, -2, 3]));
    }

    #[test]
    fn parse_multiline_clause() {
        let text = "p cnf 4 2\n1 -2\n3 0 2 3 -4 0\n";
        let f = parse_dimacs(text.as_bytes(), Some(3)).unwrap();
        assert_eq!(f.m(), 2);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_dimacs("p dnf 3 1\n1 2 3 0\n".as_bytes(), None).is_err());
        assert!(parse_dimacs("1 2 3 0\n".as_bytes(), None).is_err());
        assert!(parse_dimacs("p cnf 3 2\n1 2 3 0\n".as_bytes(), None).is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 1 2 0\n".as_bytes(), None).is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 0\n".as_bytes(), Some(3)).is_err());
        // non-uniform clause widths without an enforced k
        assert!(parse_dimacs("p cnf 3 2\n1 2 3 0\n1 2 0\n".as_bytes(), None).is_err());
        // unterminated clause
        assert!(parse_dimacs("p cnf 3 1\n1 2 3\n".as_bytes(), None).is_err());
    }

    #[test]
    fn dimacs_roundtrip() {
        let f = CnfFormula::new(
            4,
            3,
            vec![clause(&[4, -2, 1]), clause(&[1, 2, 3]), clause(&[1, 2, 3])],
        )
        .unwrap();
        let text = dimacs_string(&f);
        let back = parse_dimacs(text.as_bytes(), None).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn count_satisfied_plus_falsified_is_m() {
        let f = CnfFormula::new(
            4,
            3,
            vec![clause(&[1, 2, 3]), clause(&[-1, -2, -3]), clause(&[2, 3, 4])],
        )
        .unwrap();
        for x in 0..16u64 {
            let a = Assignment::from_index(x, 4);
            let sat = count_satisfied(&f, &a);
            let unsat = f
                .clauses()
                .iter()
                .filter(|c| !eval_clause(c, &a))
                .count();
            assert_eq!(sat + unsat, f.m());
        }
    }
}
