//! Equations over `{v, *, 1}`: parsing, normalization and first-order
//! classification, plus the syntactic quasiequation transformations.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::linear::{to_primitive_naturals, LinearSystem};

mod parse;
mod quasi;
mod term;
mod vector;

pub use parse::{normalize, parse_inequality};
pub use quasi::{acc_quasiequation, configuration_term, id_term, instruction_inequality};
pub use term::{quasi_to_equation, Inequality, Quasiequation, Term};
pub use vector::{ExponentVector, JoinTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquationError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty right-hand side")]
    EmptyRhs,
    #[error("unsupported: lhs must be a single monomial for a basic equation")]
    LhsNotMonomial,
    #[error("left-hand side must contain a variable")]
    UnitLhs,
    #[error("indexed variables (x1, x2, ...) and single letters cannot be mixed")]
    MixedVariables,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid simple equation: {0}")]
    InvalidSimple(String),
    #[error("invalid one-variable equation: {0}")]
    InvalidOneVariable(String),
}

/// `x^lhs <= join of x^d for d in rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicEquation {
    lhs: ExponentVector,
    rhs: JoinTerm,
}

impl BasicEquation {
    pub fn new(lhs: ExponentVector, rhs: JoinTerm) -> Result<Self, EquationError> {
        if rhs.is_empty() {
            return Err(EquationError::EmptyRhs);
        }
        if lhs.is_zero() {
            return Err(EquationError::UnitLhs);
        }
        if let Some(bad) = rhs.iter().find(|d| d.arity() != lhs.arity()) {
            return Err(EquationError::DimensionMismatch(format!(
                "joinand {} has arity {}, lhs has arity {}",
                bad,
                bad.arity(),
                lhs.arity()
            )));
        }
        Ok(BasicEquation { lhs, rhs })
    }

    pub fn lhs(&self) -> &ExponentVector {
        &self.lhs
    }

    pub fn rhs(&self) -> &JoinTerm {
        &self.rhs
    }

    pub fn arity(&self) -> usize {
        self.lhs.arity()
    }
}

impl fmt::Display for BasicEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs.monomial(), self.rhs)
    }
}

/// `x1*...*xn <= join of x^d for d in D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleEquation {
    arity: usize,
    d: BTreeSet<ExponentVector>,
}

impl SimpleEquation {
    pub fn new(
        arity: usize,
        d: impl IntoIterator<Item = ExponentVector>,
    ) -> Result<Self, EquationError> {
        let d: BTreeSet<ExponentVector> = d.into_iter().collect();
        if arity == 0 {
            return Err(EquationError::InvalidSimple(
                "arity must be positive".into(),
            ));
        }
        if d.is_empty() {
            return Err(EquationError::InvalidSimple("D is empty".into()));
        }
        if let Some(bad) = d.iter().find(|v| v.arity() != arity) {
            return Err(EquationError::DimensionMismatch(format!(
                "column {} does not have arity {}",
                bad, arity
            )));
        }
        for i in 0..arity {
            if d.iter().all(|v| v.get(i) == 0) {
                return Err(EquationError::InvalidSimple(format!(
                    "row {} is zero in every column",
                    i + 1
                )));
            }
        }
        Ok(SimpleEquation { arity, d })
    }

    /// Convenience constructor from plain rows of column entries.
    pub fn from_columns(columns: &[&[u64]]) -> Result<Self, EquationError> {
        let arity = columns.first().map_or(0, |c| c.len());
        Self::new(
            arity,
            columns.iter().map(|c| ExponentVector::new(c.to_vec())),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn columns(&self) -> &BTreeSet<ExponentVector> {
        &self.d
    }

    pub fn with_column(&self, v: ExponentVector) -> Result<Self, EquationError> {
        let mut d = self.d.clone();
        d.insert(v);
        Self::new(self.arity, d)
    }

    pub fn to_basic(&self) -> BasicEquation {
        BasicEquation::new(
            ExponentVector::ones(self.arity),
            self.d.iter().cloned().collect(),
        )
        .expect("simple equations are basic")
    }
}

impl fmt::Display for SimpleEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_basic())
    }
}

/// A `k x n` matrix of naturals; row `i` is the image of the new variable `x_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl Substitution {
    pub fn new(cols: usize, rows: Vec<Vec<u64>>) -> Result<Self, EquationError> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(EquationError::DimensionMismatch(format!(
                "row of length {} in a matrix with {} columns",
                r.len(),
                cols
            )));
        }
        Ok(Substitution { cols, rows })
    }

    pub fn identity(n: usize) -> Self {
        Substitution {
            cols: n,
            rows: (0..n)
                .map(|i| ExponentVector::unit(n, i).entries().to_vec())
                .collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, d: &ExponentVector) -> ExponentVector {
        assert_eq!(d.arity(), self.cols, "substitution width");
        ExponentVector::new(
            self.rows
                .iter()
                .map(|r| r.iter().zip(d.entries()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// The matrix product `self * inner`, i.e. `inner` applied first.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution, EquationError> {
        if self.cols != inner.rows.len() {
            return Err(EquationError::DimensionMismatch(format!(
                "cannot compose {} columns with {} rows",
                self.cols,
                inner.rows.len()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..inner.cols)
                    .map(|c| r.iter().zip(&inner.rows).map(|(a, ir)| a * ir[c]).sum())
                    .collect()
            })
            .collect();
        Ok(Substitution {
            cols: inner.cols,
            rows,
        })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpleReductionVerdict {
    Trivial,
    ImpliesIntegrality,
    Simple(SimpleEquation),
    Unsupported(String),
}

/// Parses and normalizes a basic equation.
pub fn parse_equation(text: &str) -> Result<BasicEquation, EquationError> {
    let ineq = parse_inequality(text)?;
    let (lhs, rhs, _) = normalize(&ineq)?;
    if lhs.len() != 1 {
        return Err(EquationError::LhsNotMonomial);
    }
    let lhs = lhs.iter().next().unwrap().clone();
    BasicEquation::new(lhs, rhs)
}

/// Reduces a basic equation to an equivalent simple one where possible.
pub fn to_simple(eq: &BasicEquation) -> SimpleReductionVerdict {
    let supp = eq.lhs().support();
    let rhs: Vec<&ExponentVector> = eq
        .rhs()
        .iter()
        .filter(|d| d.support().is_subset(&supp))
        .collect();
    if rhs.is_empty() {
        return SimpleReductionVerdict::Unsupported("implies 1 <= x".into());
    }
    if supp.iter().any(|&i| rhs.iter().all(|d| d.get(i) == 0)) {
        return SimpleReductionVerdict::ImpliesIntegrality;
    }
    if rhs.iter().any(|d| *d == eq.lhs()) {
        return SimpleReductionVerdict::Trivial;
    }
    let idx: Vec<usize> = supp.iter().copied().collect();
    if eq.lhs().is_linear() {
        let d = rhs.iter().map(|d| d.restrict(&idx));
        return match SimpleEquation::new(idx.len(), d) {
            Ok(s) => SimpleReductionVerdict::Simple(s),
            Err(e) => SimpleReductionVerdict::Unsupported(e.to_string()),
        };
    }
    if idx.len() == 1 {
        let n = eq.lhs().get(idx[0]);
        let p: BTreeSet<u64> = rhs.iter().map(|d| d.get(idx[0])).collect();
        return match linearize_one_var(n, &p) {
            Ok(s) => SimpleReductionVerdict::Simple(s),
            Err(e) => SimpleReductionVerdict::Unsupported(e.to_string()),
        };
    }
    SimpleReductionVerdict::Unsupported(
        "linearization of nonlinear equations in several variables is not supported".into(),
    )
}

/// The linearization of `x^n <= join of x^p for p in P`: all `d` with `sum(d)` in `P`.
pub fn linearize_one_var(n: u64, p: &BTreeSet<u64>) -> Result<SimpleEquation, EquationError> {
    if n == 0 {
        return Err(EquationError::InvalidOneVariable(
            "n must be positive".into(),
        ));
    }
    if p.is_empty() {
        return Err(EquationError::InvalidOneVariable("P is empty".into()));
    }
    if p.iter().all(|&x| x == 0) {
        return Err(EquationError::InvalidOneVariable("P = {0}".into()));
    }
    let n = usize::try_from(n).expect("arity fits in memory");
    let mut d = Vec::new();
    for &s in p {
        compositions(n, s, &mut Vec::new(), &mut d);
    }
    SimpleEquation::new(n, d)
}

fn compositions(parts: usize, total: u64, prefix: &mut Vec<u64>, out: &mut Vec<ExponentVector>) {
    if prefix.len() + 1 == parts {
        prefix.push(total);
        out.push(ExponentVector::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(parts, total - first, prefix, out);
        prefix.pop();
    }
}

/// True when `1_n` is one of the joinands.
pub fn is_trivial(eq: &SimpleEquation) -> bool {
    eq.columns().contains(&ExponentVector::ones(eq.arity()))
}

/// Finds a 0/1 row `s` with `s.d = 1` for all `d` and `s.1 > 1`, least in
/// lexicographic order.
pub fn is_mingly(eq: &SimpleEquation) -> Option<Substitution> {
    let cols: Vec<&ExponentVector> = eq.columns().iter().collect();
    let n = eq.arity();
    let mut sigma = vec![0u64; n];
    let mut sums = vec![0u64; cols.len()];
    fn go(i: usize, cols: &[&ExponentVector], sigma: &mut Vec<u64>, sums: &mut Vec<u64>) -> bool {
        if i == sigma.len() {
            return sums.iter().all(|&s| s == 1) && sigma.iter().sum::<u64>() > 1;
        }
        for bit in [0u64, 1] {
            if bit == 1 && cols.iter().zip(sums.iter()).any(|(d, s)| s + d.get(i) > 1) {
                continue;
            }
            sigma[i] = bit;
            if bit == 1 {
                for (d, s) in cols.iter().zip(sums.iter_mut()) {
                    *s += d.get(i);
                }
            }
            if go(i + 1, cols, sigma, sums) {
                return true;
            }
            if bit == 1 {
                for (d, s) in cols.iter().zip(sums.iter_mut()) {
                    *s -= d.get(i);
                }
            }
        }
        sigma[i] = 0;
        false
    }
    if go(0, &cols, &mut sigma, &mut sums) {
        Some(Substitution::new(n, vec![sigma]).unwrap())
    } else {
        None
    }
}

/// A substitution instance `x^n <= join of x^(n + c_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansiveWitness {
    pub sigma: Substitution,
    pub n: u64,
    /// One entry per column of `D`, in canonical column order.
    pub c: Vec<u64>,
}

/// Decides expansiveness by exact feasibility of `s >= 0, s.(d - 1) >= 1`.
pub fn is_expansive(eq: &SimpleEquation) -> Option<ExpansiveWitness> {
    let n = eq.arity();
    let mut sys = LinearSystem::new(n);
    sys.add_nonnegativity();
    for d in eq.columns() {
        let row: Vec<i64> = d.entries().iter().map(|&e| e as i64 - 1).collect();
        sys.add_ge_i64(&row, 1);
    }
    let x = sys.solve()?;
    let sigma = to_primitive_naturals(&x);
    let total: u64 = sigma.iter().sum();
    let sub = Substitution::new(n, vec![sigma]).unwrap();
    let c = eq
        .columns()
        .iter()
        .map(|d| sub.apply(d).get(0) - total)
        .collect();
    Some(ExpansiveWitness {
        sigma: sub,
        n: total,
        c,
    })
}

/// Sum over rows of the largest spread of entries.
pub fn delta<'a>(d: impl IntoIterator<Item = &'a ExponentVector>) -> u64 {
    let cols: Vec<&ExponentVector> = d.into_iter().collect();
    let n = cols.iter().map(|c| c.arity()).max().unwrap_or(0);
    (0..n)
        .map(|i| {
            let max = cols.iter().map(|c| c.get(i)).max().unwrap_or(0);
            let min = cols.iter().map(|c| c.get(i)).min().unwrap_or(0);
            max - min
        })
        .sum()
}

/// `sigma(f) <= join of sigma(d)`.
pub fn apply_substitution(
    sigma: &Substitution,
    eq: &BasicEquation,
) -> Result<BasicEquation, EquationError> {
    if sigma.col_count() != eq.arity() {
        return Err(EquationError::DimensionMismatch(format!(
            "substitution has {} columns, equation has {} variables",
            sigma.col_count(),
            eq.arity()
        )));
    }
    BasicEquation::new(
        sigma.apply(eq.lhs()),
        eq.rhs().iter().map(|d| sigma.apply(d)).collect(),
    )
}
