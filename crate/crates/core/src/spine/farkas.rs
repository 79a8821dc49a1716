//! Nonnegative vectors orthogonal to a set of integer vectors, or a
//! certificate that none exists.
//!
//! For `T ⊆ S` and vectors `M` indexed by rows, exactly one holds:
//! there is a nonnegative `v` supported on `S`, nonzero on `T`, with `v·m = 0`
//! for all `m ∈ M`; or some `w ∈ span(M|_S)` is nonnegative on `S` and
//! positive on every row of `T`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::linear::{to_primitive_naturals, LinearSystem, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FarkasOutcome {
    /// A nonnegative integer vector of full arity, zero outside `S`.
    Solution(Vec<u64>),
    /// `w = Σ coefficients[j] · M[j]` restricted to `S` (zero elsewhere).
    Certificate {
        coefficients: Vec<BigRational>,
        w: Vec<BigRational>,
    },
}

impl FarkasOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, FarkasOutcome::Solution(_))
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Indices of a maximal linearly independent subfamily, chosen greedily.
pub(crate) fn independent_subset(vectors: &[Vec<i64>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut r: Vec<BigRational> = v.iter().map(|&x| rat(x)).collect();
        for (pivot, b) in &basis {
            if !r[*pivot].is_zero() {
                let f = &r[*pivot] / &b[*pivot];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = r.iter().position(|x| !x.is_zero()) {
            basis.push((p, r));
            chosen.push(idx);
        }
    }
    chosen
}

/// The feasibility problem for a nonnegative `v` on `S`, orthogonal to `M`,
/// with `Σ_T v >= 1` and, optionally, `extra·v >= 1`.
pub(crate) fn positive_orthogonal_with(
    mbar: &[Vec<i64>],
    t: &BTreeSet<usize>,
    s: &BTreeSet<usize>,
    extra: Option<&[i64]>,
    arity: usize,
) -> Option<Vec<u64>> {
    let sv: Vec<usize> = s.iter().copied().collect();
    let restricted: Vec<Vec<i64>> = mbar
        .iter()
        .map(|m| sv.iter().map(|&i| m[i]).collect())
        .collect();
    let mut sys = LinearSystem::new(sv.len());
    sys.add_nonnegativity();
    for j in independent_subset(&restricted) {
        sys.add_eq_i64(&restricted[j], 0);
    }
    let tsum: Vec<i64> = sv.iter().map(|i| i64::from(t.contains(i))).collect();
    sys.add_ge_i64(&tsum, 1);
    if let Some(e) = extra {
        let row: Vec<i64> = sv.iter().map(|&i| e[i]).collect();
        sys.add_ge_i64(&row, 1);
    }
    let x = sys.solve()?;
    let ints = to_primitive_naturals(&x);
    let mut v = vec![0u64; arity];
    for (&i, val) in sv.iter().zip(ints) {
        v[i] = val;
    }
    Some(v)
}

/// Decides the alternative for `M` (vectors of length `arity`), `T ⊆ S`.
pub fn find_positive_orthogonal(
    mbar: &[Vec<i64>],
    t: &BTreeSet<usize>,
    s: &BTreeSet<usize>,
    arity: usize,
) -> FarkasOutcome {
    assert!(
        !t.is_empty() && t.is_subset(s),
        "T must be a nonempty subset of S"
    );
    if let Some(v) = positive_orthogonal_with(mbar, t, s, None, arity) {
        return FarkasOutcome::Solution(v);
    }
    let sv: Vec<usize> = s.iter().copied().collect();
    let restricted: Vec<Vec<i64>> = mbar
        .iter()
        .map(|m| sv.iter().map(|&i| m[i]).collect())
        .collect();
    let basis = independent_subset(&restricted);
    let mut sys = LinearSystem::new(basis.len());
    for (pos, &row) in sv.iter().enumerate() {
        let coeffs: Vec<BigInt> = basis
            .iter()
            .map(|&b| BigInt::from(restricted[b][pos]))
            .collect();
        sys.add(coeffs.clone(), Relation::Ge, BigInt::zero());
        if t.contains(&row) {
            sys.add(coeffs, Relation::Ge, BigInt::from(1));
        }
    }
    let mu = sys
        .solve()
        .expect("one side of the alternative always holds");
    let mut coefficients = vec![BigRational::zero(); mbar.len()];
    for (&b, m) in basis.iter().zip(mu) {
        coefficients[b] = m;
    }
    let w = combination(mbar, &coefficients, s, arity);
    FarkasOutcome::Certificate { coefficients, w }
}

fn combination(
    mbar: &[Vec<i64>],
    coefficients: &[BigRational],
    s: &BTreeSet<usize>,
    arity: usize,
) -> Vec<BigRational> {
    (0..arity)
        .map(|i| {
            if !s.contains(&i) {
                return BigRational::zero();
            }
            mbar.iter()
                .zip(coefficients)
                .map(|(m, c)| c * rat(m[i]))
                .sum()
        })
        .collect()
}

/// Checks whichever branch `outcome` carries.
pub fn verify_farkas(
    outcome: &FarkasOutcome,
    mbar: &[Vec<i64>],
    t: &BTreeSet<usize>,
    s: &BTreeSet<usize>,
    arity: usize,
) -> bool {
    match outcome {
        FarkasOutcome::Solution(v) => {
            v.len() == arity
                && v.iter().enumerate().all(|(i, &x)| x == 0 || s.contains(&i))
                && t.iter().any(|&i| v[i] > 0)
                && mbar.iter().all(|m| {
                    m.iter()
                        .zip(v)
                        .map(|(&a, &b)| a as i128 * b as i128)
                        .sum::<i128>()
                        == 0
                })
        }
        FarkasOutcome::Certificate { coefficients, w } => {
            coefficients.len() == mbar.len()
                && *w == combination(mbar, coefficients, s, arity)
                && s.iter().all(|&i| !w[i].is_negative())
                && t.iter().all(|&i| w[i].is_positive())
        }
    }
}
