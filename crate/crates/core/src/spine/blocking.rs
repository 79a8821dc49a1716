use std::collections::BTreeSet;
use std::fmt;

use super::{Limits, SpineError};
use crate::eqcore::{ExponentVector, SimpleEquation};

/// An ordered row partition `(R0, R1, ..., Rk)` with its induced column
/// partition `(D0, D1, ..., Dk)`. Rows are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocking {
    pub rows: Vec<BTreeSet<usize>>,
    pub columns: Vec<Vec<ExponentVector>>,
}

impl Blocking {
    /// Number of nonzero blocks.
    pub fn k(&self) -> usize {
        self.rows.len() - 1
    }

    /// `R_i ∪ ... ∪ R_k`.
    pub fn rows_plus(&self, i: usize) -> BTreeSet<usize> {
        self.rows[i..].iter().flatten().copied().collect()
    }

    /// Builds the blocking induced by a row partition, or `None` when the
    /// partition does not give a valid blocking of `eq`.
    pub fn from_rows(eq: &SimpleEquation, rows: Vec<BTreeSet<usize>>) -> Option<Blocking> {
        let k = rows.len().checked_sub(1)?;
        if k == 0 || rows[1..].iter().any(BTreeSet::is_empty) {
            return None;
        }
        let all: BTreeSet<usize> = rows.iter().flatten().copied().collect();
        if all.len() != eq.arity()
            || rows.iter().map(BTreeSet::len).sum::<usize>() != eq.arity()
            || all.iter().any(|&r| r >= eq.arity())
        {
            return None;
        }
        let mut remaining: Vec<ExponentVector> = eq.columns().iter().cloned().collect();
        let mut columns = vec![Vec::new(); k + 1];
        for j in (1..=k).rev() {
            let (hit, rest): (Vec<_>, Vec<_>) = remaining
                .into_iter()
                .partition(|d| rows[j].iter().any(|&r| d.get(r) > 0));
            if hit.is_empty() {
                return None;
            }
            if rows[j].iter().any(|&r| hit.iter().all(|d| d.get(r) == 0)) {
                return None;
            }
            columns[j] = hit;
            remaining = rest;
        }
        columns[0] = remaining;
        Some(Blocking { rows, columns })
    }

    fn sort_key(&self) -> (std::cmp::Reverse<usize>, Vec<Vec<usize>>) {
        (
            std::cmp::Reverse(self.k()),
            self.rows
                .iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        )
    }
}

impl fmt::Display for Blocking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let names: Vec<String> = r.iter().map(|x| format!("x{}", x + 1)).collect();
                format!("R{}={{{}}}", i, names.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Rows among `rows` that are nonzero on some column of `cols`.
pub(crate) fn active_rows(rows: &[usize], cols: &[ExponentVector]) -> Vec<usize> {
    rows.iter()
        .copied()
        .filter(|&r| cols.iter().any(|d| d.get(r) > 0))
        .collect()
}

/// Splits `cols` into those meeting `block` and the rest.
pub(crate) fn split_columns(
    block: &BTreeSet<usize>,
    cols: &[ExponentVector],
) -> (Vec<ExponentVector>, Vec<ExponentVector>) {
    cols.iter()
        .cloned()
        .partition(|d| block.iter().any(|&r| d.get(r) > 0))
}

/// Nonempty subsets of `items`, in order of their bitmask.
pub(crate) fn nonempty_subsets(items: &[usize]) -> impl Iterator<Item = BTreeSet<usize>> + '_ {
    (1u64..(1u64 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &r)| r)
            .collect()
    })
}

/// All blockings of `eq`, sorted by `k` descending and then by row parts.
pub fn enumerate_blockings(
    eq: &SimpleEquation,
    limits: &Limits,
) -> Result<Vec<Blocking>, SpineError> {
    limits.check(eq)?;
    let rows: Vec<usize> = (0..eq.arity()).collect();
    let cols: Vec<ExponentVector> = eq.columns().iter().cloned().collect();
    let mut out = Vec::new();
    let mut tail: Vec<(BTreeSet<usize>, Vec<ExponentVector>)> = Vec::new();
    fn go(
        rows: &[usize],
        cols: &[ExponentVector],
        tail: &mut Vec<(BTreeSet<usize>, Vec<ExponentVector>)>,
        out: &mut Vec<Blocking>,
    ) {
        if !tail.is_empty() {
            let mut r = vec![rows.iter().copied().collect::<BTreeSet<usize>>()];
            let mut c = vec![cols.to_vec()];
            for (rb, cb) in tail.iter().rev() {
                r.push(rb.clone());
                c.push(cb.clone());
            }
            out.push(Blocking {
                rows: r,
                columns: c,
            });
        }
        let eligible = active_rows(rows, cols);
        for block in nonempty_subsets(&eligible) {
            let (hit, rest) = split_columns(&block, cols);
            let left: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|r| !block.contains(r))
                .collect();
            tail.push((block, hit));
            go(&left, &rest, tail, out);
            tail.pop();
        }
    }
    go(&rows, &cols, &mut tail, &mut out);
    out.sort_by_key(Blocking::sort_key);
    Ok(out)
}
