use std::collections::{BTreeSet, HashMap};

use super::blocking::{active_rows, nonempty_subsets, split_columns, Blocking};
use super::farkas::positive_orthogonal_with;
use super::{Limits, SpineError};
use crate::eqcore::{is_trivial, ExponentVector, SimpleEquation, Substitution};

/// A substitution with spinal image `[f, V]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinalWitness {
    pub blocking: Blocking,
    pub sigma: Substitution,
    pub f: ExponentVector,
    /// Images of the column classes: `v0` first when `D0` is nonempty.
    pub v: Vec<ExponentVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Prespinal(Box<SpinalWitness>),
    Spineless,
}

impl Classification {
    pub fn is_prespinal(&self) -> bool {
        matches!(self, Classification::Prespinal(_))
    }
}

/// True when `[f, V]` is spinal: `f` has positive entries and is not in `V`,
/// and apart from an optional zero vector, `V` consists of one vector per
/// coordinate `j` whose last nonzero entry is at `j`.
pub fn verify_spinal(f: &ExponentVector, v: &[ExponentVector]) -> bool {
    let k = f.arity();
    if k == 0 || v.iter().any(|x| x.arity() != k) {
        return false;
    }
    if v.contains(f) || f.entries().contains(&0) {
        return false;
    }
    let distinct: BTreeSet<&ExponentVector> = v.iter().collect();
    let nonzero: Vec<&ExponentVector> = distinct.into_iter().filter(|x| !x.is_zero()).collect();
    if nonzero.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    for x in nonzero {
        let last = (0..k)
            .rev()
            .find(|&i| x.get(i) > 0)
            .expect("nonzero vector");
        if seen[last] {
            return false;
        }
        seen[last] = true;
    }
    true
}

fn diff(a: &ExponentVector, b: &ExponentVector) -> Vec<i64> {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| x as i64 - y as i64)
        .collect()
}

/// Within-class differences for all classes.
fn class_differences(classes: &[&[ExponentVector]]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for cls in classes {
        if let Some((first, rest)) = cls.split_first() {
            for d in rest {
                out.push(diff(d, first));
            }
        }
    }
    out
}

/// The row problem of a blocking's `i`-th block given the blocks from `i` up
/// to `k` (rows and their column classes).
struct RowProblem {
    mbar: Vec<Vec<i64>>,
    t: BTreeSet<usize>,
    s: BTreeSet<usize>,
    /// `1_n - dbar_k`
    gap: Vec<i64>,
}

impl RowProblem {
    fn new(n: usize, upper: &[(&BTreeSet<usize>, &[ExponentVector])]) -> RowProblem {
        let t = upper[0].0.clone();
        let s: BTreeSet<usize> = upper.iter().flat_map(|(r, _)| r.iter().copied()).collect();
        let classes: Vec<&[ExponentVector]> = upper.iter().map(|(_, c)| *c).collect();
        let top = &upper.last().unwrap().1[0];
        RowProblem {
            mbar: class_differences(&classes),
            t,
            s,
            gap: diff(&ExponentVector::ones(n), top),
        }
    }

    fn solve(&self, n: usize) -> Option<Vec<u64>> {
        positive_orthogonal_with(&self.mbar, &self.t, &self.s, None, n)
    }

    /// A solution whose value on `1_n` differs from its value on the top class.
    fn solve_differing(&self, n: usize) -> Option<Vec<u64>> {
        let neg: Vec<i64> = self.gap.iter().map(|x| -x).collect();
        positive_orthogonal_with(&self.mbar, &self.t, &self.s, Some(&self.gap), n)
            .or_else(|| positive_orthogonal_with(&self.mbar, &self.t, &self.s, Some(&neg), n))
    }
}

/// A b-solution: row `i-1` is a solution for block `i`. `None` when some
/// block has no solution.
pub fn find_b_solution(eq: &SimpleEquation, b: &Blocking) -> Option<Substitution> {
    let n = eq.arity();
    let k = b.k();
    let mut rows = Vec::with_capacity(k);
    for i in 1..=k {
        let upper: Vec<(&BTreeSet<usize>, &[ExponentVector])> = (i..=k)
            .map(|j| (&b.rows[j], b.columns[j].as_slice()))
            .collect();
        rows.push(RowProblem::new(n, &upper).solve(n)?);
    }
    Some(Substitution::new(n, rows).expect("rows have arity n"))
}

#[derive(Clone)]
struct RowResult {
    plain: Option<Vec<u64>>,
    differing: Option<Vec<u64>>,
}

struct Search<'a> {
    n: usize,
    cache: HashMap<Vec<Vec<usize>>, RowResult>,
    eq: &'a SimpleEquation,
}

impl Search<'_> {
    /// Row result for the newest block of `tail` (blocks listed from `k` down).
    fn row(&mut self, tail: &[(BTreeSet<usize>, Vec<ExponentVector>)]) -> RowResult {
        let key: Vec<Vec<usize>> = tail
            .iter()
            .map(|(r, _)| r.iter().copied().collect())
            .collect();
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let upper: Vec<(&BTreeSet<usize>, &[ExponentVector])> =
            tail.iter().rev().map(|(r, c)| (r, c.as_slice())).collect();
        let p = RowProblem::new(self.n, &upper);
        let plain = p.solve(self.n);
        let differing = if plain.is_some() {
            p.solve_differing(self.n)
        } else {
            None
        };
        let r = RowResult { plain, differing };
        self.cache.insert(key, r.clone());
        r
    }

    /// Depth-first search for a blocking with exactly `k` blocks whose rows
    /// are all solvable and one of which admits a differing solution.
    fn find(
        &mut self,
        k: usize,
        rows: &[usize],
        cols: &[ExponentVector],
        tail: &mut Vec<(BTreeSet<usize>, Vec<ExponentVector>)>,
        results: &mut Vec<RowResult>,
    ) -> Option<SpinalWitness> {
        if tail.len() == k {
            if results.iter().all(|r| r.differing.is_none()) {
                return None;
            }
            return Some(self.assemble(rows, cols, tail, results));
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
            let r = self.row(tail);
            if r.plain.is_some() {
                results.push(r);
                if let Some(w) = self.find(k, &left, &rest, tail, results) {
                    return Some(w);
                }
                results.pop();
            }
            tail.pop();
        }
        None
    }

    fn assemble(
        &self,
        rows: &[usize],
        cols: &[ExponentVector],
        tail: &[(BTreeSet<usize>, Vec<ExponentVector>)],
        results: &[RowResult],
    ) -> SpinalWitness {
        let mut brows = vec![rows.iter().copied().collect::<BTreeSet<usize>>()];
        let mut bcols = vec![cols.to_vec()];
        for (r, c) in tail.iter().rev() {
            brows.push(r.clone());
            bcols.push(c.clone());
        }
        // results[j] belongs to tail[j], i.e. block k - j
        let mut ordered: Vec<&RowResult> = results.iter().rev().collect();
        let chosen = ordered
            .iter()
            .position(|r| r.differing.is_some())
            .expect("some row differs");
        let mut sigma_rows: Vec<Vec<u64>> = ordered
            .iter()
            .map(|r| r.plain.clone().expect("row solvable"))
            .collect();
        sigma_rows[chosen] = ordered[chosen].differing.clone().unwrap();
        ordered.clear();
        let sigma = Substitution::new(self.n, sigma_rows).expect("rows have arity n");
        let f = sigma.apply(&ExponentVector::ones(self.n));
        let mut v = Vec::new();
        if !bcols[0].is_empty() {
            v.push(sigma.apply(&bcols[0][0]));
        }
        for c in &bcols[1..] {
            v.push(sigma.apply(&c[0]));
        }
        SpinalWitness {
            blocking: Blocking {
                rows: brows,
                columns: bcols,
            },
            sigma,
            f,
            v,
        }
    }
}

fn check_witness(eq: &SimpleEquation, w: &SpinalWitness) -> Result<(), SpineError> {
    if Blocking::from_rows(eq, w.blocking.rows.clone()).as_ref() != Some(&w.blocking) {
        return Err(SpineError::Internal("witness blocking is not valid".into()));
    }
    let image: BTreeSet<ExponentVector> = eq.columns().iter().map(|d| w.sigma.apply(d)).collect();
    let v: BTreeSet<ExponentVector> = w.v.iter().cloned().collect();
    if image != v {
        return Err(SpineError::Internal("witness image differs from V".into()));
    }
    if !verify_spinal(&w.f, &w.v) {
        return Err(SpineError::Internal("witness image is not spinal".into()));
    }
    Ok(())
}

/// Decides whether `eq` has a spinal substitution instance.
///
/// Blockings are tried by increasing number of blocks; the first blocking
/// found with a full set of row solutions and a row separating `1_n` from the
/// top class yields the witness. Trivial equations are spineless.
pub fn classify_prespinal(
    eq: &SimpleEquation,
    limits: &Limits,
) -> Result<Classification, SpineError> {
    limits.check(eq)?;
    if is_trivial(eq) {
        return Ok(Classification::Spineless);
    }
    let n = eq.arity();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<ExponentVector> = eq.columns().iter().cloned().collect();
    let mut search = Search {
        n,
        cache: HashMap::new(),
        eq,
    };
    for k in 1..=n {
        let mut tail = Vec::new();
        let mut results = Vec::new();
        if let Some(w) = search.find(k, &rows, &cols, &mut tail, &mut results) {
            check_witness(search.eq, &w)?;
            return Ok(Classification::Prespinal(Box::new(w)));
        }
    }
    Ok(Classification::Spineless)
}
