//! Finite commutative residuated frames `(W, W, N)` with `x N y` iff
//! `x·y ∈ A`, the closure `γ = ▷◁`, the algebra `W⁺` of closed sets, and
//! brute-force satisfaction of `{v, *, 1}`-equations.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rand::Rng;
use thiserror::Error;

use crate::eqcore::{BasicEquation, ExponentVector, SimpleEquation};

pub const MONOID_CAP: usize = 4096;
pub const UNIVERSE_CAP: usize = 1024;
pub const ASSIGNMENT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("monoid of size {0} exceeds the cap {MONOID_CAP}")]
    MonoidTooLarge(u128),
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
    #[error("element {0} is outside the monoid")]
    UnknownElement(usize),
    #[error("more than {UNIVERSE_CAP} closed sets")]
    UniverseTooLarge,
    #[error("{0} assignments exceed the cap")]
    TooManyAssignments(u128),
    #[error("axiom violated in W+: {0}")]
    AxiomViolation(String),
}

/// A finite commutative monoid on `0..size` given by its table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    table: Vec<Vec<usize>>,
    unit: usize,
    labels: Vec<String>,
}

impl FiniteMonoid {
    /// Checks associativity, commutativity and the unit laws exhaustively.
    pub fn new(
        table: Vec<Vec<usize>>,
        unit: usize,
        labels: Vec<String>,
    ) -> Result<Self, FrameError> {
        let n = table.len();
        if n == 0 || labels.len() != n || unit >= n {
            return Err(FrameError::InvalidMonoid("empty or mislabeled".into()));
        }
        if table
            .iter()
            .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(FrameError::InvalidMonoid("table is not total".into()));
        }
        for a in 0..n {
            if table[unit][a] != a {
                return Err(FrameError::InvalidMonoid(format!(
                    "unit fails on {}",
                    labels[a]
                )));
            }
            for b in 0..n {
                if table[a][b] != table[b][a] {
                    return Err(FrameError::InvalidMonoid("not commutative".into()));
                }
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(FrameError::InvalidMonoid("not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteMonoid {
            table,
            unit,
            labels,
        })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// `u_1^{d(1)} ··· u_n^{d(n)}`.
    pub fn monomial(&self, u: &[usize], d: &ExponentVector) -> usize {
        let mut acc = self.unit;
        for (i, &x) in u.iter().enumerate() {
            for _ in 0..d.get(i) {
                acc = self.table[acc][x];
            }
        }
        acc
    }
}

/// Exponent vectors in `{0..cap}^g` under saturating addition.
pub fn truncated_monoid(g: usize, cap: u64) -> Result<FiniteMonoid, FrameError> {
    if g == 0 || cap == 0 {
        return Err(FrameError::InvalidMonoid("g and c must be positive".into()));
    }
    let size = u128::from(cap + 1).pow(g as u32);
    if size > MONOID_CAP as u128 {
        return Err(FrameError::MonoidTooLarge(size));
    }
    let size = size as usize;
    let base = (cap + 1) as usize;
    let decode = |mut x: usize| -> Vec<u64> {
        let mut v = vec![0u64; g];
        for e in v.iter_mut() {
            *e = (x % base) as u64;
            x /= base;
        }
        v
    };
    let encode = |v: &[u64]| -> usize { v.iter().rev().fold(0, |acc, &e| acc * base + e as usize) };
    let elems: Vec<Vec<u64>> = (0..size).map(decode).collect();
    let table = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    let s: Vec<u64> = a.iter().zip(b).map(|(x, y)| (x + y).min(cap)).collect();
                    encode(&s)
                })
                .collect()
        })
        .collect();
    let labels = elems
        .iter()
        .map(|v| {
            format!(
                "({})",
                v.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    FiniteMonoid::new(table, 0, labels)
}

/// A frame whose relation is `x N y` iff `x·y ∈ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFrame {
    monoid: FiniteMonoid,
    accept: FixedBitSet,
}

impl FiniteFrame {
    pub fn new(
        monoid: FiniteMonoid,
        accept: impl IntoIterator<Item = usize>,
    ) -> Result<Self, FrameError> {
        let mut set = FixedBitSet::with_capacity(monoid.size());
        for a in accept {
            if a >= monoid.size() {
                return Err(FrameError::UnknownElement(a));
            }
            set.insert(a);
        }
        let f = FiniteFrame {
            monoid,
            accept: set,
        };
        debug_assert!(f.is_nuclear());
        Ok(f)
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn size(&self) -> usize {
        self.monoid.size()
    }

    pub fn accept(&self) -> &FixedBitSet {
        &self.accept
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.accept.contains(self.monoid.mul(x, y))
    }

    /// `x·y N z` iff `x N y·z` for all `x, y, z`.
    pub fn is_nuclear(&self) -> bool {
        let n = self.size();
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    self.related(self.monoid.mul(x, y), z) == self.related(x, self.monoid.mul(y, z))
                })
            })
        })
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.size())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// `X^▷ = {y : x N y for all x ∈ X}`.
    pub fn right(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for y in 0..self.size() {
            if x.ones().all(|a| self.related(a, y)) {
                out.insert(y);
            }
        }
        out
    }

    /// `Y^◁ = {x : x N y for all y ∈ Y}`.
    pub fn left(&self, y: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for x in 0..self.size() {
            if y.ones().all(|b| self.related(x, b)) {
                out.insert(x);
            }
        }
        out
    }

    /// `γ(X) = X^▷◁`.
    pub fn closure(&self, x: &FixedBitSet) -> FixedBitSet {
        self.left(&self.right(x))
    }

    pub fn is_closed(&self, x: &FixedBitSet) -> bool {
        self.closure(x) == *x
    }

    /// `X·Y = {x·y}`.
    pub fn product(&self, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for a in x.ones() {
            for b in y.ones() {
                out.insert(self.monoid.mul(a, b));
            }
        }
        out
    }

    /// `X → Z = {y : X·y ⊆ Z}`.
    pub fn residual(&self, x: &FixedBitSet, z: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for y in 0..self.size() {
            if x.ones().all(|a| z.contains(self.monoid.mul(a, y))) {
                out.insert(y);
            }
        }
        out
    }

    /// A set from element indices.
    pub fn set(&self, elems: &[usize]) -> FixedBitSet {
        let mut s = self.empty_set();
        for &e in elems {
            s.insert(e);
        }
        s
    }

    /// Whether the frame satisfies the rule `u^d N v for all d ∈ D` implies
    /// `u^1 N v`, checked over all `u ∈ W^n` and `v ∈ W`.
    pub fn frame_condition(&self, eq: &SimpleEquation) -> Result<bool, FrameError> {
        let n = eq.arity();
        let w = self.size();
        let count = (w as u128).pow(n as u32 + 1);
        if count > u128::from(ASSIGNMENT_CAP) * 10 {
            return Err(FrameError::TooManyAssignments(count));
        }
        let ones = ExponentVector::ones(n);
        let cols: Vec<&ExponentVector> = eq.columns().iter().collect();
        let mut u = vec![0usize; n];
        loop {
            let lhs = self.monoid.monomial(&u, &ones);
            let images: Vec<usize> = cols.iter().map(|d| self.monoid.monomial(&u, d)).collect();
            for v in 0..w {
                if images.iter().all(|&m| self.related(m, v)) && !self.related(lhs, v) {
                    return Ok(false);
                }
            }
            if !advance(&mut u, w) {
                return Ok(true);
            }
        }
    }
}

/// Odometer step over `0..base` in every position; false after the last tuple.
fn advance(u: &mut [usize], base: usize) -> bool {
    for x in u.iter_mut().rev() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

/// The closed sets of a frame with operation tables.
#[derive(Clone, Debug)]
pub struct PlusAlgebra {
    frame: FiniteFrame,
    sets: Vec<FixedBitSet>,
    meet: Vec<u16>,
    join: Vec<u16>,
    mul: Vec<u16>,
    imp: Vec<u16>,
    order: FixedBitSet,
    unit: usize,
}

/// Closed sets as intersections of the sets `{y}^◁`, together with `W`.
pub fn closed_sets(frame: &FiniteFrame) -> Result<Vec<FixedBitSet>, FrameError> {
    let mut seen: HashMap<FixedBitSet, ()> = HashMap::new();
    let mut sets = vec![frame.full_set()];
    seen.insert(frame.full_set(), ());
    let basics: Vec<FixedBitSet> = (0..frame.size())
        .map(|y| frame.left(&frame.set(&[y])))
        .collect();
    let mut i = 0;
    while i < sets.len() {
        for b in &basics {
            let mut s = sets[i].clone();
            s.intersect_with(b);
            if seen.insert(s.clone(), ()).is_none() {
                sets.push(s);
                if sets.len() > UNIVERSE_CAP {
                    return Err(FrameError::UniverseTooLarge);
                }
            }
        }
        i += 1;
    }
    sets.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    Ok(sets)
}

/// Closed sets obtained by closing every subset of `W`. Only for `|W| <= 12`.
pub fn closed_sets_exhaustive(frame: &FiniteFrame) -> Option<Vec<FixedBitSet>> {
    let n = frame.size();
    if n > 12 {
        return None;
    }
    let mut out: Vec<FixedBitSet> = Vec::new();
    for mask in 0u32..(1 << n) {
        let x: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let c = frame.closure(&frame.set(&x));
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    Some(out)
}

impl PlusAlgebra {
    /// Builds `W⁺` and checks the lattice, monoid and residuation laws
    /// exhaustively.
    pub fn new(frame: FiniteFrame) -> Result<Self, FrameError> {
        let sets = closed_sets(&frame)?;
        let index: HashMap<FixedBitSet, usize> = sets
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let look = |s: &FixedBitSet| -> Result<usize, FrameError> {
            index
                .get(s)
                .copied()
                .ok_or_else(|| FrameError::AxiomViolation("operation result is not closed".into()))
        };
        let u = sets.len();
        let mut meet = vec![0u16; u * u];
        let mut join = vec![0u16; u * u];
        let mut mul = vec![0u16; u * u];
        let mut imp = vec![0u16; u * u];
        let mut order = FixedBitSet::with_capacity(u * u);
        for a in 0..u {
            for b in 0..u {
                let k = a * u + b;
                let mut m = sets[a].clone();
                m.intersect_with(&sets[b]);
                meet[k] = look(&m)? as u16;
                let mut j = sets[a].clone();
                j.union_with(&sets[b]);
                join[k] = look(&frame.closure(&j))? as u16;
                mul[k] = look(&frame.closure(&frame.product(&sets[a], &sets[b])))? as u16;
                imp[k] = look(&frame.residual(&sets[a], &sets[b]))? as u16;
                order.set(k, sets[a].is_subset(&sets[b]));
            }
        }
        let unit = look(&frame.closure(&frame.set(&[frame.monoid().unit()])))?;
        let alg = PlusAlgebra {
            frame,
            sets,
            meet,
            join,
            mul,
            imp,
            order,
            unit,
        };
        alg.check_axioms()?;
        Ok(alg)
    }

    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[FixedBitSet] {
        &self.sets
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.sets.len() + b] as usize
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.sets.len() + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.sets.len() + b] as usize
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a * self.sets.len() + b] as usize
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order[a * self.sets.len() + b]
    }

    fn check_axioms(&self) -> Result<(), FrameError> {
        let u = self.len();
        let fail = |m: &str| Err(FrameError::AxiomViolation(m.to_string()));
        for a in 0..u {
            if self.mul(self.unit, a) != a {
                return fail("unit");
            }
            if self.meet(a, a) != a || self.join(a, a) != a {
                return fail("idempotence");
            }
            for b in 0..u {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return fail("lattice commutativity");
                }
                if self.mul(a, b) != self.mul(b, a) {
                    return fail("monoid commutativity");
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return fail("absorption");
                }
                if self.leq(a, b) != (self.meet(a, b) == a) {
                    return fail("order");
                }
                let (m, j, p) = (self.meet(a, b), self.join(a, b), self.mul(a, b));
                for c in 0..u {
                    if self.meet(m, c) != self.meet(a, self.meet(b, c))
                        || self.join(j, c) != self.join(a, self.join(b, c))
                    {
                        return fail("lattice associativity");
                    }
                    if self.mul(p, c) != self.mul(a, self.mul(b, c)) {
                        return fail("monoid associativity");
                    }
                    if self.leq(p, c) != self.leq(b, self.imp(a, c)) {
                        return fail("residuation");
                    }
                }
            }
        }
        Ok(())
    }

    /// `u^d` for an assignment `u` of closed sets.
    pub fn monomial(&self, u: &[usize], d: &ExponentVector) -> usize {
        let mut acc = self.unit;
        for (i, &x) in u.iter().enumerate() {
            for _ in 0..d.get(i) {
                acc = self.mul(acc, x);
            }
        }
        acc
    }

    /// Whether every assignment satisfies `x^f <= join of x^d`.
    pub fn satisfies(&self, eq: &BasicEquation) -> Result<bool, FrameError> {
        let n = eq.arity();
        let count = (self.len() as u128).pow(n as u32);
        if count > u128::from(ASSIGNMENT_CAP) {
            return Err(FrameError::TooManyAssignments(count));
        }
        let rhs: Vec<&ExponentVector> = eq.rhs().iter().collect();
        let mut u = vec![0usize; n];
        loop {
            let l = self.monomial(&u, eq.lhs());
            let mut r = self.monomial(&u, rhs[0]);
            for d in &rhs[1..] {
                r = self.join(r, self.monomial(&u, d));
            }
            if !self.leq(l, r) {
                return Ok(false);
            }
            if !advance(&mut u, self.len()) {
                return Ok(true);
            }
        }
    }

    pub fn satisfies_simple(&self, eq: &SimpleEquation) -> Result<bool, FrameError> {
        self.satisfies(&eq.to_basic())
    }
}

/// A frame over `truncated_monoid(g, c)` with `1 <= g <= max_g`,
/// `1 <= c <= max_c` and each element accepted with probability 1/2.
pub fn random_frame(rng: &mut impl Rng, max_g: usize, max_c: u64) -> FiniteFrame {
    let g = rng.gen_range(1..=max_g);
    let c = rng.gen_range(1..=max_c);
    let m = truncated_monoid(g, c).expect("small parameters");
    let accept: Vec<usize> = (0..m.size()).filter(|_| rng.gen_bool(0.5)).collect();
    FiniteFrame::new(m, accept).expect("elements in range")
}

/// A simple equation with arity at most `max_n`, at most `max_cols` columns
/// and entries at most `max_entry`.
pub fn random_simple_equation(
    rng: &mut impl Rng,
    max_n: usize,
    max_cols: usize,
    max_entry: u64,
) -> SimpleEquation {
    loop {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=max_cols);
        let cols: Vec<ExponentVector> = (0..m)
            .map(|_| ExponentVector::new((0..n).map(|_| rng.gen_range(0..=max_entry)).collect()))
            .collect();
        if let Ok(e) = SimpleEquation::new(n, cols) {
            return e;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_examples() {
        let m = truncated_monoid(1, 2).unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.mul(1, 2), 2);
        let m = truncated_monoid(2, 1).unwrap();
        assert_eq!(m.size(), 4);
        assert_eq!(m.label(m.mul(1, 2)), "(1,1)");
        let m = truncated_monoid(1, 3).unwrap();
        assert_eq!(m.mul(2, 2), 3);
        assert!(truncated_monoid(13, 1).is_err());
        assert!(truncated_monoid(0, 1).is_err());
    }

    #[test]
    fn invalid_monoid_is_rejected() {
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteMonoid::new(t.clone(), 0, vec!["e".into(), "a".into()]).is_ok());
        assert!(FiniteMonoid::new(t, 1, vec!["e".into(), "a".into()]).is_err());
        let nc = vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]];
        assert!(FiniteMonoid::new(nc, 0, vec!["e".into(), "a".into(), "b".into()]).is_err());
    }

    #[test]
    fn closure_example() {
        let f = FiniteFrame::new(truncated_monoid(1, 2).unwrap(), [2]).unwrap();
        assert_eq!(f.closure(&f.set(&[1])), f.set(&[1, 2]));
        assert!(f.is_nuclear());
    }

    #[test]
    fn one_element_monoid() {
        let m = FiniteMonoid::new(vec![vec![0]], 0, vec!["e".into()]).unwrap();
        let f = FiniteFrame::new(m, [0]).unwrap();
        let a = PlusAlgebra::new(f).unwrap();
        assert!((1..=2).contains(&a.len()));
    }

    #[test]
    fn exhaustive_matches_intersections() {
        for accept in 0u32..8 {
            let m = truncated_monoid(1, 2).unwrap();
            let f = FiniteFrame::new(m, (0..3).filter(|i| accept >> i & 1 == 1)).unwrap();
            assert_eq!(
                closed_sets(&f).unwrap(),
                closed_sets_exhaustive(&f).unwrap()
            );
        }
    }

    #[test]
    fn satisfies_trivial() {
        let f = FiniteFrame::new(truncated_monoid(1, 2).unwrap(), [0, 2]).unwrap();
        let a = PlusAlgebra::new(f).unwrap();
        let e = SimpleEquation::from_columns(&[&[1]]).unwrap();
        assert!(a.satisfies_simple(&e).unwrap());
    }
}
