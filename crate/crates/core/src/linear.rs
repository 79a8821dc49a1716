//! Exact feasibility of small linear systems by Fourier–Motzkin elimination.
//!
//! Rows are kept as primitive integer vectors. Solutions are rational and are
//! picked deterministically: variables are fixed in index order, each one to
//! the feasible value of least magnitude given the earlier ones.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `a·x >= b`
    Ge,
    /// `a·x = b`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<BigInt>,
    rel: Relation,
    rhs: BigInt,
}

impl Row {
    fn normalized(mut self) -> Row {
        let mut g = self.rhs.abs();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if !g.is_zero() && !g.is_one() {
            for c in self.coeffs.iter_mut() {
                *c /= &g;
            }
            self.rhs /= &g;
        }
        if self.rel == Relation::Eq {
            if let Some(first) = self.coeffs.iter().find(|c| !c.is_zero()) {
                if first.is_negative() {
                    for c in self.coeffs.iter_mut() {
                        *c = -&*c;
                    }
                    self.rhs = -&self.rhs;
                }
            }
        }
        self
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn constant_holds(&self) -> bool {
        match self.rel {
            Relation::Ge => !self.rhs.is_positive(),
            Relation::Eq => self.rhs.is_zero(),
        }
    }

    /// `p*self + q*other`
    fn combine(&self, p: &BigInt, other: &Row, q: &BigInt, rel: Relation) -> Row {
        Row {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * p + b * q)
                .collect(),
            rel,
            rhs: &self.rhs * p + &other.rhs * q,
        }
    }
}

enum Stage {
    Subst(Row),
    Bounds(Vec<Row>),
}

/// A conjunction of linear constraints over `nvars` rational unknowns.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    nvars: usize,
    rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            rows: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add(&mut self, coeffs: Vec<BigInt>, rel: Relation, rhs: BigInt) {
        assert_eq!(coeffs.len(), self.nvars, "constraint width");
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn add_ge_i64(&mut self, coeffs: &[i64], rhs: i64) {
        self.add(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            Relation::Ge,
            BigInt::from(rhs),
        );
    }

    pub fn add_eq_i64(&mut self, coeffs: &[i64], rhs: i64) {
        self.add(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            Relation::Eq,
            BigInt::from(rhs),
        );
    }

    /// Adds `x_i >= 0` for every unknown.
    pub fn add_nonnegativity(&mut self) {
        for i in 0..self.nvars {
            let mut c = vec![0i64; self.nvars];
            c[i] = 1;
            self.add_ge_i64(&c, 0);
        }
    }

    /// Returns a solution if the system is feasible.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        let n = self.nvars;
        let mut rows = tidy(self.rows.iter().cloned())?;
        let mut stages: Vec<Option<Stage>> = (0..n).map(|_| None).collect();
        for j in (0..n).rev() {
            let eq_pos = rows
                .iter()
                .position(|r| r.rel == Relation::Eq && !r.coeffs[j].is_zero());
            if let Some(p) = eq_pos {
                let e = rows.remove(p);
                let ej = e.coeffs[j].clone();
                let next: Vec<Row> = rows
                    .into_iter()
                    .map(|r| {
                        if r.coeffs[j].is_zero() {
                            r
                        } else {
                            let rel = r.rel;
                            let sign = if ej.is_negative() {
                                -BigInt::one()
                            } else {
                                BigInt::one()
                            };
                            let p = ej.abs();
                            let q = -(&r.coeffs[j] * sign);
                            r.combine(&p, &e, &q, rel)
                        }
                    })
                    .collect();
                rows = tidy(next.into_iter())?;
                stages[j] = Some(Stage::Subst(e));
            } else {
                let mut keep = Vec::new();
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                for r in rows {
                    if r.coeffs[j].is_positive() {
                        pos.push(r);
                    } else if r.coeffs[j].is_negative() {
                        neg.push(r);
                    } else {
                        keep.push(r);
                    }
                }
                for p in &pos {
                    for q in &neg {
                        let a = -&q.coeffs[j];
                        let b = p.coeffs[j].clone();
                        keep.push(p.combine(&a, q, &b, Relation::Ge));
                    }
                }
                rows = tidy(keep.into_iter())?;
                let mut bounds = pos;
                bounds.extend(neg);
                stages[j] = Some(Stage::Bounds(bounds));
            }
        }
        let mut x: Vec<BigRational> = vec![BigRational::zero(); n];
        for j in 0..n {
            let partial = |r: &Row, x: &[BigRational]| -> BigRational {
                let mut s = BigRational::from_integer(r.rhs.clone());
                for i in 0..j {
                    s -= BigRational::from_integer(r.coeffs[i].clone()) * &x[i];
                }
                s
            };
            match stages[j].take().expect("every variable has a stage") {
                Stage::Subst(e) => {
                    x[j] = partial(&e, &x) / BigRational::from_integer(e.coeffs[j].clone());
                }
                Stage::Bounds(rows) => {
                    let mut lo: Option<BigRational> = None;
                    let mut hi: Option<BigRational> = None;
                    for r in &rows {
                        let v = partial(r, &x) / BigRational::from_integer(r.coeffs[j].clone());
                        if r.coeffs[j].is_positive() {
                            if lo.as_ref().is_none_or(|l| v > *l) {
                                lo = Some(v);
                            }
                        } else if hi.as_ref().is_none_or(|h| v < *h) {
                            hi = Some(v);
                        }
                    }
                    let zero = BigRational::zero();
                    x[j] = match (lo, hi) {
                        (Some(l), _) if l > zero => l,
                        (_, Some(h)) if h < zero => h,
                        _ => zero,
                    };
                }
            }
        }
        debug_assert!(self.satisfied_by(&x));
        Some(x)
    }

    /// Checks a candidate solution exactly.
    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rows.iter().all(|r| {
            let lhs: BigRational = r
                .coeffs
                .iter()
                .zip(x)
                .map(|(c, v)| BigRational::from_integer(c.clone()) * v)
                .sum();
            let rhs = BigRational::from_integer(r.rhs.clone());
            match r.rel {
                Relation::Ge => lhs >= rhs,
                Relation::Eq => lhs == rhs,
            }
        })
    }
}

/// Normalizes and deduplicates rows; `None` when a constant row is violated.
fn tidy(rows: impl Iterator<Item = Row>) -> Option<Vec<Row>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in rows {
        let r = r.normalized();
        if r.is_constant() {
            if !r.constant_holds() {
                return None;
            }
            continue;
        }
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    Some(out)
}

/// Scales a rational vector to the primitive integer vector on the same ray.
///
/// Entries must be nonnegative.
pub fn to_primitive_naturals(x: &[BigRational]) -> Vec<u64> {
    let ints = to_primitive_integers(x);
    ints.iter()
        .map(|v| v.to_u64().expect("nonnegative entry within range"))
        .collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn to_primitive_integers(x: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let mut ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if !g.is_zero() {
        for v in ints.iter_mut() {
            *v /= &g;
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn simple_feasible() {
        let mut s = LinearSystem::new(2);
        s.add_nonnegativity();
        s.add_eq_i64(&[2, -2], 0);
        s.add_ge_i64(&[1, 1], 1);
        let x = s.solve().unwrap();
        assert_eq!(x, vec![r(1, 2), r(1, 2)]);
        assert_eq!(to_primitive_naturals(&x), vec![1, 1]);
    }

    #[test]
    fn simple_infeasible() {
        let mut s = LinearSystem::new(1);
        s.add_nonnegativity();
        s.add_eq_i64(&[2], 0);
        s.add_ge_i64(&[1], 1);
        assert!(s.solve().is_none());
    }

    #[test]
    fn free_variables_prefer_zero() {
        let mut s = LinearSystem::new(2);
        s.add_ge_i64(&[1, 1], -3);
        assert_eq!(s.solve().unwrap(), vec![r(0, 1), r(0, 1)]);
        let mut s = LinearSystem::new(2);
        s.add_ge_i64(&[-1, 0], 2);
        assert_eq!(s.solve().unwrap(), vec![r(-2, 1), r(0, 1)]);
    }

    #[test]
    fn empty_system() {
        assert_eq!(LinearSystem::new(0).solve(), Some(vec![]));
    }
}
