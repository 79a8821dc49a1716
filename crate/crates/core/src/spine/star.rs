use std::collections::BTreeSet;

use super::prespinal::verify_spinal;
use super::SpineError;
use crate::eqcore::{delta, ExponentVector, SimpleEquation};

/// A 1-variable substitution `tau` and shift `C` with `C + tau·v` a power of
/// `K` for every `v` in the spine (and `v = 0`) while `tau·f` is new.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarFalsifier {
    pub tau: Vec<u128>,
    pub c: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarMode {
    Single,
    Double,
}

/// A substitution `sigma` with shift `c` (and a second pair in double mode)
/// making every shifted product a power of `K` without `sigma·1 = sigma·d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    pub sigma: Vec<u64>,
    pub c: u128,
    pub second: Option<(Vec<u64>, u128)>,
}

/// True when `x = k^a` for some `a >= 0`.
pub fn is_power_of(x: u128, k: u128) -> bool {
    if k < 2 || x == 0 {
        return x == 1;
    }
    let mut x = x;
    while x.is_multiple_of(k) {
        x /= k;
    }
    x == 1
}

/// `2 + min{p - q : p > q > 0 in P}`.
pub fn onevar_star_bound(n: u64, p: &BTreeSet<u64>) -> Result<u64, SpineError> {
    if p.contains(&n) {
        return Err(SpineError::Precondition(format!(
            "the equation is trivial since {} is in P",
            n
        )));
    }
    let pos: Vec<u64> = p.iter().copied().filter(|&x| x > 0).collect();
    if pos.len() < 2 {
        return Err(SpineError::Precondition(
            "P must contain at least two distinct positive integers".into(),
        ));
    }
    let gap = pos.windows(2).map(|w| w[1] - w[0]).min().unwrap();
    Ok(2 + gap)
}

/// A default choice of `K` for searches: `delta(D) + 2`.
pub fn heuristic_k(eq: &SimpleEquation) -> u64 {
    delta(eq.columns()) + 2
}

fn dot(a: &[u128], v: &ExponentVector) -> Option<u128> {
    a.iter().zip(v.entries()).try_fold(0u128, |acc, (&x, &e)| {
        acc.checked_add(x.checked_mul(u128::from(e))?)
    })
}

/// Checks the three conditions on a falsifier for `[f, V]`.
pub fn check_star_falsifier(
    f: &ExponentVector,
    v: &[ExponentVector],
    k: u64,
    w: &StarFalsifier,
) -> bool {
    let kk = u128::from(k);
    if k < 2 || w.tau.len() != f.arity() || !is_power_of(w.c, kk) {
        return false;
    }
    let mut images = vec![0u128];
    for x in v {
        if x.arity() != f.arity() {
            return false;
        }
        let Some(t) = dot(&w.tau, x) else {
            return false;
        };
        match w.c.checked_add(t) {
            Some(s) if is_power_of(s, kk) => images.push(t),
            _ => return false,
        }
    }
    match dot(&w.tau, f) {
        Some(tf) => !images.contains(&tf),
        None => false,
    }
}

/// Powers `K^b` congruent to `C` modulo `delta`, from `C` upwards, as
/// `(K^b - C) / delta`.
struct Shifts {
    k: u128,
    c: u128,
    delta: u128,
    next: Option<u128>,
}

impl Iterator for Shifts {
    type Item = Result<u128, SpineError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut p = self.next?;
        loop {
            let cur = p;
            self.next = cur.checked_mul(self.k);
            if cur % self.delta == self.c % self.delta {
                return Some(Ok((cur - self.c) / self.delta));
            }
            match self.next {
                Some(n) => p = n,
                None => return Some(Err(SpineError::Overflow)),
            }
        }
    }
}

/// Least `x` in the shift set with `base + x·coef` satisfying `accept`.
fn least_shift(
    shifts: &Shifts,
    base: i128,
    coef: i128,
    accept: impl Fn(i128) -> bool,
) -> Result<i128, SpineError> {
    let it = Shifts {
        next: Some(shifts.c),
        ..*shifts
    };
    for x in it {
        let x = i128::try_from(x?).map_err(|_| SpineError::Overflow)?;
        let t = x
            .checked_mul(coef)
            .and_then(|y| y.checked_add(base))
            .ok_or(SpineError::Overflow)?;
        if accept(t) {
            return Ok(x);
        }
    }
    Err(SpineError::Overflow)
}

/// Constructs a falsifier for the spine `[f, V]` and `K`.
///
/// With `A` the triangular matrix of the nonzero vectors of `V` and `delta`
/// its determinant, `tau = x·adj(A)` gives `tau·v_j = delta·x_j`, so it
/// suffices to pick each `x_j` among the values `(K^b - C)/delta`.
pub fn falsify_star(
    f: &ExponentVector,
    v: &[ExponentVector],
    k: u64,
) -> Result<StarFalsifier, SpineError> {
    if k < 2 {
        return Err(SpineError::InvalidK(k));
    }
    if !verify_spinal(f, v) {
        return Err(SpineError::NotSpinal(format!(
            "[{}, {{{}}}]",
            f,
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let n = f.arity();
    let last = |x: &ExponentVector| (0..n).rev().find(|&i| x.get(i) > 0);
    let mut plus: Vec<&ExponentVector> = v.iter().filter(|x| !x.is_zero()).collect();
    plus.sort_by_key(|x| last(x));
    plus.dedup();
    // a[i][j] = v_j(i)
    let a: Vec<Vec<i128>> = (0..n)
        .map(|i| plus.iter().map(|x| i128::from(x.get(i))).collect())
        .collect();
    let det = (0..n)
        .try_fold(1i128, |acc, i| acc.checked_mul(a[i][i]))
        .ok_or(SpineError::Overflow)?;
    let b = scaled_inverse(&a, det)?;

    let kk = u128::from(k);
    let du = det as u128;
    let mut seen = Vec::new();
    let mut p = 1u128;
    let mu = loop {
        let r = p % du;
        if let Some(pos) = seen.iter().position(|&s| s == r) {
            break pos;
        }
        seen.push(r);
        p = p.checked_mul(kk).ok_or(SpineError::Overflow)?;
    };
    let c = (0..mu)
        .try_fold(1u128, |acc, _| acc.checked_mul(kk))
        .ok_or(SpineError::Overflow)?;
    let shifts = Shifts {
        k: kk,
        c,
        delta: du,
        next: Some(c),
    };

    let m = (0..n)
        .rev()
        .find(|&i| f.get(i) != plus[n - 1].get(i))
        .ok_or_else(|| SpineError::Internal("f equals the top vector".into()))?;
    let mut x = vec![0i128; n];
    let mut t = vec![0i128; n];
    for i in m..n {
        let base = (0..i).try_fold(0i128, |acc, j| {
            x[j].checked_mul(b[j][i]).and_then(|y| acc.checked_add(y))
        });
        let base = base.ok_or(SpineError::Overflow)?;
        let floor = if i == n - 1 {
            let top = (0..i)
                .map(|j| det.checked_mul(x[j]))
                .try_fold(0i128, |acc, y| y.map(|y| acc.max(y)))
                .ok_or(SpineError::Overflow)?;
            top + 1
        } else {
            0
        };
        let positive = i == m;
        let xi = least_shift(&shifts, base, b[i][i], |ti| {
            ti >= floor && (!positive || ti > 0)
        })?;
        x[i] = xi;
        t[i] = base + xi * b[i][i];
    }
    let tau = t
        .iter()
        .map(|&ti| u128::try_from(ti).map_err(|_| SpineError::Internal("negative entry".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let out = StarFalsifier { tau, c };
    if !check_star_falsifier(f, v, k, &out) {
        return Err(SpineError::Internal(
            "constructed falsifier fails its check".into(),
        ));
    }
    Ok(out)
}

/// `det · A^{-1}` for an upper-triangular `A` with positive diagonal.
fn scaled_inverse(a: &[Vec<i128>], det: i128) -> Result<Vec<Vec<i128>>, SpineError> {
    let n = a.len();
    let mut b = vec![vec![0i128; n]; n];
    for col in 0..n {
        // solve A·y = det·e_col by back substitution
        for i in (0..=col).rev() {
            let mut rhs = if i == col { det } else { 0 };
            for j in i + 1..=col {
                rhs = a[i][j]
                    .checked_mul(b[j][col])
                    .and_then(|y| rhs.checked_sub(y))
                    .ok_or(SpineError::Overflow)?;
            }
            if rhs % a[i][i] != 0 {
                return Err(SpineError::Internal("adjugate is not integral".into()));
            }
            b[i][col] = rhs / a[i][i];
        }
    }
    Ok(b)
}

const MAX_SUBSTITUTIONS: u128 = 2_000_000;

/// Least shift `C <= cmax` with every `C + val` a power of `K`.
fn least_shift_for(vals: &[u128], k: u128, cmax: u128) -> Option<u128> {
    let min = *vals.iter().min()?;
    let mut p = 1u128;
    loop {
        if p >= min {
            let c = p - min;
            if c > cmax {
                return None;
            }
            if vals.iter().all(|&v| is_power_of(c + v, k)) {
                return Some(c);
            }
        }
        p = p.checked_mul(k)?;
    }
}

/// Exhaustive search for a violation of the power-of-`K` conditions with
/// substitution entries at most `bound`.
pub fn search_star_counterexample(
    eq: &SimpleEquation,
    k: u64,
    mode: StarMode,
    bound: u64,
) -> Result<Option<StarWitness>, SpineError> {
    if k < 2 {
        return Err(SpineError::InvalidK(k));
    }
    if bound == 0 {
        return Err(SpineError::Precondition("bound must be at least 1".into()));
    }
    let n = eq.arity();
    let total = u128::from(bound + 1)
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_SUBSTITUTIONS)
        .ok_or_else(|| {
            SpineError::Precondition(format!(
                "({}+1)^{} substitutions exceed the search cap",
                bound, n
            ))
        })?;
    let kk = u128::from(k);
    let maxsum: u128 = (0..n)
        .map(|i| u128::from(eq.columns().iter().map(|d| d.get(i)).max().unwrap_or(0)))
        .sum();
    let target = u128::from(bound) * maxsum + 1;
    let mut ke = 1u128;
    while ke < target {
        ke = ke.checked_mul(kk).ok_or(SpineError::Overflow)?;
    }
    let cmax = ke.checked_mul(kk).ok_or(SpineError::Overflow)?;
    let cols: Vec<&ExponentVector> = eq.columns().iter().collect();

    // admissible substitutions with their least shift and the set of
    // columns `d` with sigma·d = sigma·1
    let mut admissible: Vec<(Vec<u64>, u128, Vec<bool>)> = Vec::new();
    let mut sigma = vec![0u64; n];
    for _ in 0..total {
        let s: Vec<u128> = sigma.iter().map(|&x| u128::from(x)).collect();
        let vals: Vec<u128> = cols.iter().map(|d| dot(&s, d).unwrap()).collect();
        let one: u128 = s.iter().sum();
        if let Some(c) = least_shift_for(&vals, kk, cmax) {
            let eqs: Vec<bool> = vals.iter().map(|&v| v == one).collect();
            if mode == StarMode::Single && !eqs.iter().any(|&b| b) {
                return Ok(Some(StarWitness {
                    sigma,
                    c,
                    second: None,
                }));
            }
            admissible.push((sigma.clone(), c, eqs));
        }
        for i in (0..n).rev() {
            if sigma[i] < bound {
                sigma[i] += 1;
                break;
            }
            sigma[i] = 0;
        }
    }
    if mode == StarMode::Single {
        return Ok(None);
    }
    for (s1, c1, e1) in &admissible {
        for (s2, c2, e2) in &admissible {
            if !e1.iter().zip(e2).any(|(&a, &b)| a && b) {
                return Ok(Some(StarWitness {
                    sigma: s1.clone(),
                    c: *c1,
                    second: Some((s2.clone(), *c2)),
                }));
            }
        }
    }
    Ok(None)
}
