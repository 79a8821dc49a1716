//! Exhaustive acceptance inside a register box, computed backwards from the
//! final configuration, with and without ambient-equation steps.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{register_monomials, Acm, Configuration, Instruction};
use crate::eqcore::{ExponentVector, SimpleEquation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeCaps {
    pub max_reg: u64,
    pub degree_cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub caps: ProbeCaps,
    /// Configurations accepted by the machine alone.
    pub plain: BTreeSet<Configuration>,
    /// Configurations accepted once ambient steps are allowed.
    pub extended: BTreeSet<Configuration>,
    /// `extended \ plain`: empirical witnesses of non-admissibility.
    pub difference: Vec<Configuration>,
}

/// The least set of configurations with all registers `<= max_reg` that
/// contains the final configuration and is closed backwards under the steps
/// whose source and targets all lie in the box.
///
/// An ID is accepted within the box exactly when each of its configurations
/// belongs to this set.
pub fn accepted_in_box(
    m: &Acm,
    ambient: Option<(&SimpleEquation, u64)>,
    max_reg: u64,
) -> BTreeSet<Configuration> {
    let k = m.registers();
    let mut accepted: HashSet<Configuration> = HashSet::new();
    let mut queue = VecDeque::new();
    let fin = Configuration::new(m.final_state(), vec![0; k]);
    accepted.insert(fin.clone());
    queue.push_back(fin);
    let mut by_target: Vec<Vec<Instruction>> = vec![Vec::new(); m.states().len()];
    for ins in m.instructions() {
        match *ins {
            Instruction::Inc { to, .. } | Instruction::Dec { to, .. } => by_target[to].push(*ins),
            Instruction::Fork { left, right, .. } => {
                by_target[left].push(*ins);
                if right != left {
                    by_target[right].push(*ins);
                }
            }
        }
    }
    let monos = ambient
        .map(|(_, cap)| register_monomials(k, cap))
        .unwrap_or_default();
    let cols: Vec<ExponentVector> = ambient
        .map(|(d, _)| d.columns().iter().cloned().collect())
        .unwrap_or_default();
    let n = ambient.map(|(d, _)| d.arity()).unwrap_or(0);

    while let Some(c) = queue.pop_front() {
        let mut found = Vec::new();
        for ins in &by_target[c.state] {
            match *ins {
                Instruction::Inc { from, reg, .. } => {
                    if c.regs[reg] > 0 {
                        let mut r = c.regs.clone();
                        r[reg] -= 1;
                        found.push(Configuration::new(from, r));
                    }
                }
                Instruction::Dec { from, reg, .. } => {
                    if c.regs[reg] < max_reg {
                        let mut r = c.regs.clone();
                        r[reg] += 1;
                        found.push(Configuration::new(from, r));
                    }
                }
                Instruction::Fork { from, left, right } => {
                    let l = Configuration::new(left, c.regs.clone());
                    let rr = Configuration::new(right, c.regs.clone());
                    if accepted.contains(&l) && accepted.contains(&rr) {
                        found.push(Configuration::new(from, c.regs.clone()));
                    }
                }
            }
        }
        if ambient.is_some() {
            for dbar in &cols {
                ambient_sources(&c, dbar, &cols, &monos, n, max_reg, &accepted, &mut found);
            }
        }
        for s in found {
            if !accepted.contains(&s) {
                accepted.insert(s.clone());
                queue.push_back(s);
            }
        }
    }
    accepted.into_iter().collect()
}

/// Sources of ambient steps that have `c` as the target for column `dbar` and
/// all other targets already accepted.
#[allow(clippy::too_many_arguments)]
fn ambient_sources(
    c: &Configuration,
    dbar: &ExponentVector,
    cols: &[ExponentVector],
    monos: &[Vec<u64>],
    n: usize,
    max_reg: u64,
    accepted: &HashSet<Configuration>,
    found: &mut Vec<Configuration>,
) {
    let k = c.regs.len();
    let mut choice = Vec::with_capacity(n);
    let mut used = vec![0u64; k];
    #[allow(clippy::too_many_arguments)]
    fn go(
        c: &Configuration,
        dbar: &ExponentVector,
        cols: &[ExponentVector],
        monos: &[Vec<u64>],
        n: usize,
        max_reg: u64,
        accepted: &HashSet<Configuration>,
        choice: &mut Vec<usize>,
        used: &mut Vec<u64>,
        found: &mut Vec<Configuration>,
    ) {
        let i = choice.len();
        if i == n {
            if choice.iter().all(|&m| m == 0) {
                return;
            }
            let x: Vec<u64> = c.regs.iter().zip(used.iter()).map(|(a, u)| a - u).collect();
            let image = |d: &ExponentVector| -> Vec<u64> {
                let mut r = x.clone();
                for (v, &m) in choice.iter().enumerate() {
                    for (j, e) in monos[m].iter().enumerate() {
                        r[j] += d.get(v) * e;
                    }
                }
                r
            };
            let source = image(&ExponentVector::ones(n));
            if source.iter().any(|&r| r > max_reg) {
                return;
            }
            for d in cols {
                let r = image(d);
                if r.iter().any(|&e| e > max_reg) {
                    return;
                }
                if !accepted.contains(&Configuration::new(c.state, r)) {
                    return;
                }
            }
            found.push(Configuration::new(c.state, source));
            return;
        }
        let mult = dbar.get(i);
        for (mi, m) in monos.iter().enumerate() {
            if m.iter()
                .zip(used.iter())
                .zip(&c.regs)
                .any(|((e, u), r)| u + mult * e > *r)
            {
                continue;
            }
            for (u, e) in used.iter_mut().zip(m) {
                *u += mult * e;
            }
            choice.push(mi);
            go(
                c, dbar, cols, monos, n, max_reg, accepted, choice, used, found,
            );
            choice.pop();
            for (u, e) in used.iter_mut().zip(m) {
                *u -= mult * e;
            }
        }
    }
    go(
        c,
        dbar,
        cols,
        monos,
        n,
        max_reg,
        accepted,
        &mut choice,
        &mut used,
        found,
    );
}

/// Compares acceptance with and without register instances of `d` inside the
/// box given by `caps`. An empty difference only means that no violation was
/// found within the bounds.
pub fn admissibility_probe(m: &Acm, d: &SimpleEquation, caps: ProbeCaps) -> ProbeReport {
    let plain = accepted_in_box(m, None, caps.max_reg);
    let extended = accepted_in_box(m, Some((d, caps.degree_cap)), caps.max_reg);
    let difference = extended.difference(&plain).cloned().collect();
    ProbeReport {
        caps,
        plain,
        extended,
        difference,
    }
}
