//! And-branching counter machines: representation, one-step semantics,
//! bounded acceptance search, ambient-equation steps and admissibility probes.

use std::collections::HashSet;

use thiserror::Error;

use crate::eqcore::SimpleEquation;

mod machine;
mod probe;
mod search;

pub use machine::{parse_acm, Acm, Configuration, Id, Instruction};
pub use probe::{accepted_in_box, admissibility_probe, ProbeCaps, ProbeReport};
pub use search::{accepts, accepts_with, AcceptanceResult, Fuel, Trace, UnknownInfo};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AcmError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("unknown register r{0}")]
    UnknownRegister(usize),
    #[error("duplicate state '{0}'")]
    DuplicateState(String),
    #[error("invalid state name '{0}'")]
    BadStateName(String),
    #[error("instruction on the final state '{0}'")]
    FinalStateInstruction(String),
    #[error("expected {expected} registers, found {found}")]
    RegisterCount { expected: usize, found: usize },
    #[error("an ID needs at least one configuration")]
    EmptyId,
    #[error("not an ID: {0}")]
    NotAnId(String),
}

/// One computation step together with a human-readable label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub id: Id,
    pub label: String,
}

/// The rewrite steps available to a single configuration: the machine's
/// instructions, optionally extended with register instances of a simple
/// equation whose substituted monomials have degree at most `degree_cap`.
#[derive(Clone, Copy, Debug)]
pub struct StepRules<'a> {
    pub machine: &'a Acm,
    pub ambient: Option<(&'a SimpleEquation, u64)>,
}

impl<'a> StepRules<'a> {
    pub fn machine(m: &'a Acm) -> Self {
        StepRules {
            machine: m,
            ambient: None,
        }
    }

    pub fn with_ambient(m: &'a Acm, d: &'a SimpleEquation, degree_cap: u64) -> Self {
        StepRules {
            machine: m,
            ambient: Some((d, degree_cap)),
        }
    }

    /// All steps from `c`: label and replacement configurations.
    pub fn config_steps(&self, c: &Configuration) -> Vec<(String, Vec<Configuration>)> {
        let mut out = instruction_steps(self.machine, c);
        if let Some((d, cap)) = self.ambient {
            out.extend(ambient_instances(c, d, cap, self.machine.registers()));
        }
        out
    }
}

fn instruction_steps(m: &Acm, c: &Configuration) -> Vec<(String, Vec<Configuration>)> {
    let mut out = Vec::new();
    for ins in m.instructions() {
        if ins.source() != c.state {
            continue;
        }
        let targets = match *ins {
            Instruction::Inc { to, reg, .. } => {
                let mut r = c.regs.clone();
                r[reg] += 1;
                vec![Configuration::new(to, r)]
            }
            Instruction::Dec { reg, to, .. } => {
                if c.regs[reg] == 0 {
                    continue;
                }
                let mut r = c.regs.clone();
                r[reg] -= 1;
                vec![Configuration::new(to, r)]
            }
            Instruction::Fork { left, right, .. } => vec![
                Configuration::new(left, c.regs.clone()),
                Configuration::new(right, c.regs.clone()),
            ],
        };
        out.push((m.show_instruction(ins), targets));
    }
    out
}

/// Register monomials in `k` registers of total degree at most `cap`, in
/// lexicographic order (the zero monomial first).
pub fn register_monomials(k: usize, cap: u64) -> Vec<Vec<u64>> {
    fn go(k: usize, left: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            go(k, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, cap, &mut Vec::new(), &mut out);
    out
}

/// Nontrivial instances of `t^1 <= join of t^d` inside configuration `c`,
/// with each `t_i` a register monomial of degree at most `cap`.
pub fn ambient_instances(
    c: &Configuration,
    d: &SimpleEquation,
    cap: u64,
    k: usize,
) -> Vec<(String, Vec<Configuration>)> {
    let monos = register_monomials(k, cap);
    let n = d.arity();
    let cols: Vec<_> = d.columns().iter().collect();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut choice: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![0u64; k];
    fn go(
        c: &Configuration,
        monos: &[Vec<u64>],
        cols: &[&crate::eqcore::ExponentVector],
        n: usize,
        choice: &mut Vec<usize>,
        used: &mut Vec<u64>,
        seen: &mut HashSet<Vec<Configuration>>,
        out: &mut Vec<(String, Vec<Configuration>)>,
    ) {
        if choice.len() == n {
            if choice.iter().all(|&m| m == 0) {
                return;
            }
            let x: Vec<u64> = c.regs.iter().zip(used.iter()).map(|(a, u)| a - u).collect();
            let mut targets = Vec::with_capacity(cols.len());
            for d in cols {
                let mut r = x.clone();
                for (i, &m) in choice.iter().enumerate() {
                    for (j, e) in monos[m].iter().enumerate() {
                        r[j] += d.get(i) * e;
                    }
                }
                targets.push(Configuration::new(c.state, r));
            }
            let mut key = targets.clone();
            key.sort();
            if seen.insert(key) {
                let t: Vec<String> = choice
                    .iter()
                    .map(|&m| {
                        let v: Vec<String> = monos[m].iter().map(|e| e.to_string()).collect();
                        format!("({})", v.join(","))
                    })
                    .collect();
                out.push((format!("ambient t={}", t.join(",")), targets));
            }
            return;
        }
        for (mi, m) in monos.iter().enumerate() {
            if m.iter()
                .zip(used.iter())
                .zip(&c.regs)
                .any(|((e, u), r)| e + u > *r)
            {
                continue;
            }
            for (u, e) in used.iter_mut().zip(m) {
                *u += e;
            }
            choice.push(mi);
            go(c, monos, cols, n, choice, used, seen, out);
            choice.pop();
            for (u, e) in used.iter_mut().zip(m) {
                *u -= e;
            }
        }
    }
    go(
        c,
        &monos,
        &cols,
        n,
        &mut choice,
        &mut used,
        &mut seen,
        &mut out,
    );
    out
}

fn id_successors(rules: &StepRules, u: &Id) -> Vec<Successor> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut prev: Option<&Configuration> = None;
    for c in u.configs() {
        if prev == Some(c) {
            continue;
        }
        prev = Some(c);
        for (label, targets) in rules.config_steps(c) {
            let id = u.replace(c, &targets);
            if seen.insert(id.clone()) {
                out.push(Successor { id, label });
            }
        }
    }
    out
}

/// All IDs reachable from `u` by one instruction, in deterministic order.
pub fn successors(m: &Acm, u: &Id) -> Vec<Successor> {
    id_successors(&StepRules::machine(m), u)
}

/// All IDs reachable from `u` by one register instance of `d`, followed by
/// `u` itself once under the label `trivial`.
pub fn ambient_successors(m: &Acm, d: &SimpleEquation, u: &Id, degree_cap: u64) -> Vec<Successor> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut prev: Option<&Configuration> = None;
    for c in u.configs() {
        if prev == Some(c) {
            continue;
        }
        prev = Some(c);
        for (label, targets) in ambient_instances(c, d, degree_cap, m.registers()) {
            let id = u.replace(c, &targets);
            if seen.insert(id.clone()) {
                out.push(Successor { id, label });
            }
        }
    }
    out.push(Successor {
        id: u.clone(),
        label: "trivial".into(),
    });
    out
}
