//! The exponential encoding of a 2-register machine `M` into a 3-register
//! machine `M_K` storing register contents `n` as `K^n`.
//!
//! State names are stable: the zero-test states are `zero.z1`, `zero.z2`,
//! `zero.z3`, the end program uses `end.cF` and the final state `end.qF`, and
//! the program replacing the `i`-th instruction (1-based) of `M` has states
//! `times.<i>.a0 .. times.<i>.aK, times.<i>.t0, times.<i>.t1` or
//! `div.<i>.s0 .. div.<i>.sK, div.<i>.t0, div.<i>.t1`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::acm::{accepted_in_box, Acm, AcmError, Configuration, Instruction};

pub const FINAL: &str = "end.qF";
pub const END_C: &str = "end.cF";
/// Name of the end program's input state before it is bound to `M`'s final state.
pub const END_INPUT: &str = "qf";

/// Name of the zero-test state for register `reg` (0-based).
pub fn zero_state(reg: usize) -> String {
    format!("zero.z{}", reg + 1)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MkError {
    #[error("K must be at least 2, got {0}")]
    InvalidK(u64),
    #[error("expected a 2-register machine, found {0} registers")]
    NotTwoRegisters(usize),
    #[error("{kind} program needs {needed}")]
    KindMismatch {
        kind: ProgramKind,
        needed: &'static str,
    },
    #[error("state name '{0}' collides with a generated state")]
    NameCollision(String),
    #[error("register contents overflow when raising K to {0}")]
    Overflow(u64),
    #[error(transparent)]
    Acm(#[from] AcmError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProgramKind {
    Zero,
    Times,
    Div,
    Transfer,
    End,
}

impl fmt::Display for ProgramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProgramKind::Zero => "zero",
            ProgramKind::Times => "times",
            ProgramKind::Div => "div",
            ProgramKind::Transfer => "transfer",
            ProgramKind::End => "end",
        };
        write!(f, "{}", s)
    }
}

/// An instruction over state names; registers are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Inc {
        from: String,
        to: String,
        reg: usize,
    },
    Dec {
        from: String,
        reg: usize,
        to: String,
    },
    Fork {
        from: String,
        left: String,
        right: String,
    },
}

impl Rule {
    fn names(&self) -> Vec<&str> {
        match self {
            Rule::Inc { from, to, .. } | Rule::Dec { from, to, .. } => vec![from, to],
            Rule::Fork { from, left, right } => vec![from, left, right],
        }
    }

    fn rename(&mut self, old: &str, new: &str) {
        let fix = |s: &mut String| {
            if s == old {
                *s = new.to_string();
            }
        };
        match self {
            Rule::Inc { from, to, .. } | Rule::Dec { from, to, .. } => {
                fix(from);
                fix(to);
            }
            Rule::Fork { from, left, right } => {
                fix(from);
                fix(left);
                fix(right);
            }
        }
    }

    /// The rule for a machine instruction.
    pub fn of(m: &Acm, ins: &Instruction) -> Rule {
        let name = |i: usize| m.state_name(i).to_string();
        match *ins {
            Instruction::Inc { from, to, reg } => Rule::Inc {
                from: name(from),
                to: name(to),
                reg,
            },
            Instruction::Dec { from, reg, to } => Rule::Dec {
                from: name(from),
                reg,
                to: name(to),
            },
            Instruction::Fork { from, left, right } => Rule::Fork {
                from: name(from),
                left: name(left),
                right: name(right),
            },
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Inc { from, to, reg } => write!(f, "inc {} -> {} r{}", from, to, reg + 1),
            Rule::Dec { from, reg, to } => write!(f, "dec {} r{} -> {}", from, reg + 1, to),
            Rule::Fork { from, left, right } => write!(f, "fork {} -> {} {}", from, left, right),
        }
    }
}

/// An instruction of `M` together with its 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceInstruction {
    pub index: usize,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub kind: ProgramKind,
    /// Fresh states, excluding the final state `end.qF`.
    pub states: Vec<String>,
    /// Instructions with their labels.
    pub rules: Vec<(String, Rule)>,
    pub input: Option<String>,
    pub output: Option<String>,
}

impl Program {
    /// Replaces a state name in every rule and in the input and output.
    pub fn rename(&mut self, old: &str, new: &str) {
        for (_, r) in &mut self.rules {
            r.rename(old, new);
        }
        for s in [&mut self.input, &mut self.output].into_iter().flatten() {
            if s == old {
                *s = new.to_string();
            }
        }
        for s in &mut self.states {
            if s == old {
                *s = new.to_string();
            }
        }
    }
}

fn inc(from: &str, to: &str, reg: usize) -> Rule {
    Rule::Inc {
        from: from.into(),
        to: to.into(),
        reg,
    }
}

fn dec(from: &str, reg: usize, to: &str) -> Rule {
    Rule::Dec {
        from: from.into(),
        reg,
        to: to.into(),
    }
}

fn fork(from: &str, left: &str, right: &str) -> Rule {
    Rule::Fork {
        from: from.into(),
        left: left.into(),
        right: right.into(),
    }
}

fn transfer_rules(t0: &str, t1: &str, reg: usize) -> Vec<(String, Rule)> {
    vec![
        ("T-".into(), dec(t0, 2, t1)),
        ("T+".into(), inc(t1, t0, reg)),
    ]
}

/// Builds one of the subprograms. `p` is required for the times, div and
/// transfer programs and must be an increment (times) or decrement (div) of
/// `r1` or `r2`.
pub fn build_program(
    kind: ProgramKind,
    p: Option<&SourceInstruction>,
    k: u64,
) -> Result<Program, MkError> {
    if k < 2 {
        return Err(MkError::InvalidK(k));
    }
    let k = usize::try_from(k).map_err(|_| MkError::InvalidK(k))?;
    match kind {
        ProgramKind::Zero => {
            let mut rules = Vec::new();
            for i in 0..3 {
                for j in (0..3).filter(|&j| j != i) {
                    let z = zero_state(i);
                    rules.push((format!("O{}{}", i + 1, j + 1), dec(&z, j, &z)));
                }
            }
            for i in 0..3 {
                rules.push((format!("O{}F", i + 1), fork(&zero_state(i), FINAL, FINAL)));
            }
            Ok(Program {
                kind,
                states: (0..3).map(zero_state).collect(),
                rules,
                input: None,
                output: None,
            })
        }
        ProgramKind::End => Ok(Program {
            kind,
            states: vec![END_C.into()],
            rules: vec![
                ("F1".into(), dec(END_INPUT, 0, END_C)),
                ("F2".into(), dec(END_C, 1, FINAL)),
            ],
            input: Some(END_INPUT.into()),
            output: Some(FINAL.into()),
        }),
        ProgramKind::Transfer => {
            let p = p.ok_or(MkError::KindMismatch {
                kind,
                needed: "an increment or decrement instruction",
            })?;
            let reg = match &p.rule {
                Rule::Inc { reg, .. } | Rule::Dec { reg, .. } if *reg < 2 => *reg,
                _ => {
                    return Err(MkError::KindMismatch {
                        kind,
                        needed: "an increment or decrement of r1 or r2",
                    })
                }
            };
            let t0 = format!("trsf.{}.t0", p.index);
            let t1 = format!("trsf.{}.t1", p.index);
            Ok(Program {
                kind,
                rules: transfer_rules(&t0, &t1, reg),
                input: Some(t0.clone()),
                output: Some(t0.clone()),
                states: vec![t0, t1],
            })
        }
        ProgramKind::Times => {
            let Some(SourceInstruction {
                index,
                rule: Rule::Inc { from, to, reg },
            }) = p
            else {
                return Err(MkError::KindMismatch {
                    kind,
                    needed: "an increment instruction",
                });
            };
            if *reg >= 2 {
                return Err(MkError::KindMismatch {
                    kind,
                    needed: "an increment of r1 or r2",
                });
            }
            let a: Vec<String> = (0..=k).map(|j| format!("times.{}.a{}", index, j)).collect();
            let t0 = format!("times.{}.t0", index);
            let t1 = format!("times.{}.t1", index);
            let mut rules = Vec::new();
            for j in 1..=k {
                rules.push((format!("+{}", j), inc(&a[j - 1], &a[j], 2)));
            }
            rules.push(("xloop".into(), dec(&a[k], *reg, &a[0])));
            rules.extend(transfer_rules(&t0, &t1, *reg));
            rules.push(("xin".into(), fork(from, &a[k], &zero_state(2))));
            rules.push(("xT".into(), fork(&a[k], &t0, &zero_state(*reg))));
            rules.push(("xout".into(), fork(&t0, to, &zero_state(2))));
            let mut states = a;
            states.push(t0);
            states.push(t1);
            Ok(Program {
                kind,
                states,
                rules,
                input: Some(from.clone()),
                output: Some(to.clone()),
            })
        }
        ProgramKind::Div => {
            let Some(SourceInstruction {
                index,
                rule: Rule::Dec { from, reg, to },
            }) = p
            else {
                return Err(MkError::KindMismatch {
                    kind,
                    needed: "a decrement instruction",
                });
            };
            if *reg >= 2 {
                return Err(MkError::KindMismatch {
                    kind,
                    needed: "a decrement of r1 or r2",
                });
            }
            let s: Vec<String> = (0..=k).map(|j| format!("div.{}.s{}", index, j)).collect();
            let t0 = format!("div.{}.t0", index);
            let t1 = format!("div.{}.t1", index);
            let mut rules = Vec::new();
            for j in 1..=k {
                rules.push((format!("-{}", j), dec(&s[j - 1], *reg, &s[j])));
            }
            rules.push(("divloop".into(), inc(&s[k], &s[0], 2)));
            rules.extend(transfer_rules(&t0, &t1, *reg));
            rules.push(("divin".into(), fork(from, &s[0], &zero_state(2))));
            rules.push(("divT".into(), fork(&s[0], &t0, &zero_state(*reg))));
            rules.push(("divout".into(), fork(&t0, to, &zero_state(2))));
            let mut states = s;
            states.push(t0);
            states.push(t1);
            Ok(Program {
                kind,
                states,
                rules,
                input: Some(from.clone()),
                output: Some(to.clone()),
            })
        }
    }
}

/// Builds a 3-register machine with final state `end.qF` from programs.
///
/// States are `leading` first, then the programs' states in order, then any
/// state referenced by a rule but not yet listed.
pub fn assemble(
    leading: &[String],
    programs: &[&Program],
    extra_rules: &[Rule],
) -> Result<Acm, MkError> {
    let mut states: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut add = |s: &str, states: &mut Vec<String>, strict: bool| -> Result<(), MkError> {
        if index.contains_key(s) {
            if strict {
                return Err(MkError::NameCollision(s.to_string()));
            }
            return Ok(());
        }
        index.insert(s.to_string(), states.len());
        states.push(s.to_string());
        Ok(())
    };
    for s in leading {
        add(s, &mut states, true)?;
    }
    for p in programs {
        for s in &p.states {
            add(s, &mut states, true)?;
        }
    }
    let all_rules: Vec<&Rule> = extra_rules
        .iter()
        .chain(programs.iter().flat_map(|p| p.rules.iter().map(|(_, r)| r)))
        .collect();
    for r in &all_rules {
        for s in r.names() {
            add(s, &mut states, false)?;
        }
    }
    add(FINAL, &mut states, false)?;
    let idx: HashMap<&str, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let instructions = all_rules
        .iter()
        .map(|r| match r {
            Rule::Inc { from, to, reg } => Instruction::Inc {
                from: idx[from.as_str()],
                to: idx[to.as_str()],
                reg: *reg,
            },
            Rule::Dec { from, reg, to } => Instruction::Dec {
                from: idx[from.as_str()],
                reg: *reg,
                to: idx[to.as_str()],
            },
            Rule::Fork { from, left, right } => Instruction::Fork {
                from: idx[from.as_str()],
                left: idx[left.as_str()],
                right: idx[right.as_str()],
            },
        })
        .collect();
    Ok(Acm::new(3, states, FINAL, instructions)?)
}

/// The programs replacing the instructions of `m`, in instruction order, with
/// `None` for forks.
pub fn instruction_programs(m: &Acm, k: u64) -> Result<Vec<Option<Program>>, MkError> {
    m.instructions()
        .iter()
        .enumerate()
        .map(|(i, ins)| {
            let src = SourceInstruction {
                index: i + 1,
                rule: Rule::of(m, ins),
            };
            match ins {
                Instruction::Inc { .. } => {
                    build_program(ProgramKind::Times, Some(&src), k).map(Some)
                }
                Instruction::Dec { .. } => build_program(ProgramKind::Div, Some(&src), k).map(Some),
                Instruction::Fork { .. } => Ok(None),
            }
        })
        .collect()
}

/// The machine `M_K`. The states of `m` keep their indices, so configurations
/// of `m` lift without renumbering.
pub fn construct_mk(m: &Acm, k: u64) -> Result<Acm, MkError> {
    if k < 2 {
        return Err(MkError::InvalidK(k));
    }
    if m.registers() != 2 {
        return Err(MkError::NotTwoRegisters(m.registers()));
    }
    let zero = build_program(ProgramKind::Zero, None, k)?;
    let mut end = build_program(ProgramKind::End, None, k)?;
    end.rename(END_INPUT, m.state_name(m.final_state()));
    let progs = instruction_programs(m, k)?;
    let forks: Vec<Rule> = m
        .instructions()
        .iter()
        .filter(|i| matches!(i, Instruction::Fork { .. }))
        .map(|i| Rule::of(m, i))
        .collect();
    let mut all: Vec<&Program> = vec![&zero];
    let mut leading: Vec<String> = m.states().to_vec();
    if leading.iter().any(|s| s == FINAL) {
        return Err(MkError::NameCollision(FINAL.into()));
    }
    leading.push(FINAL.into());
    all.push(&end);
    all.extend(progs.iter().flatten());
    assemble(&leading, &all, &forks)
}

/// `q r1^n1 r2^n2` becomes `q r1^(K^n1) r2^(K^n2) r3^0`.
pub fn lift_config(cf: &Configuration, k: u64) -> Result<Configuration, MkError> {
    if k < 2 {
        return Err(MkError::InvalidK(k));
    }
    if cf.regs.len() != 2 {
        return Err(MkError::NotTwoRegisters(cf.regs.len()));
    }
    let pow = |n: u64| -> Result<u64, MkError> {
        u32::try_from(n)
            .ok()
            .and_then(|e| k.checked_pow(e))
            .ok_or(MkError::Overflow(n))
    };
    Ok(Configuration::new(
        cf.state,
        vec![pow(cf.regs[0])?, pow(cf.regs[1])?, 0],
    ))
}

/// The zero-test program as a machine: states `zero.z1..z3` and `end.qF`.
pub fn zero_machine() -> Acm {
    let zero = build_program(ProgramKind::Zero, None, 2).expect("valid K");
    assemble(&[], &[&zero], &[]).expect("fresh names")
}

/// The end program as a machine with input state `qf`.
pub fn end_machine() -> Acm {
    let end = build_program(ProgramKind::End, None, 2).expect("valid K");
    assemble(&[END_INPUT.into()], &[&end], &[]).expect("fresh names")
}

/// Zero-test branches accepted by the zero-test program, as computed inside a
/// register box.
#[derive(Clone, Debug)]
pub struct ZeroGate {
    accepted: BTreeSet<(String, Vec<u64>)>,
}

impl ZeroGate {
    pub fn new(max_reg: u64) -> Self {
        let o = zero_machine();
        let accepted = accepted_in_box(&o, None, max_reg)
            .into_iter()
            .map(|c| (o.state_name(c.state).to_string(), c.regs))
            .collect();
        ZeroGate { accepted }
    }

    pub fn accepts(&self, state: &str, regs: &[u64]) -> bool {
        self.accepted.contains(&(state.to_string(), regs.to_vec()))
    }
}

fn is_zero_state(name: &str) -> bool {
    name.starts_with("zero.")
}

/// All configurations `c'` with `start ⊑ c'` using only instructions whose
/// source lies in `sources`, with registers bounded by `max_reg`.
///
/// A fork with one branch in a zero-test state is followed along the other
/// branch only when the zero-test branch is accepted.
pub fn program_reach(
    m: &Acm,
    sources: &BTreeSet<usize>,
    start: &Configuration,
    max_reg: u64,
    gate: &ZeroGate,
) -> BTreeSet<Configuration> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start.clone());
    while let Some(c) = queue.pop_front() {
        if !sources.contains(&c.state) {
            continue;
        }
        for ins in m.instructions().iter().filter(|i| i.source() == c.state) {
            let next = match *ins {
                Instruction::Inc { to, reg, .. } => {
                    if c.regs[reg] >= max_reg {
                        continue;
                    }
                    let mut r = c.regs.clone();
                    r[reg] += 1;
                    Configuration::new(to, r)
                }
                Instruction::Dec { to, reg, .. } => {
                    if c.regs[reg] == 0 {
                        continue;
                    }
                    let mut r = c.regs.clone();
                    r[reg] -= 1;
                    Configuration::new(to, r)
                }
                Instruction::Fork { left, right, .. } => {
                    let (main, z) = if is_zero_state(m.state_name(right)) {
                        (left, right)
                    } else if is_zero_state(m.state_name(left)) {
                        (right, left)
                    } else {
                        continue;
                    };
                    if !gate.accepts(m.state_name(z), &c.regs) {
                        continue;
                    }
                    Configuration::new(main, c.regs.clone())
                }
            };
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}
