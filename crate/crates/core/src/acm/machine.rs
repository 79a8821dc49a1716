use std::collections::HashMap;
use std::fmt;

use super::AcmError;

/// One instruction. States are indices into the machine's state list and
/// registers are 0-based (`r1` is register 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `q <= q' r_i`
    Inc { from: usize, to: usize, reg: usize },
    /// `q r_i <= q'`
    Dec { from: usize, reg: usize, to: usize },
    /// `q <= q' v q''`
    Fork {
        from: usize,
        left: usize,
        right: usize,
    },
}

impl Instruction {
    pub fn source(&self) -> usize {
        match *self {
            Instruction::Inc { from, .. }
            | Instruction::Dec { from, .. }
            | Instruction::Fork { from, .. } => from,
        }
    }
}

/// A state together with its register contents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: usize,
    pub regs: Vec<u64>,
}

impl Configuration {
    pub fn new(state: usize, regs: Vec<u64>) -> Self {
        Configuration { state, regs }
    }
}

/// A nonempty multiset of configurations, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Id(Vec<Configuration>);

impl Id {
    pub fn new(mut configs: Vec<Configuration>) -> Result<Self, AcmError> {
        if configs.is_empty() {
            return Err(AcmError::EmptyId);
        }
        configs.sort();
        Ok(Id(configs))
    }

    pub fn single(c: Configuration) -> Self {
        Id(vec![c])
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    /// The join of two IDs.
    pub fn join(&self, other: &Id) -> Id {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Id(v)
    }

    /// Replaces one occurrence of `old` with `new`.
    pub fn replace(&self, old: &Configuration, new: &[Configuration]) -> Id {
        let mut v = self.0.clone();
        let at = v
            .iter()
            .position(|c| c == old)
            .expect("configuration occurs in the ID");
        v.remove(at);
        v.extend(new.iter().cloned());
        v.sort();
        Id(v)
    }
}

/// An and-branching counter machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acm {
    registers: usize,
    states: Vec<String>,
    index: HashMap<String, usize>,
    final_state: usize,
    instructions: Vec<Instruction>,
}

fn valid_state_name(name: &str) -> bool {
    let mut chars = name.chars();
    let ok_start = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let ok_rest = name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'');
    ok_start && ok_rest && !is_register_token(name)
}

fn is_register_token(s: &str) -> bool {
    s.len() > 1 && s.starts_with('r') && s[1..].chars().all(|c| c.is_ascii_digit())
}

impl Acm {
    pub fn new(
        registers: usize,
        states: Vec<String>,
        final_state: &str,
        instructions: Vec<Instruction>,
    ) -> Result<Self, AcmError> {
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if !valid_state_name(s) {
                return Err(AcmError::BadStateName(s.clone()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(AcmError::DuplicateState(s.clone()));
            }
        }
        let final_idx = *index
            .get(final_state)
            .ok_or_else(|| AcmError::UnknownState(final_state.to_string()))?;
        for ins in &instructions {
            let (st, reg): (Vec<usize>, Option<usize>) = match *ins {
                Instruction::Inc { from, to, reg } => (vec![from, to], Some(reg)),
                Instruction::Dec { from, reg, to } => (vec![from, to], Some(reg)),
                Instruction::Fork { from, left, right } => (vec![from, left, right], None),
            };
            if let Some(&bad) = st.iter().find(|&&s| s >= states.len()) {
                return Err(AcmError::UnknownState(format!("#{}", bad)));
            }
            if let Some(r) = reg {
                if r >= registers {
                    return Err(AcmError::UnknownRegister(r + 1));
                }
            }
            if ins.source() == final_idx {
                return Err(AcmError::FinalStateInstruction(states[final_idx].clone()));
            }
        }
        Ok(Acm {
            registers,
            states,
            index,
            final_state: final_idx,
            instructions,
        })
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn final_state(&self) -> usize {
        self.final_state
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn config(&self, state: &str, regs: &[u64]) -> Result<Configuration, AcmError> {
        let s = self
            .state_index(state)
            .ok_or_else(|| AcmError::UnknownState(state.to_string()))?;
        if regs.len() != self.registers {
            return Err(AcmError::RegisterCount {
                expected: self.registers,
                found: regs.len(),
            });
        }
        Ok(Configuration::new(s, regs.to_vec()))
    }

    pub fn is_final_config(&self, c: &Configuration) -> bool {
        c.state == self.final_state && c.regs.iter().all(|&r| r == 0)
    }

    /// True when every configuration is `q_f` with empty registers.
    pub fn is_final_id(&self, u: &Id) -> bool {
        u.configs().iter().all(|c| self.is_final_config(c))
    }

    pub fn show_instruction(&self, ins: &Instruction) -> String {
        let n = |i: usize| self.states[i].as_str();
        match *ins {
            Instruction::Inc { from, to, reg } => {
                format!("inc {} -> {} r{}", n(from), n(to), reg + 1)
            }
            Instruction::Dec { from, reg, to } => {
                format!("dec {} r{} -> {}", n(from), reg + 1, n(to))
            }
            Instruction::Fork { from, left, right } => {
                format!("fork {} -> {} {}", n(from), n(left), n(right))
            }
        }
    }

    pub fn show_config(&self, c: &Configuration) -> String {
        let mut s = self.states[c.state].clone();
        for (i, &r) in c.regs.iter().enumerate() {
            match r {
                0 => {}
                1 => s.push_str(&format!(" r{}", i + 1)),
                _ => s.push_str(&format!(" r{}^{}", i + 1, r)),
            }
        }
        s
    }

    pub fn show_id(&self, u: &Id) -> String {
        u.configs()
            .iter()
            .map(|c| self.show_config(c))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Serializes in the line-based machine format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "registers {}\nstates {}\nfinal {}\n",
            self.registers,
            self.states.join(" "),
            self.states[self.final_state]
        );
        for ins in &self.instructions {
            out.push_str(&self.show_instruction(ins));
            out.push('\n');
        }
        out
    }

    /// Parses an ID literal such as `q0 r1^2 | q1 r2`.
    pub fn parse_id(&self, text: &str) -> Result<Id, AcmError> {
        let mut configs = Vec::new();
        for part in text.split('|') {
            configs.push(self.parse_config(part)?);
        }
        Id::new(configs)
    }

    pub fn parse_config(&self, text: &str) -> Result<Configuration, AcmError> {
        let mut state = None;
        let mut regs = vec![0u64; self.registers];
        for tok in text.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<u64>()
                        .map_err(|_| AcmError::Syntax(format!("bad exponent in '{}'", tok)))?,
                ),
                None => (tok, 1),
            };
            if is_register_token(base) {
                let i: usize = base[1..]
                    .parse()
                    .map_err(|_| AcmError::Syntax(format!("bad register '{}'", base)))?;
                if i == 0 || i > self.registers {
                    return Err(AcmError::UnknownRegister(i));
                }
                regs[i - 1] += exp;
            } else {
                if exp != 1 {
                    return Err(AcmError::NotAnId(format!(
                        "state '{}' raised to a power",
                        base
                    )));
                }
                let s = self
                    .state_index(base)
                    .ok_or_else(|| AcmError::UnknownState(base.to_string()))?;
                if state.replace(s).is_some() {
                    return Err(AcmError::NotAnId(format!(
                        "configuration '{}' has more than one state",
                        text.trim()
                    )));
                }
            }
        }
        let state = state.ok_or_else(|| {
            AcmError::NotAnId(format!("configuration '{}' has no state", text.trim()))
        })?;
        Ok(Configuration::new(state, regs))
    }
}

impl fmt::Display for Acm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Parses the line-based machine format.
pub fn parse_acm(text: &str) -> Result<Acm, AcmError> {
    let mut registers = None;
    let mut states: Option<Vec<String>> = None;
    let mut final_state = None;
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |m: &str| AcmError::Syntax(format!("line {}: {}", lineno + 1, m));
        match toks[0] {
            "registers" => {
                if toks.len() != 2 {
                    return Err(err("expected 'registers <k>'"));
                }
                registers = Some(
                    toks[1]
                        .parse::<usize>()
                        .map_err(|_| err("bad register count"))?,
                );
            }
            "states" => {
                if toks.len() < 2 {
                    return Err(err("expected at least one state"));
                }
                states = Some(toks[1..].iter().map(|s| s.to_string()).collect());
            }
            "final" => {
                if toks.len() != 2 {
                    return Err(err("expected 'final <name>'"));
                }
                final_state = Some(toks[1].to_string());
            }
            "inc" | "dec" | "fork" => raw.push((
                lineno + 1,
                toks.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            )),
            other => return Err(err(&format!("unknown directive '{}'", other))),
        }
    }
    let registers = registers.ok_or_else(|| AcmError::Syntax("missing 'registers' line".into()))?;
    let states = states.ok_or_else(|| AcmError::Syntax("missing 'states' line".into()))?;
    let final_state = final_state.ok_or_else(|| AcmError::Syntax("missing 'final' line".into()))?;
    let index: HashMap<&str, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let st = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| AcmError::UnknownState(name.to_string()))
    };
    let reg = |tok: &str, line: usize| -> Result<usize, AcmError> {
        if !is_register_token(tok) {
            return Err(AcmError::Syntax(format!(
                "line {}: expected a register, found '{}'",
                line, tok
            )));
        }
        let i: usize = tok[1..]
            .parse()
            .map_err(|_| AcmError::Syntax(format!("line {}: bad register '{}'", line, tok)))?;
        if i == 0 || i > registers {
            return Err(AcmError::UnknownRegister(i));
        }
        Ok(i - 1)
    };
    let mut instructions = Vec::new();
    for (line, t) in raw {
        let shape = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(AcmError::Syntax(format!(
                    "line {}: malformed '{}' instruction",
                    line, t[0]
                )))
            }
        };
        let ins = match t[0].as_str() {
            "inc" => {
                shape(t.len() == 5 && t[2] == "->")?;
                Instruction::Inc {
                    from: st(&t[1])?,
                    to: st(&t[3])?,
                    reg: reg(&t[4], line)?,
                }
            }
            "dec" => {
                shape(t.len() == 5 && t[3] == "->")?;
                Instruction::Dec {
                    from: st(&t[1])?,
                    reg: reg(&t[2], line)?,
                    to: st(&t[4])?,
                }
            }
            _ => {
                shape(t.len() == 5 && t[2] == "->")?;
                Instruction::Fork {
                    from: st(&t[1])?,
                    left: st(&t[3])?,
                    right: st(&t[4])?,
                }
            }
        };
        instructions.push(ins);
    }
    Acm::new(registers, states, &final_state, instructions)
}
