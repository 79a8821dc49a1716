//! Recursive-descent parser for the equation grammar
//!
//! ```text
//! eq    := expr "<=" expr
//! expr  := prod { ("v" | "|") prod }
//! prod  := atom { "*"? atom }
//! atom  := "1" | var | atom "^" nat | "(" expr ")"
//! var   := "x" nat | letter
//! ```
//!
//! The letter `v` is reserved for join and cannot name a variable.

use std::collections::{BTreeMap, BTreeSet};

use super::term::{Inequality, Term};
use super::vector::{ExponentVector, JoinTerm};
use super::EquationError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Le,
    Join,
    Star,
    Caret,
    LParen,
    RParen,
    Nat(u64),
    Indexed(u64),
    Letter(char),
}

fn syntax(pos: usize, msg: impl Into<String>) -> EquationError {
    EquationError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, EquationError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let read_nat = |i: &mut usize| -> Result<u64, EquationError> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        let s: String = chars[start..*i].iter().collect();
        s.parse::<u64>()
            .map_err(|_| syntax(start, format!("number '{}' out of range", s)))
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    i += 2;
                    Tok::Le
                } else {
                    return Err(syntax(pos, "expected '<='"));
                }
            }
            '|' | 'v' => {
                i += 1;
                Tok::Join
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            d if d.is_ascii_digit() => Tok::Nat(read_nat(&mut i)?),
            'x' if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                i += 1;
                let n = read_nat(&mut i)?;
                if n == 0 {
                    return Err(syntax(pos, "variable indices start at 1"));
                }
                Tok::Indexed(n)
            }
            l if l.is_ascii_lowercase() => {
                i += 1;
                Tok::Letter(l)
            }
            other => return Err(syntax(pos, format!("unexpected character '{}'", other))),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Term, EquationError> {
        let mut parts = vec![self.prod()?];
        while self.peek() == Some(&Tok::Join) {
            self.at += 1;
            parts.push(self.prod()?);
        }
        Ok(Term::join(parts))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Nat(_)) | Some(Tok::Indexed(_)) | Some(Tok::Letter(_)) | Some(Tok::LParen)
        )
    }

    fn prod(&mut self) -> Result<Term, EquationError> {
        let mut factors = vec![self.atom()?];
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.at += 1;
                factors.push(self.atom()?);
            } else if self.starts_atom() {
                factors.push(self.atom()?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Term::Mul(factors)
        })
    }

    fn atom(&mut self) -> Result<Term, EquationError> {
        let pos = self.pos();
        let mut base = match self.peek().cloned() {
            Some(Tok::Nat(1)) => {
                self.at += 1;
                Term::One
            }
            Some(Tok::Nat(n)) => return Err(syntax(pos, format!("unexpected number {}", n))),
            Some(Tok::Indexed(n)) => {
                self.at += 1;
                Term::Var(format!("x{}", n))
            }
            Some(Tok::Letter(c)) => {
                self.at += 1;
                Term::Var(c.to_string())
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.pos(), "expected ')'"));
                }
                self.at += 1;
                e
            }
            Some(_) => return Err(syntax(pos, "expected a term")),
            None => return Err(syntax(pos, "unexpected end of input")),
        };
        while self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let pos = self.pos();
            match self.peek().cloned() {
                Some(Tok::Nat(n)) => {
                    self.at += 1;
                    let n = u32::try_from(n).map_err(|_| syntax(pos, "exponent too large"))?;
                    base = Term::pow(base, n);
                }
                _ => return Err(syntax(pos, "expected an exponent")),
            }
        }
        Ok(base)
    }
}

/// Parses `expr <= expr`, keeping variable names as written.
pub fn parse_inequality(text: &str) -> Result<Inequality, EquationError> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let split = toks.iter().position(|(_, t)| *t == Tok::Le);
    let Some(split) = split else {
        return Err(syntax(end, "expected '<='"));
    };
    if split + 1 == toks.len() {
        return Err(EquationError::EmptyRhs);
    }
    let rhs_toks = toks[split + 1..].to_vec();
    if rhs_toks.iter().any(|(_, t)| *t == Tok::Le) {
        let p = rhs_toks.iter().find(|(_, t)| *t == Tok::Le).unwrap().0;
        return Err(syntax(p, "more than one '<='"));
    }
    let lhs_end = toks[split].0;
    let mut lp = Parser {
        toks: toks[..split].to_vec(),
        at: 0,
        end: lhs_end,
    };
    let lhs = lp.expr()?;
    if lp.at != lp.toks.len() {
        return Err(syntax(lp.pos(), "unexpected token"));
    }
    let mut rp = Parser {
        toks: rhs_toks,
        at: 0,
        end,
    };
    let rhs = rp.expr()?;
    if rp.at != rp.toks.len() {
        return Err(syntax(rp.pos(), "unexpected token"));
    }
    Ok(Inequality::new(lhs, rhs))
}

fn collect_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::One => {}
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::Join(ts) | Term::Meet(ts) | Term::Mul(ts) => {
            ts.iter().for_each(|t| collect_vars(t, out));
        }
        Term::Imp(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Term::Pow(a, _) => collect_vars(a, out),
    }
}

/// Assigns coordinates to variable names: `x<i>` goes to `i-1`, single
/// letters are numbered alphabetically.
fn index_map(vars: &BTreeSet<String>) -> Result<(BTreeMap<String, usize>, usize), EquationError> {
    let indexed: Vec<&String> = vars.iter().filter(|v| v.len() > 1).collect();
    let letters: Vec<&String> = vars.iter().filter(|v| v.len() == 1).collect();
    if !indexed.is_empty() && !letters.is_empty() {
        return Err(EquationError::MixedVariables);
    }
    let mut map = BTreeMap::new();
    if !indexed.is_empty() {
        let mut n = 0;
        for v in indexed {
            let i: usize = v[1..].parse().expect("lexer guarantees digits");
            map.insert(v.clone(), i - 1);
            n = n.max(i);
        }
        Ok((map, n))
    } else {
        for (i, v) in letters.iter().enumerate() {
            map.insert((*v).clone(), i);
        }
        let n = map.len();
        Ok((map, n))
    }
}

fn eval(t: &Term, idx: &BTreeMap<String, usize>, n: usize) -> BTreeSet<ExponentVector> {
    match t {
        Term::One => BTreeSet::from([ExponentVector::zeros(n)]),
        Term::Var(v) => BTreeSet::from([ExponentVector::unit(n, idx[v])]),
        Term::Join(ts) => ts.iter().flat_map(|t| eval(t, idx, n)).collect(),
        Term::Mul(ts) => {
            let mut acc = BTreeSet::from([ExponentVector::zeros(n)]);
            for t in ts {
                acc = product(&acc, &eval(t, idx, n));
            }
            acc
        }
        Term::Pow(a, k) => {
            let base = eval(a, idx, n);
            let mut acc = BTreeSet::from([ExponentVector::zeros(n)]);
            for _ in 0..*k {
                acc = product(&acc, &base);
            }
            acc
        }
        Term::Meet(_) | Term::Imp(_, _) => {
            unreachable!("meet and implication are not produced by the equation grammar")
        }
    }
}

fn product(a: &BTreeSet<ExponentVector>, b: &BTreeSet<ExponentVector>) -> BTreeSet<ExponentVector> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.add(y)))
        .collect()
}

/// Normalizes both sides of a parsed inequality into joins of monomials.
pub fn normalize(ineq: &Inequality) -> Result<(JoinTerm, JoinTerm, usize), EquationError> {
    let mut vars = BTreeSet::new();
    collect_vars(&ineq.lhs, &mut vars);
    collect_vars(&ineq.rhs, &mut vars);
    let (idx, n) = index_map(&vars)?;
    let lhs = eval(&ineq.lhs, &idx, n).into_iter().collect();
    let rhs = eval(&ineq.rhs, &idx, n).into_iter().collect();
    Ok((lhs, rhs, n))
}
