use super::term::{Inequality, Quasiequation, Term};
use crate::acm::{Acm, Configuration, Id, Instruction};

fn reg_name(i: usize) -> String {
    format!("r{}", i + 1)
}

/// `q r1^n1 ... rk^nk` as a product term.
pub fn configuration_term(m: &Acm, c: &Configuration) -> Term {
    let mut factors = vec![Term::var(m.state_name(c.state))];
    for (i, &n) in c.regs.iter().enumerate() {
        match n {
            0 => {}
            1 => factors.push(Term::Var(reg_name(i))),
            _ => factors.push(Term::pow(Term::Var(reg_name(i)), n as u32)),
        }
    }
    Term::product(factors)
}

/// The join of an ID's configurations.
pub fn id_term(m: &Acm, u: &Id) -> Term {
    Term::join(
        u.configs()
            .iter()
            .map(|c| configuration_term(m, c))
            .collect(),
    )
}

pub fn instruction_inequality(m: &Acm, ins: &Instruction) -> Inequality {
    let st = |i: usize| Term::var(m.state_name(i));
    match *ins {
        Instruction::Inc { from, to, reg } => {
            Inequality::new(st(from), Term::Mul(vec![st(to), Term::Var(reg_name(reg))]))
        }
        Instruction::Dec { from, reg, to } => {
            Inequality::new(Term::Mul(vec![st(from), Term::Var(reg_name(reg))]), st(to))
        }
        Instruction::Fork { from, left, right } => {
            Inequality::new(st(from), Term::Join(vec![st(left), st(right)]))
        }
    }
}

/// The quasiequation stating that `u` is accepted: the instructions and the
/// commutation laws `xy <= yx` among generators imply `u <= q_f`.
pub fn acc_quasiequation(m: &Acm, u: &Id) -> Quasiequation {
    let mut antecedent: Vec<Inequality> = m
        .instructions()
        .iter()
        .map(|ins| instruction_inequality(m, ins))
        .collect();
    let mut gens: Vec<String> = (0..m.registers()).map(reg_name).collect();
    gens.extend(m.states().iter().cloned());
    for x in &gens {
        for y in &gens {
            if x != y {
                antecedent.push(Inequality::new(
                    Term::Mul(vec![Term::var(x), Term::var(y)]),
                    Term::Mul(vec![Term::var(y), Term::var(x)]),
                ));
            }
        }
    }
    Quasiequation {
        antecedent,
        consequent: Inequality::new(id_term(m, u), Term::var(m.state_name(m.final_state()))),
    }
}
