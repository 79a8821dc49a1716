use std::fmt;

/// A term in the full signature `{meet, join, product, implication, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    One,
    Var(String),
    Join(Vec<Term>),
    Meet(Vec<Term>),
    Mul(Vec<Term>),
    Imp(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn imp(a: Term, b: Term) -> Term {
        Term::Imp(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Term, n: u32) -> Term {
        Term::Pow(Box::new(a), n)
    }

    /// Product of the listed factors; the empty product is `1`.
    pub fn product(mut factors: Vec<Term>) -> Term {
        match factors.len() {
            0 => Term::One,
            1 => factors.pop().unwrap(),
            _ => Term::Mul(factors),
        }
    }

    /// Join of the listed joinands; must be nonempty.
    pub fn join(mut parts: Vec<Term>) -> Term {
        assert!(!parts.is_empty(), "empty join");
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Join(parts)
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Term::One | Term::Var(_))
    }

    fn binds_tighter_than_join(&self) -> bool {
        matches!(
            self,
            Term::One | Term::Var(_) | Term::Mul(_) | Term::Pow(_, _)
        )
    }

    /// Counts the variable occurrences, used for structural checks.
    pub fn size(&self) -> usize {
        match self {
            Term::One | Term::Var(_) => 1,
            Term::Join(ts) | Term::Meet(ts) | Term::Mul(ts) => ts.iter().map(Term::size).sum(),
            Term::Imp(a, b) => a.size() + b.size(),
            Term::Pow(a, _) => a.size(),
        }
    }
}

fn wrap(t: &Term, plain: bool) -> String {
    if plain {
        t.to_string()
    } else {
        format!("({})", t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::One => write!(f, "1"),
            Term::Var(v) => write!(f, "{}", v),
            Term::Join(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|t| wrap(t, t.binds_tighter_than_join()))
                    .collect();
                write!(f, "{}", parts.join(" v "))
            }
            Term::Meet(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|t| wrap(t, t.binds_tighter_than_join()))
                    .collect();
                write!(f, "{}", parts.join(" & "))
            }
            Term::Mul(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|t| wrap(t, t.is_atomic() || matches!(t, Term::Pow(_, _))))
                    .collect();
                write!(f, "{}", parts.join("*"))
            }
            Term::Imp(a, b) => write!(
                f,
                "{} -> {}",
                wrap(a, a.binds_tighter_than_join()),
                wrap(b, b.binds_tighter_than_join())
            ),
            Term::Pow(a, n) => write!(f, "{}^{}", wrap(a, a.is_atomic()), n),
        }
    }
}

/// An inequality `lhs <= rhs` between terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub lhs: Term,
    pub rhs: Term,
}

impl Inequality {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Inequality { lhs, rhs }
    }

    /// The implication `lhs -> rhs`, which is above 1 exactly when the inequality holds.
    pub fn to_implication(&self) -> Term {
        Term::imp(self.lhs.clone(), self.rhs.clone())
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

/// A quasiequation `s1 & ... & sm => t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quasiequation {
    pub antecedent: Vec<Inequality>,
    pub consequent: Inequality,
}

impl fmt::Display for Quasiequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.antecedent.iter().map(|s| s.to_string()).collect();
        write!(f, "{} => {}", parts.join(" & "), self.consequent)
    }
}

/// Builds `(1 & s1' & ... & sm')^n <= t'` where `s'` is `s.lhs -> s.rhs`.
pub fn quasi_to_equation(s: &[Inequality], t: &Inequality, n: u32) -> Inequality {
    assert!(n >= 1, "exponent must be positive");
    let mut meet = vec![Term::One];
    meet.extend(s.iter().map(Inequality::to_implication));
    let base = if meet.len() == 1 {
        Term::One
    } else {
        Term::Meet(meet)
    };
    Inequality::new(Term::pow(base, n), t.to_implication())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(a: &str, b: &str) -> Inequality {
        Inequality::new(Term::var(a), Term::var(b))
    }

    #[test]
    fn single_premise() {
        let e = quasi_to_equation(&[le("x", "y")], &le("u", "v"), 1);
        assert_eq!(
            e.lhs,
            Term::pow(
                Term::Meet(vec![Term::One, Term::imp(Term::var("x"), Term::var("y"))]),
                1
            )
        );
        assert_eq!(e.rhs, Term::imp(Term::var("u"), Term::var("v")));
        assert_eq!(e.to_string(), "(1 & (x -> y))^1 <= u -> v");
    }

    #[test]
    fn empty_meet_is_one() {
        let e = quasi_to_equation(&[], &le("u", "v"), 2);
        assert_eq!(e.lhs, Term::pow(Term::One, 2));
        assert_eq!(e.to_string(), "1^2 <= u -> v");
    }

    #[test]
    fn display_nesting() {
        let t = Term::Mul(vec![
            Term::Join(vec![Term::var("a"), Term::One]),
            Term::pow(Term::var("b"), 3),
        ]);
        assert_eq!(t.to_string(), "(a v 1)*b^3");
    }
}
