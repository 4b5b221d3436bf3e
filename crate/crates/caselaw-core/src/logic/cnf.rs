use std::collections::BTreeSet;
use std::fmt;

use super::formula::{Atom, Formula};

/// A signed atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Literal {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn negative(atom: Atom) -> Literal {
        Literal {
            atom,
            negated: true,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::atom(self.atom.clone());
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!")?;
        }
        write!(f, "{}", self.atom)
    }
}

pub type Clause = BTreeSet<Literal>;

/// A formula in conjunctive normal form over the original atoms.
///
/// The empty clause set is ⊤; a set containing the empty clause is ⊥.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    pub clauses: BTreeSet<Clause>,
}

impl CnfFormula {
    pub fn top() -> CnfFormula {
        CnfFormula {
            clauses: BTreeSet::new(),
        }
    }

    pub fn bot() -> CnfFormula {
        let mut clauses = BTreeSet::new();
        clauses.insert(Clause::new());
        CnfFormula { clauses }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(
            self.clauses
                .iter()
                .map(|c| Formula::or_all(c.iter().map(Literal::to_formula))),
        )
    }
}

// Negation-normal form with →/↔ eliminated.
fn nnf(f: &Formula, negate: bool) -> Formula {
    match (f, negate) {
        (Formula::Top, false) | (Formula::Bot, true) => Formula::Top,
        (Formula::Top, true) | (Formula::Bot, false) => Formula::Bot,
        (Formula::Atom(a), false) => Formula::atom(a.clone()),
        (Formula::Atom(a), true) => Formula::not(Formula::atom(a.clone())),
        (Formula::Not(x), _) => nnf(x, !negate),
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => {
            Formula::and(nnf(a, negate), nnf(b, negate))
        }
        (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
            Formula::or(nnf(a, negate), nnf(b, negate))
        }
        (Formula::Implies(a, b), false) => Formula::or(nnf(a, true), nnf(b, false)),
        (Formula::Implies(a, b), true) => Formula::and(nnf(a, false), nnf(b, true)),
        (Formula::Iff(a, b), false) => Formula::and(
            Formula::or(nnf(a, true), nnf(b, false)),
            Formula::or(nnf(b, true), nnf(a, false)),
        ),
        (Formula::Iff(a, b), true) => Formula::or(
            Formula::and(nnf(a, false), nnf(b, true)),
            Formula::and(nnf(a, true), nnf(b, false)),
        ),
    }
}

fn cnf_of_nnf(f: &Formula) -> CnfFormula {
    match f {
        Formula::Top => CnfFormula::top(),
        Formula::Bot => CnfFormula::bot(),
        Formula::Atom(a) => {
            let mut clause = Clause::new();
            clause.insert(Literal::positive(a.clone()));
            CnfFormula {
                clauses: BTreeSet::from([clause]),
            }
        }
        Formula::Not(x) => match x.as_ref() {
            Formula::Atom(a) => {
                let mut clause = Clause::new();
                clause.insert(Literal::negative(a.clone()));
                CnfFormula {
                    clauses: BTreeSet::from([clause]),
                }
            }
            _ => unreachable!("input is in negation normal form"),
        },
        Formula::And(a, b) => {
            let mut left = cnf_of_nnf(a);
            let right = cnf_of_nnf(b);
            left.clauses.extend(right.clauses);
            left
        }
        Formula::Or(a, b) => {
            let left = cnf_of_nnf(a);
            let right = cnf_of_nnf(b);
            // ⊥ ∨ X = X; ⊤ ∨ X = ⊤ fall out of the cross product only if the
            // constants are handled explicitly.
            if left.clauses.is_empty() || right.clauses.is_empty() {
                return CnfFormula::top();
            }
            let mut clauses = BTreeSet::new();
            for lc in &left.clauses {
                for rc in &right.clauses {
                    let mut merged = lc.clone();
                    merged.extend(rc.iter().cloned());
                    clauses.insert(merged);
                }
            }
            CnfFormula { clauses }
        }
        Formula::Implies(_, _) | Formula::Iff(_, _) => {
            unreachable!("input is in negation normal form")
        }
    }
}

/// Distribution-based CNF that introduces no fresh atoms, so downstream
/// clause filtering can reason about which atoms a clause mentions.
/// Worst-case exponential; callers accept that at desk scale.
pub fn to_structural_cnf(f: &Formula) -> CnfFormula {
    cnf_of_nnf(&nnf(f, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(name: &str, negated: bool) -> Literal {
        Literal {
            atom: Atom::prop(name),
            negated,
        }
    }

    fn clause(lits: &[Literal]) -> Clause {
        lits.iter().cloned().collect()
    }

    #[test]
    fn implication_elimination() {
        let f = Formula::implies(Formula::prop("p"), Formula::prop("q"));
        let cnf = to_structural_cnf(&f);
        let expected = BTreeSet::from([clause(&[lit("p", true), lit("q", false)])]);
        assert_eq!(cnf.clauses, expected);
    }

    #[test]
    fn conjunction_splits_into_unit_clauses() {
        let f = Formula::and(Formula::prop("p"), Formula::prop("q"));
        let cnf = to_structural_cnf(&f);
        let expected = BTreeSet::from([
            clause(&[lit("p", false)]),
            clause(&[lit("q", false)]),
        ]);
        assert_eq!(cnf.clauses, expected);
    }

    #[test]
    fn disjunction_distributes() {
        let f = Formula::or(
            Formula::and(Formula::prop("p"), Formula::prop("q")),
            Formula::prop("r"),
        );
        let cnf = to_structural_cnf(&f);
        let expected = BTreeSet::from([
            clause(&[lit("p", false), lit("r", false)]),
            clause(&[lit("q", false), lit("r", false)]),
        ]);
        assert_eq!(cnf.clauses, expected);
    }

    #[test]
    fn constants() {
        assert_eq!(to_structural_cnf(&Formula::Top), CnfFormula::top());
        assert_eq!(to_structural_cnf(&Formula::Bot), CnfFormula::bot());
        let f = Formula::or(Formula::Top, Formula::prop("p"));
        assert_eq!(to_structural_cnf(&f), CnfFormula::top());
    }
}
