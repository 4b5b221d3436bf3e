//! The underlying logic: classical propositional logic over ground atoms.
//!
//! Everything above this module only needs formula construction, entailment
//! (`A ⊨ B`), inconsistency (`A ⊨ ⊥`) and a structural CNF. The entailment
//! procedure is a complete DPLL search; it may use auxiliary variables
//! internally, while [`to_structural_cnf`] never introduces fresh atoms.

mod cnf;
mod formula;
mod oracle;
mod parser;
mod sat;

pub use cnf::{to_structural_cnf, Clause, CnfFormula, Literal};
pub use formula::{is_identifier, Atom, Formula};
pub use oracle::{entails, is_inconsistent, satisfiable, Oracle};
pub use parser::{parse_formula, ParseError};
