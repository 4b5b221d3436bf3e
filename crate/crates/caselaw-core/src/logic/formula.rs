use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A ground atom: a predicate name applied to zero or more constants.
///
/// Predicates over constants are treated as opaque propositional atoms, so
/// `owns(alice, data)` and `owns(bob, data)` are two unrelated atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    name: String,
    args: Vec<String>,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Atom {
    /// Builds an atom. Panics if `name` or any argument is not an identifier;
    /// text from untrusted sources goes through the parser instead.
    pub fn new(name: impl Into<String>, args: Vec<String>) -> Atom {
        let name = name.into();
        assert!(is_identifier(&name), "invalid atom name: {name:?}");
        for a in &args {
            assert!(is_identifier(a), "invalid atom argument: {a:?}");
        }
        Atom { name, args }
    }

    /// A zero-argument atom.
    pub fn prop(name: impl Into<String>) -> Atom {
        Atom::new(name, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

/// A propositional formula over ground atoms.
///
/// Subtrees are shared through `Arc`, so cloning is cheap and values can be
/// sent between threads freely.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(Atom),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Atom(Atom::prop(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    /// Conjunction of an iterator of formulas; the empty conjunction is ⊤.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::Top,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Disjunction of an iterator of formulas; the empty disjunction is ⊥.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::Bot,
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    /// All atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(x) => x.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True iff some atom in the formula satisfies `pred`.
    pub fn any_atom(&self, pred: &mut impl FnMut(&Atom) -> bool) -> bool {
        match self {
            Formula::Top | Formula::Bot => false,
            Formula::Atom(a) => pred(a),
            Formula::Not(x) => x.any_atom(pred),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.any_atom(pred) || b.any_atom(pred),
        }
    }

    /// Evaluates under a total assignment; atoms missing from `model` count
    /// as false.
    pub fn eval(&self, model: &BTreeMap<Atom, bool>) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(a) => *model.get(a).unwrap_or(&false),
            Formula::Not(x) => !x.eval(model),
            Formula::And(a, b) => a.eval(model) && b.eval(model),
            Formula::Or(a, b) => a.eval(model) || b.eval(model),
            Formula::Implies(a, b) => !a.eval(model) || b.eval(model),
            Formula::Iff(a, b) => a.eval(model) == b.eval(model),
        }
    }

    /// Replaces the given atoms by constants, leaving the rest untouched.
    pub fn assign(&self, values: &BTreeMap<Atom, bool>) -> Formula {
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Atom(a) => match values.get(a) {
                Some(true) => Formula::Top,
                Some(false) => Formula::Bot,
                None => self.clone(),
            },
            Formula::Not(x) => Formula::not(x.assign(values)),
            Formula::And(a, b) => Formula::and(a.assign(values), b.assign(values)),
            Formula::Or(a, b) => Formula::or(a.assign(values), b.assign(values)),
            Formula::Implies(a, b) => Formula::implies(a.assign(values), b.assign(values)),
            Formula::Iff(a, b) => Formula::iff(a.assign(values), b.assign(values)),
        }
    }

    /// Canonical form for syntactic comparison: associative chains of the
    /// commutative connectives are flattened, sorted and deduplicated.
    /// The result is logically equivalent to the input.
    pub fn canonicalize(&self) -> Formula {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => self.clone(),
            Formula::Not(x) => Formula::not(x.canonicalize()),
            Formula::And(_, _) => {
                let mut parts = BTreeSet::new();
                self.flatten(true, &mut parts);
                Formula::and_all(parts)
            }
            Formula::Or(_, _) => {
                let mut parts = BTreeSet::new();
                self.flatten(false, &mut parts);
                Formula::or_all(parts)
            }
            Formula::Implies(a, b) => Formula::implies(a.canonicalize(), b.canonicalize()),
            Formula::Iff(a, b) => {
                let (a, b) = (a.canonicalize(), b.canonicalize());
                if a <= b {
                    Formula::iff(a, b)
                } else {
                    Formula::iff(b, a)
                }
            }
        }
    }

    fn flatten(&self, conj: bool, out: &mut BTreeSet<Formula>) {
        match (conj, self) {
            (true, Formula::And(a, b)) | (false, Formula::Or(a, b)) => {
                a.flatten(conj, out);
                b.flatten(conj, out);
            }
            _ => {
                out.insert(self.canonicalize());
            }
        }
    }

    /// Syntactic equality modulo canonical ordering of commutative children.
    pub fn canonical_eq(&self, other: &Formula) -> bool {
        self.canonicalize() == other.canonicalize()
    }
}

// Precedence levels used by both the printer and the parser:
// Iff (1) < Implies (2) < Or (3) < And (4) < unary (5).
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(_, _) => 1,
        Formula::Implies(_, _) => 2,
        Formula::Or(_, _) => 3,
        Formula::And(_, _) => 4,
        _ => 5,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = precedence(f);
    let parens = p < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Top => write!(out, "true")?,
        Formula::Bot => write!(out, "false")?,
        Formula::Atom(a) => write!(out, "{a}")?,
        Formula::Not(x) => {
            write!(out, "!")?;
            write_at(x, 5, out)?;
        }
        // Left-associative: the right operand needs one level more.
        Formula::And(a, b) => {
            write_at(a, 4, out)?;
            write!(out, " & ")?;
            write_at(b, 5, out)?;
        }
        Formula::Or(a, b) => {
            write_at(a, 3, out)?;
            write!(out, " | ")?;
            write_at(b, 4, out)?;
        }
        // Right-associative: the left operand needs one level more.
        Formula::Implies(a, b) => {
            write_at(a, 3, out)?;
            write!(out, " -> ")?;
            write_at(b, 2, out)?;
        }
        Formula::Iff(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " <-> ")?;
            write_at(b, 1, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }

    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn atom_equality_is_componentwise() {
        let a = Atom::new("is_legal_action", vec!["a1".into()]);
        let b = Atom::new("is_legal_action", vec!["a1".into()]);
        let c = Atom::new("is_legal_action", vec!["a2".into()]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn canonicalize_sorts_commutative_children() {
        let f = Formula::and(q(), p());
        let g = Formula::and(p(), q());
        assert!(f.canonical_eq(&g));
        assert!(!f.canonical_eq(&Formula::or(p(), q())));
    }

    #[test]
    fn canonicalize_flattens_chains() {
        let left = Formula::and(Formula::and(p(), q()), Formula::prop("r"));
        let right = Formula::and(p(), Formula::and(q(), Formula::prop("r")));
        assert_eq!(left.canonicalize(), right.canonicalize());
    }

    #[test]
    fn display_uses_minimal_parens() {
        let f = Formula::and(
            Formula::not(p()),
            Formula::implies(q(), Formula::prop("r")),
        );
        assert_eq!(f.to_string(), "!p & (q -> r)");
        let g = Formula::or(Formula::and(p(), q()), Formula::prop("r"));
        assert_eq!(g.to_string(), "p & q | r");
    }

    #[test]
    fn eval_missing_atoms_default_false() {
        let f = Formula::or(p(), Formula::not(q()));
        let model = BTreeMap::new();
        assert!(f.eval(&model));
    }
}
