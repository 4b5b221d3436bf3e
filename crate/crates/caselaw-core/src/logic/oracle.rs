use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use super::formula::Formula;
use super::sat;

/// Entailment oracle with a result cache and a decision counter.
///
/// Queries are keyed by the canonical form of the formula, so the two
/// symmetric orientations of a conjunction count as one decision. The
/// counter tracks cache misses, i.e. the satisfiability problems actually
/// decided, and is safe to read from any thread.
#[derive(Debug, Default)]
pub struct Oracle {
    cache: Mutex<HashMap<Formula, bool>>,
    decided: AtomicU64,
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle::default()
    }

    /// Number of satisfiability decisions computed so far.
    pub fn decisions(&self) -> u64 {
        self.decided.load(Ordering::Relaxed)
    }

    pub fn satisfiable(&self, f: &Formula) -> bool {
        let key = f.canonicalize();
        if let Some(&hit) = self.cache.lock().unwrap().get(&key) {
            return hit;
        }
        let result = sat::satisfiable(&key);
        self.decided.fetch_add(1, Ordering::Relaxed);
        self.cache.lock().unwrap().insert(key, result);
        result
    }

    /// Classical entailment: `premise ∧ ¬conclusion` is unsatisfiable.
    pub fn entails(&self, premise: &Formula, conclusion: &Formula) -> bool {
        !self.satisfiable(&Formula::and(
            premise.clone(),
            Formula::not(conclusion.clone()),
        ))
    }

    /// Whether `f` entails ⊥.
    pub fn is_inconsistent(&self, f: &Formula) -> bool {
        !self.satisfiable(f)
    }
}

/// One-shot entailment check.
pub fn entails(premise: &Formula, conclusion: &Formula) -> bool {
    !sat::satisfiable(&Formula::and(
        premise.clone(),
        Formula::not(conclusion.clone()),
    ))
}

/// One-shot unsatisfiability check; equals `entails(f, ⊥)`.
pub fn is_inconsistent(f: &Formula) -> bool {
    !sat::satisfiable(f)
}

/// One-shot satisfiability check.
pub fn satisfiable(f: &Formula) -> bool {
    sat::satisfiable(f)
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
    fn modus_ponens() {
        let premise = Formula::and(p(), Formula::implies(p(), q()));
        assert!(entails(&premise, &q()));
    }

    #[test]
    fn disjunction_introduction() {
        assert!(entails(&p(), &Formula::or(p(), q())));
    }

    #[test]
    fn countermodel() {
        assert!(!entails(&p(), &q()));
    }

    #[test]
    fn inconsistency() {
        assert!(is_inconsistent(&Formula::and(p(), Formula::not(p()))));
        assert!(!is_inconsistent(&Formula::Top));
        // A & (A -> B) & (B -> !A) has no model: A forces B forces !A.
        let a = Formula::prop("A");
        let b = Formula::prop("B");
        let f = Formula::and(
            a.clone(),
            Formula::and(
                Formula::implies(a.clone(), b.clone()),
                Formula::implies(b, Formula::not(a)),
            ),
        );
        assert!(is_inconsistent(&f));
        assert_eq!(is_inconsistent(&f), entails(&f, &Formula::Bot));
    }

    #[test]
    fn oracle_counts_distinct_queries_once() {
        let oracle = Oracle::new();
        let f = Formula::and(p(), q());
        let g = Formula::and(q(), p());
        assert!(oracle.satisfiable(&f));
        assert!(oracle.satisfiable(&g));
        assert_eq!(oracle.decisions(), 1);
    }
}
