//! Complete satisfiability decision procedure: Tseitin encoding into an
//! integer clause form, then DPLL search with unit propagation.
//!
//! Auxiliary definition variables are confined to this backend; callers that
//! need CNF over the original atoms use `to_structural_cnf` instead.

use std::collections::HashMap;

use super::formula::{Atom, Formula};

/// DIMACS-style literal: variable index shifted left, low bit = sign.
type Lit = u32;

fn lit(var: u32, negated: bool) -> Lit {
    (var << 1) | negated as u32
}

fn var_of(l: Lit) -> u32 {
    l >> 1
}

fn is_neg(l: Lit) -> bool {
    l & 1 == 1
}

struct Encoder {
    atom_vars: HashMap<Atom, u32>,
    next_var: u32,
    clauses: Vec<Vec<Lit>>,
}

impl Encoder {
    fn new() -> Encoder {
        Encoder {
            atom_vars: HashMap::new(),
            next_var: 0,
            clauses: Vec::new(),
        }
    }

    fn fresh(&mut self) -> u32 {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn atom_var(&mut self, a: &Atom) -> u32 {
        if let Some(&v) = self.atom_vars.get(a) {
            return v;
        }
        let v = self.fresh();
        self.atom_vars.insert(a.clone(), v);
        v
    }

    // Returns a literal equivalent to `f`, adding defining clauses as needed.
    // `None` encodes ⊤/⊥ results that were simplified away.
    fn encode(&mut self, f: &Formula) -> Result<Lit, bool> {
        match f {
            Formula::Top => Err(true),
            Formula::Bot => Err(false),
            Formula::Atom(a) => Ok(lit(self.atom_var(a), false)),
            Formula::Not(x) => match self.encode(x) {
                Ok(l) => Ok(l ^ 1),
                Err(c) => Err(!c),
            },
            Formula::And(a, b) => {
                let (la, lb) = (self.encode(a), self.encode(b));
                match (la, lb) {
                    (Err(false), _) | (_, Err(false)) => Err(false),
                    (Err(true), other) | (other, Err(true)) => other,
                    (Ok(la), Ok(lb)) => {
                        let v = lit(self.fresh(), false);
                        // v <-> la & lb
                        self.clauses.push(vec![v ^ 1, la]);
                        self.clauses.push(vec![v ^ 1, lb]);
                        self.clauses.push(vec![v, la ^ 1, lb ^ 1]);
                        Ok(v)
                    }
                }
            }
            Formula::Or(a, b) => {
                let (la, lb) = (self.encode(a), self.encode(b));
                match (la, lb) {
                    (Err(true), _) | (_, Err(true)) => Err(true),
                    (Err(false), other) | (other, Err(false)) => other,
                    (Ok(la), Ok(lb)) => {
                        let v = lit(self.fresh(), false);
                        // v <-> la | lb
                        self.clauses.push(vec![v ^ 1, la, lb]);
                        self.clauses.push(vec![v, la ^ 1]);
                        self.clauses.push(vec![v, lb ^ 1]);
                        Ok(v)
                    }
                }
            }
            Formula::Implies(a, b) => {
                self.encode(&Formula::or(Formula::not(a.as_ref().clone()), b.as_ref().clone()))
            }
            Formula::Iff(a, b) => {
                let (la, lb) = (self.encode(a), self.encode(b));
                match (la, lb) {
                    (Err(ca), Err(cb)) => Err(ca == cb),
                    (Err(true), Ok(l)) | (Ok(l), Err(true)) => Ok(l),
                    (Err(false), Ok(l)) | (Ok(l), Err(false)) => Ok(l ^ 1),
                    (Ok(la), Ok(lb)) => {
                        let v = lit(self.fresh(), false);
                        // v <-> (la <-> lb)
                        self.clauses.push(vec![v ^ 1, la ^ 1, lb]);
                        self.clauses.push(vec![v ^ 1, la, lb ^ 1]);
                        self.clauses.push(vec![v, la, lb]);
                        self.clauses.push(vec![v, la ^ 1, lb ^ 1]);
                        Ok(v)
                    }
                }
            }
        }
    }
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    assignment: Vec<Option<bool>>,
}

impl Dpll {
    fn value(&self, l: Lit) -> Option<bool> {
        self.assignment[var_of(l) as usize].map(|v| v != is_neg(l))
    }

    // Unit propagation over the full clause list. Returns the trail extension
    // on success so the caller can undo it, or None on conflict.
    fn propagate(&mut self, trail: &mut Vec<u32>) -> bool {
        loop {
            let mut changed = false;
            for i in 0..self.clauses.len() {
                let mut unassigned = None;
                let mut satisfied = false;
                let mut unassigned_count = 0;
                for &l in &self.clauses[i] {
                    match self.value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            unassigned = Some(l);
                            unassigned_count += 1;
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match unassigned_count {
                    0 => return false,
                    1 => {
                        let l = unassigned.unwrap();
                        self.assignment[var_of(l) as usize] = Some(!is_neg(l));
                        trail.push(var_of(l));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn solve(&mut self) -> bool {
        let mut trail = Vec::new();
        if !self.propagate(&mut trail) {
            for v in trail {
                self.assignment[v as usize] = None;
            }
            return false;
        }
        let next = self.assignment.iter().position(|v| v.is_none());
        let result = match next {
            None => true,
            Some(var) => [true, false].iter().any(|&phase| {
                self.assignment[var] = Some(phase);
                let sat = self.solve();
                if !sat {
                    self.assignment[var] = None;
                }
                sat
            }),
        };
        if !result {
            for v in trail {
                self.assignment[v as usize] = None;
            }
        }
        result
    }
}

/// Decides satisfiability of an arbitrary formula.
pub fn satisfiable(f: &Formula) -> bool {
    let mut enc = Encoder::new();
    match enc.encode(f) {
        Err(c) => c,
        Ok(root) => {
            enc.clauses.push(vec![root]);
            let mut solver = Dpll {
                clauses: enc.clauses,
                assignment: vec![None; enc.next_var as usize],
            };
            solver.solve()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sat_and_unsat() {
        let p = Formula::prop("p");
        assert!(satisfiable(&p));
        assert!(!satisfiable(&Formula::and(p.clone(), Formula::not(p))));
        assert!(satisfiable(&Formula::Top));
        assert!(!satisfiable(&Formula::Bot));
    }

    #[test]
    fn iff_chain() {
        let p = Formula::prop("p");
        let q = Formula::prop("q");
        let f = Formula::and(
            Formula::iff(p.clone(), q.clone()),
            Formula::and(p, Formula::not(q)),
        );
        assert!(!satisfiable(&f));
    }
}
