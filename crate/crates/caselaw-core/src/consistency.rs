//! The four database consistency notions: case-wise, referential,
//! hierarchical and warrant consistency. Violations are accumulated, never
//! short-circuited, so a report is complete and deterministic.

use std::fmt;

use crate::logic::{Formula, Oracle};
use crate::model::{
    warranted_subcase_with, Case, CaseId, CaseLawDatabase, Connective, LeafLabel, NodePath,
    NodeRef, ProofNode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    CaseWise,
    Referential,
    Hierarchical,
    Warrant,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::CaseWise => "case-wise",
            ViolationKind::Referential => "referential",
            ViolationKind::Hierarchical => "hierarchical",
            ViolationKind::Warrant => "warrant",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub case_id: CaseId,
    pub node_path: Option<NodePath>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation in case {}", self.kind, self.case_id)?;
        if let Some(path) = &self.node_path {
            write!(f, " at node [{path}]")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Outcome of a consistency check; `ok()` iff no violation was found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ConsistencyReport) {
        self.violations.extend(other.violations);
    }

    fn push(
        &mut self,
        kind: ViolationKind,
        case_id: &CaseId,
        node_path: Option<NodePath>,
        detail: impl Into<String>,
    ) {
        self.violations.push(Violation {
            kind,
            case_id: case_id.clone(),
            node_path,
            detail: detail.into(),
        });
    }
}

/// Case consistency: the description is possible, it implies the collected
/// prerequisites, the facts do not contradict it, axiom leaves follow from
/// the description, and every inner node is entailed by its children.
pub fn check_case(case: &Case, kb_w: &Formula) -> ConsistencyReport {
    check_case_with(&Oracle::new(), case, kb_w)
}

pub fn check_case_with(oracle: &Oracle, case: &Case, kb_w: &Formula) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    let id = &case.id;
    if !case.tree.formula().canonical_eq(&case.df) {
        report.push(
            ViolationKind::CaseWise,
            id,
            Some(NodePath::root()),
            "root formula differs from the decision formula",
        );
    }
    let context = Formula::and(kb_w.clone(), case.case_desc.clone());
    let context_possible = oracle.satisfiable(&context);
    if !context_possible {
        report.push(
            ViolationKind::CaseWise,
            id,
            None,
            "world knowledge contradicts the case description",
        );
    }
    if !oracle.entails(&context, &case.prerequisites()) {
        report.push(
            ViolationKind::CaseWise,
            id,
            None,
            "description does not entail the prerequisites",
        );
    }
    // An impossible context also contradicts the facts; no second query needed.
    let facts_possible =
        context_possible && oracle.satisfiable(&Formula::and(context.clone(), case.facts()));
    if !facts_possible {
        report.push(
            ViolationKind::CaseWise,
            id,
            None,
            "facts contradict the case description",
        );
    }
    for (path, node) in case.tree.nodes() {
        match node {
            ProofNode::Leaf {
                label: LeafLabel::Axiom,
                fact,
                ..
            } => {
                if !oracle.entails(&context, fact) {
                    report.push(
                        ViolationKind::CaseWise,
                        id,
                        Some(path),
                        "axiom is not entailed by the description",
                    );
                }
            }
            ProofNode::Inner {
                connective,
                formula,
                children,
            } => {
                let combined = match connective {
                    Connective::And => {
                        Formula::and_all(children.iter().map(|c| c.formula().clone()))
                    }
                    Connective::Or => Formula::or_all(children.iter().map(|c| c.formula().clone())),
                };
                if !oracle.entails(&combined, formula) {
                    report.push(
                        ViolationKind::CaseWise,
                        id,
                        Some(path),
                        "inner node is not entailed by its children",
                    );
                }
            }
            _ => {}
        }
    }
    report
}

/// Correct case reference for one Ref leaf: the targeted subcase decides the
/// leaf's fact, is warranted for the citing case's unwarranted set, may be
/// cited, and its prerequisites follow from the leaf's.
pub fn check_reference(db: &CaseLawDatabase, case: &Case, leaf_path: &NodePath) -> ConsistencyReport {
    check_reference_with(&Oracle::new(), db, case, leaf_path)
}

pub fn check_reference_with(
    oracle: &Oracle,
    db: &CaseLawDatabase,
    case: &Case,
    leaf_path: &NodePath,
) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    let id = &case.id;
    let node = case.tree.node_at(leaf_path);
    let Some(ProofNode::Leaf {
        label: LeafLabel::Ref {
            target,
            target_path,
        },
        pre,
        fact,
    }) = node
    else {
        report.push(
            ViolationKind::Referential,
            id,
            Some(leaf_path.clone()),
            "node is not a Ref leaf",
        );
        return report;
    };
    let Some(target_case) = db.case(target) else {
        report.push(
            ViolationKind::Referential,
            id,
            Some(leaf_path.clone()),
            format!("reference to unknown case {target}"),
        );
        return report;
    };
    let subcase = match target_case.subcase(target_path) {
        Ok(s) => s,
        Err(_) => {
            report.push(
                ViolationKind::Referential,
                id,
                Some(leaf_path.clone()),
                format!("no node at path [{target_path}] in case {target}"),
            );
            return report;
        }
    };
    if !subcase.df.canonical_eq(fact) {
        report.push(
            ViolationKind::Referential,
            id,
            Some(leaf_path.clone()),
            format!("referenced subcase decides {} but the leaf states {fact}", subcase.df),
        );
    }
    if !warranted_subcase_with(oracle, &subcase, &db.unwarranted_of(id), &db.kb_w) {
        report.push(
            ViolationKind::Referential,
            id,
            Some(leaf_path.clone()),
            format!("referenced subcase of {target} is unwarranted for this case"),
        );
    }
    match db.may_ref(case, target_case) {
        Ok(true) => {}
        Ok(false) => {
            report.push(
                ViolationKind::Referential,
                id,
                Some(leaf_path.clone()),
                format!("case may not reference {target}"),
            );
        }
        Err(e) => {
            report.push(
                ViolationKind::Referential,
                id,
                Some(leaf_path.clone()),
                e.to_string(),
            );
        }
    }
    let premise = Formula::and(db.kb_w.clone(), pre.clone());
    if !oracle.entails(&premise, &subcase.prerequisites()) {
        report.push(
            ViolationKind::Referential,
            id,
            Some(leaf_path.clone()),
            "leaf prerequisites do not entail the prerequisites of the referenced subcase",
        );
    }
    report
}

/// Case conflict: compatible prerequisites, contradictory facts, and a
/// must-agree obligation from `c1` to `c2`. `c2` must be warranted with
/// respect to `U(c1)`; if it is not, there is no conflict.
pub fn in_conflict(db: &CaseLawDatabase, c1: &Case, c2: &Case) -> bool {
    in_conflict_with(&Oracle::new(), db, c1, c2)
}

pub fn in_conflict_with(oracle: &Oracle, db: &CaseLawDatabase, c1: &Case, c2: &Case) -> bool {
    if !db.must_agree(c1, c2).unwrap_or(false) {
        return false;
    }
    let pres = Formula::and(
        db.kb_w.clone(),
        Formula::and(c1.prerequisites(), c2.prerequisites()),
    );
    if !oracle.satisfiable(&pres) {
        return false;
    }
    let facts = Formula::and(db.kb_w.clone(), Formula::and(c1.facts(), c2.facts()));
    if oracle.satisfiable(&facts) {
        return false;
    }
    warranted_subcase_with(oracle, c2, &db.unwarranted_of(&c1.id), &db.kb_w)
}

/// Hierarchical consistency, checked along the time line: every case is
/// tested for conflicts against each earlier case, in both role orders.
pub fn check_hierarchical(db: &CaseLawDatabase) -> ConsistencyReport {
    check_hierarchical_with(&Oracle::new(), db)
}

pub fn check_hierarchical_with(oracle: &Oracle, db: &CaseLawDatabase) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    let cases = db.cases_by_time();
    for (j, later) in cases.iter().enumerate() {
        for earlier in &cases[..j] {
            if in_conflict_with(oracle, db, earlier, later)
                || in_conflict_with(oracle, db, later, earlier)
            {
                report.push(
                    ViolationKind::Hierarchical,
                    &later.id,
                    None,
                    format!("conflicts with earlier case {}", earlier.id),
                );
            }
        }
    }
    report
}

/// Warrant consistency: wherever a referenced subcase is unwarranted from
/// some case's point of view, that Ref node itself must be in the observer's
/// unwarranted set.
pub fn check_warrants(db: &CaseLawDatabase) -> ConsistencyReport {
    check_warrants_with(&Oracle::new(), db)
}

pub fn check_warrants_with(oracle: &Oracle, db: &CaseLawDatabase) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    for observer in db.cases_by_time() {
        let blocked = db.unwarranted_of(&observer.id);
        for case in db.cases_by_time() {
            for (path, node) in case.tree.leaves() {
                let ProofNode::Leaf {
                    label: LeafLabel::Ref {
                        target,
                        target_path,
                    },
                    ..
                } = node
                else {
                    continue;
                };
                let Some(subcase) = db
                    .case(target)
                    .and_then(|t| t.subcase(target_path).ok())
                else {
                    // Reported by the referential check.
                    continue;
                };
                if !warranted_subcase_with(oracle, &subcase, &blocked, &db.kb_w)
                    && !blocked.contains(&NodeRef::new(case.id.clone(), path.clone()))
                {
                    report.push(
                        ViolationKind::Warrant,
                        &observer.id,
                        Some(path.clone()),
                        format!(
                            "reference of case {} to {} is unwarranted here but not marked",
                            case.id, target
                        ),
                    );
                }
            }
        }
    }
    report
}

/// All four checks over the whole database.
pub fn check_db(db: &CaseLawDatabase) -> ConsistencyReport {
    check_db_with(&Oracle::new(), db)
}

pub fn check_db_with(oracle: &Oracle, db: &CaseLawDatabase) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    for case in db.cases_by_time() {
        report.merge(check_case_with(oracle, case, &db.kb_w));
    }
    for case in db.cases_by_time() {
        for (path, node) in case.tree.leaves() {
            if matches!(
                node,
                ProofNode::Leaf {
                    label: LeafLabel::Ref { .. },
                    ..
                }
            ) {
                report.merge(check_reference_with(oracle, db, case, &path));
            }
        }
    }
    report.merge(check_hierarchical_with(oracle, db));
    report.merge(check_warrants_with(oracle, db));
    report
}
