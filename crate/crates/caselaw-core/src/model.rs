//! Data model: cases, proof trees, subcases and case-law databases, with the
//! court hierarchy, time order, reference resolution and the unwarranted-node
//! map.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::logic::{Atom, Formula, Oracle};

/// Predicate reserved for privacy decisions.
pub const LEGAL_ACTION_PREDICATE: &str = "is_legal_action";
/// Court reserved for databases produced by the QBF reduction. It is the one
/// court exempt from reflexivity, which gives it an empty must-agree set.
pub const QBF_COURT_ID: &str = "__qbf_crt";
/// Atom-name prefix reserved for selector atoms of the switch encoding.
pub const CHOSEN_ATOM_PREFIX: &str = "__chosen_";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseId(pub String);

impl CaseId {
    pub fn new(id: impl Into<String>) -> CaseId {
        CaseId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CourtId(pub String);

impl CourtId {
    pub fn new(id: impl Into<String>) -> CourtId {
        CourtId(id.into())
    }
}

impl fmt::Display for CourtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sequence of child indices from the root; the empty path is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> NodePath {
        NodePath(Vec::new())
    }

    pub fn child(&self, index: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    pub fn join(&self, other: &NodePath) -> NodePath {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NodePath(v)
    }

    pub fn strip_prefix(&self, prefix: &NodePath) -> Option<NodePath> {
        if self.0.len() < prefix.0.len() || self.0[..prefix.0.len()] != prefix.0[..] {
            return None;
        }
        Some(NodePath(self.0[prefix.0.len()..].to_vec()))
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A node named by owning case and path, the stable identity used by the
/// unwarranted map and by supporting sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub case: CaseId,
    pub path: NodePath,
}

impl NodeRef {
    pub fn new(case: CaseId, path: NodePath) -> NodeRef {
        NodeRef { case, path }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.case, self.path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeafLabel {
    Axiom,
    Assess,
    Ref {
        target: CaseId,
        /// Path of the referenced subcase within the target case; the empty
        /// path references the target's root subcase.
        target_path: NodePath,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofNode {
    Inner {
        connective: Connective,
        formula: Formula,
        children: Vec<ProofNode>,
    },
    Leaf {
        label: LeafLabel,
        pre: Formula,
        fact: Formula,
    },
}

impl ProofNode {
    /// Axiom leaf; pre and fact are the same formula by definition.
    pub fn axiom(statement: Formula) -> ProofNode {
        ProofNode::Leaf {
            label: LeafLabel::Axiom,
            pre: statement.clone(),
            fact: statement,
        }
    }

    pub fn assess(pre: Formula, fact: Formula) -> ProofNode {
        ProofNode::Leaf {
            label: LeafLabel::Assess,
            pre,
            fact,
        }
    }

    pub fn reference(target: CaseId, target_path: NodePath, pre: Formula, fact: Formula) -> ProofNode {
        ProofNode::Leaf {
            label: LeafLabel::Ref {
                target,
                target_path,
            },
            pre,
            fact,
        }
    }

    pub fn inner(connective: Connective, formula: Formula, children: Vec<ProofNode>) -> ProofNode {
        assert!(!children.is_empty(), "inner nodes need at least one child");
        ProofNode::Inner {
            connective,
            formula,
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ProofNode::Leaf { .. })
    }

    /// The formula a node stands for: its annotation for inner nodes, the
    /// fact for leaves.
    pub fn formula(&self) -> &Formula {
        match self {
            ProofNode::Inner { formula, .. } => formula,
            ProofNode::Leaf { fact, .. } => fact,
        }
    }

    /// Aggregated prerequisites: leaf pre at leaves, disjunction below OR
    /// nodes, conjunction below AND nodes.
    pub fn prerequisites(&self) -> Formula {
        match self {
            ProofNode::Leaf { pre, .. } => pre.clone(),
            ProofNode::Inner {
                connective,
                children,
                ..
            } => {
                let parts = children.iter().map(ProofNode::prerequisites);
                match connective {
                    Connective::And => Formula::and_all(parts),
                    Connective::Or => Formula::or_all(parts),
                }
            }
        }
    }

    /// Aggregated facts, mirroring [`ProofNode::prerequisites`].
    pub fn facts(&self) -> Formula {
        match self {
            ProofNode::Leaf { fact, .. } => fact.clone(),
            ProofNode::Inner {
                connective,
                children,
                ..
            } => {
                let parts = children.iter().map(ProofNode::facts);
                match connective {
                    Connective::And => Formula::and_all(parts),
                    Connective::Or => Formula::or_all(parts),
                }
            }
        }
    }

    pub fn node_at(&self, path: &NodePath) -> Option<&ProofNode> {
        let mut node = self;
        for &i in &path.0 {
            match node {
                ProofNode::Inner { children, .. } => node = children.get(i)?,
                ProofNode::Leaf { .. } => return None,
            }
        }
        Some(node)
    }

    fn node_at_mut(&mut self, path: &NodePath) -> Option<&mut ProofNode> {
        let mut node = self;
        for &i in &path.0 {
            match node {
                ProofNode::Inner { children, .. } => node = children.get_mut(i)?,
                ProofNode::Leaf { .. } => return None,
            }
        }
        Some(node)
    }

    /// All nodes in preorder, each with its path.
    pub fn nodes(&self) -> Vec<(NodePath, &ProofNode)> {
        let mut out = Vec::new();
        self.walk(NodePath::root(), &mut out);
        out
    }

    fn walk<'a>(&'a self, path: NodePath, out: &mut Vec<(NodePath, &'a ProofNode)>) {
        out.push((path.clone(), self));
        if let ProofNode::Inner { children, .. } = self {
            for (i, child) in children.iter().enumerate() {
                child.walk(path.child(i), out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<(NodePath, &ProofNode)> {
        self.nodes()
            .into_iter()
            .filter(|(_, n)| n.is_leaf())
            .collect()
    }

    pub fn node_count(&self) -> usize {
        match self {
            ProofNode::Leaf { .. } => 1,
            ProofNode::Inner { children, .. } => {
                1 + children.iter().map(ProofNode::node_count).sum::<usize>()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub id: CaseId,
    pub df: Formula,
    pub case_desc: Formula,
    pub tree: ProofNode,
    pub court: CourtId,
    pub time: u64,
}

impl Case {
    pub fn new(
        id: impl Into<String>,
        df: Formula,
        case_desc: Formula,
        tree: ProofNode,
        court: impl Into<String>,
        time: u64,
    ) -> Case {
        Case {
            id: CaseId::new(id),
            df,
            case_desc,
            tree,
            court: CourtId::new(court),
            time,
        }
    }

    pub fn prerequisites(&self) -> Formula {
        self.tree.prerequisites()
    }

    pub fn facts(&self) -> Formula {
        self.tree.facts()
    }

    /// The subcase rooted at `path`: same description and court, decision
    /// formula taken from the node, and a synthesized id `<parent>#<path>`.
    /// `#` is excluded from user ids, so synthesized ids never collide.
    pub fn subcase(&self, path: &NodePath) -> Result<Case, ModelError> {
        let node = self.tree.node_at(path).ok_or_else(|| ModelError::InvalidPath {
            case: self.id.clone(),
            path: path.clone(),
        })?;
        let (base, base_path) = decompose_id(&self.id);
        let full_path = base_path.join(path);
        Ok(Case {
            id: synthesized_id(&base, &full_path),
            df: node.formula().clone(),
            case_desc: self.case_desc.clone(),
            tree: node.clone(),
            court: self.court.clone(),
            time: self.time,
        })
    }
}

fn synthesized_id(base: &CaseId, path: &NodePath) -> CaseId {
    CaseId::new(format!("{}#{}", base.0, path))
}

/// Splits a possibly synthesized id into its base id and subcase path.
fn decompose_id(id: &CaseId) -> (CaseId, NodePath) {
    match id.0.split_once('#') {
        None => (id.clone(), NodePath::root()),
        Some((base, path_str)) => {
            let indices = path_str
                .split('.')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().expect("synthesized id path"))
                .collect();
            (CaseId::new(base), NodePath(indices))
        }
    }
}

/// Finite set of courts partially ordered by seniority; `leq(a, b)` reads
/// "a is inferior to or the same as b".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourtHierarchy {
    courts: BTreeSet<CourtId>,
    leq: BTreeSet<(CourtId, CourtId)>,
}

impl CourtHierarchy {
    /// Builds a hierarchy from the given below-or-equal pairs. The relation
    /// is closed under reflexivity and transitivity; antisymmetry is
    /// validated. The reserved QBF court must not appear in any pair and is
    /// exempt from reflexive closure, which keeps its must-agree set empty.
    pub fn new(
        courts: BTreeSet<CourtId>,
        pairs: BTreeSet<(CourtId, CourtId)>,
    ) -> Result<CourtHierarchy, ModelError> {
        let mut leq = BTreeSet::new();
        for (lo, hi) in pairs {
            for c in [&lo, &hi] {
                if !courts.contains(c) {
                    return Err(ModelError::UnknownCourt { court: c.clone() });
                }
                if c.0 == QBF_COURT_ID {
                    return Err(ModelError::ReservedCourt { court: c.clone() });
                }
            }
            leq.insert((lo, hi));
        }
        for c in &courts {
            if c.0 != QBF_COURT_ID {
                leq.insert((c.clone(), c.clone()));
            }
        }
        // Transitive closure; the sets are small.
        loop {
            let mut added = Vec::new();
            for (a, b) in &leq {
                for (b2, c) in &leq {
                    if b == b2 && !leq.contains(&(a.clone(), c.clone())) {
                        added.push((a.clone(), c.clone()));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            leq.extend(added);
        }
        for (a, b) in &leq {
            if a != b && leq.contains(&(b.clone(), a.clone())) {
                return Err(ModelError::HierarchyCycle {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
        Ok(CourtHierarchy { courts, leq })
    }

    pub fn single(court: impl Into<String>) -> CourtHierarchy {
        let id = CourtId::new(court);
        CourtHierarchy::new(BTreeSet::from([id]), BTreeSet::new()).unwrap()
    }

    pub fn contains(&self, court: &CourtId) -> bool {
        self.courts.contains(court)
    }

    pub fn courts(&self) -> &BTreeSet<CourtId> {
        &self.courts
    }

    pub fn leq(&self, a: &CourtId, b: &CourtId) -> bool {
        self.leq.contains(&(a.clone(), b.clone()))
    }

    /// The non-reflexive pairs, for serialization.
    pub fn proper_pairs(&self) -> BTreeSet<(CourtId, CourtId)> {
        self.leq.iter().filter(|(a, b)| a != b).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown court {court}")]
    UnknownCourt { court: CourtId },
    #[error("unknown case {case}")]
    UnknownCase { case: CaseId },
    #[error("case {case} references unknown case {target}")]
    DanglingReference { case: CaseId, target: CaseId },
    #[error("case {case} references {target} which is not strictly earlier")]
    ReferenceNotEarlier { case: CaseId, target: CaseId },
    #[error("case {case} has no node at path {path}")]
    InvalidPath { case: CaseId, path: NodePath },
    #[error("duplicate case id {case}")]
    DuplicateCaseId { case: CaseId },
    #[error("duplicate timestamp {time} (cases {a} and {b})")]
    DuplicateTimestamp { time: u64, a: CaseId, b: CaseId },
    #[error("unwarranted entry {node} does not name an Assess or Ref leaf")]
    UnwarrantedNotAssessOrRef { node: NodeRef },
    #[error("unwarranted map is not monotone: {earlier} has entries missing from {later}")]
    NonMonotoneUnwarranted { earlier: CaseId, later: CaseId },
    #[error("court hierarchy has a cycle between {a} and {b}")]
    HierarchyCycle { a: CourtId, b: CourtId },
    #[error("court {court} is reserved and cannot appear in hierarchy pairs")]
    ReservedCourt { court: CourtId },
    #[error("axiom leaf at {case}:{path} must have pre equal to fact")]
    AxiomPreMismatch { case: CaseId, path: NodePath },
    #[error("case id {case} contains the reserved character '#'")]
    ReservedIdCharacter { case: CaseId },
}

/// A case-law database: world knowledge, cases with a total time order, the
/// court hierarchy and the unwarranted-node map. Values are immutable from
/// the reasoning modules' point of view; [`CaseLawDatabase::insert`] returns
/// a new database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseLawDatabase {
    pub kb_w: Formula,
    cases: BTreeMap<CaseId, Case>,
    hierarchy: CourtHierarchy,
    unwarranted: BTreeMap<CaseId, BTreeSet<NodeRef>>,
    pub actions: BTreeSet<String>,
}

impl CaseLawDatabase {
    pub fn new(kb_w: Formula, hierarchy: CourtHierarchy, actions: BTreeSet<String>) -> Self {
        CaseLawDatabase {
            kb_w,
            cases: BTreeMap::new(),
            hierarchy,
            unwarranted: BTreeMap::new(),
            actions,
        }
    }

    pub fn hierarchy(&self) -> &CourtHierarchy {
        &self.hierarchy
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn case(&self, id: &CaseId) -> Option<&Case> {
        self.cases.get(id)
    }

    pub fn cases(&self) -> impl Iterator<Item = &Case> {
        self.cases.values()
    }

    /// Cases sorted by the time order.
    pub fn cases_by_time(&self) -> Vec<&Case> {
        let mut v: Vec<&Case> = self.cases.values().collect();
        v.sort_by_key(|c| c.time);
        v
    }

    pub fn max_time(&self) -> Option<u64> {
        self.cases.values().map(|c| c.time).max()
    }

    /// U(C) for one observing case.
    pub fn unwarranted_of(&self, id: &CaseId) -> BTreeSet<NodeRef> {
        self.unwarranted.get(id).cloned().unwrap_or_default()
    }

    /// U(DB): the union over all observers.
    pub fn unwarranted_union(&self) -> BTreeSet<NodeRef> {
        self.unwarranted.values().flatten().cloned().collect()
    }

    pub fn unwarranted_map(&self) -> &BTreeMap<CaseId, BTreeSet<NodeRef>> {
        &self.unwarranted
    }

    /// Adds a case with its given id and timestamp, validating uniqueness,
    /// court membership and reference resolution.
    pub fn add_case(&mut self, case: Case) -> Result<(), ModelError> {
        if case.id.0.contains('#') {
            return Err(ModelError::ReservedIdCharacter { case: case.id });
        }
        if self.cases.contains_key(&case.id) {
            return Err(ModelError::DuplicateCaseId { case: case.id });
        }
        if let Some(other) = self.cases.values().find(|c| c.time == case.time) {
            return Err(ModelError::DuplicateTimestamp {
                time: case.time,
                a: other.id.clone(),
                b: case.id,
            });
        }
        if !self.hierarchy.contains(&case.court) {
            return Err(ModelError::UnknownCourt {
                court: case.court,
            });
        }
        self.check_references(&case)?;
        self.cases.insert(case.id.clone(), case);
        Ok(())
    }

    fn check_references(&self, case: &Case) -> Result<(), ModelError> {
        for (_, node) in case.tree.leaves() {
            if let ProofNode::Leaf {
                label: LeafLabel::Ref { target, .. },
                ..
            } = node
            {
                match self.cases.get(target) {
                    None => {
                        return Err(ModelError::DanglingReference {
                            case: case.id.clone(),
                            target: target.clone(),
                        })
                    }
                    Some(t) if t.time >= case.time => {
                        return Err(ModelError::ReferenceNotEarlier {
                            case: case.id.clone(),
                            target: target.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Marks a node as unwarranted for every case at or after `mark_time`.
    /// Monotonicity of U holds by construction.
    pub fn mark_unwarranted(&mut self, target: NodeRef, mark_time: u64) -> Result<(), ModelError> {
        self.check_unwarranted_target(&target)?;
        let observers: Vec<CaseId> = self
            .cases
            .values()
            .filter(|c| c.time >= mark_time)
            .map(|c| c.id.clone())
            .collect();
        for o in observers {
            self.unwarranted.entry(o).or_default().insert(target.clone());
        }
        Ok(())
    }

    /// Adds an unwarranted entry for a single observer. Monotonicity is not
    /// enforced here; [`CaseLawDatabase::validate`] reports violations.
    pub fn add_unwarranted_entry(
        &mut self,
        observer: CaseId,
        target: NodeRef,
    ) -> Result<(), ModelError> {
        if !self.cases.contains_key(&observer) {
            return Err(ModelError::UnknownCase { case: observer });
        }
        self.check_unwarranted_target(&target)?;
        self.unwarranted.entry(observer).or_default().insert(target);
        Ok(())
    }

    fn check_unwarranted_target(&self, target: &NodeRef) -> Result<(), ModelError> {
        let case = self
            .cases
            .get(&target.case)
            .ok_or_else(|| ModelError::UnknownCase {
                case: target.case.clone(),
            })?;
        match case.tree.node_at(&target.path) {
            None => Err(ModelError::InvalidPath {
                case: target.case.clone(),
                path: target.path.clone(),
            }),
            Some(ProofNode::Leaf {
                label: LeafLabel::Assess | LeafLabel::Ref { .. },
                ..
            }) => Ok(()),
            Some(_) => Err(ModelError::UnwarrantedNotAssessOrRef {
                node: target.clone(),
            }),
        }
    }

    /// Checks every structural database invariant: distinct timestamps,
    /// resolvable strictly-earlier references, axiom leaves with pre = fact,
    /// known courts, and a monotone unwarranted map over Assess/Ref leaves.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen_times: BTreeMap<u64, &CaseId> = BTreeMap::new();
        for case in self.cases.values() {
            if let Some(prev) = seen_times.insert(case.time, &case.id) {
                return Err(ModelError::DuplicateTimestamp {
                    time: case.time,
                    a: prev.clone(),
                    b: case.id.clone(),
                });
            }
            if !self.hierarchy.contains(&case.court) {
                return Err(ModelError::UnknownCourt {
                    court: case.court.clone(),
                });
            }
            self.check_references(case)?;
            for (path, node) in case.tree.leaves() {
                if let ProofNode::Leaf {
                    label: LeafLabel::Axiom,
                    pre,
                    fact,
                } = node
                {
                    if pre != fact {
                        return Err(ModelError::AxiomPreMismatch {
                            case: case.id.clone(),
                            path,
                        });
                    }
                }
            }
        }
        for (observer, targets) in &self.unwarranted {
            if !self.cases.contains_key(observer) {
                return Err(ModelError::UnknownCase {
                    case: observer.clone(),
                });
            }
            for t in targets {
                self.check_unwarranted_target(t)?;
            }
        }
        // U monotone along the time order.
        let by_time = self.cases_by_time();
        for pair in by_time.windows(2) {
            let earlier = self.unwarranted_of(&pair[0].id);
            let later = self.unwarranted_of(&pair[1].id);
            if !earlier.is_subset(&later) {
                return Err(ModelError::NonMonotoneUnwarranted {
                    earlier: pair[0].id.clone(),
                    later: pair[1].id.clone(),
                });
            }
        }
        Ok(())
    }

    /// Appends a case at the end of the timeline: fresh timestamp, fresh id
    /// on collision, and U(new) set to U(DB). The must-agree and may-ref
    /// relations extend automatically because they are computed from court
    /// and time.
    pub fn insert(&self, mut case: Case) -> Result<CaseLawDatabase, ModelError> {
        if !self.hierarchy.contains(&case.court) {
            return Err(ModelError::UnknownCourt { court: case.court });
        }
        case.time = self.max_time().map_or(0, |t| t + 1);
        let mut id = case.id.clone();
        let mut counter = 1;
        while self.cases.contains_key(&id) {
            counter += 1;
            id = CaseId::new(format!("{}_{counter}", case.id.0));
        }
        case.id = id;
        self.check_references(&case)?;
        let mut db = self.clone();
        let inherited = db.unwarranted_union();
        if !inherited.is_empty() {
            db.unwarranted.insert(case.id.clone(), inherited);
        }
        db.cases.insert(case.id.clone(), case);
        Ok(db)
    }

    /// Replaces a case in place (same id, same timestamp); used by the
    /// normal-form transformation.
    pub fn replace_case(&self, case: Case) -> Result<CaseLawDatabase, ModelError> {
        let old = self.cases.get(&case.id).ok_or_else(|| ModelError::UnknownCase {
            case: case.id.clone(),
        })?;
        let mut db = self.clone();
        let mut case = case;
        case.time = old.time;
        db.cases.insert(case.id.clone(), case);
        db.validate()?;
        Ok(db)
    }

    /// Must-agree, computed from court and time only: the later case, sitting
    /// at a court inferior or equal to the earlier case's court, is bound by
    /// it. Reflexive court comparison makes two decisions of the same court
    /// bind each other along the timeline.
    pub fn must_agree(&self, c1: &Case, c2: &Case) -> Result<bool, ModelError> {
        for c in [c1, c2] {
            if !self.hierarchy.contains(&c.court) {
                return Err(ModelError::UnknownCourt {
                    court: c.court.clone(),
                });
            }
        }
        Ok(c1.time <= c2.time && self.hierarchy.leq(&c2.court, &c1.court))
    }

    /// May-ref: any court may cite any earlier case.
    pub fn may_ref(&self, citing: &Case, cited: &Case) -> Result<bool, ModelError> {
        for c in [citing, cited] {
            if !self.hierarchy.contains(&c.court) {
                return Err(ModelError::UnknownCourt {
                    court: c.court.clone(),
                });
            }
        }
        Ok(cited.time <= citing.time)
    }
}

/// Whether the case decides the legality of an action: df is a positive or
/// negated `is_legal_action` atom over a known action, and the reserved
/// predicate appears in neither the world knowledge nor the case description.
pub fn is_privacy_case(case: &Case, db: &CaseLawDatabase) -> bool {
    let Some((_, action)) = decision_action(&case.df) else {
        return false;
    };
    if !db.actions.contains(action) {
        return false;
    }
    let mut uses_reserved = |a: &Atom| a.name() == LEGAL_ACTION_PREDICATE;
    !db.kb_w.any_atom(&mut uses_reserved) && !case.case_desc.any_atom(&mut uses_reserved)
}

/// Decomposes `is_legal_action(a)` or `!is_legal_action(a)`; returns the
/// polarity and the action constant.
pub fn decision_action(df: &Formula) -> Option<(bool, &str)> {
    match df {
        Formula::Atom(a) if a.name() == LEGAL_ACTION_PREDICATE && a.args().len() == 1 => {
            Some((true, &a.args()[0]))
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) if a.name() == LEGAL_ACTION_PREDICATE && a.args().len() == 1 => {
                Some((false, &a.args()[0]))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Decides whether a (sub)case stays consistent when the prerequisites of
/// every blocked leaf are replaced by ⊥. Blocked nodes are named in the
/// coordinates of the database (original case id and full path) and are
/// translated into the subcase's own tree.
pub fn warranted_subcase(case: &Case, blocked: &BTreeSet<NodeRef>, kb_w: &Formula) -> bool {
    warranted_subcase_with(&Oracle::new(), case, blocked, kb_w)
}

pub fn warranted_subcase_with(
    oracle: &Oracle,
    case: &Case,
    blocked: &BTreeSet<NodeRef>,
    kb_w: &Formula,
) -> bool {
    let (base, base_path) = decompose_id(&case.id);
    let mut tree = case.tree.clone();
    let mut changed = false;
    for entry in blocked {
        if entry.case != base {
            continue;
        }
        let Some(local) = entry.path.strip_prefix(&base_path) else {
            continue;
        };
        if let Some(node) = tree.node_at_mut(&local) {
            if let ProofNode::Leaf {
                label: LeafLabel::Assess | LeafLabel::Ref { .. },
                pre,
                ..
            } = node
            {
                *pre = Formula::Bot;
                changed = true;
            }
        }
    }
    if !changed {
        return crate::consistency::check_case_with(oracle, case, kb_w).ok();
    }
    let modified = Case {
        tree,
        ..case.clone()
    };
    crate::consistency::check_case_with(oracle, &modified, kb_w).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn leaf_case(id: &str, df: &str, court: &str, time: u64) -> Case {
        Case::new(
            id,
            f(df),
            Formula::Top,
            ProofNode::assess(Formula::Top, f(df)),
            court,
            time,
        )
    }

    fn two_court_db() -> CaseLawDatabase {
        let hierarchy = CourtHierarchy::new(
            BTreeSet::from([CourtId::new("low"), CourtId::new("high")]),
            BTreeSet::from([(CourtId::new("low"), CourtId::new("high"))]),
        )
        .unwrap();
        CaseLawDatabase::new(Formula::Top, hierarchy, BTreeSet::new())
    }

    #[test]
    fn prerequisites_of_leaf_and_inner_nodes() {
        let leaf = ProofNode::assess(f("p"), f("q"));
        assert_eq!(leaf.prerequisites(), f("p"));
        assert_eq!(leaf.facts(), f("q"));

        let and_node = ProofNode::inner(
            Connective::And,
            f("x & y"),
            vec![ProofNode::assess(f("p"), f("x")), ProofNode::assess(f("q"), f("y"))],
        );
        assert_eq!(and_node.prerequisites(), f("p & q"));
        assert_eq!(and_node.facts(), f("x & y"));

        let or_node = ProofNode::inner(
            Connective::Or,
            f("x | y"),
            vec![ProofNode::assess(f("p"), f("x")), ProofNode::assess(f("q"), f("y"))],
        );
        assert_eq!(or_node.prerequisites(), f("p | q"));
        assert_eq!(or_node.facts(), f("x | y"));
    }

    #[test]
    fn facts_mirror_prerequisites_on_label_swap() {
        // Swapping each leaf's fact for its pre turns facts() into
        // prerequisites().
        let tree = ProofNode::inner(
            Connective::Or,
            f("a | b"),
            vec![
                ProofNode::assess(f("p1"), f("a")),
                ProofNode::inner(
                    Connective::And,
                    f("b"),
                    vec![ProofNode::assess(f("p2"), f("b")), ProofNode::axiom(f("w"))],
                ),
            ],
        );
        fn swap(node: &ProofNode) -> ProofNode {
            match node {
                ProofNode::Leaf { label, pre, .. } => ProofNode::Leaf {
                    label: label.clone(),
                    pre: pre.clone(),
                    fact: pre.clone(),
                },
                ProofNode::Inner {
                    connective,
                    formula,
                    children,
                } => ProofNode::Inner {
                    connective: *connective,
                    formula: formula.clone(),
                    children: children.iter().map(swap).collect(),
                },
            }
        }
        assert_eq!(swap(&tree).facts(), tree.prerequisites());
    }

    #[test]
    fn subcase_of_root_keeps_tree() {
        let case = leaf_case("C1", "p", "low", 0);
        let sub = case.subcase(&NodePath::root()).unwrap();
        assert_eq!(sub.tree, case.tree);
        assert_eq!(sub.df, f("p"));
        assert_eq!(sub.id.as_str(), "C1#");
    }

    #[test]
    fn subcase_of_inner_node() {
        let inner = ProofNode::inner(
            Connective::And,
            f("x & y"),
            vec![ProofNode::assess(f("p"), f("x")), ProofNode::assess(f("q"), f("y"))],
        );
        let case = Case::new("C1", f("d"), Formula::Top, ProofNode::inner(
            Connective::And,
            f("d"),
            vec![inner],
        ), "low", 0);
        let sub = case.subcase(&NodePath(vec![0])).unwrap();
        assert_eq!(sub.df, f("x & y"));
        assert_eq!(sub.id.as_str(), "C1#0");
        let leaf_sub = case.subcase(&NodePath(vec![0, 1])).unwrap();
        assert_eq!(leaf_sub.df, f("y"));
        assert!(case.subcase(&NodePath(vec![3])).is_err());

        // Nested extraction composes paths against the original case.
        let nested = sub.subcase(&NodePath(vec![1])).unwrap();
        assert_eq!(nested.id.as_str(), "C1#0.1");
        assert_eq!(nested.df, f("y"));
    }

    #[test]
    fn privacy_case_shapes() {
        let mut db = two_court_db();
        db.actions.insert("a1".into());
        let pos = leaf_case("C1", "is_legal_action(a1)", "low", 0);
        let neg = leaf_case("C2", "!is_legal_action(a1)", "low", 1);
        let plain = leaf_case("C3", "p", "low", 2);
        assert!(is_privacy_case(&pos, &db));
        assert!(is_privacy_case(&neg, &db));
        assert!(!is_privacy_case(&plain, &db));

        // Unknown action.
        let other = leaf_case("C4", "is_legal_action(zz)", "low", 3);
        assert!(!is_privacy_case(&other, &db));

        // Reserved predicate leaking into the description.
        let mut tainted = pos.clone();
        tainted.case_desc = f("is_legal_action(a1)");
        assert!(!is_privacy_case(&tainted, &db));
    }

    #[test]
    fn must_agree_and_may_ref() {
        let db = two_court_db();
        let low_early = leaf_case("A", "p", "low", 0);
        let high_late = leaf_case("B", "q", "high", 1);
        // The later inferior case is bound by the earlier superior one.
        let high_early = leaf_case("C", "p", "high", 0);
        let low_late = leaf_case("D", "q", "low", 1);
        assert!(db.must_agree(&high_early, &low_late).unwrap());
        // A superior court is not bound by an earlier inferior decision.
        assert!(!db.must_agree(&low_early, &high_late).unwrap());
        // Time order is required.
        assert!(!db.must_agree(&low_late, &high_early).unwrap());
        // Same court binds itself.
        let low_late2 = leaf_case("E", "r", "low", 2);
        assert!(db.must_agree(&low_early, &low_late2).unwrap());

        assert!(db.may_ref(&high_late, &low_early).unwrap());
        assert!(!db.may_ref(&low_early, &high_late).unwrap());

        // must_agree implies the may-ref orientation along the timeline.
        assert!(db.may_ref(&low_late, &high_early).unwrap());

        let stranger = leaf_case("S", "p", "elsewhere", 9);
        assert!(db.must_agree(&low_early, &stranger).is_err());
    }

    #[test]
    fn insert_appends_at_end_of_timeline() {
        let db = two_court_db();
        let db = db.insert(leaf_case("A", "p", "low", 77)).unwrap();
        assert_eq!(db.case(&CaseId::new("A")).unwrap().time, 0);
        let db = db.insert(leaf_case("B", "q", "low", 0)).unwrap();
        assert_eq!(db.case(&CaseId::new("B")).unwrap().time, 1);
        // Colliding id gets freshened.
        let db = db.insert(leaf_case("A", "r", "low", 0)).unwrap();
        assert_eq!(db.len(), 3);
        assert!(db.case(&CaseId::new("A_2")).is_some());
        db.validate().unwrap();
    }

    #[test]
    fn insert_rejects_unknown_court_and_dangling_ref() {
        let db = two_court_db();
        let bad_court = leaf_case("A", "p", "nowhere", 0);
        assert!(matches!(
            db.insert(bad_court),
            Err(ModelError::UnknownCourt { .. })
        ));
        let dangling = Case::new(
            "B",
            f("p"),
            Formula::Top,
            ProofNode::reference(CaseId::new("missing"), NodePath::root(), Formula::Top, f("p")),
            "low",
            0,
        );
        assert!(matches!(
            db.insert(dangling),
            Err(ModelError::DanglingReference { .. })
        ));
    }

    #[test]
    fn inserted_case_may_ref_latest_prior() {
        let db = two_court_db();
        let db = db.insert(leaf_case("A", "p", "low", 0)).unwrap();
        let referencing = Case::new(
            "B",
            f("p"),
            Formula::Top,
            ProofNode::reference(CaseId::new("A"), NodePath::root(), Formula::Top, f("p")),
            "low",
            0,
        );
        let db = db.insert(referencing).unwrap();
        let a = db.case(&CaseId::new("A")).unwrap();
        let b = db.case(&CaseId::new("B")).unwrap();
        assert!(db.may_ref(b, a).unwrap());
    }

    #[test]
    fn unwarranted_marks_are_monotone() {
        let mut db = two_court_db();
        db.add_case(leaf_case("A", "p", "low", 0)).unwrap();
        db.add_case(leaf_case("B", "q", "low", 1)).unwrap();
        db.add_case(leaf_case("C", "r", "low", 2)).unwrap();
        let target = NodeRef::new(CaseId::new("A"), NodePath::root());
        db.mark_unwarranted(target.clone(), 1).unwrap();
        assert!(db.unwarranted_of(&CaseId::new("A")).is_empty());
        assert!(db.unwarranted_of(&CaseId::new("B")).contains(&target));
        assert!(db.unwarranted_of(&CaseId::new("C")).contains(&target));
        db.validate().unwrap();

        // Inserting keeps monotonicity: the new case inherits U(DB).
        let db2 = db.insert(leaf_case("D", "s", "low", 0)).unwrap();
        assert!(db2.unwarranted_of(&CaseId::new("D")).contains(&target));
        db2.validate().unwrap();

        // An observer-specific entry on an early case breaks monotonicity.
        let mut bad = db.clone();
        bad.add_unwarranted_entry(CaseId::new("A"), target.clone())
            .unwrap();
        assert!(matches!(
            bad.validate(),
            Err(ModelError::NonMonotoneUnwarranted { .. })
        ));
    }

    #[test]
    fn validate_rejects_marks_on_inner_or_axiom_nodes() {
        let mut db = two_court_db();
        db.add_case(Case::new(
            "A",
            f("w"),
            Formula::Top,
            ProofNode::axiom(f("w")),
            "low",
            0,
        ))
        .unwrap();
        let err = db.mark_unwarranted(NodeRef::new(CaseId::new("A"), NodePath::root()), 0);
        assert!(matches!(err, Err(ModelError::UnwarrantedNotAssessOrRef { .. })));
    }

    #[test]
    fn warranted_subcase_blocks_prerequisites() {
        let db = two_court_db();
        let case = leaf_case("A", "p", "low", 0);
        // No blocked nodes: the consistent case stays warranted.
        assert!(warranted_subcase(&case, &BTreeSet::new(), &db.kb_w));
        // Blocking its only assessment forces pres to ⊥.
        let blocked = BTreeSet::from([NodeRef::new(CaseId::new("A"), NodePath::root())]);
        assert!(!warranted_subcase(&case, &blocked, &db.kb_w));
        // Blocked nodes elsewhere leave the result unchanged.
        let elsewhere = BTreeSet::from([NodeRef::new(CaseId::new("Z"), NodePath::root())]);
        assert!(warranted_subcase(&case, &elsewhere, &db.kb_w));
    }

    #[test]
    fn hierarchy_closure_and_cycles() {
        let a = CourtId::new("a");
        let b = CourtId::new("b");
        let c = CourtId::new("c");
        let h = CourtHierarchy::new(
            BTreeSet::from([a.clone(), b.clone(), c.clone()]),
            BTreeSet::from([(a.clone(), b.clone()), (b.clone(), c.clone())]),
        )
        .unwrap();
        assert!(h.leq(&a, &c));
        assert!(h.leq(&a, &a));
        assert!(!h.leq(&c, &a));

        let cycle = CourtHierarchy::new(
            BTreeSet::from([a.clone(), b.clone()]),
            BTreeSet::from([(a.clone(), b.clone()), (b.clone(), a.clone())]),
        );
        assert!(matches!(cycle, Err(ModelError::HierarchyCycle { .. })));
    }
}
