//! Twist classes and the isomorphism decision.
//!
//! Twist classes are explored breadth-first on canonical forms. Every tree
//! edge stores the move in the parent's canonical names together with the
//! isomorphism from the twisted parent onto the child's canonical copy, so
//! any path can be replayed in the names of the original input.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{canonical_form, find_isomorphism, DiagramIso};
use crate::classify::{a3, b3, h3, has_subdiagram_of_type};
use crate::diagram::CoxeterMatrix;
use crate::moves::{admissible_pairs, apply_record, apply_twist, reduced_reduction, MoveError, MoveOptions, MoveRecord};

/// Default bound on the number of diagrams visited.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub parent: usize,
    /// The twist, in the parent's canonical names.
    pub record: MoveRecord,
    /// From the twisted parent onto the child's canonical copy.
    pub iso: DiagramIso,
}

/// Breadth-first search tree over canonical diagrams.
#[derive(Clone, Debug)]
struct Tree {
    members: Vec<CoxeterMatrix>,
    index: HashMap<CoxeterMatrix, usize>,
    tree: Vec<Option<TreeEdge>>,
    edges: Vec<(usize, usize, MoveRecord)>,
    next: usize,
}

impl Tree {
    fn new(root: CoxeterMatrix) -> Tree {
        Tree {
            index: HashMap::from([(root.clone(), 0)]),
            members: vec![root],
            tree: vec![None],
            edges: Vec::new(),
            next: 0,
        }
    }

    fn closed(&self) -> bool {
        self.next == self.members.len()
    }

    /// Expands the next unexpanded member. New members are reported through
    /// `on_new`; expansion stops early when it returns `false` or when
    /// `room` runs out (the member is then left for a later call).
    fn expand_next(
        &mut self,
        opts: &MoveOptions,
        room: &mut usize,
        mut on_new: impl FnMut(usize, &CoxeterMatrix) -> bool,
    ) -> Result<bool, MoveError> {
        let i = self.next;
        let parent = self.members[i].clone();
        for pair in admissible_pairs(&parent, opts.rank_cap)? {
            let (out, record) = apply_twist(&parent, &pair, opts)?;
            let (canon, iso) = canonical_form(&out);
            if let Some(&c) = self.index.get(&canon) {
                self.edges.push((i, c, record));
                continue;
            }
            if *room == 0 {
                return Ok(false);
            }
            *room -= 1;
            let c = self.members.len();
            self.index.insert(canon.clone(), c);
            self.members.push(canon);
            self.tree.push(Some(TreeEdge { parent: i, record: record.clone(), iso }));
            self.edges.push((i, c, record));
            if !on_new(c, &self.members[c]) {
                return Ok(false);
            }
        }
        self.next += 1;
        Ok(true)
    }

    /// Tree edges from the root down to `i`, as child indices.
    fn path(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(e) = &self.tree[i] {
            out.push(i);
            i = e.parent;
        }
        out.reverse();
        out
    }
}

/// A diagram in the original input's names, tracked along a path of moves
/// together with the isomorphism onto the current canonical copy.
struct Walker<'a> {
    diagram: CoxeterMatrix,
    to_canon: DiagramIso,
    moves: Vec<MoveRecord>,
    opts: &'a MoveOptions,
}

impl Walker<'_> {
    fn step(&mut self, record_in_canon: &MoveRecord, canon_to_next: &DiagramIso) -> Result<(), MoveError> {
        let rec = record_in_canon.renamed(&self.to_canon.inverse());
        self.diagram = apply_record(&self.diagram, &rec, self.opts)?;
        self.to_canon = self
            .to_canon
            .then(canon_to_next)
            .ok_or_else(|| MoveError::ReplayMismatch("isomorphism chain broke".into()))?;
        self.moves.push(rec);
        Ok(())
    }

    /// Down a tree edge, from parent to child.
    fn forward(&mut self, e: &TreeEdge) -> Result<(), MoveError> {
        self.step(&e.record, &e.iso)
    }

    /// Up a tree edge, from child to parent: twists are involutive, so the
    /// same pair (transported to the child) leads back.
    fn backward(&mut self, e: &TreeEdge) -> Result<(), MoveError> {
        self.step(&e.record.renamed(&e.iso), &e.iso.inverse())
    }
}

/// Closure of one or more seeds under twists, up to isomorphism.
#[derive(Clone, Debug)]
pub struct TwistClass {
    pub seeds: Vec<CoxeterMatrix>,
    /// Canonical copies, in discovery order; member 0 is the seed's.
    pub members: Vec<CoxeterMatrix>,
    /// Tree edge leading to each member (`None` for the root).
    pub tree: Vec<Option<TreeEdge>>,
    /// Every discovered twist between members, including non-tree edges.
    pub edges: Vec<(usize, usize, MoveRecord)>,
    /// Seed onto member 0.
    pub seed_iso: DiagramIso,
    pub truncated: bool,
    index: HashMap<CoxeterMatrix, usize>,
}

pub fn twist_class(m: &CoxeterMatrix, cap: usize, opts: &MoveOptions) -> Result<TwistClass, MoveError> {
    let (root, seed_iso) = canonical_form(m);
    let mut t = Tree::new(root);
    let mut room = cap.saturating_sub(1);
    let mut truncated = false;
    while !t.closed() {
        if !t.expand_next(opts, &mut room, |_, _| true)? {
            truncated = true;
            break;
        }
    }
    Ok(TwistClass {
        seeds: vec![m.clone()],
        members: t.members,
        tree: t.tree,
        edges: t.edges,
        seed_iso,
        truncated,
        index: t.index,
    })
}

impl TwistClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member index of a diagram isomorphic to `m`.
    pub fn position(&self, m: &CoxeterMatrix) -> Option<usize> {
        self.index.get(&canonical_form(m).0).copied()
    }

    /// Moves (in the seed's names) leading from the seed to a diagram
    /// isomorphic to member `i`, with that isomorphism.
    pub fn path_from_seed(&self, i: usize, opts: &MoveOptions) -> Result<(Vec<MoveRecord>, CoxeterMatrix, DiagramIso), MoveError> {
        let mut w = Walker {
            diagram: self.seeds[0].clone(),
            to_canon: self.seed_iso.clone(),
            moves: Vec::new(),
            opts,
        };
        let mut c = i;
        let mut chain = Vec::new();
        while let Some(e) = &self.tree[c] {
            chain.push(e);
            c = e.parent;
        }
        for e in chain.into_iter().rev() {
            w.forward(e)?;
        }
        Ok((w.moves, w.diagram, w.to_canon))
    }

    /// Replays the tree path to member `i` and checks that it lands on it.
    pub fn verify_member(&self, i: usize, opts: &MoveOptions) -> Result<bool, MoveError> {
        let (_, d, iso) = self.path_from_seed(i, opts)?;
        Ok(iso.is_isomorphism(&d, &self.members[i]))
    }

    /// Graphviz rendering: one node per member labeled by a hash of its
    /// serialization, one undirected edge per pair of distinct members joined
    /// by a twist (twists are involutive).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph twist_class {\n");
        for (i, m) in self.members.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", diagram_hash(m));
        }
        let mut seen = HashSet::new();
        for (a, b, rec) in &self.edges {
            let key = ((*a).min(*b), (*a).max(*b));
            if a != b && seen.insert(key) {
                let kind = serde_json::to_value(rec.kind()).expect("serializable");
                let _ = writeln!(out, "  n{} -- n{} [label={kind}];", key.0, key.1);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// First 12 hex digits of the SHA-256 of the serialized diagram.
pub fn diagram_hash(m: &CoxeterMatrix) -> String {
    let digest = Sha256::digest(m.serialize().as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Moves plus a final bijection: replaying `moves` on the source and renaming
/// by `final_iso` gives the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub moves: Vec<MoveRecord>,
    pub final_iso: DiagramIso,
}

impl Certificate {
    /// Replays the moves (without the final renaming).
    pub fn replay(&self, source: &CoxeterMatrix, opts: &MoveOptions) -> Result<CoxeterMatrix, MoveError> {
        self.moves
            .iter()
            .try_fold(source.clone(), |d, rec| apply_record(&d, rec, opts))
    }

    pub fn verify(&self, source: &CoxeterMatrix, target: &CoxeterMatrix, opts: &MoveOptions) -> bool {
        self.replay(source, opts)
            .is_ok_and(|d| self.final_iso.is_isomorphism(&d, target))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent(Certificate),
    NotEquivalent,
    /// The search hit the cap before deciding.
    Unknown,
}

/// Bidirectional search between the twist classes of `m` and `m2`.
pub fn twist_equivalent(
    m: &CoxeterMatrix,
    m2: &CoxeterMatrix,
    cap: usize,
    opts: &MoveOptions,
) -> Result<Equivalence, MoveError> {
    if m.rank() != m2.rank() || m.label_multiset() != m2.label_multiset() {
        return Ok(Equivalence::NotEquivalent);
    }
    let (c1, i1) = canonical_form(m);
    let (c2, i2) = canonical_form(m2);
    let mut a = Tree::new(c1);
    let mut b = Tree::new(c2);
    let mut meet = a.index.get(&b.members[0]).map(|&x| (x, 0));
    let mut room = cap.saturating_sub(2);
    while meet.is_none() {
        if a.closed() || b.closed() {
            return Ok(Equivalence::NotEquivalent);
        }
        let from_a = a.members.len() <= b.members.len();
        let (grow, other) = if from_a { (&mut a, &b) } else { (&mut b, &a) };
        let mut found = None;
        let done = grow.expand_next(opts, &mut room, |c, d| {
            found = other.index.get(d).map(|&o| (c, o));
            found.is_none()
        })?;
        if let Some((c, o)) = found {
            meet = Some(if from_a { (c, o) } else { (o, c) });
        } else if !done {
            return Ok(Equivalence::Unknown);
        }
    }
    let (xa, xb) = meet.expect("loop exits on a meeting");

    let mut w = Walker {
        diagram: m.clone(),
        to_canon: i1,
        moves: Vec::new(),
        opts,
    };
    for c in a.path(xa) {
        w.forward(a.tree[c].as_ref().expect("non-root"))?;
    }
    for c in b.path(xb).into_iter().rev() {
        w.backward(b.tree[c].as_ref().expect("non-root"))?;
    }
    let final_iso = w
        .to_canon
        .then(&i2.inverse())
        .ok_or_else(|| MoveError::ReplayMismatch("final isomorphism".into()))?;
    let cert = Certificate {
        moves: w.moves,
        final_iso,
    };
    if !cert.verify(m, m2, opts) {
        return Err(MoveError::ReplayMismatch("certificate does not replay".into()));
    }
    Ok(Equivalence::Equivalent(cert))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum Answer {
    Isomorphic(Certificate),
    NotIsomorphic,
    ConditionallyIsomorphic(Certificate),
    ConditionallyNotIsomorphic,
    Inconclusive(String),
}

/// Coarse class of an answer, ignoring certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnswerClass {
    Isomorphic,
    NotIsomorphic,
    ConditionallyIsomorphic,
    ConditionallyNotIsomorphic,
    Inconclusive,
}

impl Answer {
    pub fn class(&self) -> AnswerClass {
        match self {
            Answer::Isomorphic(_) => AnswerClass::Isomorphic,
            Answer::NotIsomorphic => AnswerClass::NotIsomorphic,
            Answer::ConditionallyIsomorphic(_) => AnswerClass::ConditionallyIsomorphic,
            Answer::ConditionallyNotIsomorphic => AnswerClass::ConditionallyNotIsomorphic,
            Answer::Inconclusive(_) => AnswerClass::Inconclusive,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Answer::Isomorphic(c) | Answer::ConditionallyIsomorphic(c) => Some(c),
            _ => None,
        }
    }
}

/// Which inputs have no subdiagram of type A3, C3 or H3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precondition {
    pub first: bool,
    pub second: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub unconditional: bool,
    pub precondition: Precondition,
}

/// True when `m` has no subdiagram of type A3, C3 or H3.
pub fn rigidity_precondition(m: &CoxeterMatrix) -> bool {
    !has_subdiagram_of_type(m, &[a3(), b3(), h3()])
}

/// Reduces both diagrams and searches for a twist path between the results.
/// The certificate starts with the reductions of `m` and ends on the reduced
/// reduction of `m2` (which is recomputed deterministically when checking).
pub fn decide_isomorphism(m: &CoxeterMatrix, m2: &CoxeterMatrix, cap: usize, opts: &MoveOptions) -> Verdict {
    let precondition = Precondition {
        first: rigidity_precondition(m),
        second: rigidity_precondition(m2),
    };
    let unconditional = precondition.first || precondition.second;
    let inconclusive = |reason: String| Verdict {
        answer: Answer::Inconclusive(reason),
        unconditional: false,
        precondition,
    };
    let (r1, trace) = match reduced_reduction(m, opts) {
        Ok(x) => x,
        Err(e) => return inconclusive(format!("reducing the first diagram: {e}")),
    };
    let (r2, _) = match reduced_reduction(m2, opts) {
        Ok(x) => x,
        Err(e) => return inconclusive(format!("reducing the second diagram: {e}")),
    };
    let answer = match twist_equivalent(&r1, &r2, cap, opts) {
        Ok(Equivalence::Equivalent(c)) => {
            let cert = Certificate {
                moves: trace.into_iter().chain(c.moves).collect(),
                final_iso: c.final_iso,
            };
            if unconditional {
                Answer::Isomorphic(cert)
            } else {
                Answer::ConditionallyIsomorphic(cert)
            }
        }
        Ok(Equivalence::NotEquivalent) if unconditional => Answer::NotIsomorphic,
        Ok(Equivalence::NotEquivalent) => Answer::ConditionallyNotIsomorphic,
        Ok(Equivalence::Unknown) => return inconclusive(format!("twist search exceeded the cap of {cap} diagrams")),
        Err(e) => return inconclusive(e.to_string()),
    };
    Verdict {
        answer,
        unconditional,
        precondition,
    }
}

/// Checks an isomorphism certificate: replaying it on `m` must land on the
/// reduced reduction of `m2`.
pub fn verify_certificate(cert: &Certificate, m: &CoxeterMatrix, m2: &CoxeterMatrix, opts: &MoveOptions) -> bool {
    reduced_reduction(m2, opts).is_ok_and(|(r2, _)| cert.verify(m, &r2, opts))
}

/// Convenience: an isomorphism between two reduced diagrams, if any.
pub fn reduced_isomorphism(m: &CoxeterMatrix, m2: &CoxeterMatrix, opts: &MoveOptions) -> Result<Option<DiagramIso>, MoveError> {
    let (r1, _) = reduced_reduction(m, opts)?;
    let (r2, _) = reduced_reduction(m2, opts)?;
    Ok(find_isomorphism(&r1, &r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    const PATH: &str = "vertices s1 s2 s3 s4\nedge s1 s2 3\nedge s2 s3 3\nedge s3 s4 3\nedge s1 s3 inf\nedge s1 s4 inf\nedge s2 s4 inf";
    const STAR: &str = "vertices s1 s2 s3 s4\nedge s1 s2 3\nedge s2 s3 3\nedge s2 s4 3\nedge s1 s3 inf\nedge s1 s4 inf\nedge s3 s4 inf";

    fn opts() -> MoveOptions {
        MoveOptions::default()
    }

    #[test]
    fn class_of_dihedral_is_trivial() {
        let m = parse_diagram("vertices a b\nedge a b 3").unwrap();
        let c = twist_class(&m, DEFAULT_CAP, &opts()).unwrap();
        assert_eq!(c.len(), 1);
        assert!(!c.truncated);
    }

    #[test]
    fn path_class_contains_star() {
        let path = parse_diagram(PATH).unwrap();
        let star = parse_diagram(STAR).unwrap();
        let c = twist_class(&path, DEFAULT_CAP, &opts()).unwrap();
        assert!(c.len() >= 2);
        let i = c.position(&star).unwrap();
        assert!((0..c.len()).all(|k| c.verify_member(k, &opts()).unwrap()));
        let (moves, d, iso) = c.path_from_seed(i, &opts()).unwrap();
        assert!(!moves.is_empty());
        assert!(iso.is_isomorphism(&d, &c.members[i]));
        assert!(c.to_dot().starts_with("graph twist_class"));
    }

    #[test]
    fn truncation_is_reported() {
        let path = parse_diagram(PATH).unwrap();
        let c = twist_class(&path, 1, &opts()).unwrap();
        assert!(c.truncated);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn path_and_star_are_equivalent() {
        let path = parse_diagram(PATH).unwrap();
        let star = parse_diagram(STAR).unwrap();
        let Equivalence::Equivalent(cert) = twist_equivalent(&path, &star, DEFAULT_CAP, &opts()).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(cert.moves.len(), 1);
        assert!(cert.verify(&path, &star, &opts()));
        let Equivalence::Equivalent(back) = twist_equivalent(&star, &path, DEFAULT_CAP, &opts()).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(back.verify(&star, &path, &opts()));
    }

    #[test]
    fn relabeling_needs_no_moves() {
        let path = parse_diagram(PATH).unwrap();
        let p = path.permuted(&[3, 1, 0, 2]);
        let Equivalence::Equivalent(cert) = twist_equivalent(&path, &p, DEFAULT_CAP, &opts()).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.moves.is_empty());
        assert!(cert.final_iso.is_isomorphism(&path, &p));
    }

    #[test]
    fn multiset_rejection() {
        let a = parse_diagram("vertices a b\nedge a b 3").unwrap();
        let b = parse_diagram("vertices a b\nedge a b 4").unwrap();
        assert_eq!(twist_equivalent(&a, &b, 10, &opts()).unwrap(), Equivalence::NotEquivalent);
    }

    #[test]
    fn verdicts() {
        let i6 = parse_diagram("vertices a b\nedge a b 6").unwrap();
        let i3a1 = parse_diagram("vertices x y z\nedge x y 3").unwrap();
        let v = decide_isomorphism(&i6, &i3a1, DEFAULT_CAP, &opts());
        assert!(v.unconditional);
        let Answer::Isomorphic(cert) = &v.answer else {
            panic!("{v:?}");
        };
        assert!(verify_certificate(cert, &i6, &i3a1, &opts()));

        let i3 = parse_diagram("vertices a b\nedge a b 3").unwrap();
        let v = decide_isomorphism(&i3, &i6, DEFAULT_CAP, &opts());
        assert_eq!(v.answer, Answer::NotIsomorphic);

        let h3 = parse_diagram("vertices a b c\nedge a b 5\nedge b c 3").unwrap();
        let v = decide_isomorphism(&h3, &h3, DEFAULT_CAP, &opts());
        assert!(!v.unconditional);
        assert_eq!(v.answer.class(), AnswerClass::ConditionallyIsomorphic);

        let json = serde_json::to_string(&decide_isomorphism(&i6, &i3a1, DEFAULT_CAP, &opts())).unwrap();
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back.answer.class(), AnswerClass::Isomorphic);
    }
}
