//! Coxeter matrices over named vertices, the diagram file format, and the
//! basic subset operations (restriction, orthogonal complement, components).

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported rank. Vertex subsets are stored as 64-bit masks.
pub const MAX_RANK: usize = 64;

/// Off-diagonal entry of a Coxeter matrix: a finite order `m >= 2` or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Label {
    Finite(u32),
    Infinity,
}

impl Label {
    /// The commuting label `2`.
    pub const TWO: Label = Label::Finite(2);

    pub fn finite(m: u32) -> Option<Label> {
        (m >= 2).then_some(Label::Finite(m))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Label::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Label::Infinity)
    }

    /// `Some(m)` for finite labels.
    pub fn value(self) -> Option<u32> {
        match self {
            Label::Finite(m) => Some(m),
            Label::Infinity => None,
        }
    }

    /// Total order code used by canonical encodings (infinity sorts last).
    pub(crate) fn code(self) -> u32 {
        match self {
            Label::Finite(m) => m,
            Label::Infinity => u32::MAX,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Label::Infinity);
        }
        match s.parse::<u32>() {
            Ok(m) if m >= 2 => Ok(Label::Finite(m)),
            Ok(m) => Err(format!("label {m} is below 2")),
            Err(_) => Err(format!("invalid label `{s}` (expected an integer or `inf`)")),
        }
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for Label {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A set of vertex positions of one fixed matrix.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> VertexSet {
        assert!(n <= MAX_RANK);
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> VertexSet {
        VertexSet(1u64 << i)
    }

    pub fn from_bits(bits: u64) -> VertexSet {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_RANK && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn with(self, i: usize) -> VertexSet {
        VertexSet(self.0 | 1u64 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate vertex `{name}`")]
    DuplicateVertex { line: usize, name: String },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: explicit label 2 on edge {{{u}, {v}}} (label-2 pairs are implicit)")]
    ExplicitLabelTwo { line: usize, u: String, v: String },
    #[error("line {line}: unknown vertex `{name}`")]
    UnknownVertexAt { line: usize, name: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex set is not contained in the diagram")]
    ForeignVertexSet,
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("duplicate vertex `{0}`")]
    Duplicate(String),
    #[error("rank {0} exceeds the supported maximum of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("a loop {{{0}, {0}}} is not a valid edge")]
    SelfLoop(String),
}

/// A Coxeter matrix over an ordered list of distinct vertex names.
///
/// Only labels `>= 3` and `inf` are stored; every absent pair has label 2
/// and the diagonal is implicitly 1. Two matrices are equal when they have
/// the same vertex order and the same stored labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    names: Vec<String>,
    labels: BTreeMap<(usize, usize), Label>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, ',' | '{' | '}' | '/'))
        && name != "-"
}

impl CoxeterMatrix {
    /// All pairs commute (label 2).
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, DiagramError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_RANK {
            return Err(DiagramError::RankTooLarge(names.len()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(DiagramError::InvalidName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(DiagramError::Duplicate(n.clone()));
            }
        }
        Ok(CoxeterMatrix {
            names,
            labels: BTreeMap::new(),
        })
    }

    /// Builds a matrix from names and `(u, v, label)` triples.
    pub fn from_edges<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        edges: &[(&str, &str, Label)],
    ) -> Result<Self, DiagramError> {
        let mut m = CoxeterMatrix::new(names)?;
        for &(u, v, l) in edges {
            let i = m.index_of(u).ok_or_else(|| DiagramError::UnknownVertex(u.into()))?;
            let j = m.index_of(v).ok_or_else(|| DiagramError::UnknownVertex(v.into()))?;
            if i == j {
                return Err(DiagramError::SelfLoop(u.into()));
            }
            m.set_label(i, j, l);
        }
        Ok(m)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.rank())
    }

    /// Resolves names into a vertex set.
    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet, DiagramError> {
        names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| DiagramError::UnknownVertex(n.as_ref().to_string()))
            })
            .collect()
    }

    pub fn set_names(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|i| self.names[i].clone()).collect()
    }

    /// Label of the pair `{i, j}`, `i != j`.
    pub fn label(&self, i: usize, j: usize) -> Label {
        assert!(i != j, "diagonal entries are not labels");
        let key = if i < j { (i, j) } else { (j, i) };
        self.labels.get(&key).copied().unwrap_or(Label::TWO)
    }

    pub fn label_by_name(&self, u: &str, v: &str) -> Option<Label> {
        let i = self.index_of(u)?;
        let j = self.index_of(v)?;
        (i != j).then(|| self.label(i, j))
    }

    pub fn set_label(&mut self, i: usize, j: usize, label: Label) {
        assert!(i != j && i < self.rank() && j < self.rank());
        let key = if i < j { (i, j) } else { (j, i) };
        if label == Label::TWO {
            self.labels.remove(&key);
        } else {
            self.labels.insert(key, label);
        }
    }

    /// Stored (non-commuting) pairs `(i, j, label)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        self.labels.iter().map(|(&(i, j), &l)| (i, j, l))
    }

    /// Sorted multiset of all off-diagonal labels, label-2 pairs included.
    pub fn label_multiset(&self) -> Vec<Label> {
        let n = self.rank();
        let mut out: Vec<Label> = self.labels.values().copied().collect();
        let twos = n * n.saturating_sub(1) / 2 - out.len();
        out.extend(std::iter::repeat_n(Label::TWO, twos));
        out.sort();
        out
    }

    /// Distinct finite labels (2 included when any pair commutes).
    pub fn finite_labels(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.labels.values().filter_map(|l| l.value()).collect();
        out.push(2);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check_subset(&self, j: VertexSet) -> Result<(), DiagramError> {
        if j.is_subset(self.vertex_set()) {
            Ok(())
        } else {
            Err(DiagramError::ForeignVertexSet)
        }
    }

    /// Restriction `M_J`, keeping the host vertex order.
    pub fn subdiagram(&self, j: VertexSet) -> Result<CoxeterMatrix, DiagramError> {
        self.check_subset(j)?;
        let idx: Vec<usize> = j.iter().collect();
        let mut labels = BTreeMap::new();
        for (a, &u) in idx.iter().enumerate() {
            for (b, &v) in idx.iter().enumerate().skip(a + 1) {
                let l = self.label(u, v);
                if l != Label::TWO {
                    labels.insert((a, b), l);
                }
            }
        }
        Ok(CoxeterMatrix {
            names: idx.iter().map(|&i| self.names[i].clone()).collect(),
            labels,
        })
    }

    /// `J^⊥`: vertices outside `J` commuting with every vertex of `J`.
    pub fn perp(&self, j: VertexSet) -> Result<VertexSet, DiagramError> {
        self.check_subset(j)?;
        Ok(self.perp_unchecked(j))
    }

    pub(crate) fn perp_unchecked(&self, j: VertexSet) -> VertexSet {
        (0..self.rank())
            .filter(|&k| !j.contains(k) && j.iter().all(|x| self.label(k, x) == Label::TWO))
            .collect()
    }

    /// Connected components of the diagram (edges are labels `>= 3` and `inf`),
    /// ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(self.vertex_set())
    }

    /// Components of the subdiagram `M_J`, as subsets of the host.
    pub fn components_within(&self, j: VertexSet) -> Vec<VertexSet> {
        self.components_by(j, |l| l != Label::TWO)
    }

    /// Components of `J` under an arbitrary edge predicate on labels.
    pub(crate) fn components_by(&self, j: VertexSet, edge: impl Fn(Label) -> bool) -> Vec<VertexSet> {
        let mut remaining = j;
        let mut out = Vec::new();
        while let Some(start) = remaining.first() {
            let mut comp = VertexSet::singleton(start);
            let mut stack = vec![start];
            remaining.remove(start);
            while let Some(v) = stack.pop() {
                for w in remaining.iter() {
                    if edge(self.label(v, w)) {
                        comp.insert(w);
                        remaining.remove(w);
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Applies a positional permutation: vertex `i` of `self` becomes vertex
    /// `perm[i]` of the result (names travel with their vertices).
    pub fn permuted(&self, perm: &[usize]) -> CoxeterMatrix {
        assert_eq!(perm.len(), self.rank());
        let mut names = vec![String::new(); self.rank()];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.names[i].clone();
        }
        let mut out = CoxeterMatrix {
            names,
            labels: BTreeMap::new(),
        };
        for (i, j, l) in self.edges() {
            out.set_label(perm[i], perm[j], l);
        }
        out
    }

    /// Same labels with vertices renamed through `rename` (must be injective).
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Result<CoxeterMatrix, DiagramError> {
        let mut out = CoxeterMatrix::new(self.names.iter().map(|n| rename(n)))?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    pub(crate) fn from_parts(names: Vec<String>, labels: BTreeMap<(usize, usize), Label>) -> Self {
        CoxeterMatrix { names, labels }
    }

    /// Writes the diagram file format: vertices in matrix order, edges sorted
    /// by vertex position.
    pub fn serialize(&self) -> String {
        let mut out = String::from("vertices");
        for n in &self.names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
        for (i, j, l) in self.edges() {
            out.push_str(&format!("edge {} {} {}\n", self.names[i], self.names[j], l));
        }
        out
    }

    /// Parses the diagram file format.
    pub fn parse(text: &str) -> Result<CoxeterMatrix, DiagramError> {
        parse_diagram(text)
    }
}

impl fmt::Debug for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterMatrix[{}", self.names.join(" "))?;
        for (i, j, l) in self.edges() {
            write!(f, "; {}-{}:{}", self.names[i], self.names[j], l)?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Serialized as the diagram file text.
impl Serialize for CoxeterMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&CoxeterMatrix::serialize(self))
    }
}

impl<'de> Deserialize<'de> for CoxeterMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_diagram(&text).map_err(serde::de::Error::custom)
    }
}

impl FromStr for CoxeterMatrix {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_diagram(s)
    }
}

/// Tokens of a line with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..pos]));
                start = None;
            }
            (false, None) => start = Some(pos),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

/// Parses diagram-file text into a validated matrix.
pub fn parse_diagram(text: &str) -> Result<CoxeterMatrix, DiagramError> {
    let mut matrix: Option<CoxeterMatrix> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokens(raw);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        if keyword.starts_with('#') {
            continue;
        }
        let syntax = |column: usize, message: String| DiagramError::Syntax {
            line,
            column,
            message,
        };
        match keyword {
            "vertices" => {
                if matrix.is_some() {
                    return Err(syntax(col, "second `vertices` line".into()));
                }
                if toks.len() < 2 {
                    return Err(syntax(col, "`vertices` needs at least one name".into()));
                }
                let mut names: Vec<String> = Vec::new();
                for &(c, name) in &toks[1..] {
                    if !valid_name(name) {
                        return Err(syntax(c, format!("invalid vertex name `{name}`")));
                    }
                    if names.iter().any(|n| n == name) {
                        return Err(DiagramError::DuplicateVertex {
                            line,
                            name: name.into(),
                        });
                    }
                    names.push(name.into());
                }
                if names.len() > MAX_RANK {
                    return Err(DiagramError::RankTooLarge(names.len()));
                }
                matrix = Some(CoxeterMatrix {
                    names,
                    labels: BTreeMap::new(),
                });
            }
            "edge" => {
                let m = matrix
                    .as_mut()
                    .ok_or_else(|| syntax(col, "`edge` before the `vertices` line".into()))?;
                if toks.len() != 4 {
                    return Err(syntax(
                        col,
                        format!("`edge` takes 3 arguments, found {}", toks.len() - 1),
                    ));
                }
                let (u, v) = (toks[1].1, toks[2].1);
                let i = m.index_of(u).ok_or_else(|| DiagramError::UnknownVertexAt {
                    line,
                    name: u.into(),
                })?;
                let j = m.index_of(v).ok_or_else(|| DiagramError::UnknownVertexAt {
                    line,
                    name: v.into(),
                })?;
                if i == j {
                    return Err(syntax(toks[2].0, format!("loop on `{u}`")));
                }
                let label: Label = toks[3]
                    .1
                    .parse()
                    .map_err(|msg: String| syntax(toks[3].0, msg))?;
                if label == Label::TWO {
                    return Err(DiagramError::ExplicitLabelTwo {
                        line,
                        u: u.into(),
                        v: v.into(),
                    });
                }
                let key = (i.min(j), i.max(j));
                if m.labels.contains_key(&key) {
                    return Err(DiagramError::DuplicateEdge {
                        line,
                        u: u.into(),
                        v: v.into(),
                    });
                }
                m.labels.insert(key, label);
            }
            other => return Err(syntax(col, format!("unexpected `{other}`"))),
        }
    }
    matrix.ok_or(DiagramError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing `vertices` line".into(),
    })
}
