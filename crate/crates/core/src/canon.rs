//! Label-preserving isomorphisms and canonical forms of Coxeter diagrams.
//!
//! The canonical form is found by individualization/refinement: colors are
//! refined by the multiset of (neighbor color, label) pairs until stable,
//! non-singleton cells are split by individualizing each member in turn, and
//! the lexicographically least upper-triangle encoding over all leaves wins.
//! Members of a cell that are twins (identical label rows) lead to isomorphic
//! subtrees, so only one of them is tried.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagram::{CoxeterMatrix, Label};

/// A vertex bijection between two diagrams, by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiagramIso {
    pub map: BTreeMap<String, String>,
}

impl DiagramIso {
    pub fn identity(m: &CoxeterMatrix) -> DiagramIso {
        DiagramIso {
            map: m.names().iter().map(|n| (n.clone(), n.clone())).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.map.get(name).map(String::as_str)
    }

    pub fn inverse(&self) -> DiagramIso {
        DiagramIso {
            map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &DiagramIso) -> Option<DiagramIso> {
        let mut map = BTreeMap::new();
        for (a, b) in &self.map {
            map.insert(a.clone(), other.map.get(b)?.clone());
        }
        Some(DiagramIso { map })
    }

    /// True when this is a bijection `src -> dst` preserving every label.
    pub fn is_isomorphism(&self, src: &CoxeterMatrix, dst: &CoxeterMatrix) -> bool {
        if src.rank() != dst.rank() || self.map.len() != src.rank() {
            return false;
        }
        let mut image = Vec::with_capacity(src.rank());
        for name in src.names() {
            match self.get(name).and_then(|t| dst.index_of(t)) {
                Some(j) => image.push(j),
                None => return false,
            }
        }
        let mut seen = vec![false; dst.rank()];
        for &j in &image {
            if std::mem::replace(&mut seen[j], true) {
                return false;
            }
        }
        (0..src.rank()).all(|i| {
            (i + 1..src.rank()).all(|j| src.label(i, j) == dst.label(image[i], image[j]))
        })
    }

    /// Renames the vertices of `m` through the map.
    pub fn apply(&self, m: &CoxeterMatrix) -> Option<CoxeterMatrix> {
        let names: Option<Vec<String>> = m.names().iter().map(|n| self.map.get(n).cloned()).collect();
        let names = names?;
        let mut out = CoxeterMatrix::new(names).ok()?;
        for (i, j, l) in m.edges() {
            out.set_label(i, j, l);
        }
        Some(out)
    }
}

/// Name of the `k`-th vertex of a canonical copy.
pub fn canonical_name(k: usize) -> String {
    format!("v{k}")
}

struct Search<'a> {
    n: usize,
    codes: &'a [u32],
    best: Option<(Vec<u32>, Vec<usize>)>,
}

impl Search<'_> {
    fn code(&self, i: usize, j: usize) -> u32 {
        self.codes[i * self.n + j]
    }

    fn refine(&self, colors: &mut [u32]) {
        let n = self.n;
        let mut classes = distinct(colors);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
                .map(|i| {
                    let mut nb: Vec<(u32, u32)> = (0..n)
                        .filter(|&j| j != i && self.code(i, j) != 2)
                        .map(|j| (colors[j], self.code(i, j)))
                        .collect();
                    nb.sort_unstable();
                    (colors[i], nb)
                })
                .collect();
            let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            for (i, sig) in sigs.iter().enumerate() {
                colors[i] = sorted.binary_search(&sig).unwrap() as u32;
            }
            let now = sorted.len();
            if now == classes {
                break;
            }
            classes = now;
        }
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        (0..self.n).all(|w| w == u || w == v || self.code(u, w) == self.code(v, w))
    }

    fn run(&mut self, mut colors: Vec<u32>) {
        self.refine(&mut colors);
        let n = self.n;
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let Some(cell) = (0..n as u32).find(|&c| counts[c as usize] > 1) else {
            let mut order = vec![0usize; n];
            for (v, &c) in colors.iter().enumerate() {
                order[c as usize] = v;
            }
            let mut enc = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for a in 0..n {
                for b in a + 1..n {
                    enc.push(self.code(order[a], order[b]));
                }
            }
            if self.best.as_ref().is_none_or(|(b, _)| enc < *b) {
                self.best = Some((enc, order));
            }
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == cell).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(x, &c)| 2 * c + u32::from(c == cell && x != v))
                .collect();
            self.run(next);
        }
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Vertex order (old index per canonical position) of the canonical copy.
pub(crate) fn canonical_order(m: &CoxeterMatrix) -> Vec<usize> {
    let n = m.rank();
    if n == 0 {
        return Vec::new();
    }
    let mut codes = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                codes[i * n + j] = m.label(i, j).code();
            }
        }
    }
    let mut search = Search {
        n,
        codes: &codes,
        best: None,
    };
    search.run(vec![0; n]);
    search.best.expect("search visits at least one leaf").1
}

/// Canonically relabeled copy (vertices `v0..`) plus the bijection from the
/// input's names onto the copy's names.
pub fn canonical_form(m: &CoxeterMatrix) -> (CoxeterMatrix, DiagramIso) {
    let order = canonical_order(m);
    let n = m.rank();
    let mut labels = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let l = m.label(order[a], order[b]);
            if l != Label::TWO {
                labels.insert((a, b), l);
            }
        }
    }
    let copy = CoxeterMatrix::from_parts((0..n).map(canonical_name).collect(), labels);
    let iso = DiagramIso {
        map: order
            .iter()
            .enumerate()
            .map(|(pos, &old)| (m.name(old).to_string(), canonical_name(pos)))
            .collect(),
    };
    (copy, iso)
}

/// A label-preserving bijection `m -> m2`, verified before it is returned.
pub fn find_isomorphism(m: &CoxeterMatrix, m2: &CoxeterMatrix) -> Option<DiagramIso> {
    if m.rank() != m2.rank() || m.label_multiset() != m2.label_multiset() {
        return None;
    }
    let (c1, i1) = canonical_form(m);
    let (c2, i2) = canonical_form(m2);
    if c1 != c2 {
        return None;
    }
    let iso = i1.then(&i2.inverse())?;
    iso.is_isomorphism(m, m2).then_some(iso)
}
