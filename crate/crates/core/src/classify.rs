//! Recognition of irreducible spherical diagrams and the opposition
//! involution `j -> ρ_J j ρ_J` of each spherical type.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{CoxeterMatrix, Label, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("diagram is not connected")]
    NotConnected,
    #[error("vertex set is not contained in the diagram")]
    ForeignVertexSet,
    #[error("vertex set is not spherical")]
    NotSpherical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    /// `B_n = C_n`.
    B,
    D,
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    I2,
}

/// An irreducible spherical type. `I2(3)` and `I2(4)` are reported as `A2`
/// and `B2`; `parameter` is only set for `I2(m)`, `m >= 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphericalType {
    pub family: Family,
    pub rank: usize,
    pub parameter: Option<u32>,
}

impl SphericalType {
    fn new(family: Family, rank: usize) -> Self {
        SphericalType {
            family,
            rank,
            parameter: None,
        }
    }

    pub fn dihedral(m: u32) -> Self {
        match m {
            3 => SphericalType::new(Family::A, 2),
            4 => SphericalType::new(Family::B, 2),
            _ => SphericalType {
                family: Family::I2,
                rank: 2,
                parameter: Some(m),
            },
        }
    }

    /// Order of the Coxeter group of this type.
    pub fn group_order(&self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        let n = self.rank;
        match self.family {
            Family::A => fact(n + 1),
            Family::B => (1u128 << n) * fact(n),
            Family::D => (1u128 << (n - 1)) * fact(n),
            Family::E6 => 51_840,
            Family::E7 => 2_903_040,
            Family::E8 => 696_729_600,
            Family::F4 => 1_152,
            Family::H3 => 120,
            Family::H4 => 14_400,
            Family::I2 => 2 * u128::from(self.parameter.unwrap_or(2)),
        }
    }
}

impl fmt::Display for SphericalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::A => write!(f, "A{}", self.rank),
            Family::B => write!(f, "B{}", self.rank),
            Family::D => write!(f, "D{}", self.rank),
            Family::I2 => write!(f, "I2({})", self.parameter.unwrap_or(0)),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Permutation `j -> ρ_J j ρ_J` on a spherical subset, as a full-length
/// positional map (identity outside the subset).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Opposition {
    pub support: VertexSet,
    pub perm: Vec<usize>,
}

impl Opposition {
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Structural description of a connected component used by recognition.
struct Analysis {
    ty: SphericalType,
    /// Opposition pairs within the component (host indices).
    swaps: Vec<(usize, usize)>,
}

/// Path order of a component whose diagram is a path, starting at an end.
fn path_order(m: &CoxeterMatrix, comp: &[usize]) -> Option<Vec<usize>> {
    let deg = |v: usize| comp.iter().filter(|&&w| w != v && m.label(v, w) != Label::TWO).count();
    if comp.len() == 1 {
        return Some(comp.to_vec());
    }
    let start = *comp.iter().find(|&&v| deg(v) == 1)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = comp
            .iter()
            .copied()
            .find(|&w| w != cur && w != prev && m.label(cur, w) != Label::TWO);
        match next {
            Some(w) => {
                prev = cur;
                cur = w;
                order.push(w);
            }
            None => break,
        }
    }
    (order.len() == comp.len()).then_some(order)
}

fn analyze(m: &CoxeterMatrix, comp: &[usize]) -> Option<Analysis> {
    let n = comp.len();
    let mut edges = Vec::new();
    for (a, &u) in comp.iter().enumerate() {
        for &v in &comp[a + 1..] {
            match m.label(u, v) {
                Label::Infinity => return None,
                Label::Finite(2) => {}
                Label::Finite(l) => edges.push((u, v, l)),
            }
        }
    }
    if n == 1 {
        return Some(Analysis {
            ty: SphericalType::new(Family::A, 1),
            swaps: vec![],
        });
    }
    if edges.len() != n - 1 {
        return None;
    }
    if n == 2 {
        let (u, v, l) = edges[0];
        let ty = SphericalType::dihedral(l);
        let swaps = if l % 2 == 1 { vec![(u, v)] } else { vec![] };
        return Some(Analysis { ty, swaps });
    }
    let degree = |v: usize| edges.iter().filter(|e| e.0 == v || e.1 == v).count();
    let branch: Vec<usize> = comp.iter().copied().filter(|&v| degree(v) >= 3).collect();
    if branch.is_empty() {
        let order = path_order(m, comp)?;
        let labels: Vec<u32> = order
            .windows(2)
            .map(|w| m.label(w[0], w[1]).value().unwrap())
            .collect();
        let special: Vec<(usize, u32)> = labels
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, l)| l != 3)
            .collect();
        let at_end = |pos: usize| pos == 0 || pos == labels.len() - 1;
        let ty = match special.as_slice() {
            [] => {
                let swaps = (0..n / 2).map(|i| (order[i], order[n - 1 - i])).collect();
                return Some(Analysis {
                    ty: SphericalType::new(Family::A, n),
                    swaps,
                });
            }
            [(pos, 4)] if at_end(*pos) => SphericalType::new(Family::B, n),
            [(1, 4)] if n == 4 => SphericalType::new(Family::F4, 4),
            [(pos, 5)] if at_end(*pos) && n == 3 => SphericalType::new(Family::H3, 3),
            [(pos, 5)] if at_end(*pos) && n == 4 => SphericalType::new(Family::H4, 4),
            _ => return None,
        };
        return Some(Analysis { ty, swaps: vec![] });
    }
    if branch.len() != 1 || degree(branch[0]) != 3 || edges.iter().any(|e| e.2 != 3) {
        return None;
    }
    let center = branch[0];
    // Arms as vertex lists walking away from the branch point.
    let mut arms: Vec<Vec<usize>> = Vec::new();
    for &(u, v, _) in edges.iter().filter(|e| e.0 == center || e.1 == center) {
        let mut arm = vec![if u == center { v } else { u }];
        let mut prev = center;
        loop {
            let cur = *arm.last().unwrap();
            let next = comp
                .iter()
                .copied()
                .find(|&w| w != cur && w != prev && m.label(cur, w) != Label::TWO);
            match next {
                Some(w) => {
                    prev = cur;
                    arm.push(w);
                }
                None => break,
            }
        }
        arms.push(arm);
    }
    arms.sort_by_key(|a| a.len());
    let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
    match lens.as_slice() {
        [1, 1, c] => {
            let rank = c + 3;
            let swaps = if rank % 2 == 1 {
                vec![(arms[0][0], arms[1][0])]
            } else {
                vec![]
            };
            Some(Analysis {
                ty: SphericalType::new(Family::D, rank),
                swaps,
            })
        }
        [1, 2, 2] => Some(Analysis {
            ty: SphericalType::new(Family::E6, 6),
            swaps: vec![(arms[1][0], arms[2][0]), (arms[1][1], arms[2][1])],
        }),
        [1, 2, 3] => Some(Analysis {
            ty: SphericalType::new(Family::E7, 7),
            swaps: vec![],
        }),
        [1, 2, 4] => Some(Analysis {
            ty: SphericalType::new(Family::E8, 8),
            swaps: vec![],
        }),
        _ => None,
    }
}

/// Spherical type of a connected diagram, or `None` when its group is infinite.
pub fn recognize_irreducible(m: &CoxeterMatrix) -> Result<Option<SphericalType>, ClassifyError> {
    if m.rank() == 0 || !m.is_connected() {
        return Err(ClassifyError::NotConnected);
    }
    let comp: Vec<usize> = (0..m.rank()).collect();
    Ok(analyze(m, &comp).map(|a| a.ty))
}

/// Types of the components of `M_J` when every one is spherical.
pub fn spherical_components(
    m: &CoxeterMatrix,
    j: VertexSet,
) -> Result<Option<Vec<(VertexSet, SphericalType)>>, ClassifyError> {
    if !j.is_subset(m.vertex_set()) {
        return Err(ClassifyError::ForeignVertexSet);
    }
    let mut out = Vec::new();
    for comp in m.components_within(j) {
        let idx: Vec<usize> = comp.iter().collect();
        match analyze(m, &idx) {
            Some(a) => out.push((comp, a.ty)),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

pub fn is_spherical(m: &CoxeterMatrix, j: VertexSet) -> Result<bool, ClassifyError> {
    Ok(spherical_components(m, j)?.is_some())
}

pub(crate) fn is_spherical_unchecked(m: &CoxeterMatrix, j: VertexSet) -> bool {
    m.components_within(j).into_iter().all(|comp| {
        let idx: Vec<usize> = comp.iter().collect();
        analyze(m, &idx).is_some()
    })
}

pub fn opposition_involution(m: &CoxeterMatrix, j: VertexSet) -> Result<Opposition, ClassifyError> {
    if !j.is_subset(m.vertex_set()) {
        return Err(ClassifyError::ForeignVertexSet);
    }
    let mut perm: Vec<usize> = (0..m.rank()).collect();
    for comp in m.components_within(j) {
        let idx: Vec<usize> = comp.iter().collect();
        let a = analyze(m, &idx).ok_or(ClassifyError::NotSpherical)?;
        for (u, v) in a.swaps {
            perm[u] = v;
            perm[v] = u;
        }
    }
    Ok(Opposition { support: j, perm })
}

/// Nonempty spherical subsets with at most `max_rank` vertices. Sphericity
/// passes to subsets, so a depth-first search over increasing indices that
/// stops at the first non-spherical set reaches all of them.
pub fn spherical_subsets(m: &CoxeterMatrix, max_rank: usize) -> Vec<VertexSet> {
    fn go(m: &CoxeterMatrix, start: usize, cur: VertexSet, max: usize, out: &mut Vec<VertexSet>) {
        if cur.len() >= max {
            return;
        }
        for i in start..m.rank() {
            let next = cur.with(i);
            if is_spherical_unchecked(m, next) {
                out.push(next);
                go(m, i + 1, next, max, out);
            }
        }
    }
    let mut out = Vec::new();
    go(m, 0, VertexSet::EMPTY, max_rank, &mut out);
    out
}

/// True when some 3- or 4-subset of `m` induces one of the given types.
pub fn has_subdiagram_of_type(m: &CoxeterMatrix, types: &[SphericalType]) -> bool {
    let sizes: Vec<usize> = types.iter().map(|t| t.rank).collect();
    let n = m.rank();
    let mut found = false;
    for &size in sizes.iter().collect::<std::collections::BTreeSet<_>>() {
        for_each_subset(n, size, &mut |sub| {
            if found {
                return;
            }
            let comps = m.components_within(sub);
            if comps.len() != 1 {
                return;
            }
            let idx: Vec<usize> = sub.iter().collect();
            if let Some(a) = analyze(m, &idx) {
                if types.contains(&a.ty) {
                    found = true;
                }
            }
        });
    }
    found
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(VertexSet)) {
    fn go(start: usize, n: usize, k: usize, cur: VertexSet, f: &mut impl FnMut(VertexSet)) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            go(i + 1, n, k, cur.with(i), f);
        }
    }
    go(0, n, k, VertexSet::EMPTY, f);
}

pub fn a3() -> SphericalType {
    SphericalType::new(Family::A, 3)
}
pub fn b3() -> SphericalType {
    SphericalType::new(Family::B, 3)
}
pub fn h3() -> SphericalType {
    SphericalType::new(Family::H3, 3)
}
pub fn d4() -> SphericalType {
    SphericalType::new(Family::D, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    fn ty(text: &str) -> Option<String> {
        recognize_irreducible(&parse_diagram(text).unwrap())
            .unwrap()
            .map(|t| t.to_string())
    }

    #[test]
    fn recognizes_table() {
        assert_eq!(ty("vertices a b c\nedge a b 3\nedge b c 3").as_deref(), Some("A3"));
        assert_eq!(ty("vertices a b\nedge a b 7").as_deref(), Some("I2(7)"));
        assert_eq!(ty("vertices a b c\nedge a b 3\nedge b c inf"), None);
        assert_eq!(ty("vertices a b c\nedge a b 4\nedge b c 3").as_deref(), Some("B3"));
        assert_eq!(ty("vertices a b c\nedge a b 3\nedge b c 5").as_deref(), Some("H3"));
        assert_eq!(ty("vertices a b c\nedge a b 5\nedge b c 5"), None);
        assert_eq!(
            ty("vertices a b c d\nedge a b 3\nedge b c 4\nedge c d 3").as_deref(),
            Some("F4")
        );
        assert_eq!(
            ty("vertices a b c d\nedge a b 5\nedge b c 3\nedge c d 3").as_deref(),
            Some("H4")
        );
        assert_eq!(
            ty("vertices c x y z\nedge c x 3\nedge c y 3\nedge c z 3").as_deref(),
            Some("D4")
        );
        assert_eq!(ty("vertices a b c\nedge a b 3\nedge b c 3\nedge a c 3"), None);
        assert_eq!(ty("vertices a b\nedge a b 3").as_deref(), Some("A2"));
        assert_eq!(ty("vertices a b\nedge a b 4").as_deref(), Some("B2"));
        assert_eq!(ty("vertices a").as_deref(), Some("A1"));
        assert_eq!(
            ty("vertices c a1 a2 b1 b2 d\nedge c a1 3\nedge a1 a2 3\nedge c b1 3\nedge b1 b2 3\nedge c d 3")
                .as_deref(),
            Some("E6")
        );
    }

    #[test]
    fn not_connected_is_an_error() {
        let m = parse_diagram("vertices a b").unwrap();
        assert_eq!(recognize_irreducible(&m), Err(ClassifyError::NotConnected));
    }

    #[test]
    fn sphericity_of_subsets() {
        let path = parse_diagram("vertices s1 s2 s3 s4\nedge s1 s2 3\nedge s2 s3 3\nedge s3 s4 3\nedge s1 s3 inf\nedge s1 s4 inf\nedge s2 s4 inf").unwrap();
        assert!(is_spherical(&path, path.set_of(&["s2", "s3"]).unwrap()).unwrap());
        assert!(!is_spherical(&path, path.set_of(&["s1", "s3"]).unwrap()).unwrap());
        let d4 = parse_diagram("vertices c x y z\nedge c x 3\nedge c y 3\nedge c z 3").unwrap();
        assert!(is_spherical(&d4, d4.vertex_set()).unwrap());
        assert!(is_spherical(&d4, VertexSet::EMPTY).unwrap());
    }

    #[test]
    fn opposition_table_cases() {
        let a2 = parse_diagram("vertices a b\nedge a b 3").unwrap();
        let op = opposition_involution(&a2, a2.vertex_set()).unwrap();
        assert_eq!(op.perm, vec![1, 0]);
        let b2 = parse_diagram("vertices a b\nedge a b 4").unwrap();
        assert!(opposition_involution(&b2, b2.vertex_set()).unwrap().is_identity());
        let a1 = opposition_involution(&a2, VertexSet::singleton(0)).unwrap();
        assert!(a1.is_identity());
        let inf = parse_diagram("vertices a b\nedge a b inf").unwrap();
        assert_eq!(
            opposition_involution(&inf, inf.vertex_set()),
            Err(ClassifyError::NotSpherical)
        );
    }

    #[test]
    fn subdiagram_search() {
        let m = parse_diagram("vertices a b c d\nedge a b 3\nedge b c 5\nedge c d inf").unwrap();
        assert!(has_subdiagram_of_type(&m, &[a3(), b3(), h3()]));
        let m = parse_diagram("vertices a b c\nedge a b 3\nedge b c inf").unwrap();
        assert!(!has_subdiagram_of_type(&m, &[a3(), b3(), h3()]));
    }

    #[test]
    fn spherical_subset_enumeration() {
        let m = parse_diagram("vertices a b c\nedge a b 3\nedge b c inf").unwrap();
        let subs = spherical_subsets(&m, 8);
        let names: Vec<Vec<String>> = subs.iter().map(|&j| m.set_names(j)).collect();
        assert_eq!(subs.len(), 5);
        assert!(names.contains(&vec!["a".to_string(), "c".to_string()]));
        assert!(!names.iter().any(|n| n.len() == 3));
        assert_eq!(spherical_subsets(&m, 1).len(), 3);
    }

    #[test]
    fn group_orders() {
        assert_eq!(SphericalType::new(Family::A, 3).group_order(), 24);
        assert_eq!(SphericalType::new(Family::B, 3).group_order(), 48);
        assert_eq!(SphericalType::new(Family::D, 4).group_order(), 192);
        assert_eq!(SphericalType::dihedral(7).group_order(), 14);
    }
}
