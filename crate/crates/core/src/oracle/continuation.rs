//! Odd components, finite continuations and graph factors.

use super::OracleError;
use crate::classify::{self, b3, d4, has_subdiagram_of_type, spherical_subsets};
use crate::diagram::{CoxeterMatrix, Label, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OddData {
    /// Vertices joined to `s` by a path of odd labels.
    pub odd: VertexSet,
    /// `odd` plus every vertex with a finite label to some member of `odd`.
    pub eodd: VertexSet,
    /// Component of `M_eodd` containing `s`.
    pub j_s: VertexSet,
    /// Union of the spherical components of `M_eodd` avoiding `s`.
    pub k_s: VertexSet,
}

fn is_odd(l: Label) -> bool {
    matches!(l, Label::Finite(k) if k % 2 == 1)
}

pub fn odd_data(m: &CoxeterMatrix, s: &str) -> Result<OddData, OracleError> {
    let si = m.index_of(s).ok_or_else(|| OracleError::UnknownVertex(s.to_string()))?;
    Ok(odd_data_at(m, si))
}

pub(crate) fn odd_data_at(m: &CoxeterMatrix, si: usize) -> OddData {
    let odd = m
        .components_by(m.vertex_set(), is_odd)
        .into_iter()
        .find(|c| c.contains(si))
        .expect("every vertex lies in a component");
    let eodd: VertexSet = (0..m.rank())
        .filter(|&t| odd.contains(t) || odd.iter().any(|u| m.label(t, u).is_finite()))
        .collect();
    let mut j_s = VertexSet::EMPTY;
    let mut k_s = VertexSet::EMPTY;
    for comp in m.components_within(eodd) {
        if comp.contains(si) {
            j_s = comp;
        } else if classify::is_spherical_unchecked(m, comp) {
            k_s = k_s.union(comp);
        }
    }
    OddData { odd, eodd, j_s, k_s }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteContinuation {
    /// Generators of the parabolic subgroup equal to `FC(s)`.
    pub generators: VertexSet,
    pub j_s_spherical: bool,
    /// `K_s` empty and `J_s` non-spherical: `s` is a reflection for every
    /// Coxeter generating set.
    pub reflection_rigid: bool,
}

/// `FC(s)` for diagrams without subdiagrams of type C3 or D4. Other diagrams
/// are refused.
pub fn finite_continuation(m: &CoxeterMatrix, s: &str) -> Result<FiniteContinuation, OracleError> {
    if has_subdiagram_of_type(m, &[b3()]) {
        return Err(OracleError::PreconditionViolated("C3".into()));
    }
    if has_subdiagram_of_type(m, &[d4()]) {
        return Err(OracleError::PreconditionViolated("D4".into()));
    }
    let d = odd_data(m, s)?;
    let si = m.index_of(s).expect("checked by odd_data");
    let j_s_spherical = classify::is_spherical_unchecked(m, d.j_s);
    let generators = if j_s_spherical {
        d.j_s.union(d.k_s)
    } else {
        d.k_s.with(si)
    };
    Ok(FiniteContinuation {
        generators,
        j_s_spherical,
        reflection_rigid: d.k_s.is_empty() && !j_s_spherical,
    })
}

/// Spherical `J` such that each outside vertex commutes with all of `J` or
/// has infinite labels to all of `J`.
pub fn is_graph_factor(m: &CoxeterMatrix, j: VertexSet) -> bool {
    !j.is_empty()
        && j.is_subset(m.vertex_set())
        && classify::is_spherical_unchecked(m, j)
        && m.vertex_set().difference(j).iter().all(|t| {
            j.iter().all(|x| m.label(t, x) == Label::TWO)
                || j.iter().all(|x| m.label(t, x).is_infinite())
        })
}

pub fn graph_factors(m: &CoxeterMatrix) -> Vec<VertexSet> {
    spherical_subsets(m, m.rank())
        .into_iter()
        .filter(|&j| is_graph_factor(m, j))
        .collect()
}
