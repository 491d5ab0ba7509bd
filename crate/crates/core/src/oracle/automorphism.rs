//! Candidate automorphisms given by generator images, checked against the
//! Coxeter relations in the representation.

use std::collections::BTreeMap;

use super::continuation::{is_graph_factor, odd_data_at};
use super::rep::{GeometricRep, GroupElement, ProductOrder};
use super::scalar::RepScalar;
use super::OracleError;
use crate::diagram::{Label, VertexSet};

/// Orders tried when checking that an infinite label stays infinite.
const INFINITE_CHECK_BOUND: u32 = 64;

#[derive(Clone, Debug)]
pub struct AutomorphismSpec<T: RepScalar> {
    pub images: BTreeMap<String, GroupElement<T>>,
    pub verified: bool,
    /// Relations that failed; empty when `verified`.
    pub failures: Vec<String>,
}

fn divisors_below(m: u32) -> impl Iterator<Item = u32> {
    (1..m).filter(move |d| m.is_multiple_of(*d))
}

/// Checks the images (in vertex order) against the defining relations: each
/// image is a nontrivial involution, products have exactly the prescribed
/// finite orders, and no product over an infinite label has finite order.
pub fn verify_images<T: RepScalar>(
    rep: &GeometricRep<T>,
    images: Vec<GroupElement<T>>,
) -> AutomorphismSpec<T> {
    let m = rep.diagram();
    assert_eq!(images.len(), m.rank());
    let mut failures = Vec::new();
    for (i, g) in images.iter().enumerate() {
        if g.is_identity() || !g.matrix.mul(&g.matrix).is_identity() {
            failures.push(format!("image of {} is not an involution", m.name(i)));
        }
    }
    for i in 0..m.rank() {
        for j in i + 1..m.rank() {
            let p = images[i].matrix.mul(&images[j].matrix);
            match m.label(i, j) {
                Label::Finite(k) => {
                    let ok = p.pow(u64::from(k)).is_identity()
                        && divisors_below(k).all(|d| !p.pow(u64::from(d)).is_identity());
                    if !ok {
                        failures.push(format!(
                            "product of images of {} and {} does not have order {k}",
                            m.name(i),
                            m.name(j)
                        ));
                    }
                }
                Label::Infinity => {
                    let g = GroupElement { matrix: p, word: None };
                    if let ProductOrder::Finite(k) = rep.element_order(&g, INFINITE_CHECK_BOUND) {
                        failures.push(format!(
                            "product of images of {} and {} has finite order {k}",
                            m.name(i),
                            m.name(j)
                        ));
                    }
                }
            }
        }
    }
    AutomorphismSpec {
        images: m.names().iter().cloned().zip(images).collect(),
        verified: failures.is_empty(),
        failures,
    }
}

fn into_result<T: RepScalar>(auto: AutomorphismSpec<T>) -> Result<AutomorphismSpec<T>, OracleError> {
    if auto.verified {
        Ok(auto)
    } else {
        Err(OracleError::RelationFailed(auto.failures.join("; ")))
    }
}

fn index<T: RepScalar>(rep: &GeometricRep<T>, v: &str) -> Result<usize, OracleError> {
    rep.diagram()
        .index_of(v)
        .ok_or_else(|| OracleError::UnknownVertex(v.to_string()))
}

/// `θ_{s,z}`: `t ↦ tz` on the odd component of `s`, identity elsewhere.
/// `z` must be the identity or a central involution of `⟨K_s⟩`; when it is
/// not the identity, `θ(s) = sz` is also certified not to be a reflection.
pub fn build_transvection<T: RepScalar>(
    rep: &GeometricRep<T>,
    s: &str,
    z: &GroupElement<T>,
) -> Result<AutomorphismSpec<T>, OracleError> {
    let si = index(rep, s)?;
    let data = odd_data_at(rep.diagram(), si);
    if !z.is_identity() && !rep.center_of_spherical(data.k_s)?.contains(z) {
        return Err(OracleError::NotCentral);
    }
    let images: Vec<GroupElement<T>> = (0..rep.rank())
        .map(|t| {
            let g = rep.generator(t);
            if data.odd.contains(t) {
                rep.mul(&g, z)
            } else {
                g
            }
        })
        .collect();
    if !z.is_identity() && rep.is_reflection(&images[si]).is_some() {
        return Err(OracleError::RelationFailed(format!("{s}z is a reflection")));
    }
    into_result(verify_images(rep, images))
}

/// Extends an automorphism of `⟨J⟩` for a graph factor `J` by the identity.
/// Vertices of `J` missing from `images` are fixed.
pub fn build_local_automorphism<T: RepScalar>(
    rep: &GeometricRep<T>,
    j: VertexSet,
    images: &BTreeMap<String, GroupElement<T>>,
) -> Result<AutomorphismSpec<T>, OracleError> {
    let m = rep.diagram();
    if !is_graph_factor(m, j) {
        return Err(OracleError::NotGraphFactor);
    }
    let mut out: Vec<GroupElement<T>> = (0..m.rank()).map(|i| rep.generator(i)).collect();
    let mut members = None;
    for (name, img) in images {
        let i = index(rep, name)?;
        if !j.contains(i) {
            return Err(OracleError::ImageOutsideFactor(name.clone()));
        }
        let inside = match &img.word {
            Some(w) => w.iter().all(|&x| j.contains(x)),
            None => members
                .get_or_insert_with(|| rep.enumerate_subgroup(j, usize::MAX).elements)
                .contains(img),
        };
        if !inside {
            return Err(OracleError::ImageOutsideFactor(name.clone()));
        }
        out[i] = img.clone();
    }
    into_result(verify_images(rep, out))
}

/// The chain sets `Y_s`, `Y_t` of an angle-deformation.
pub(crate) fn deformation_chains<T: RepScalar>(
    rep: &GeometricRep<T>,
    si: usize,
    ti: usize,
) -> (VertexSet, VertexSet) {
    let m = rep.diagram();
    let st = VertexSet::singleton(si).with(ti);
    let y = m.vertex_set().difference(st).difference(m.perp_unchecked(st));
    let reach = |from: usize| {
        let mut found: VertexSet = y.iter().filter(|&v| m.label(from, v).is_finite()).collect();
        let mut stack: Vec<usize> = found.iter().collect();
        while let Some(v) = stack.pop() {
            for w in y.difference(found).iter() {
                if m.label(v, w).is_finite() {
                    found.insert(w);
                    stack.push(w);
                }
            }
        }
        found
    };
    (reach(si), reach(ti))
}

/// `δ_x`: conjugation by `x ∈ ⟨s,t⟩` on `Y_t ∪ {t}`, identity elsewhere.
pub fn build_angle_deformation<T: RepScalar>(
    rep: &GeometricRep<T>,
    s: &str,
    t: &str,
    x: &[&str],
) -> Result<AutomorphismSpec<T>, OracleError> {
    let m = rep.diagram();
    let si = index(rep, s)?;
    let ti = index(rep, t)?;
    let Label::Finite(order) = m.label(si, ti) else {
        return Err(OracleError::InfiniteLabel(s.into(), t.into()));
    };
    if x.iter().any(|v| *v != s && *v != t) {
        return Err(OracleError::NotDihedralGenerator);
    }
    let xe = rep.element(x)?;
    let gs = rep.generator(si);
    let xtx = rep.conjugate(&xe, &rep.generator(ti));
    if rep.order_of_product(&gs, &xtx, order)? != ProductOrder::Finite(order) {
        return Err(OracleError::NotDihedralGenerator);
    }
    let (ys, yt) = deformation_chains(rep, si, ti);
    let common = ys.intersection(yt);
    if !common.is_empty() {
        return Err(OracleError::ChainsIntersect(m.set_names(common)));
    }
    let moved = yt.with(ti);
    let images: Vec<GroupElement<T>> = (0..m.rank())
        .map(|r| {
            let g = rep.generator(r);
            if moved.contains(r) {
                rep.conjugate(&xe, &g)
            } else {
                g
            }
        })
        .collect();
    if images.iter().any(|g| rep.is_reflection(g).is_none()) {
        return Err(OracleError::RelationFailed("an image is not a reflection".into()));
    }
    into_result(verify_images(rep, images))
}
