//! Property checks shared by the proptest suites and the acceptance run.
//! Each returns `Err` with a description of the counterexample.

use coxiso::classify::spherical_subsets;
use coxiso::explorer::{decide_isomorphism, verify_certificate, AnswerClass};
use coxiso::{
    admissible_pairs, apply_twist, canonical_form, find_isomorphism, opposition_involution, CoxeterMatrix,
    ExactRep, MoveOptions,
};
use proptest::prelude::*;

use super::{diagram, pairs, INF};

pub const LABELS: [u32; 6] = [2, 3, 4, 5, 6, INF];

/// Diagrams on `s1..sn` with `n` in `ranks` and labels from `LABELS`.
pub fn diagrams(ranks: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CoxeterMatrix> {
    ranks.prop_flat_map(|n| {
        proptest::collection::vec(proptest::sample::select(LABELS.to_vec()), n * (n - 1) / 2).prop_map(move |ls| {
            let edges: Vec<_> = pairs(n)
                .into_iter()
                .zip(ls)
                .filter(|&(_, l)| l != 2)
                .map(|((i, j), l)| (i, j, l))
                .collect();
            diagram(n, &edges)
        })
    })
}

/// Right-angled diagrams (labels 2 and ∞ only).
pub fn right_angled(ranks: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CoxeterMatrix> {
    ranks.prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let edges: Vec<_> = pairs(n)
                .into_iter()
                .zip(bits)
                .filter(|&(_, b)| b)
                .map(|((i, j), _)| (i, j, INF))
                .collect();
            diagram(n, &edges)
        })
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The `pick`-th nontrivial admissible pair, if any.
fn some_pair(m: &CoxeterMatrix, pick: usize) -> Option<coxiso::AdmissiblePair> {
    let ps: Vec<_> = admissible_pairs(m, 16)
        .unwrap()
        .into_iter()
        .filter(|p| p.is_nontrivial(m))
        .collect();
    (!ps.is_empty()).then(|| ps[pick % ps.len()])
}

pub fn twist_preserves_multiset(m: &CoxeterMatrix, pick: usize) -> Result<(), String> {
    let Some(p) = some_pair(m, pick) else { return Ok(()) };
    let (out, _) = apply_twist(m, &p, &MoveOptions::default()).map_err(|e| e.to_string())?;
    ensure(out.rank() == m.rank() && out.label_multiset() == m.label_multiset(), || {
        format!("{m:?} twisted to {out:?}")
    })
}

pub fn twist_is_reversible(m: &CoxeterMatrix, pick: usize) -> Result<(), String> {
    let Some(p) = some_pair(m, pick) else { return Ok(()) };
    let opts = MoveOptions::default();
    let (out, _) = apply_twist(m, &p, &opts).map_err(|e| e.to_string())?;
    let (back, _) = apply_twist(&out, &p, &opts).map_err(|e| e.to_string())?;
    ensure(&back == m, || format!("{m:?} -> {out:?} -> {back:?}"))
}

pub fn canonical_form_is_idempotent(m: &CoxeterMatrix, perm: &[usize]) -> Result<(), String> {
    let (c, iso) = canonical_form(m);
    ensure(canonical_form(&c).0 == c, || format!("not idempotent on {m:?}"))?;
    ensure(iso.is_isomorphism(m, &c), || format!("bad canonical map for {m:?}"))?;
    let p = m.permuted(perm);
    ensure(canonical_form(&p).0 == c, || format!("permutation changed the canonical form of {m:?}"))?;
    let f = find_isomorphism(m, &p).ok_or_else(|| format!("no isomorphism onto a permutation of {m:?}"))?;
    ensure(f.is_isomorphism(m, &p), || "returned map is not an isomorphism".into())
}

pub fn form_is_invariant(m: &CoxeterMatrix) -> Result<(), String> {
    let rep = ExactRep::new(m).map_err(|e| e.to_string())?;
    for i in 0..m.rank() {
        let g = rep.generator_matrix(i);
        ensure(rep.preserves_form(g), || format!("generator {i} moves the form of {m:?}"))?;
        ensure(g.mul(g).is_identity(), || format!("generator {i} of {m:?} is not an involution"))?;
    }
    Ok(())
}

pub fn longest_element_is_involution(m: &CoxeterMatrix, pick: usize) -> Result<(), String> {
    let subsets = spherical_subsets(m, m.rank());
    let j = subsets[pick % subsets.len()];
    let rep = ExactRep::new(m).map_err(|e| e.to_string())?;
    let rho = rep.longest_element(j).map_err(|e| e.to_string())?;
    ensure(rep.mul(&rho, &rho).is_identity(), || format!("rho^2 != 1 for {:?} in {m:?}", m.set_names(j)))?;
    let opp = opposition_involution(m, j).map_err(|e| e.to_string())?;
    for i in j.iter() {
        let conj = rep.conjugate(&rho, &rep.generator(i));
        ensure(conj == rep.generator(opp.apply(i)), || {
            format!("rho s{} rho disagrees with the opposition table in {m:?}", i + 1)
        })?;
    }
    Ok(())
}

/// Twists `m` along a few pairs, relabels, and asks for a verdict; the
/// certificate must replay and the reverse question must get the same class.
pub fn certificate_replays(m: &CoxeterMatrix, picks: &[usize], perm: &[usize], cap: usize) -> Result<(), String> {
    let opts = MoveOptions::default();
    let mut m2 = m.clone();
    for &pick in picks {
        if let Some(p) = some_pair(&m2, pick) {
            m2 = apply_twist(&m2, &p, &opts).map_err(|e| e.to_string())?.0;
        }
    }
    let m2 = m2.permuted(perm);
    let v = decide_isomorphism(m, &m2, cap, &opts);
    ensure(v.answer.class() != AnswerClass::Inconclusive, || format!("inconclusive on {m:?} vs {m2:?}: {:?}", v.answer))?;
    let cert = v
        .answer
        .certificate()
        .ok_or_else(|| format!("twist-equivalent inputs judged non-isomorphic: {m:?} vs {m2:?}"))?;
    ensure(verify_certificate(cert, m, &m2, &opts), || format!("certificate fails to replay: {m:?} vs {m2:?}"))?;
    let w = decide_isomorphism(&m2, m, cap, &opts);
    ensure(w.answer.class() == v.answer.class(), || format!("asymmetric verdict on {m:?} vs {m2:?}"))
}
